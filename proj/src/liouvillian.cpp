#include "nkerr/liouvillian.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace nkerr {

Eigen::VectorXcd vectorize(const Eigen::MatrixXcd& m) {
    const Eigen::Index n = m.rows();
    Eigen::VectorXcd v(n * m.cols());
    for (Eigen::Index p = 0; p < n; ++p) {
        for (Eigen::Index q = 0; q < m.cols(); ++q) {
            v(p * m.cols() + q) = m(p, q);
        }
    }
    return v;
}

Eigen::MatrixXcd unvectorize(const Eigen::VectorXcd& v, int n_c) {
    if (v.size() != static_cast<Eigen::Index>(n_c) * n_c) {
        throw std::invalid_argument("vector length does not match n_c^2");
    }
    Eigen::MatrixXcd m(n_c, n_c);
    for (int p = 0; p < n_c; ++p) {
        for (int q = 0; q < n_c; ++q) {
            m(p, q) = v(static_cast<Eigen::Index>(p) * n_c + q);
        }
    }
    return m;
}

Superoperator assemble(const SparseComplexMatrix& hamiltonian,
                       const std::vector<JumpOp>& jumps) {
    if (!hamiltonian.is_square()) {
        throw std::invalid_argument("Hamiltonian must be square");
    }
    const Index d = hamiltonian.rows();
    for (const JumpOp& j : jumps) {
        if (!j.op.is_square() || j.op.rows() != d) {
            throw std::invalid_argument("jump operator dimension mismatch");
        }
    }
    const SparseComplexMatrix eye = SparseComplexMatrix::identity(d);
    const Complex minus_i(0.0, -1.0);

    SparseComplexMatrix sup = scale(
        sub(kron(hamiltonian, eye), kron(eye, hamiltonian.transpose())), minus_i);

    for (const JumpOp& j : jumps) {
        const SparseComplexMatrix gain = kron(j.op, j.op.conjugate());
        const SparseComplexMatrix ldl = matmul(j.op.adjoint(), j.op);
        const SparseComplexMatrix loss =
            add(kron(ldl, eye), kron(eye, ldl.transpose()));
        sup = add(sup, scale(sub(gain, scale(loss, Complex(0.5, 0.0))), Complex(j.rate, 0.0)));
    }

    return Superoperator{std::move(sup), static_cast<int>(d)};
}

Eigen::MatrixXcd apply(const Superoperator& sup, const DensityMatrix& rho) {
    if (rho.data.rows() != sup.n_c || rho.data.cols() != sup.n_c) {
        throw std::invalid_argument("density matrix does not match superoperator dimension");
    }
    const Eigen::VectorXcd v = vectorize(rho.data);
    std::vector<Complex> x(v.data(), v.data() + v.size());
    const std::vector<Complex> y = matvec(sup.matrix, x);
    Eigen::VectorXcd out(static_cast<Eigen::Index>(y.size()));
    for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = y[static_cast<std::size_t>(i)];
    return unvectorize(out, sup.n_c);
}

Complex expectation(const SparseComplexMatrix& obs, const DensityMatrix& rho) {
    if (obs.rows() != rho.data.rows() || obs.cols() != rho.data.cols()) {
        throw std::invalid_argument("observable does not match state dimension");
    }
    Complex tr(0.0, 0.0);
    for (const Entry& e : obs.entries()) {
        tr += e.value * rho.data(e.col, e.row);
    }
    return tr;
}

double photon_number(const DensityMatrix& rho) {
    const int n_c = static_cast<int>(rho.data.rows());
    return expectation(number_operator(FockCutoff(n_c)), rho).real();
}

bool is_physical(const DensityMatrix& rho, double tol_herm, double tol_trace,
                 double eig_floor) {
    const Eigen::MatrixXcd& r = rho.data;
    if ((r - r.adjoint()).cwiseAbs().maxCoeff() > tol_herm) return false;
    if (std::abs(r.trace() - Complex(1.0, 0.0)) > tol_trace) return false;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (r + r.adjoint()),
                                                       Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= eig_floor;
}

void export_coo(const Superoperator& sup, std::ostream& os) {
    os << "# liouvillian coordinate list: row col re im, dims "
       << sup.matrix.rows() << " x " << sup.matrix.cols() << ", nnz " << sup.matrix.nnz()
       << '\n';
    char line[128];
    for (const Entry& e : sup.matrix.entries()) {
        std::snprintf(line, sizeof(line), "%lld %lld %.17g %.17g\n",
                      static_cast<long long>(e.row), static_cast<long long>(e.col),
                      e.value.real(), e.value.imag());
        os << line;
    }
}

Eigen::MatrixXcd to_dense(const SparseComplexMatrix& m) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(m.rows(), m.cols());
    for (const Entry& e : m.entries()) out(e.row, e.col) = e.value;
    return out;
}

SparseComplexMatrix from_dense(const Eigen::MatrixXcd& m) {
    std::vector<Entry> entries;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (m(r, c) != Complex(0.0, 0.0)) entries.push_back({r, c, m(r, c)});
        }
    }
    return SparseComplexMatrix::from_triplets(m.rows(), m.cols(), std::move(entries));
}

}  // namespace nkerr
