#include "nkerr/spectra.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace nkerr {

namespace {

using SpMat = Eigen::SparseMatrix<Complex>;

SpMat to_eigen_sparse(const SparseComplexMatrix& m) {
    std::vector<Eigen::Triplet<Complex>> triplets;
    triplets.reserve(static_cast<std::size_t>(m.nnz()));
    for (const Entry& e : m.entries()) {
        triplets.emplace_back(static_cast<int>(e.row), static_cast<int>(e.col), e.value);
    }
    SpMat out(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
    out.setFromTriplets(triplets.begin(), triplets.end());
    out.makeCompressed();
    return out;
}

// Sorting key for the spectrum: ascending |Re|, then ascending Im, then Re.
bool spectral_less(const Complex& a, const Complex& b) {
    const double ra = std::abs(a.real());
    const double rb = std::abs(b.real());
    if (ra != rb) return ra < rb;
    if (a.imag() != b.imag()) return a.imag() < b.imag();
    return a.real() < b.real();
}

std::vector<std::size_t> sorted_order(const std::vector<Complex>& values) {
    std::vector<std::size_t> order(values.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return spectral_less(values[a], values[b]);
    });
    return order;
}

double pair_residual(const SpMat& a, const Eigen::VectorXcd& v, Complex lambda) {
    return (a * v - lambda * v).norm();
}

EigResult dense_eigs(const SparseComplexMatrix& block, int n_eigs) {
    const int dim = static_cast<int>(block.rows());
    EigResult out;
    if (dim == 0 || n_eigs == 0) {
        out.vectors.resize(dim, 0);
        return out;
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(to_dense(block), true);
    if (solver.info() != Eigen::Success) {
        throw SolverError("dense eigensolver failed to converge on a block of dimension " +
                          std::to_string(dim));
    }
    std::vector<Complex> values(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) values[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
    const auto order = sorted_order(values);

    const SpMat a = to_eigen_sparse(block);
    const int keep = std::min(n_eigs, dim);
    out.vectors.resize(dim, keep);
    for (int i = 0; i < keep; ++i) {
        const std::size_t src = order[static_cast<std::size_t>(i)];
        out.values.push_back(values[src]);
        Eigen::VectorXcd v = solver.eigenvectors().col(static_cast<Eigen::Index>(src));
        v.normalize();
        out.vectors.col(i) = v;
        out.residuals.push_back(pair_residual(a, v, values[src]));
    }
    return out;
}

struct ArnoldiWorkspace {
    Eigen::MatrixXcd basis;  // dim x (m+1)
    Eigen::MatrixXcd hess;   // (m+1) x m
};

// Shift-invert Arnoldi for the eigenvalues of A nearest sigma. Returns Ritz
// pairs of the k largest |1/(lambda - sigma)| transforms.
EigResult shift_invert_arnoldi(const SparseComplexMatrix& block, int n_eigs,
                               const SolverOptions& opts) {
    const int dim = static_cast<int>(block.rows());
    const double norm = block.frobenius_norm();
    const double entry_scale = norm / std::sqrt(std::max<double>(1.0, block.nnz()));
    const Complex sigma(std::max(opts.shift_scale * entry_scale, 1e-300), 0.0);

    SpMat a = to_eigen_sparse(block);
    SpMat shifted = a;
    {
        SpMat eye(dim, dim);
        eye.setIdentity();
        shifted = a - sigma * eye;
    }
    Eigen::SparseLU<SpMat> lu;
    lu.compute(shifted);
    if (lu.info() != Eigen::Success) {
        throw SolverError("sparse factorization of the shifted block failed (dim " +
                          std::to_string(dim) + ")");
    }

    std::mt19937 rng(0x5eed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXcd start(dim);
    for (int i = 0; i < dim; ++i) start(i) = Complex(gauss(rng), gauss(rng));
    start.normalize();

    const int k = std::min(n_eigs, dim);
    int m = std::min({std::max(2 * k + 16, 36), dim, opts.max_krylov});

    EigResult best;
    double best_worst_residual = std::numeric_limits<double>::infinity();

    for (int restart = 0; restart <= opts.max_restarts; ++restart) {
        ArnoldiWorkspace ws;
        ws.basis.resize(dim, m + 1);
        ws.hess = Eigen::MatrixXcd::Zero(m + 1, m);
        ws.basis.col(0) = start;

        int built = 0;
        for (int j = 0; j < m; ++j) {
            Eigen::VectorXcd w = lu.solve(ws.basis.col(j));
            // Modified Gram-Schmidt with one re-orthogonalization pass.
            for (int pass = 0; pass < 2; ++pass) {
                for (int i = 0; i <= j; ++i) {
                    const Complex h = ws.basis.col(i).dot(w);
                    ws.hess(i, j) += h;
                    w -= h * ws.basis.col(i);
                }
            }
            const double beta = w.norm();
            ws.hess(j + 1, j) = Complex(beta, 0.0);
            built = j + 1;
            if (beta < 1e-14) break;  // invariant subspace: exact after this step
            ws.basis.col(j + 1) = w / beta;
        }

        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ritz(ws.hess.topLeftCorner(built, built),
                                                         true);
        if (ritz.info() != Eigen::Success) {
            throw SolverError("Arnoldi projection eigensolve failed");
        }

        // Largest |mu| first: these are the eigenvalues nearest the shift.
        std::vector<std::size_t> order(static_cast<std::size_t>(built));
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
            return std::abs(ritz.eigenvalues()(static_cast<Eigen::Index>(x))) >
                   std::abs(ritz.eigenvalues()(static_cast<Eigen::Index>(y)));
        });

        const int avail = std::min(k, built);
        EigResult current;
        current.vectors.resize(dim, avail);
        double worst = 0.0;
        for (int i = 0; i < avail; ++i) {
            const std::size_t src = order[static_cast<std::size_t>(i)];
            const Complex mu = ritz.eigenvalues()(static_cast<Eigen::Index>(src));
            const Complex lambda = sigma + Complex(1.0, 0.0) / mu;
            Eigen::VectorXcd v =
                ws.basis.leftCols(built) * ritz.eigenvectors().col(static_cast<Eigen::Index>(src));
            v.normalize();
            current.values.push_back(lambda);
            current.vectors.col(i) = v;
            const double res = pair_residual(a, v, lambda);
            current.residuals.push_back(res);
            worst = std::max(worst, res / (norm * std::max(1.0, std::abs(lambda))));
        }

        if (worst < best_worst_residual) {
            best = current;
            best_worst_residual = worst;
        }
        if (best_worst_residual < opts.tol && static_cast<int>(best.values.size()) == k) {
            // Re-sort by the spectral order used everywhere else.
            const auto final_order = sorted_order(best.values);
            EigResult sorted;
            sorted.vectors.resize(dim, static_cast<int>(best.values.size()));
            for (std::size_t i = 0; i < final_order.size(); ++i) {
                sorted.values.push_back(best.values[final_order[i]]);
                sorted.vectors.col(static_cast<Eigen::Index>(i)) =
                    best.vectors.col(static_cast<Eigen::Index>(final_order[i]));
                sorted.residuals.push_back(best.residuals[final_order[i]]);
            }
            return sorted;
        }

        // Restart from the span of the wanted Ritz vectors; widen the basis
        // if the residual has stalled.
        start = Eigen::VectorXcd::Zero(dim);
        for (Eigen::Index c = 0; c < best.vectors.cols(); ++c) {
            start += best.vectors.col(c);
        }
        if (start.norm() < 1e-12) {
            for (int i = 0; i < dim; ++i) start(i) = Complex(gauss(rng), gauss(rng));
        }
        start.normalize();
        if (restart % 3 == 2) m = std::min({(3 * m) / 2, dim, opts.max_krylov});
    }

    std::ostringstream msg;
    msg << "shift-invert Arnoldi did not converge on block of dimension " << dim
        << "; relative residuals:";
    for (double r : best.residuals) msg << ' ' << r / norm;
    throw SolverError(msg.str());
}

Eigen::MatrixXcd scatter_block_vector(const Eigen::VectorXcd& v, std::span<const int> indices,
                                      int n_c) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n_c, n_c);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const int g = indices[i];
        out(g / n_c, g % n_c) = v(static_cast<Eigen::Index>(i));
    }
    return out;
}

DensityMatrix normalize_steady_state(const Eigen::MatrixXcd& raw) {
    Eigen::MatrixXcd herm = hermitize(raw);
    const double tr = herm.trace().real();
    if (std::abs(tr) < 1e-14 * herm.norm()) {
        throw SolverError("candidate steady state is traceless; sector has no "
                          "trace-class fixed point");
    }
    return DensityMatrix{herm / tr};
}

}  // namespace

Eigen::MatrixXcd hermitize(const Eigen::MatrixXcd& op) {
    const Complex t2 = (op * op).trace();
    double phase = 0.0;
    if (std::abs(t2) > 1e-300) phase = 0.5 * std::arg(t2);
    const Eigen::MatrixXcd aligned = op * std::polar(1.0, -phase);
    return 0.5 * (aligned + aligned.adjoint());
}

EigResult block_eigs(const SparseComplexMatrix& block, int n_eigs, const SolverOptions& opts) {
    if (!block.is_square()) {
        throw std::invalid_argument("eigenanalysis requires a square block");
    }
    if (n_eigs < 0 || n_eigs > block.rows()) {
        throw std::invalid_argument("requested eigenpair count exceeds block dimension");
    }
    const int dim = static_cast<int>(block.rows());
    // Small blocks, or requests for most of the spectrum, go dense.
    if (dim <= opts.dense_threshold || n_eigs * 4 >= dim || dim < 64) {
        return dense_eigs(block, n_eigs);
    }
    return shift_invert_arnoldi(block, n_eigs, opts);
}

SectorSpectrum sector_spectrum(const Superoperator& sup, const BlockDecomposition& dec,
                               int which, int n_eigs, const SolverOptions& opts) {
    if (which < 0 || which >= dec.block_count()) {
        throw std::out_of_range("sector index out of range");
    }
    const auto& block = dec.block_matrices[static_cast<std::size_t>(which)];
    const auto indices = dec.block_indices(which);
    const int dim = static_cast<int>(block.rows());

    SectorSpectrum spec;
    spec.label = dec.blocks[static_cast<std::size_t>(which)].label;
    if (dim == 0) return spec;

    const EigResult eigs = block_eigs(block, std::min(n_eigs, dim), opts);
    spec.eigenvalues = eigs.values;
    spec.residuals = eigs.residuals;

    const double null_tol = 1e-10 * std::max(block.frobenius_norm(), 1e-300);
    for (std::size_t i = 0; i < eigs.values.size(); ++i) {
        Eigen::MatrixXcd op = scatter_block_vector(eigs.vectors.col(static_cast<Eigen::Index>(i)),
                                                   indices, sup.n_c);
        const double fro = op.norm();
        if (fro > 0.0) op /= fro;
        spec.eigenoperators.push_back(std::move(op));
        if (std::abs(eigs.values[i]) < null_tol) ++spec.null_multiplicity;
    }

    if (spec.label.is_population() && spec.null_multiplicity > 0) {
        spec.steady_state = normalize_steady_state(spec.eigenoperators.front());
    }
    return spec;
}

namespace {

SteadyStateResult steady_state_from_block(const SparseComplexMatrix& block,
                                          std::span<const int> indices, int n_c,
                                          const SolverOptions& opts) {
    const int dim = static_cast<int>(block.rows());
    if (dim == 0) {
        throw std::invalid_argument("cannot compute a steady state of an empty block");
    }
    const double norm = std::max(block.frobenius_norm(), 1e-300);
    const double null_tol = 1e-10 * norm;

    int ask = std::min(dim, 3);
    EigResult eigs;
    // Widen the request until the null multiplicity is resolved (all returned
    // eigenvalues below the threshold means there may be more).
    for (;;) {
        eigs = block_eigs(block, ask, opts);
        int nulls = 0;
        for (const Complex& v : eigs.values) {
            if (std::abs(v) < null_tol) ++nulls;
        }
        if (nulls < ask || ask == dim) break;
        ask = std::min(dim, 2 * ask);
    }

    int multiplicity = 0;
    for (const Complex& v : eigs.values) {
        if (std::abs(v) < null_tol) ++multiplicity;
    }
    if (multiplicity == 0) {
        std::ostringstream msg;
        msg << "no eigenvalue below the null threshold " << null_tol
            << "; smallest |lambda|:";
        for (const Complex& v : eigs.values) msg << ' ' << std::abs(v);
        throw SolverError(msg.str());
    }

    SteadyStateResult out;
    out.null_multiplicity = multiplicity;
    out.rho = normalize_steady_state(scatter_block_vector(eigs.vectors.col(0), indices, n_c));

    Eigen::VectorXcd flat = vectorize(out.rho.data);
    std::vector<Complex> x(flat.data(), flat.data() + flat.size());
    std::vector<Complex> restricted(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        restricted[i] = x[static_cast<std::size_t>(indices[i])];
    }
    const std::vector<Complex> lv = matvec(block, restricted);
    double res = 0.0;
    for (const Complex& c : lv) res += std::norm(c);
    out.residual = std::sqrt(res);
    if (out.residual > 1e-9 * norm) {
        std::ostringstream msg;
        msg << "steady-state residual " << out.residual << " exceeds 1e-9 * ||block|| = "
            << 1e-9 * norm;
        throw SolverError(msg.str());
    }
    return out;
}

}  // namespace

SteadyStateResult steady_state(const Superoperator& sup, const BlockDecomposition& dec,
                               int which, const SolverOptions& opts) {
    if (which < 0 || which >= dec.block_count()) {
        throw std::out_of_range("sector index out of range");
    }
    return steady_state_from_block(dec.block_matrices[static_cast<std::size_t>(which)],
                                   dec.block_indices(which), sup.n_c, opts);
}

SteadyStateResult steady_state(const Superoperator& sup, const SolverOptions& opts) {
    std::vector<int> all(static_cast<std::size_t>(sup.matrix.rows()));
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    return steady_state_from_block(sup.matrix, all, sup.n_c, opts);
}

SteadyStateResult steady_state_direct(const SparseComplexMatrix& block,
                                      std::span<const int> indices, int n_c) {
    const int dim = static_cast<int>(block.rows());
    if (dim == 0 || static_cast<std::size_t>(dim) != indices.size()) {
        throw std::invalid_argument("block dimension does not match its index list");
    }
    // Locate the diagonal (p, p) positions inside this block; the trace row
    // replaces the first of them.
    std::vector<int> diagonal_locals;
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const int g = indices[i];
        if (g / n_c == g % n_c) diagonal_locals.push_back(static_cast<int>(i));
    }
    if (diagonal_locals.empty()) {
        throw std::invalid_argument("block contains no diagonal elements; not a "
                                    "population sector");
    }
    const int trace_row = diagonal_locals.front();

    std::vector<Eigen::Triplet<Complex>> triplets;
    triplets.reserve(static_cast<std::size_t>(block.nnz()) + diagonal_locals.size());
    for (const Entry& e : block.entries()) {
        if (static_cast<int>(e.row) == trace_row) continue;
        triplets.emplace_back(static_cast<int>(e.row), static_cast<int>(e.col), e.value);
    }
    for (int loc : diagonal_locals) {
        triplets.emplace_back(trace_row, loc, Complex(1.0, 0.0));
    }
    SpMat system(dim, dim);
    system.setFromTriplets(triplets.begin(), triplets.end());
    system.makeCompressed();

    Eigen::SparseLU<SpMat> lu;
    lu.compute(system);
    if (lu.info() != Eigen::Success) {
        throw SolverError("trace-constrained steady-state system is singular");
    }
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(dim);
    rhs(trace_row) = Complex(1.0, 0.0);
    const Eigen::VectorXcd x = lu.solve(rhs);

    SteadyStateResult out;
    out.null_multiplicity = 1;
    out.rho = normalize_steady_state(scatter_block_vector(x, indices, n_c));

    const Eigen::VectorXcd flat = vectorize(out.rho.data);
    std::vector<Complex> restricted(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        restricted[i] = flat(indices[i]);
    }
    const std::vector<Complex> lv = matvec(block, restricted);
    double res = 0.0;
    for (const Complex& c : lv) res += std::norm(c);
    out.residual = std::sqrt(res);
    const double norm = std::max(block.frobenius_norm(), 1e-300);
    if (!(out.residual <= 1e-9 * norm)) {
        std::ostringstream msg;
        msg << "direct steady-state residual " << out.residual << " exceeds 1e-9 * ||block|| = "
            << 1e-9 * norm << " (degenerate nullspace or ill-conditioned solve)";
        throw SolverError(msg.str());
    }
    return out;
}

std::vector<Complex> gap_ladder(const ModelSpec& spec, const SectorLabel& sector, int count,
                                const SolverOptions& opts) {
    const Superoperator sup = assemble(build_hamiltonian(spec), build_jump_ops(spec));
    const BlockDecomposition dec = sector_decomposition(sup, spec.n, symmetry_kind(spec));
    for (int b = 0; b < dec.block_count(); ++b) {
        if (dec.blocks[static_cast<std::size_t>(b)].label == sector) {
            return sector_spectrum(sup, dec, b, count, opts).eigenvalues;
        }
    }
    throw std::invalid_argument("sector " + to_string(sector) + " not present for this model");
}

MetastablePair metastable_decomposition(const Eigen::MatrixXcd& eigop, Complex eigenvalue) {
    const Eigen::MatrixXcd herm = hermitize(eigop);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm);
    if (es.info() != Eigen::Success) {
        throw SolverError("eigendecomposition of metastable operator failed");
    }
    const Eigen::VectorXd vals = es.eigenvalues();
    const double scale = vals.cwiseAbs().maxCoeff();

    Eigen::MatrixXcd plus = Eigen::MatrixXcd::Zero(herm.rows(), herm.cols());
    Eigen::MatrixXcd minus = plus;
    double wplus = 0.0, wminus = 0.0;
    for (Eigen::Index i = 0; i < vals.size(); ++i) {
        const auto v = es.eigenvectors().col(i);
        if (vals(i) > 0.0) {
            plus += vals(i) * (v * v.adjoint());
            wplus += vals(i);
        } else if (vals(i) < 0.0) {
            minus -= vals(i) * (v * v.adjoint());
            wminus -= vals(i);
        }
    }
    if (wplus < 1e-12 * scale || wminus < 1e-12 * scale) {
        throw std::domain_error("eigenoperator spectrum is one-sided; not of metastable type");
    }
    return MetastablePair{DensityMatrix{plus / wplus}, DensityMatrix{minus / wminus}, eigenvalue};
}

}  // namespace nkerr
