#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "nkerr/model.hpp"
#include "nkerr/sparse_matrix.hpp"

namespace nkerr {

// Vectorization convention used throughout: row-major,
//   vec(rho)[p * n_c + q] = rho(p, q).
// Under it, A rho B maps to (A kron B^T) vec(rho), so the Lindblad generator
// in matrix form is
//   L = -i (H kron 1 - 1 kron H^T)
//       + sum_k rate_k [ L_k kron conj(L_k)
//                        - (L_k^dag L_k kron 1 + 1 kron L_k^T conj(L_k)) / 2 ].
// Every module must use this convention; mixing conventions is the classic
// silent bug in superoperator code.
struct Superoperator {
    SparseComplexMatrix matrix;  // (n_c^2) x (n_c^2)
    int n_c = 0;
};

// Dense density matrix. Helpers below check the physicality contract
// (Hermitian, unit trace, spectrum bounded below by a small negative floor).
struct DensityMatrix {
    Eigen::MatrixXcd data;
};

Eigen::VectorXcd vectorize(const Eigen::MatrixXcd& m);
Eigen::MatrixXcd unvectorize(const Eigen::VectorXcd& v, int n_c);

Superoperator assemble(const SparseComplexMatrix& hamiltonian,
                       const std::vector<JumpOp>& jumps);

// d(rho)/dt for the given state; traceless and Hermiticity-preserving.
Eigen::MatrixXcd apply(const Superoperator& sup, const DensityMatrix& rho);

// Tr(obs * rho).
Complex expectation(const SparseComplexMatrix& obs, const DensityMatrix& rho);

// <a^dag a> of a state.
double photon_number(const DensityMatrix& rho);

// Physicality check used by tests and the sweep engine.
bool is_physical(const DensityMatrix& rho, double tol_herm = 1e-10,
                 double tol_trace = 1e-10, double eig_floor = -1e-8);

// Coordinate-list export, one "row col re im" line per stored entry.
void export_coo(const Superoperator& sup, std::ostream& os);

Eigen::MatrixXcd to_dense(const SparseComplexMatrix& m);
SparseComplexMatrix from_dense(const Eigen::MatrixXcd& m);

}  // namespace nkerr
