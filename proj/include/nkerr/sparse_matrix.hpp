#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace nkerr {

using Complex = std::complex<double>;
using Index = std::int64_t;

// One stored coefficient of a sparse matrix.
struct Entry {
    Index row = 0;
    Index col = 0;
    Complex value{0.0, 0.0};
};

// Sparse complex matrix with entries kept sorted in row-major order
// (row, then column). The entry list is deterministic: two matrices built
// from the same inputs compare equal field by field, which keeps
// superoperator assembly reproducible across runs.
//
// Values with magnitude below 1e-15 are dropped when a matrix is built
// from a triplet list; arithmetic on existing matrices only removes exact
// zeros, so repeated products do not silently lose small coefficients.
class SparseComplexMatrix {
public:
    SparseComplexMatrix() = default;
    SparseComplexMatrix(Index nrows, Index ncols);

    // Sums duplicate (row, col) pairs, sorts row-major and applies the
    // construction drop threshold.
    static SparseComplexMatrix from_triplets(Index nrows, Index ncols,
                                             std::vector<Entry> entries);
    static SparseComplexMatrix identity(Index n);
    static SparseComplexMatrix zero(Index nrows, Index ncols);

    // Adopts entries that are already sorted, duplicate-free and nonzero.
    // Used by the arithmetic kernels, which must not re-threshold values.
    static SparseComplexMatrix from_entries_presorted(Index nrows, Index ncols,
                                                      std::vector<Entry> entries);

    Index rows() const { return nrows_; }
    Index cols() const { return ncols_; }
    bool is_square() const { return nrows_ == ncols_; }
    Index nnz() const { return static_cast<Index>(entries_.size()); }
    const std::vector<Entry>& entries() const { return entries_; }

    // Value at (row, col); zero if not stored. Binary search.
    Complex coeff(Index row, Index col) const;

    SparseComplexMatrix adjoint() const;
    SparseComplexMatrix transpose() const;
    SparseComplexMatrix conjugate() const;

    double frobenius_norm() const;
    double max_abs() const;

    // Offsets into the entry list delimiting each row; size rows()+1.
    std::vector<std::size_t> row_offsets() const;

private:
    Index nrows_ = 0;
    Index ncols_ = 0;
    std::vector<Entry> entries_;
};

SparseComplexMatrix add(const SparseComplexMatrix& a, const SparseComplexMatrix& b);
SparseComplexMatrix sub(const SparseComplexMatrix& a, const SparseComplexMatrix& b);
SparseComplexMatrix scale(const SparseComplexMatrix& a, Complex factor);
SparseComplexMatrix matmul(const SparseComplexMatrix& a, const SparseComplexMatrix& b);
SparseComplexMatrix kron(const SparseComplexMatrix& a, const SparseComplexMatrix& b);

// y = M x
std::vector<Complex> matvec(const SparseComplexMatrix& m, const std::vector<Complex>& x);
// y = M^T x (no conjugation)
std::vector<Complex> transpose_matvec(const SparseComplexMatrix& m, const std::vector<Complex>& x);

// Largest |a_ij - b_ij| over the union of stored patterns.
double max_abs_diff(const SparseComplexMatrix& a, const SparseComplexMatrix& b);

}  // namespace nkerr
