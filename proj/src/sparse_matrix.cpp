#include "nkerr/sparse_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nkerr {

namespace {

constexpr double kConstructionDropTol = 1e-15;

bool row_major_less(const Entry& a, const Entry& b) {
    if (a.row != b.row) return a.row < b.row;
    return a.col < b.col;
}

void check_dims(Index nrows, Index ncols) {
    if (nrows < 0 || ncols < 0) {
        throw std::invalid_argument("sparse matrix dimensions must be non-negative");
    }
}

}  // namespace

SparseComplexMatrix::SparseComplexMatrix(Index nrows, Index ncols)
    : nrows_(nrows), ncols_(ncols) {
    check_dims(nrows, ncols);
}

SparseComplexMatrix SparseComplexMatrix::from_triplets(Index nrows, Index ncols,
                                                       std::vector<Entry> entries) {
    check_dims(nrows, ncols);
    for (const Entry& e : entries) {
        if (e.row < 0 || e.row >= nrows || e.col < 0 || e.col >= ncols) {
            throw std::out_of_range("triplet index outside matrix dimensions");
        }
    }
    std::sort(entries.begin(), entries.end(), row_major_less);
    SparseComplexMatrix m(nrows, ncols);
    m.entries_.reserve(entries.size());
    for (const Entry& e : entries) {
        if (!m.entries_.empty() && m.entries_.back().row == e.row &&
            m.entries_.back().col == e.col) {
            m.entries_.back().value += e.value;
        } else {
            m.entries_.push_back(e);
        }
    }
    auto dropped = std::remove_if(m.entries_.begin(), m.entries_.end(), [](const Entry& e) {
        return std::abs(e.value) < kConstructionDropTol;
    });
    m.entries_.erase(dropped, m.entries_.end());
    return m;
}

SparseComplexMatrix SparseComplexMatrix::identity(Index n) {
    check_dims(n, n);
    SparseComplexMatrix m(n, n);
    m.entries_.reserve(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) m.entries_.push_back({i, i, Complex(1.0, 0.0)});
    return m;
}

SparseComplexMatrix SparseComplexMatrix::zero(Index nrows, Index ncols) {
    return SparseComplexMatrix(nrows, ncols);
}

SparseComplexMatrix SparseComplexMatrix::from_entries_presorted(Index nrows, Index ncols,
                                                                std::vector<Entry> entries) {
    check_dims(nrows, ncols);
    SparseComplexMatrix m(nrows, ncols);
    m.entries_ = std::move(entries);
    return m;
}

Complex SparseComplexMatrix::coeff(Index row, Index col) const {
    Entry probe{row, col, {}};
    auto it = std::lower_bound(entries_.begin(), entries_.end(), probe, row_major_less);
    if (it != entries_.end() && it->row == row && it->col == col) return it->value;
    return Complex(0.0, 0.0);
}

SparseComplexMatrix SparseComplexMatrix::adjoint() const {
    SparseComplexMatrix m(ncols_, nrows_);
    m.entries_.reserve(entries_.size());
    for (const Entry& e : entries_) m.entries_.push_back({e.col, e.row, std::conj(e.value)});
    std::sort(m.entries_.begin(), m.entries_.end(), row_major_less);
    return m;
}

SparseComplexMatrix SparseComplexMatrix::transpose() const {
    SparseComplexMatrix m(ncols_, nrows_);
    m.entries_.reserve(entries_.size());
    for (const Entry& e : entries_) m.entries_.push_back({e.col, e.row, e.value});
    std::sort(m.entries_.begin(), m.entries_.end(), row_major_less);
    return m;
}

SparseComplexMatrix SparseComplexMatrix::conjugate() const {
    SparseComplexMatrix m = *this;
    for (Entry& e : m.entries_) e.value = std::conj(e.value);
    return m;
}

double SparseComplexMatrix::frobenius_norm() const {
    double sum = 0.0;
    for (const Entry& e : entries_) sum += std::norm(e.value);
    return std::sqrt(sum);
}

double SparseComplexMatrix::max_abs() const {
    double best = 0.0;
    for (const Entry& e : entries_) best = std::max(best, std::abs(e.value));
    return best;
}

std::vector<std::size_t> SparseComplexMatrix::row_offsets() const {
    std::vector<std::size_t> offsets(static_cast<std::size_t>(nrows_) + 1, 0);
    for (const Entry& e : entries_) ++offsets[static_cast<std::size_t>(e.row) + 1];
    for (std::size_t r = 1; r < offsets.size(); ++r) offsets[r] += offsets[r - 1];
    return offsets;
}

namespace {

SparseComplexMatrix merge(const SparseComplexMatrix& a, const SparseComplexMatrix& b,
                          Complex ca, Complex cb) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("matrix sum requires equal dimensions");
    }
    SparseComplexMatrix out(a.rows(), a.cols());
    std::vector<Entry> merged;
    merged.reserve(a.entries().size() + b.entries().size());
    const auto& ea = a.entries();
    const auto& eb = b.entries();
    std::size_t i = 0, j = 0;
    auto push = [&merged](Index r, Index c, Complex v) {
        if (v != Complex(0.0, 0.0)) merged.push_back({r, c, v});
    };
    while (i < ea.size() && j < eb.size()) {
        if (row_major_less(ea[i], eb[j])) {
            push(ea[i].row, ea[i].col, ca * ea[i].value);
            ++i;
        } else if (row_major_less(eb[j], ea[i])) {
            push(eb[j].row, eb[j].col, cb * eb[j].value);
            ++j;
        } else {
            push(ea[i].row, ea[i].col, ca * ea[i].value + cb * eb[j].value);
            ++i;
            ++j;
        }
    }
    for (; i < ea.size(); ++i) push(ea[i].row, ea[i].col, ca * ea[i].value);
    for (; j < eb.size(); ++j) push(eb[j].row, eb[j].col, cb * eb[j].value);

    return SparseComplexMatrix::from_entries_presorted(out.rows(), out.cols(), std::move(merged));
}

}  // namespace

SparseComplexMatrix add(const SparseComplexMatrix& a, const SparseComplexMatrix& b) {
    return merge(a, b, Complex(1.0, 0.0), Complex(1.0, 0.0));
}

SparseComplexMatrix sub(const SparseComplexMatrix& a, const SparseComplexMatrix& b) {
    return merge(a, b, Complex(1.0, 0.0), Complex(-1.0, 0.0));
}

SparseComplexMatrix scale(const SparseComplexMatrix& a, Complex factor) {
    if (factor == Complex(0.0, 0.0)) return SparseComplexMatrix(a.rows(), a.cols());
    // Scaling by a nonzero factor keeps the sparsity pattern and ordering.
    std::vector<Entry> scaled;
    scaled.reserve(a.entries().size());
    for (const Entry& e : a.entries()) scaled.push_back({e.row, e.col, factor * e.value});
    return SparseComplexMatrix::from_entries_presorted(a.rows(), a.cols(), std::move(scaled));
}

SparseComplexMatrix matmul(const SparseComplexMatrix& a, const SparseComplexMatrix& b) {
    if (a.cols() != b.rows()) {
        throw std::invalid_argument("matrix product requires inner dimensions to match");
    }
    const auto b_offsets = b.row_offsets();
    const auto& eb = b.entries();
    std::vector<Complex> acc(static_cast<std::size_t>(b.cols()), Complex(0.0, 0.0));
    std::vector<char> touched_flag(static_cast<std::size_t>(b.cols()), 0);
    std::vector<Index> touched;
    std::vector<Entry> out;

    const auto& ea = a.entries();
    std::size_t i = 0;
    while (i < ea.size()) {
        const Index row = ea[i].row;
        touched.clear();
        for (; i < ea.size() && ea[i].row == row; ++i) {
            const Index k = ea[i].col;
            const Complex va = ea[i].value;
            for (std::size_t j = b_offsets[static_cast<std::size_t>(k)];
                 j < b_offsets[static_cast<std::size_t>(k) + 1]; ++j) {
                const Index c = eb[j].col;
                if (!touched_flag[static_cast<std::size_t>(c)]) {
                    touched_flag[static_cast<std::size_t>(c)] = 1;
                    touched.push_back(c);
                    acc[static_cast<std::size_t>(c)] = Complex(0.0, 0.0);
                }
                acc[static_cast<std::size_t>(c)] += va * eb[j].value;
            }
        }
        std::sort(touched.begin(), touched.end());
        for (Index c : touched) {
            const Complex v = acc[static_cast<std::size_t>(c)];
            if (v != Complex(0.0, 0.0)) out.push_back({row, c, v});
            touched_flag[static_cast<std::size_t>(c)] = 0;
        }
    }
    return SparseComplexMatrix::from_entries_presorted(a.rows(), b.cols(), std::move(out));
}

SparseComplexMatrix kron(const SparseComplexMatrix& a, const SparseComplexMatrix& b) {
    std::vector<Entry> out;
    out.reserve(a.entries().size() * b.entries().size());
    for (const Entry& ea : a.entries()) {
        for (const Entry& eb : b.entries()) {
            out.push_back({ea.row * b.rows() + eb.row, ea.col * b.cols() + eb.col,
                           ea.value * eb.value});
        }
    }
    std::sort(out.begin(), out.end(), row_major_less);
    std::erase_if(out, [](const Entry& e) { return e.value == Complex(0.0, 0.0); });
    return SparseComplexMatrix::from_entries_presorted(a.rows() * b.rows(), a.cols() * b.cols(),
                                                       std::move(out));
}

std::vector<Complex> matvec(const SparseComplexMatrix& m, const std::vector<Complex>& x) {
    if (static_cast<Index>(x.size()) != m.cols()) {
        throw std::invalid_argument("matvec dimension mismatch");
    }
    std::vector<Complex> y(static_cast<std::size_t>(m.rows()), Complex(0.0, 0.0));
    for (const Entry& e : m.entries()) {
        y[static_cast<std::size_t>(e.row)] += e.value * x[static_cast<std::size_t>(e.col)];
    }
    return y;
}

std::vector<Complex> transpose_matvec(const SparseComplexMatrix& m, const std::vector<Complex>& x) {
    if (static_cast<Index>(x.size()) != m.rows()) {
        throw std::invalid_argument("transpose_matvec dimension mismatch");
    }
    std::vector<Complex> y(static_cast<std::size_t>(m.cols()), Complex(0.0, 0.0));
    for (const Entry& e : m.entries()) {
        y[static_cast<std::size_t>(e.col)] += e.value * x[static_cast<std::size_t>(e.row)];
    }
    return y;
}

double max_abs_diff(const SparseComplexMatrix& a, const SparseComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("max_abs_diff requires equal dimensions");
    }
    double best = 0.0;
    const auto& ea = a.entries();
    const auto& eb = b.entries();
    std::size_t i = 0, j = 0;
    while (i < ea.size() || j < eb.size()) {
        if (j == eb.size() || (i < ea.size() && row_major_less(ea[i], eb[j]))) {
            best = std::max(best, std::abs(ea[i].value));
            ++i;
        } else if (i == ea.size() || row_major_less(eb[j], ea[i])) {
            best = std::max(best, std::abs(eb[j].value));
            ++j;
        } else {
            best = std::max(best, std::abs(ea[i].value - eb[j].value));
            ++i;
            ++j;
        }
    }
    return best;
}

}  // namespace nkerr
