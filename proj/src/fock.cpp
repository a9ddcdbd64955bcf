#include "nkerr/fock.hpp"

#include <cmath>
#include <stdexcept>

namespace nkerr {

FockCutoff::FockCutoff(int retained_states) : n_c(retained_states) {
    if (n_c < 2) {
        throw std::invalid_argument("Fock cutoff must retain at least two states");
    }
}

SparseComplexMatrix destroy(FockCutoff cutoff) {
    std::vector<Entry> entries;
    entries.reserve(static_cast<std::size_t>(cutoff.n_c) - 1);
    for (Index p = 1; p < cutoff.n_c; ++p) {
        entries.push_back({p - 1, p, Complex(std::sqrt(static_cast<double>(p)), 0.0)});
    }
    return SparseComplexMatrix::from_triplets(cutoff.n_c, cutoff.n_c, std::move(entries));
}

SparseComplexMatrix create(FockCutoff cutoff) {
    return destroy(cutoff).adjoint();
}

SparseComplexMatrix number_operator(FockCutoff cutoff) {
    std::vector<Entry> entries;
    for (Index p = 1; p < cutoff.n_c; ++p) {
        entries.push_back({p, p, Complex(static_cast<double>(p), 0.0)});
    }
    return SparseComplexMatrix::from_triplets(cutoff.n_c, cutoff.n_c, std::move(entries));
}

SparseComplexMatrix matpow(const SparseComplexMatrix& m, int power) {
    if (!m.is_square()) {
        throw std::invalid_argument("matpow requires a square matrix");
    }
    if (power < 0) {
        throw std::invalid_argument("matpow requires a non-negative power");
    }
    SparseComplexMatrix result = SparseComplexMatrix::identity(m.rows());
    for (int i = 0; i < power; ++i) {
        result = matmul(result, m);
    }
    return result;
}

}  // namespace nkerr
