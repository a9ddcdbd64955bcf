#pragma once

#include "nkerr/sparse_matrix.hpp"

namespace nkerr {

// Truncation of the bosonic Hilbert space to the Fock states |0>..|n_c-1>.
struct FockCutoff {
    int n_c;

    explicit FockCutoff(int retained_states);
};

// Annihilation operator a with <p-1|a|p> = sqrt(p).
SparseComplexMatrix destroy(FockCutoff cutoff);

// Creation operator a^dagger.
SparseComplexMatrix create(FockCutoff cutoff);

// Number operator a^dagger a (diagonal p).
SparseComplexMatrix number_operator(FockCutoff cutoff);

// M^power for square M; power zero gives the identity.
SparseComplexMatrix matpow(const SparseComplexMatrix& m, int power);

}  // namespace nkerr
