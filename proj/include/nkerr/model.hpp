#pragma once

#include <vector>

#include "nkerr/fock.hpp"
#include "nkerr/sparse_matrix.hpp"

namespace nkerr {

enum class SymmetryKind { weak, strong };

// Physical parameters of an n-photon driven Kerr resonator.
//
// The interaction list u holds U_1, U_2, ... (index m starts at 1) and must
// cover at least the orders floor(n/2 + 1); missing trailing entries are an
// error rather than implicit zeros, because the highest retained U_m decides
// the transition class.
struct ModelSpec {
    int n = 1;                   // drive order (photons exchanged per event)
    std::vector<double> u;       // interaction strengths U_m
    double g_n = 0.0;            // drive amplitude, real non-negative by gauge
    double gamma = 0.0;          // one-photon loss rate
    double eta_n = 0.0;          // n-photon loss rate
    double scale_l = 1.0;        // thermodynamic parameter L
    FockCutoff cutoff{8};
};

// Minimum number of interaction orders for drive order n: floor(n/2 + 1).
int min_interaction_orders(int n);

// Throws std::invalid_argument when a field violates its contract.
void validate(const ModelSpec& spec);

// Strong symmetry holds exactly when photons are never lost one by one.
SymmetryKind symmetry_kind(const ModelSpec& spec);

// H = sum_m (U_m/m) (a^dag)^m a^m + G_n [a^n + (a^dag)^n], truncated.
// Hermitian by construction. Requires n_c > n so the drive term survives.
SparseComplexMatrix build_hamiltonian(const ModelSpec& spec);

struct JumpOp {
    SparseComplexMatrix op;
    double rate;
};

// Jump operators [(a, gamma), (a^n, eta_n)]; zero-rate channels are omitted.
std::vector<JumpOp> build_jump_ops(const ModelSpec& spec);

// Parameters after the thermodynamic substitution at scale l:
//   G_n -> G_n / sqrt(l^(n-2)),  U_m -> U_m / l^(m-1),  eta_n -> eta_n / l^(n-1),
// with gamma untouched. Applying l and then 1/l round-trips the spec.
struct RescaledModel {
    ModelSpec spec;
    double l;
};

RescaledModel rescale(const ModelSpec& spec, double l);

// Cutoff heuristic: ceil(max(8, 3 * N_sc * L)) with N_sc the largest
// semiclassical fixed-point density. Convergence still has to be checked by
// cutoff doubling; the sweep engine does that when the adaptive rule is on.
int suggest_cutoff(const ModelSpec& spec, double max_semiclassical_density);

}  // namespace nkerr
