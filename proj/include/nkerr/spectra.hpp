#pragma once

#include <optional>
#include <stdexcept>

#include "nkerr/symmetry.hpp"

namespace nkerr {

// Thrown when an eigensolver cannot reach the requested accuracy. The
// message carries the residual norms; results are never silently truncated.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SolverOptions {
    // Blocks up to this dimension are solved densely; larger ones go through
    // shift-invert Arnoldi with a sparse factorization.
    int dense_threshold = 4096;
    // Spectral shift for the iterative path, relative to the RMS entry scale
    // of the block. Kept on the positive real axis, where a Liouvillian has
    // no eigenvalues, so the shifted matrix is never singular.
    double shift_scale = 1e-4;
    // Residual target relative to ||block||_F * max(1, |lambda|).
    double tol = 1e-10;
    int max_restarts = 40;
    int max_krylov = 600;
};

struct EigResult {
    std::vector<Complex> values;   // sorted ascending by |Re|, then Im
    Eigen::MatrixXcd vectors;      // columns match values
    std::vector<double> residuals; // ||A v - lambda v||_2 per pair
};

// The n_eigs eigenpairs of smallest |Re(lambda)|.
EigResult block_eigs(const SparseComplexMatrix& block, int n_eigs,
                     const SolverOptions& opts = {});

// Spectrum of one symmetry block, with eigenoperators scattered back into
// full n_c x n_c form and normalized to unit Frobenius norm. Population
// sectors (weak k=0, strong (k,k)) also carry their steady state.
struct SectorSpectrum {
    SectorLabel label;
    std::vector<Complex> eigenvalues;
    std::vector<Eigen::MatrixXcd> eigenoperators;
    std::optional<DensityMatrix> steady_state;
    int null_multiplicity = 0;  // eigenvalues below the null threshold
    std::vector<double> residuals;
};

SectorSpectrum sector_spectrum(const Superoperator& sup, const BlockDecomposition& dec,
                               int which, int n_eigs, const SolverOptions& opts = {});

// Null vector of a population block, Hermitized and normalized to unit
// trace. A degenerate nullspace is reported through null_multiplicity, not
// as an error: at finite size it signals coexistence.
struct SteadyStateResult {
    DensityMatrix rho;
    int null_multiplicity = 1;
    double residual = 0.0;
};

SteadyStateResult steady_state(const Superoperator& sup, const BlockDecomposition& dec,
                               int which, const SolverOptions& opts = {});

// Convenience overload treating the full superoperator as one block.
SteadyStateResult steady_state(const Superoperator& sup, const SolverOptions& opts = {});

// Linear-solve shortcut for a population block with a one-dimensional null
// space: one diagonal row (redundant by trace preservation) is replaced by
// the trace functional and the system is solved directly. Much cheaper than
// an eigensolve; throws SolverError when the residual check fails, e.g. for
// a degenerate nullspace.
SteadyStateResult steady_state_direct(const SparseComplexMatrix& block,
                                      std::span<const int> indices, int n_c);

// Eigenvalue ladder [lambda_0, lambda_1, ...] of one sector of the model.
// For the steady-state sector, lambda_1 is the Liouvillian gap.
std::vector<Complex> gap_ladder(const ModelSpec& spec, const SectorLabel& sector, int count,
                                const SolverOptions& opts = {});

// Splits a Hermitizable eigenoperator into its positive and negative parts,
// each renormalized to unit trace. Throws when the spectrum is one-sided,
// which means the operator is not of metastable type.
struct MetastablePair {
    DensityMatrix plus;
    DensityMatrix minus;
    Complex eigenvalue{0.0, 0.0};
};

MetastablePair metastable_decomposition(const Eigen::MatrixXcd& eigop,
                                        Complex eigenvalue = Complex(0.0, 0.0));

// Rotates away the arbitrary complex gauge of a numerically computed
// eigenoperator (so that Tr(R^2) is real positive) and symmetrizes.
Eigen::MatrixXcd hermitize(const Eigen::MatrixXcd& op);

}  // namespace nkerr
