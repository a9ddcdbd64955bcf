#pragma once

#include <iosfwd>
#include <limits>

#include "nkerr/config.hpp"
#include "nkerr/semiclassical.hpp"
#include "nkerr/spectra.hpp"

namespace nkerr {

// Everything computed at one (G, L) grid point.
struct SectorRecord {
    SectorLabel label;
    std::vector<Complex> eigenvalues;
    double steady_photons = std::numeric_limits<double>::quiet_NaN();
    int null_multiplicity = 0;
    double max_residual = 0.0;
};

struct SweepRecord {
    double l = 1.0;
    double g_tilde = 0.0;
    int n_c = 0;
    std::vector<SectorRecord> sectors;
    std::vector<double> sc_stable_densities;  // tilde units, ascending
    TransitionClass sc_classification = TransitionClass::none;
    // |<a^dag a>/L - N_sc| against the nearest stable branch (vacuum counts).
    double cross_validation = std::numeric_limits<double>::quiet_NaN();
    std::string error;  // per-point failures are recorded here, not thrown
};

// Evaluates one grid point: semiclassical solution set in tilde units,
// thermodynamic rescaling at l, cutoff selection (fixed or adaptive
// doubling check on the steady-state photon number), assembly, block
// decomposition and per-sector spectra. Exceptions are caught by run_sweep
// and recorded in-band; this function throws.
SweepRecord evaluate_point(const SweepConfig& config, double g_tilde, double l);

// One record per (L, G) pair, L outer, G inner; deterministic given the
// config, including under threading (records are merged in grid order).
std::vector<SweepRecord> run_sweep(const SweepConfig& config);

void write_records_csv(const SweepConfig& config, const std::vector<SweepRecord>& records,
                       std::ostream& os);
void write_manifest(const SweepConfig& config, const std::vector<SweepRecord>& records,
                    std::ostream& os);

// Gap (or any tracked eigenvalue) against L at fixed drive, with a linear
// fit of log10 |Re lambda| over the tail of the series. No fit is reported
// for fewer than three points.
struct ScalingSeries {
    std::vector<std::pair<double, double>> points;  // (L, Re lambda)
    bool has_fit = false;
    double slope = 0.0;      // d log10|Re lambda| / dL
    double intercept = 0.0;
    double r_squared = 0.0;
};

ScalingSeries scaling_series(const SweepConfig& config, const SectorLabel& sector,
                             int which_eig, double g_fixed);

// Fidelity <K_j| rho |K_j> with the n-component cat state whose Fock support
// lies on p = j (mod n), built from coherent states of amplitude alpha and
// its Z_n phase rotations.
double cat_overlap(const DensityMatrix& rho, Complex alpha, int j, int n);

}  // namespace nkerr
