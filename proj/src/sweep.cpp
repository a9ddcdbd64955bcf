#include "nkerr/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <thread>

#include <json.hpp>

namespace nkerr {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Enough room for the semiclassical occupation plus coherent-state spread.
int estimate_cutoff(double photons, int n) {
    const double base = 1.3 * photons + 7.0 * std::sqrt(photons + 1.0) + 6.0;
    int n_c = static_cast<int>(std::ceil(base));
    n_c = std::max({n_c, 8, n + 2});
    // Round up to a multiple of n so every sector has the same size.
    if (n > 1 && n_c % n != 0) n_c += n - n_c % n;
    return n_c;
}

double max_stable_density(const SemiclassicalSolutionSet& sc) {
    double best = 0.0;
    for (const FixedPoint& fp : sc.points) {
        if (fp.stability == Stability::stable || fp.stability == Stability::marginal) {
            best = std::max(best, fp.density);
        }
    }
    return best;
}

// Steady-state photon number of the first population sector at the given
// cutoff; used by the adaptive cutoff-doubling check.
double population_photons(ModelSpec phys, int n_c) {
    phys.cutoff = FockCutoff(n_c);
    const Superoperator sup = assemble(build_hamiltonian(phys), build_jump_ops(phys));
    const BlockDecomposition dec = sector_decomposition(sup, phys.n, symmetry_kind(phys));
    for (int b = 0; b < dec.block_count(); ++b) {
        if (!dec.blocks[static_cast<std::size_t>(b)].label.is_population()) continue;
        SteadyStateResult ss;
        try {
            ss = steady_state_direct(dec.block_matrices[static_cast<std::size_t>(b)],
                                     dec.block_indices(b), n_c);
        } catch (const SolverError&) {
            ss = steady_state(sup, dec, b);
        }
        return photon_number(ss.rho);
    }
    throw std::logic_error("decomposition has no population sector");
}

int choose_cutoff(const SweepConfig& config, const ModelSpec& phys, double tilde_density,
                  double l) {
    if (config.fixed_cutoff > 0) return config.fixed_cutoff;
    int n_c = estimate_cutoff(tilde_density * l, phys.n);
    if (!config.adaptive_cutoff) return n_c;

    constexpr int kMaxCutoff = 640;
    double photons = population_photons(phys, n_c);
    while (n_c < kMaxCutoff) {
        const double doubled = population_photons(phys, 2 * n_c);
        const double change = std::abs(doubled - photons);
        if (change <= 1e-3 * std::max(std::abs(photons), 1e-3)) break;
        n_c *= 2;
        photons = doubled;
    }
    return n_c;
}

}  // namespace

SweepRecord evaluate_point(const SweepConfig& config, double g_tilde, double l) {
    SweepRecord record;
    record.l = l;
    record.g_tilde = g_tilde;

    ModelSpec tilde = config.base;
    tilde.g_n = g_tilde;

    const SemiclassicalSolutionSet sc = fixed_points(tilde, g_tilde);
    record.sc_classification = sc.classification;
    for (const FixedPoint& fp : sc.points) {
        if (fp.density > 0.0 && fp.stability == Stability::stable) {
            record.sc_stable_densities.push_back(fp.density);
        }
    }
    std::sort(record.sc_stable_densities.begin(), record.sc_stable_densities.end());

    ModelSpec phys = rescale(tilde, l).spec;
    const int n_c = choose_cutoff(config, phys, max_stable_density(sc), l);
    record.n_c = n_c;
    phys.cutoff = FockCutoff(n_c);

    const Superoperator sup = assemble(build_hamiltonian(phys), build_jump_ops(phys));
    const BlockDecomposition dec = sector_decomposition(sup, phys.n, symmetry_kind(phys));

    std::vector<int> tracked;
    if (config.sectors.empty()) {
        for (int b = 0; b < dec.block_count(); ++b) tracked.push_back(b);
    } else {
        for (const SectorLabel& wanted : config.sectors) {
            bool found = false;
            for (int b = 0; b < dec.block_count(); ++b) {
                if (dec.blocks[static_cast<std::size_t>(b)].label == wanted) {
                    tracked.push_back(b);
                    found = true;
                    break;
                }
            }
            if (!found) {
                throw std::invalid_argument("tracked sector " + to_string(wanted) +
                                            " not present in the decomposition");
            }
        }
    }

    for (int b : tracked) {
        const SectorSpectrum spec = sector_spectrum(sup, dec, b, config.n_eigs);
        SectorRecord sr;
        sr.label = spec.label;
        sr.eigenvalues = spec.eigenvalues;
        sr.null_multiplicity = spec.null_multiplicity;
        for (double r : spec.residuals) sr.max_residual = std::max(sr.max_residual, r);
        if (spec.steady_state) {
            sr.steady_photons = photon_number(*spec.steady_state);
        }
        record.sectors.push_back(std::move(sr));
    }

    // Cross-validation of the quantum steady state against the nearest
    // semiclassical branch (the vacuum is a branch too).
    for (const SectorRecord& sr : record.sectors) {
        if (std::isnan(sr.steady_photons)) continue;
        const double per_l = sr.steady_photons / l;
        double best = std::abs(per_l);  // distance to the vacuum branch
        for (double d : record.sc_stable_densities) {
            best = std::min(best, std::abs(per_l - d));
        }
        record.cross_validation = best;
        break;
    }
    return record;
}

std::vector<SweepRecord> run_sweep(const SweepConfig& config) {
    struct Point {
        double g;
        double l;
    };
    std::vector<Point> points;
    for (double l : config.l_grid) {
        for (double g : config.drive_grid) {
            points.push_back({g, l});
        }
    }
    std::vector<SweepRecord> records(points.size());

    const int threads = std::max(1, std::min<int>(config.threads,
                                                  static_cast<int>(points.size())));
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= points.size()) return;
            try {
                records[i] = evaluate_point(config, points[i].g, points[i].l);
            } catch (const std::exception& err) {
                records[i].g_tilde = points[i].g;
                records[i].l = points[i].l;
                records[i].error = err.what();
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    return records;
}

void write_records_csv(const SweepConfig& config, const std::vector<SweepRecord>& records,
                       std::ostream& os) {
    os << "l,g_tilde,n_c,sector,steady_photons,null_multiplicity,max_residual,"
          "sc_classification,sc_stable_densities,cross_validation";
    for (int i = 0; i < config.n_eigs; ++i) {
        os << ",re_lambda_" << i << ",im_lambda_" << i;
    }
    os << ",error\n";
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const SweepRecord& r : records) {
        const auto emit_row = [&](const SectorRecord* sr) {
            os << fmt(r.l) << ',' << fmt(r.g_tilde) << ',' << r.n_c << ',';
            os << (sr ? to_string(sr->label) : "-") << ',';
            os << fmt(sr ? sr->steady_photons : nan) << ',';
            os << (sr ? sr->null_multiplicity : 0) << ',';
            os << fmt(sr ? sr->max_residual : nan) << ',';
            os << to_string(r.sc_classification) << ',';
            for (std::size_t i = 0; i < r.sc_stable_densities.size(); ++i) {
                if (i) os << ';';
                os << fmt(r.sc_stable_densities[i]);
            }
            os << ',' << fmt(r.cross_validation);
            for (int i = 0; i < config.n_eigs; ++i) {
                if (sr && i < static_cast<int>(sr->eigenvalues.size())) {
                    os << ',' << fmt(sr->eigenvalues[static_cast<std::size_t>(i)].real()) << ','
                       << fmt(sr->eigenvalues[static_cast<std::size_t>(i)].imag());
                } else {
                    os << ',' << fmt(nan) << ',' << fmt(nan);
                }
            }
            os << ',' << r.error << '\n';
        };
        if (r.sectors.empty()) {
            emit_row(nullptr);
        } else {
            for (const SectorRecord& sr : r.sectors) emit_row(&sr);
        }
    }
}

void write_manifest(const SweepConfig& config, const std::vector<SweepRecord>& records,
                    std::ostream& os) {
    nlohmann::json manifest;
    manifest["tool"] = "nkerr";
    manifest["config_hash"] = config_hash(config);
    nlohmann::json cfg = nlohmann::json::object();
    for (const auto& [key, value] : config.raw) cfg[key] = value;
    manifest["config"] = cfg;
    manifest["units"] = config.base.gamma > 0.0 ? "gamma" : "eta";
    manifest["grid"] = {{"drive_points", config.drive_grid.size()},
                        {"l_points", config.l_grid.size()}};
    manifest["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." +
                                std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                std::to_string(EIGEN_MINOR_VERSION);
    double max_residual = 0.0;
    std::size_t failures = 0;
    for (const SweepRecord& r : records) {
        if (!r.error.empty()) ++failures;
        for (const SectorRecord& s : r.sectors) {
            max_residual = std::max(max_residual, s.max_residual);
        }
    }
    manifest["records"] = records.size();
    manifest["failures"] = failures;
    manifest["max_residual"] = max_residual;
    os << manifest.dump(2) << '\n';
}

ScalingSeries scaling_series(const SweepConfig& config, const SectorLabel& sector,
                             int which_eig, double g_fixed) {
    SweepConfig point_config = config;
    point_config.sectors = {sector};
    point_config.n_eigs = std::max(config.n_eigs, which_eig + 1);

    ScalingSeries out;
    for (double l : config.l_grid) {
        const SweepRecord record = evaluate_point(point_config, g_fixed, l);
        if (record.sectors.empty() ||
            which_eig >= static_cast<int>(record.sectors[0].eigenvalues.size())) {
            throw std::invalid_argument("eigenvalue index out of range for scaling series");
        }
        out.points.emplace_back(
            l, record.sectors[0].eigenvalues[static_cast<std::size_t>(which_eig)].real());
    }

    if (out.points.size() < 3) return out;
    // Drop the initial transient when there is room, then fit
    // log10 |Re lambda| against L.
    std::size_t first = out.points.size() >= 4 ? 1 : 0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    std::size_t count = 0;
    for (std::size_t i = first; i < out.points.size(); ++i) {
        const double x = out.points[i].first;
        const double y = std::log10(std::max(std::abs(out.points[i].second), 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
        ++count;
    }
    const double denom = count * sxx - sx * sx;
    if (denom == 0.0) return out;
    out.slope = (count * sxy - sx * sy) / denom;
    out.intercept = (sy - out.slope * sx) / count;
    const double ss_tot = syy - sy * sy / count;
    double ss_res = 0.0;
    for (std::size_t i = first; i < out.points.size(); ++i) {
        const double x = out.points[i].first;
        const double y = std::log10(std::max(std::abs(out.points[i].second), 1e-300));
        const double fit = out.slope * x + out.intercept;
        ss_res += (y - fit) * (y - fit);
    }
    out.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    out.has_fit = true;
    return out;
}

double cat_overlap(const DensityMatrix& rho, Complex alpha, int j, int n) {
    if (n < 1) throw std::invalid_argument("drive order n must be at least 1");
    if (j < 0 || j >= n) throw std::invalid_argument("cat index j must lie in [0, n)");
    const int n_c = static_cast<int>(rho.data.rows());
    const double a2 = std::norm(alpha);
    if (a2 == 0.0 && j != 0) {
        throw std::invalid_argument("the zero-amplitude cat vanishes for j != 0");
    }

    // Log-magnitudes of the coherent amplitudes restricted to the residue
    // class p = j (mod n); stabilized against under/overflow at large |alpha|.
    std::vector<double> logmag;
    std::vector<int> support;
    double top = -std::numeric_limits<double>::infinity();
    for (int p = j; p < n_c; p += n) {
        double lm;
        if (a2 == 0.0) {
            lm = p == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
        } else {
            lm = 0.5 * (p * std::log(a2) - std::lgamma(p + 1.0));
        }
        logmag.push_back(lm);
        support.push_back(p);
        top = std::max(top, lm);
    }
    if (!std::isfinite(top)) {
        throw std::invalid_argument("cat state has no support below the cutoff");
    }

    Eigen::VectorXcd cat = Eigen::VectorXcd::Zero(n_c);
    const double phase = std::arg(alpha == Complex(0.0, 0.0) ? Complex(1.0, 0.0) : alpha);
    for (std::size_t i = 0; i < support.size(); ++i) {
        cat(support[i]) = std::polar(std::exp(logmag[i] - top), support[i] * phase);
    }
    cat.normalize();
    const double fidelity = (cat.adjoint() * rho.data * cat)(0, 0).real();
    return std::clamp(fidelity, 0.0, 1.0);
}

}  // namespace nkerr
