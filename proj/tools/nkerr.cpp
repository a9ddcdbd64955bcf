// Command-line front end: sector spectra, parameter sweeps, semiclassical
// branch tables, transition classification and gap-scaling series.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "nkerr/config.hpp"
#include "nkerr/semiclassical.hpp"
#include "nkerr/spectra.hpp"
#include "nkerr/sweep.hpp"

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_output(const std::string& dir, const std::string& name) {
    fs::create_directories(dir);
    const fs::path path = fs::path(dir) / name;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file " + path.string());
    return out;
}

struct CommonOptions {
    std::string config_path;
    std::string out_dir = "out";
    std::string sectors;
    int n_eigs = 0;
    int cutoff = 0;
    int threads = 0;
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool config_required = true) {
    auto* c = cmd->add_option("--config", opts.config_path, "model/sweep config file");
    if (config_required) c->required();
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--sectors", opts.sectors,
                    "tracked sectors, e.g. \"0; 1\" (weak) or \"0,0; 0,1\" (strong), or all");
    cmd->add_option("--n-eigs", opts.n_eigs, "eigenvalues per sector");
    cmd->add_option("--cutoff", opts.cutoff, "fixed Fock cutoff (disables the adaptive rule)");
    cmd->add_option("--threads", opts.threads, "worker threads for grid points");
}

nkerr::SweepConfig load_config(const CommonOptions& opts) {
    nkerr::SweepConfig config = nkerr::parse_config_file(opts.config_path);
    if (!opts.sectors.empty()) {
        // Route the flag through the config parser to share the syntax; the
        // last occurrence of a key wins.
        std::istringstream full(nkerr::serialize_config(config) + "sectors = " + opts.sectors +
                                "\n");
        config = nkerr::parse_config(full);
    }
    if (opts.n_eigs > 0) config.n_eigs = opts.n_eigs;
    if (opts.cutoff > 0) {
        config.fixed_cutoff = opts.cutoff;
        config.adaptive_cutoff = false;
    }
    if (opts.threads > 0) config.threads = opts.threads;
    return config;
}

int run_spectrum(const CommonOptions& opts) {
    using namespace nkerr;
    const SweepConfig config = load_config(opts);

    ModelSpec spec = rescale(config.base, config.l_grid.front()).spec;
    const SemiclassicalSolutionSet sc = fixed_points(config.base, config.base.g_n);
    double max_density = 0.0;
    for (const FixedPoint& fp : sc.points) {
        if (fp.stability != Stability::unstable) max_density = std::max(max_density, fp.density);
    }
    const int n_c = config.fixed_cutoff > 0
                        ? config.fixed_cutoff
                        : suggest_cutoff(spec, max_density);
    spec.cutoff = FockCutoff(n_c);

    const Superoperator sup = assemble(build_hamiltonian(spec), build_jump_ops(spec));
    const BlockDecomposition dec = sector_decomposition(sup, spec.n, symmetry_kind(spec));

    auto report = open_output(opts.out_dir, "blocks.txt");
    report << "# sector dimension nnz\n";
    for (int b = 0; b < dec.block_count(); ++b) {
        report << to_string(dec.blocks[b].label) << ' ' << dec.blocks[b].length << ' '
               << dec.block_matrices[b].nnz() << '\n';
    }

    auto csv = open_output(opts.out_dir, "spectrum.csv");
    csv << "sector,index,re_lambda,im_lambda,residual\n";
    for (int b = 0; b < dec.block_count(); ++b) {
        if (dec.blocks[b].length == 0) continue;
        const int count = std::min(config.n_eigs, dec.blocks[b].length);
        const SectorSpectrum ss = sector_spectrum(sup, dec, b, count);
        for (std::size_t i = 0; i < ss.eigenvalues.size(); ++i) {
            csv << to_string(ss.label) << ',' << i << ',' << fmt(ss.eigenvalues[i].real()) << ','
                << fmt(ss.eigenvalues[i].imag()) << ',' << fmt(ss.residuals[i]) << '\n';
        }
        if (ss.steady_state) {
            report << to_string(ss.label)
                   << " steady-state photons: " << fmt(photon_number(*ss.steady_state))
                   << " (null multiplicity " << ss.null_multiplicity << ")\n";
        }
    }
    std::cout << "spectrum written to " << opts.out_dir << " (n_c = " << n_c << ", "
              << dec.block_count() << " sectors)\n";
    return 0;
}

int run_sweep_cmd(const CommonOptions& opts) {
    using namespace nkerr;
    const SweepConfig config = load_config(opts);
    const std::vector<SweepRecord> records = run_sweep(config);

    auto csv = open_output(opts.out_dir, "records.csv");
    write_records_csv(config, records, csv);
    auto manifest = open_output(opts.out_dir, "manifest.json");
    write_manifest(config, records, manifest);

    std::size_t failures = 0;
    for (const SweepRecord& r : records) {
        if (!r.error.empty()) ++failures;
    }
    std::cout << records.size() << " records -> " << opts.out_dir << " (" << failures
              << " failed points)\n";
    return failures == 0 ? 0 : 2;
}

int run_semiclassical(const CommonOptions& opts) {
    using namespace nkerr;
    const SweepConfig config = load_config(opts);
    const ModelSpec& base = config.base;

    // Branch table: N over a generous grid, G_n(N) and stability.
    const MultistabilityReport multi = detect_multistability(base, 1e-6, 1e6);
    double n_max = 10.0;
    for (const Extremum& e : multi.extrema) n_max = std::max(n_max, 4.0 * e.density);

    auto branches = open_output(opts.out_dir, "branches.csv");
    branches << "density,drive,stability\n";
    const int samples = 512;
    for (int i = 1; i <= samples; ++i) {
        const double density = n_max * i / samples;
        const double g = drive_of_density(base, density);
        const SemiclassicalSolutionSet set = fixed_points(base, g);
        std::string stability = "unstable";
        for (const FixedPoint& fp : set.points) {
            if (std::abs(fp.density - density) <= 1e-6 * std::max(1.0, density)) {
                stability = to_string(fp.stability);
            }
        }
        branches << fmt(density) << ',' << fmt(g) << ',' << stability << '\n';
    }

    auto points = open_output(opts.out_dir, "fixed_points.csv");
    points << "g_tilde,density,theta,stability,multiplicity,re_jac_0,re_jac_1\n";
    for (double g : config.drive_grid) {
        const SemiclassicalSolutionSet set = fixed_points(base, g);
        for (const FixedPoint& fp : set.points) {
            points << fmt(g) << ',' << fmt(fp.density) << ',' << fmt(fp.theta) << ','
                   << to_string(fp.stability) << ',' << fp.multiplicity << ','
                   << fmt(fp.jacobian_eigs[0].real()) << ',' << fmt(fp.jacobian_eigs[1].real())
                   << '\n';
        }
    }

    auto report = open_output(opts.out_dir, "classification.txt");
    const TransitionReport tr = classify_transition(base);
    report << tr.summary << '\n';
    report << "extrema of G_n(N):";
    if (multi.extrema.empty()) report << " none";
    for (const Extremum& e : multi.extrema) {
        report << ' ' << (e.kind == Extremum::Kind::minimum ? "min" : "max") << '@'
               << fmt(e.density);
    }
    report << "\nDescartes bound on stationary points: " << multi.descartes_bound << '\n';

    std::cout << "semiclassical tables written to " << opts.out_dir << '\n';
    return 0;
}

int run_classify(const CommonOptions& opts) {
    using namespace nkerr;
    const SweepConfig config = load_config(opts);
    const TransitionReport tr = classify_transition(config.base);
    std::cout << tr.summary << '\n';
    return 0;
}

int run_scaling(const CommonOptions& opts, int which_eig, double g_fixed,
                const std::string& sector_text) {
    using namespace nkerr;
    SweepConfig config = load_config(opts);

    SectorLabel sector = SectorLabel::weak(0);
    if (symmetry_kind(config.base) == SymmetryKind::strong) sector = SectorLabel::strong(0, 0);
    if (!sector_text.empty()) {
        std::istringstream text(serialize_config(config) + "sectors = " + sector_text + "\n");
        const SweepConfig probe = parse_config(text);
        if (!probe.sectors.empty()) sector = probe.sectors.front();
    }
    if (g_fixed < 0.0) g_fixed = config.base.g_n;

    const ScalingSeries series = scaling_series(config, sector, which_eig, g_fixed);
    auto csv = open_output(opts.out_dir, "scaling.csv");
    csv << "l,re_lambda\n";
    for (const auto& [l, re] : series.points) csv << fmt(l) << ',' << fmt(re) << '\n';
    if (series.has_fit) {
        csv << "# fit log10|re lambda| = slope * L + intercept: slope=" << fmt(series.slope)
            << " intercept=" << fmt(series.intercept) << " r2=" << fmt(series.r_squared) << '\n';
    }
    std::cout << "scaling series written to " << opts.out_dir;
    if (series.has_fit) std::cout << " (slope " << fmt(series.slope) << ")";
    std::cout << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"n-photon driven-dissipative Kerr resonator toolkit"};
    app.require_subcommand(1);

    CommonOptions spectrum_opts, sweep_opts, semi_opts, classify_opts, scaling_opts;
    int scaling_eig = 1;
    double scaling_g = -1.0;
    std::string scaling_sector;

    auto* spectrum = app.add_subcommand("spectrum", "sector report for one model");
    add_common(spectrum, spectrum_opts);
    auto* sweep = app.add_subcommand("sweep", "grid run over drive and scale");
    add_common(sweep, sweep_opts);
    auto* semi = app.add_subcommand("semiclassical", "branch tables and classification");
    add_common(semi, semi_opts);
    auto* classify = app.add_subcommand("classify", "transition-class verdict");
    add_common(classify, classify_opts);
    auto* scaling = app.add_subcommand("scaling", "tracked eigenvalue against L");
    add_common(scaling, scaling_opts);
    scaling->add_option("--eig", scaling_eig, "eigenvalue index inside the sector");
    scaling->add_option("--g", scaling_g, "fixed tilde drive (default: config g)");
    scaling->add_option("--sector", scaling_sector, "sector, e.g. \"0\" or \"0,0\"");

    CLI11_PARSE(app, argc, argv);

    try {
        if (spectrum->parsed()) return run_spectrum(spectrum_opts);
        if (sweep->parsed()) return run_sweep_cmd(sweep_opts);
        if (semi->parsed()) return run_semiclassical(semi_opts);
        if (classify->parsed()) return run_classify(classify_opts);
        if (scaling->parsed()) {
            return run_scaling(scaling_opts, scaling_eig, scaling_g, scaling_sector);
        }
    } catch (const std::invalid_argument& err) {
        std::cerr << "config error: " << err.what() << '\n';
        return 1;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 2;
    }
    return 1;
}
