#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "nkerr/model.hpp"
#include "nkerr/symmetry.hpp"

namespace nkerr {

// Sweep description. The model parameters are the L-independent (tilde)
// values, quoted in units of the reference rate: gamma when gamma > 0,
// otherwise eta_n, matching the convention of the source-figure captions.
// Per grid point the engine applies the thermodynamic rescaling at scale L
// and then assembles the truncated model.
struct SweepConfig {
    ModelSpec base;                     // tilde parameters; scale_l is the base scale
    std::vector<double> drive_grid;     // tilde drive values; empty -> {base.g_n}
    std::vector<double> l_grid;         // empty -> {1}
    bool adaptive_cutoff = true;
    int fixed_cutoff = 0;               // >0 overrides the per-point estimate
    std::vector<SectorLabel> sectors;   // empty -> every sector of the decomposition
    int n_eigs = 4;
    int threads = 1;

    // Key-value pairs as read from the config file, for the run manifest.
    std::vector<std::pair<std::string, std::string>> raw;
};

// Flat "key = value" text, '#' comments. Lists are comma separated; grids
// accept "start : stop : count". Throws std::invalid_argument with the
// offending line on parse errors.
SweepConfig parse_config(std::istream& in);
SweepConfig parse_config_file(const std::string& path);

std::string serialize_config(const SweepConfig& config);

// FNV-1a hash of the serialized configuration, hex encoded.
std::string config_hash(const SweepConfig& config);

}  // namespace nkerr
