#include "nkerr/config.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nkerr {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char delim) {
    std::vector<std::string> out;
    std::string token;
    std::istringstream in(s);
    while (std::getline(in, token, delim)) out.push_back(trim(token));
    if (!s.empty() && s.back() == delim) out.push_back("");
    return out;
}

double parse_double(const std::string& s, const std::string& key) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (trim(s.substr(used)).empty()) return v;
    } catch (const std::exception&) {
    }
    throw std::invalid_argument("config key '" + key + "': cannot parse number from '" + s + "'");
}

int parse_int(const std::string& s, const std::string& key) {
    const double v = parse_double(s, key);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v) {
        throw std::invalid_argument("config key '" + key + "': expected an integer, got '" + s +
                                    "'");
    }
    return i;
}

bool parse_bool(const std::string& s, const std::string& key) {
    if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
    if (s == "false" || s == "no" || s == "off" || s == "0") return false;
    throw std::invalid_argument("config key '" + key + "': expected a boolean, got '" + s + "'");
}

// Either "a, b, c" or "start : stop : count".
std::vector<double> parse_grid(const std::string& s, const std::string& key) {
    if (s.find(':') != std::string::npos) {
        const auto parts = split(s, ':');
        if (parts.size() != 3) {
            throw std::invalid_argument("config key '" + key +
                                        "': grid must be start : stop : count");
        }
        const double start = parse_double(parts[0], key);
        const double stop = parse_double(parts[1], key);
        const int count = parse_int(parts[2], key);
        if (count < 1) {
            throw std::invalid_argument("config key '" + key + "': grid count must be >= 1");
        }
        std::vector<double> grid;
        grid.reserve(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i) {
            const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
            grid.push_back(start + (stop - start) * t);
        }
        return grid;
    }
    std::vector<double> grid;
    for (const std::string& tok : split(s, ',')) {
        if (!tok.empty()) grid.push_back(parse_double(tok, key));
    }
    return grid;
}

void check_grid_strictly_increasing(const std::vector<double>& grid, const std::string& key) {
    if (grid.empty()) {
        throw std::invalid_argument("config key '" + key + "': grid must be nonempty");
    }
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) {
            throw std::invalid_argument("config key '" + key +
                                        "': grid must be strictly increasing");
        }
    }
}

std::vector<SectorLabel> parse_sectors(const std::string& s, SymmetryKind kind) {
    std::vector<SectorLabel> out;
    if (trim(s) == "all") return out;
    for (const std::string& tok : split(s, ';')) {
        if (tok.empty()) continue;
        const auto pair = split(tok, ',');
        if (kind == SymmetryKind::strong) {
            if (pair.size() != 2) {
                throw std::invalid_argument("strong-symmetry sector must be 'kL,kR'; got '" +
                                            tok + "'");
            }
            out.push_back(SectorLabel::strong(parse_int(pair[0], "sectors"),
                                              parse_int(pair[1], "sectors")));
        } else {
            if (pair.size() != 1) {
                throw std::invalid_argument("weak-symmetry sector must be a single k; got '" +
                                            tok + "'");
            }
            out.push_back(SectorLabel::weak(parse_int(pair[0], "sectors")));
        }
    }
    return out;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

SweepConfig parse_config(std::istream& in) {
    std::vector<std::pair<std::string, std::string>> raw;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected 'key = value', got '" + line + "'");
        }
        raw.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }

    SweepConfig config;
    config.raw = raw;
    std::string sectors_value;
    int cutoff_value = 0;
    bool cutoff_seen = false;
    bool adaptive_seen = false;

    for (const auto& [key, value] : raw) {
        if (key == "n") {
            config.base.n = parse_int(value, key);
        } else if (key == "u") {
            config.base.u = parse_grid(value, key);
        } else if (key == "g") {
            config.base.g_n = parse_double(value, key);
        } else if (key == "gamma") {
            config.base.gamma = parse_double(value, key);
        } else if (key == "eta") {
            config.base.eta_n = parse_double(value, key);
        } else if (key == "l") {
            config.base.scale_l = parse_double(value, key);
        } else if (key == "cutoff") {
            cutoff_value = parse_int(value, key);
            cutoff_seen = true;
        } else if (key == "adaptive_cutoff") {
            config.adaptive_cutoff = parse_bool(value, key);
            adaptive_seen = true;
        } else if (key == "g_grid") {
            config.drive_grid = parse_grid(value, key);
            check_grid_strictly_increasing(config.drive_grid, key);
        } else if (key == "l_grid") {
            config.l_grid = parse_grid(value, key);
            check_grid_strictly_increasing(config.l_grid, key);
        } else if (key == "sectors") {
            sectors_value = value;
        } else if (key == "n_eigs") {
            config.n_eigs = parse_int(value, key);
        } else if (key == "threads") {
            config.threads = parse_int(value, key);
        } else {
            throw std::invalid_argument("unknown config key '" + key + "'");
        }
    }

    if (cutoff_seen) {
        config.fixed_cutoff = cutoff_value;
        if (!adaptive_seen) config.adaptive_cutoff = false;
        config.base.cutoff = FockCutoff(std::max(2, cutoff_value));
    }
    if (!sectors_value.empty()) {
        config.sectors = parse_sectors(sectors_value, symmetry_kind(config.base));
    }
    if (config.drive_grid.empty()) config.drive_grid = {config.base.g_n};
    if (config.l_grid.empty()) config.l_grid = {1.0};
    if (config.n_eigs < 1) {
        throw std::invalid_argument("n_eigs must be at least 1");
    }
    if (config.threads < 1) config.threads = 1;
    validate(config.base);
    return config;
}

SweepConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open config file '" + path + "'");
    }
    return parse_config(in);
}

std::string serialize_config(const SweepConfig& config) {
    std::ostringstream out;
    const char* unit = config.base.gamma > 0.0 ? "gamma" : "eta";
    out << "# rates and energies in units of " << unit << "\n";
    out << "n = " << config.base.n << "\n";
    out << "u = ";
    for (std::size_t i = 0; i < config.base.u.size(); ++i) {
        if (i) out << ", ";
        out << format_double(config.base.u[i]);
    }
    out << "\n";
    out << "g = " << format_double(config.base.g_n) << "\n";
    out << "gamma = " << format_double(config.base.gamma) << "\n";
    out << "eta = " << format_double(config.base.eta_n) << "\n";
    out << "l = " << format_double(config.base.scale_l) << "\n";
    if (config.fixed_cutoff > 0) out << "cutoff = " << config.fixed_cutoff << "\n";
    out << "adaptive_cutoff = " << (config.adaptive_cutoff ? "true" : "false") << "\n";
    out << "g_grid = ";
    for (std::size_t i = 0; i < config.drive_grid.size(); ++i) {
        if (i) out << ", ";
        out << format_double(config.drive_grid[i]);
    }
    out << "\n";
    out << "l_grid = ";
    for (std::size_t i = 0; i < config.l_grid.size(); ++i) {
        if (i) out << ", ";
        out << format_double(config.l_grid[i]);
    }
    out << "\n";
    if (!config.sectors.empty()) {
        out << "sectors = ";
        for (std::size_t i = 0; i < config.sectors.size(); ++i) {
            if (i) out << "; ";
            const SectorLabel& s = config.sectors[i];
            if (s.kind == SectorLabel::Kind::strong) {
                out << s.k_left << "," << s.k_right;
            } else {
                out << s.k;
            }
        }
        out << "\n";
    }
    out << "n_eigs = " << config.n_eigs << "\n";
    out << "threads = " << config.threads << "\n";
    return out.str();
}

std::string config_hash(const SweepConfig& config) {
    const std::string text = serialize_config(config);
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

}  // namespace nkerr
