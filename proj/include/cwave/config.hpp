#pragma once
// Run configuration files (TOML).  Sections [grid] [physics] [initial]
// [fitting] drive the self-similar runs, [physical] the blow-up surface
// scan.  Unknown keys are errors, so typos do not silently fall back to
// defaults.
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "cwave/pde.hpp"
#include "cwave/surface.hpp"

namespace cwave {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    // [grid]
    double half_width = 0.0;  // 0: default_half_width of the initial config
    int n = 2048;
    // [physics]
    double p = 3.0;
    // [initial]
    SolitonConfig initial;
    double perturbation = 0.0;  // H-norm of the seeded perturbation
    std::uint64_t seed = 0;
    // [fitting]
    ExperimentOptions experiment;
    double toda_min_gap = 8.0;
    double toda_skip = 2.0;
    int toda_half_window = 10;
    // [physical]
    bool has_physical = false;
    PhysicalOptions physical;
    OddProfile profile;
    int m_lo = 8, m_hi = 32;
};

RunConfig parse_config(const std::string& text, const std::string& origin = "<string>");
RunConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const RunConfig& c);

}  // namespace cwave
