#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "levq/inversion.hpp"

namespace levq {

/// Evenly spaced points lo, ..., hi; written "lo:hi:n".
struct Grid1D {
    double lo = 0.0;
    double hi = 0.0;
    int n = 1;

    std::vector<double> values() const;
    std::string str() const;
};

/// Throws Error(invalid_argument) unless text is "a:b:n" with n >= 1 and a <= b.
Grid1D parse_grid(std::string_view text);

struct RunOptions {
    std::uint64_t seed = 1;
    // simulation
    double horizon = 1e5;
    double warmup = 0.2;
    double step = 0.01;
    int batches = 32;
    int replications = 1;
    unsigned threads = 0;
    std::size_t trace_limit = 0;
    double trace_interval = 1.0;
    // factorization
    FactorChoice factors = FactorChoice::automatic;
    double grid_theta = 200.0;
    int grid_nodes = 16384;
    double grid_tail_tolerance = 1e-2;
    std::size_t mc_paths = 200000;
    // evaluation grids
    Grid1D alpha1{0.5, 2.0, 3};
    Grid1D alpha2{0.5, 2.0, 3};
    Grid1D x{0.0, 10.0, 41};
    int queue = 1;
    double moment_step = 0.02;
    // inversion
    InversionMethod inversion = InversionMethod::euler;
    int inversion_terms = 50;
    double inversion_target = 1e-8;

    FactorOptions factor_options() const;
    InversionConfig inversion_config() const;
};

struct Coupling {
    LevyModel x1;
    LevyModel x2;
    double r1;
    double r2;
};

/// Parsed configuration file: either the coupled form directly or a
/// two-node fluid network mapped onto it.
struct ModelConfig {
    std::variant<Coupling, FluidNetwork> model;
    RunOptions run;

    bool is_network() const { return std::holds_alternative<FluidNetwork>(model); }
    CoupledSystem system() const;
};

/// Sections [queue1], [queue2], [coupling] or [network], [input1], [input2],
/// and [run]. Unknown sections or keys raise Error(invalid_argument).
ModelConfig parse_config(std::string_view text);
ModelConfig load_config(const std::filesystem::path& path);

/// Canonical text with every number printed to 17 significant digits.
std::string serialize(const ModelConfig& config);

/// Hex SHA-256 of the canonical serialization.
std::string config_digest(const ModelConfig& config);

const char* to_string(FactorChoice c) noexcept;
/// Inverse of to_string(FactorChoice).
FactorChoice parse_factor_choice(std::string_view name);

}  // namespace levq
