// JSON experiment configuration.
//
// Documents are parsed once into plain structs; policy specs stay symbolic so
// sweeps can rebuild scheme parameters for every grid cell.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ehsim/simulator.hpp"

namespace ehsim {

struct PolicySpec {
    std::string kind;  // scheme-b, scheme-q, scheme-e, scheme-to, constant
    std::string label;
    std::optional<double> mu, lambda;
    std::optional<double> sigma_r2, sigma_a2;
    std::optional<double> beta, beta_q;
    std::optional<double> delta_r, epsilon, draw;
    std::optional<double> delta_minus, delta_plus;  // explicit scheme-b offsets
    std::optional<double> delta_r1, delta_r2;       // explicit scheme-q offsets
};

struct ExperimentConfig {
    SimConfig sim;
    PolicySpec policy;
    std::uint32_t n_replications = 8;
    std::optional<double> sigma_r2;  // overrides the replenishment's declared asymptotic variance
    std::optional<double> sigma_a2;
    std::optional<std::filesystem::path> trace_path;
    std::uint64_t trace_limit = 100'000;
    std::uint64_t hash = 0;
};

struct SweepSpec {
    ExperimentConfig base;
    std::vector<PolicySpec> policies;
    std::string axis;  // M, K, rho, delta_r
    std::vector<double> values;
    std::string name = "sweep";
    std::uint64_t hash = 0;
};

struct TradeoffSpec {
    ExperimentConfig base;
    std::size_t n_grid = 50;
    std::vector<double> operating_points;  // at most 3 delta_r values
    std::vector<double> m_grid;
    std::vector<double> k_grid;
    std::optional<double> loss_battery;  // M used for the K sweep; default 10 * max(K grid)
    std::string name = "tradeoff";
    std::uint64_t hash = 0;
};

struct StatsSpec {
    ProcessSource source = make_iid_gaussian(1.0, 0.0);
    std::uint64_t horizon = 1'000'000;
    std::uint64_t batch_len = 1000;
    std::uint64_t seed = 1;
    std::uint64_t hash = 0;
};

/// FNV-1a over bytes.
std::uint64_t fnv1a(std::string_view bytes);

/// `origin` is used as the file name in error messages (file:line: field 'x': ...).
ExperimentConfig parse_experiment(std::string_view text, const std::string& origin = "<config>");
SweepSpec parse_sweep(std::string_view text, const std::string& origin = "<spec>");
TradeoffSpec parse_tradeoff(std::string_view text, const std::string& origin = "<spec>");
StatsSpec parse_stats(std::string_view text, const std::string& origin = "<spec>");

std::string read_text_file(const std::filesystem::path& path);

/// Policy for the scheme and the configuration it will run in (uses M, K, the
/// process means and variances, and the rate function).
Policy build_policy(const PolicySpec& spec, const ExperimentConfig& cfg);

/// sigma^2 of replenishment (override first, then the declared value); nullopt if unknown.
std::optional<double> replenishment_var(const ExperimentConfig& cfg);
std::optional<double> arrivals_var(const ExperimentConfig& cfg);

std::string policy_label(const PolicySpec& spec);

}  // namespace ehsim
