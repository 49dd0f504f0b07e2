// Slot-by-slot node evolution and long-run metric estimation.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ehsim/channel.hpp"
#include "ehsim/policies.hpp"
#include "ehsim/processes.hpp"
#include "ehsim/state.hpp"

namespace ehsim {

struct SimConfig {
    Mode mode = Mode::BatteryOnly;
    double M = 100.0;
    double K = 0.0;  // unused in battery-only mode
    std::uint64_t horizon = 1'000'000;
    std::optional<std::uint64_t> warmup;  // default min(1e5, horizon / 10)
    ProcessSource replenishment = make_iid_gaussian(1.0, 0.0);
    std::optional<ProcessSource> arrivals;
    Policy policy = make_constant(1.0);
    UtilityFunction utility{};
    RatePowerFunction rate_fn{};
    std::uint64_t seed = 1;
    std::optional<double> initial_battery;  // default M/2
    std::optional<double> initial_queue;    // default K/2
    std::uint32_t n_batches = 32;

    std::uint64_t effective_warmup() const noexcept;
    NodeState initial_state() const noexcept;
};

/// Throws on invalid configurations; returns (and emits) non-fatal warnings.
std::vector<std::string> validate(const SimConfig& cfg);

struct SlotRecord {
    double r = 0.0;
    double a = 0.0;
    double e_consumed = 0.0;
    double service = 0.0;
    double utility = 0.0;
    double data_lost = 0.0;
    double energy_overflow = 0.0;
    bool discharged = false;          // pre-clamp battery under the requested draw <= 0
    bool prevented = false;           // requested draw exceeded the available energy
    bool battery_overflowed = false;
};

/// One slot. The policy picks its draw from (B, Q); the draw is then capped by
/// the data Q + a and served from the energy B + r (if it exceeds that energy the
/// battery is drained with zero service and utility), then both levels are clamped.
std::pair<NodeState, SlotRecord> step(const NodeState& state, const SimConfig& cfg, double r, double a);

struct Estimate {
    double value = 0.0;
    double half_width = 0.0;  // 95% Student-t
};

struct Metrics {
    Estimate p_discharge;
    Estimate p_loss;
    Estimate avg_utility;
    Estimate mean_energy;
    /// Utility shortfall against the realised input: U(mean r) - avg_utility in
    /// battery-only mode, U_D(mean a) - avg_utility in joint mode.
    Estimate utility_gap;
    double mean_replenishment = 0.0;
    double mean_arrivals = 0.0;
    double mean_service = 0.0;
    std::uint32_t n_batches = 0;
    std::uint32_t n_replications = 1;
    std::uint64_t measured_slots = 0;
    bool exact = false;

    // Whole-run totals (warmup included), compensated sums.
    double initial_battery = 0.0;
    double final_battery = 0.0;
    double total_replenished = 0.0;
    double total_consumed = 0.0;
    double total_energy_overflow = 0.0;
    double initial_queue = 0.0;
    double final_queue = 0.0;
    double total_arrivals = 0.0;
    double total_served = 0.0;
    double total_lost = 0.0;
};

/// Single run with batch-means confidence intervals. If `trace` is given, the
/// first `trace_limit` slots are written as CSV (slot,B,Q,e,service,r,a,discharged,lost).
Metrics run(const SimConfig& cfg, std::ostream* trace = nullptr, std::uint64_t trace_limit = UINT64_MAX);

/// Independent replications with seeds derived from cfg.seed; half-widths come
/// from the across-replication spread. Result does not depend on `threads`.
Metrics run_batched(const SimConfig& cfg, std::uint32_t n_replications, std::uint32_t threads = 1);

/// Student-t 95% half-width for the mean of `values`.
Estimate mean_with_ci(const std::vector<double>& values);

/// Stationary metrics of the exact Markov chain on integer states.
/// Requires finite-support integer inputs, M <= 200 and K <= 100.
Metrics exact_chain_analysis(const SimConfig& cfg);

inline constexpr double kMaxOracleBattery = 200.0;
inline constexpr double kMaxOracleBuffer = 100.0;

/// Reference level for the utility gap: U(mean_r) or U_D(mean_a).
double utility_reference(const SimConfig& cfg, double mean_r, double mean_a);

}  // namespace ehsim
