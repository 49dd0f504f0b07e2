// Energy-management schemes.
//
// Every scheme is a map from the node state to a requested draw. The raw
// request follows the scheme's branch rule; decide() then applies the
// feasibility clamps (battery always, queue in joint mode).
#pragma once

#include <string>

#include "ehsim/channel.hpp"
#include "ehsim/state.hpp"

namespace ehsim {

enum class PolicyKind { SchemeB, SchemeQ, SchemeE, SchemeTO, Constant };

std::string to_string(PolicyKind kind);

struct Policy {
    PolicyKind kind = PolicyKind::Constant;
    double mu = 0.0;
    double lambda = 0.0;
    // scheme B: draw mu - delta_b below M/2, mu + delta_b_plus at or above.
    double delta_b = 0.0;
    double delta_b_plus = 0.0;
    double beta = 0.0;
    // scheme Q: draw mu - delta_r1 at or above K/2, mu - delta_r2 below.
    double delta_r1 = 0.0;
    double delta_r2 = 0.0;
    double delta_a = 0.0;
    double beta_q = 0.0;
    // scheme E: constant draw mu - delta_r; delta_a holds the implied queue drift.
    double delta_r = 0.0;
    // scheme TO: draw min(B, mu - epsilon).
    double epsilon = 0.0;
    double constant_draw = 0.0;
    double battery_capacity = 0.0;
    double buffer_capacity = 0.0;

    std::string describe() const;
};

/// delta_b = beta * sigma_r2 * ln(M) / M.
Policy make_scheme_b(double mu, double sigma_r2, double beta, double M);

/// Two-level battery rule with independent offsets. Used by the exact-chain tests.
Policy make_scheme_b_asymmetric(double mu, double delta_minus, double delta_plus, double M);

/// delta_a = beta_q * sigma_a2 * ln(K) / K, and the two energy offsets solve
/// C(mu - delta_r1) - lambda = lambda - C(mu - delta_r2) = delta_a.
Policy make_scheme_q(double mu, double lambda, double sigma_a2, double beta_q, double K,
                     const RatePowerFunction& rate_fn);

/// Queue-threshold rule with explicit offsets (no drift relation enforced).
Policy make_scheme_q_explicit(double mu, double delta_r1, double delta_r2, double K);

Policy make_scheme_e(double mu, double delta_r, double lambda, const RatePowerFunction& rate_fn);

Policy make_scheme_to(double mu, double epsilon, double lambda, const RatePowerFunction& rate_fn);

Policy make_constant(double draw);

/// Unclamped branch value for `state`.
double raw_request(const Policy& policy, const NodeState& state);

struct Decision {
    double raw = 0.0;     // branch value
    double wanted = 0.0;  // after the queue clamp (joint mode)
    double energy = 0.0;  // after the battery clamp; what decide() returns
};

Decision decide_detail(const Policy& policy, const NodeState& state, const RatePowerFunction& rate_fn, Mode mode);

/// Requested energy after clamps: min(raw, B), and additionally min(., C^-1(Q)) in joint mode.
inline double decide(const Policy& policy, const NodeState& state, const RatePowerFunction& rate_fn, Mode mode) {
    return decide_detail(policy, state, rate_fn, mode).energy;
}

}  // namespace ehsim
