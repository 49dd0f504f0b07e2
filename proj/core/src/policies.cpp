#include "ehsim/policies.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ehsim/errors.hpp"

namespace ehsim {

std::string to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::SchemeB: return "scheme-b";
        case PolicyKind::SchemeQ: return "scheme-q";
        case PolicyKind::SchemeE: return "scheme-e";
        case PolicyKind::SchemeTO: return "scheme-to";
        case PolicyKind::Constant: return "constant";
    }
    return "unknown";
}

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw ParameterError(std::string(name) + " must be positive, got " + std::to_string(v));
}

}  // namespace

Policy make_scheme_b(double mu, double sigma_r2, double beta, double M) {
    require_positive(mu, "mu");
    require_positive(sigma_r2, "sigma_r2");
    if (!(M > 1.0)) throw ParameterError("scheme-b: battery capacity M must exceed 1");
    if (!(beta >= 2.0)) throw ParameterError("scheme-b: beta must be at least 2");
    const double delta = beta * sigma_r2 * std::log(M) / M;
    if (delta >= mu) {
        std::ostringstream msg;
        msg << "scheme-b: drift beta*sigma_r2*ln(M)/M = " << delta << " is not below mu = " << mu
            << "; battery too small for these parameters";
        throw ConfigurationError(msg.str());
    }
    Policy p;
    p.kind = PolicyKind::SchemeB;
    p.mu = mu;
    p.delta_b = delta;
    p.delta_b_plus = delta;
    p.beta = beta;
    p.battery_capacity = M;
    return p;
}

Policy make_scheme_b_asymmetric(double mu, double delta_minus, double delta_plus, double M) {
    require_positive(mu, "mu");
    require_positive(M, "M");
    if (!(delta_minus >= 0.0) || !(delta_plus >= 0.0) || delta_minus >= mu)
        throw ConfigurationError("scheme-b: offsets must be nonnegative with delta_minus < mu");
    Policy p;
    p.kind = PolicyKind::SchemeB;
    p.mu = mu;
    p.delta_b = delta_minus;
    p.delta_b_plus = delta_plus;
    p.battery_capacity = M;
    return p;
}

Policy make_scheme_q(double mu, double lambda, double sigma_a2, double beta_q, double K,
                     const RatePowerFunction& rate_fn) {
    require_positive(mu, "mu");
    require_positive(lambda, "lambda");
    require_positive(sigma_a2, "sigma_a2");
    if (!(K > 1.0)) throw ParameterError("scheme-q: buffer capacity K must exceed 1");
    if (!(beta_q >= 2.0)) throw ParameterError("scheme-q: beta_q must be at least 2");
    const double capacity = rate_fn.rate(mu);
    if (lambda >= capacity) {
        std::ostringstream msg;
        msg << "stability condition lambda < C(mu) violated: lambda = " << lambda << ", C(mu) = " << capacity;
        throw StabilityError(msg.str());
    }
    const double delta_a = beta_q * sigma_a2 * std::log(K) / K;
    if (delta_a >= lambda || lambda + delta_a >= capacity) {
        std::ostringstream msg;
        msg << "scheme-q: queue drift " << delta_a << " must satisfy delta_a < lambda and lambda + delta_a < C(mu) = "
            << capacity;
        throw ConfigurationError(msg.str());
    }
    Policy p;
    p.kind = PolicyKind::SchemeQ;
    p.mu = mu;
    p.lambda = lambda;
    p.delta_a = delta_a;
    p.delta_r1 = mu - rate_fn.inverse(lambda + delta_a);
    p.delta_r2 = mu - rate_fn.inverse(lambda - delta_a);
    p.beta_q = beta_q;
    p.buffer_capacity = K;
    return p;
}

Policy make_scheme_q_explicit(double mu, double delta_r1, double delta_r2, double K) {
    require_positive(mu, "mu");
    require_positive(K, "K");
    if (!(delta_r1 < mu) || !(delta_r2 <= mu))
        throw ConfigurationError("scheme-q: offsets must leave a nonnegative draw");
    Policy p;
    p.kind = PolicyKind::SchemeQ;
    p.mu = mu;
    p.delta_r1 = delta_r1;
    p.delta_r2 = delta_r2;
    p.buffer_capacity = K;
    return p;
}

Policy make_scheme_e(double mu, double delta_r, double lambda, const RatePowerFunction& rate_fn) {
    require_positive(mu, "mu");
    if (!(lambda >= 0.0)) throw ParameterError("lambda must be nonnegative");
    const double upper = mu - rate_fn.inverse(lambda);
    if (!(delta_r > 0.0 && delta_r < upper)) {
        std::ostringstream msg;
        msg << "scheme-e: delta_r = " << delta_r << " outside the open interval (0, mu - C^-1(lambda)) = (0, "
            << upper << ")";
        throw ConfigurationError(msg.str());
    }
    Policy p;
    p.kind = PolicyKind::SchemeE;
    p.mu = mu;
    p.lambda = lambda;
    p.delta_r = delta_r;
    p.delta_a = rate_fn.rate(mu - delta_r) - lambda;
    return p;
}

Policy make_scheme_to(double mu, double epsilon, double lambda, const RatePowerFunction& rate_fn) {
    require_positive(mu, "mu");
    if (!(epsilon > 0.0 && epsilon < mu)) throw ConfigurationError("scheme-to: epsilon must lie in (0, mu)");
    if (!(rate_fn.rate(mu - epsilon) > lambda)) {
        std::ostringstream msg;
        msg << "scheme-to: C(mu - epsilon) = " << rate_fn.rate(mu - epsilon) << " must exceed lambda = " << lambda;
        throw ConfigurationError(msg.str());
    }
    Policy p;
    p.kind = PolicyKind::SchemeTO;
    p.mu = mu;
    p.lambda = lambda;
    p.epsilon = epsilon;
    return p;
}

Policy make_constant(double draw) {
    if (!(draw >= 0.0) || !std::isfinite(draw)) throw ParameterError("constant draw must be nonnegative");
    Policy p;
    p.kind = PolicyKind::Constant;
    p.mu = draw;
    p.constant_draw = draw;
    return p;
}

double raw_request(const Policy& p, const NodeState& s) {
    switch (p.kind) {
        case PolicyKind::SchemeB:
            return s.battery >= 0.5 * p.battery_capacity ? p.mu + p.delta_b_plus : p.mu - p.delta_b;
        case PolicyKind::SchemeQ:
            return s.queue >= 0.5 * p.buffer_capacity ? p.mu - p.delta_r1 : p.mu - p.delta_r2;
        case PolicyKind::SchemeE: return p.mu - p.delta_r;
        case PolicyKind::SchemeTO: return std::min(std::max(s.battery, 0.0), p.mu - p.epsilon);
        case PolicyKind::Constant: return p.constant_draw;
    }
    return 0.0;
}

Decision decide_detail(const Policy& p, const NodeState& s, const RatePowerFunction& rate_fn, Mode mode) {
    Decision d;
    d.raw = raw_request(p, s);
    d.wanted = d.raw;
    if (mode == Mode::Joint) d.wanted = std::min(d.wanted, rate_fn.inverse(std::max(s.queue, 0.0)));
    d.energy = std::max(0.0, std::min(d.wanted, s.battery));
    return d;
}

std::string Policy::describe() const {
    std::ostringstream out;
    out << to_string(kind) << "(mu=" << mu;
    switch (kind) {
        case PolicyKind::SchemeB: out << ", delta-=" << delta_b << ", delta+=" << delta_b_plus; break;
        case PolicyKind::SchemeQ: out << ", delta_r1=" << delta_r1 << ", delta_r2=" << delta_r2; break;
        case PolicyKind::SchemeE: out << ", delta_r=" << delta_r; break;
        case PolicyKind::SchemeTO: out << ", epsilon=" << epsilon; break;
        case PolicyKind::Constant: break;
    }
    out << ')';
    return out.str();
}

}  // namespace ehsim
