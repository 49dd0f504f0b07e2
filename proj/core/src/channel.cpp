#include "ehsim/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ehsim/errors.hpp"

namespace ehsim {

double awgn_rate(double e, double gamma) {
    if (!(e >= 0.0)) throw DomainError("rate-power function: energy must be nonnegative, got " + std::to_string(e));
    if (!(gamma > 0.0)) throw ParameterError("rate-power function: gamma must be positive");
    return std::log1p(gamma * e) / std::numbers::ln2;
}

double awgn_inverse_rate(double rate, double gamma) {
    if (!(rate >= 0.0)) throw DomainError("inverse rate: rate must be nonnegative, got " + std::to_string(rate));
    if (!(gamma > 0.0)) throw ParameterError("inverse rate: gamma must be positive");
    return std::expm1(rate * std::numbers::ln2) / gamma;
}

double RatePowerFunction::rate(double e) const { return awgn_rate(e, effective_gamma()); }

double RatePowerFunction::inverse(double r) const { return awgn_inverse_rate(r, effective_gamma()); }

RatePowerFunction make_awgn(double gamma, double energy_unit_scale) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ParameterError("gamma must be positive");
    if (!(energy_unit_scale > 0.0) || !std::isfinite(energy_unit_scale))
        throw ParameterError("energy_unit_scale must be positive");
    return RatePowerFunction{gamma, energy_unit_scale};
}

PiecewiseLinear::PiecewiseLinear(std::vector<std::pair<double, double>> knots) : knots_(std::move(knots)) {
    if (knots_.size() < 2) throw ParameterError("utility table needs at least two knots");
    if (knots_.front().first != 0.0 || knots_.front().second != 0.0)
        throw ParameterError("utility table must start at the knot (0, 0)");
    for (std::size_t i = 1; i < knots_.size(); ++i) {
        const double dx = knots_[i].first - knots_[i - 1].first;
        if (!(dx > 0.0)) throw ParameterError("utility table knots must be strictly increasing in x");
        const double slope = (knots_[i].second - knots_[i - 1].second) / dx;
        if (slope < 0.0) throw ParameterError("utility table must be non-decreasing");
        if (!slopes_.empty() && slope > slopes_.back() * (1.0 + 1e-12) + 1e-15)
            throw ParameterError("utility table must be concave (slopes non-increasing), violated at knot " +
                                 std::to_string(i));
        slopes_.push_back(slope);
    }
}

double PiecewiseLinear::operator()(double x) const {
    if (x >= knots_.back().first) return knots_.back().second + slopes_.back() * (x - knots_.back().first);
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), x,
                                     [](double v, const auto& knot) { return v < knot.first; });
    const std::size_t i = static_cast<std::size_t>(it - knots_.begin()) - 1;
    return knots_[i].second + slopes_[i] * (x - knots_[i].first);
}

UtilityFunction make_log_capacity(RatePowerFunction rate_fn) {
    return UtilityFunction{UtilityKind::LogCapacity, rate_fn, RateTransform::Identity, nullptr};
}

UtilityFunction make_rate_utility(RatePowerFunction rate_fn, RateTransform transform,
                                  std::vector<std::pair<double, double>> table_knots) {
    UtilityFunction u{UtilityKind::RateUtility, rate_fn, transform, nullptr};
    if (transform == RateTransform::Table) {
        u.table = std::make_shared<const PiecewiseLinear>(std::move(table_knots));
    } else if (!table_knots.empty()) {
        throw ParameterError("table knots given for a non-table rate utility");
    }
    return u;
}

UtilityFunction make_tabulated_utility(std::vector<std::pair<double, double>> knots) {
    UtilityFunction u;
    u.kind = UtilityKind::Tabulated;
    u.table = std::make_shared<const PiecewiseLinear>(std::move(knots));
    return u;
}

double rate_utility_eval(const UtilityFunction& u, double rate) {
    if (!(rate >= 0.0)) throw DomainError("utility: rate must be nonnegative");
    switch (u.kind) {
        case UtilityKind::LogCapacity: return rate;
        case UtilityKind::RateUtility:
            switch (u.transform) {
                case RateTransform::Identity: return rate;
                case RateTransform::Log1p: return std::log1p(rate);
                case RateTransform::Table: return (*u.table)(rate);
            }
            break;
        case UtilityKind::Tabulated: break;
    }
    throw UnsupportedError("tabulated energy utility has no rate form");
}

double utility_eval(const UtilityFunction& u, double e) {
    if (!(e >= 0.0)) throw DomainError("utility: energy must be nonnegative, got " + std::to_string(e));
    if (u.kind == UtilityKind::Tabulated) return (*u.table)(e);
    return rate_utility_eval(u, u.rate_fn.rate(e));
}

std::string UtilityFunction::describe() const {
    std::ostringstream out;
    switch (kind) {
        case UtilityKind::LogCapacity: out << "log-capacity(gamma=" << rate_fn.effective_gamma() << ')'; break;
        case UtilityKind::RateUtility:
            out << "rate-utility(" << (transform == RateTransform::Identity ? "identity"
                                       : transform == RateTransform::Log1p  ? "log"
                                                                            : "table")
                << ", gamma=" << rate_fn.effective_gamma() << ')';
            break;
        case UtilityKind::Tabulated: out << "tabulated(" << table->knots().size() << " knots)"; break;
    }
    return out.str();
}

}  // namespace ehsim
