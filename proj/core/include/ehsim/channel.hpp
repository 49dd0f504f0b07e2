// Rate-power and utility functions.
#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace ehsim {

/// C(e) = log2(1 + gamma_eff * e) bits per slot, gamma_eff = gamma * energy_unit_scale.
/// energy_unit_scale converts the battery's energy unit into the unit C expects.
struct RatePowerFunction {
    double gamma = 1.0;
    double energy_unit_scale = 1.0;

    double effective_gamma() const noexcept { return gamma * energy_unit_scale; }
    double rate(double e) const;
    double inverse(double rate) const;
};

RatePowerFunction make_awgn(double gamma, double energy_unit_scale = 1.0);

double awgn_rate(double e, double gamma);
double awgn_inverse_rate(double rate, double gamma);

/// Concave, non-decreasing piecewise-linear function through the given knots.
/// The first knot must be (0, 0); beyond the last knot the final slope continues.
class PiecewiseLinear {
public:
    explicit PiecewiseLinear(std::vector<std::pair<double, double>> knots);

    double operator()(double x) const;
    const std::vector<std::pair<double, double>>& knots() const noexcept { return knots_; }

private:
    std::vector<std::pair<double, double>> knots_;
    std::vector<double> slopes_;
};

enum class UtilityKind { LogCapacity, RateUtility, Tabulated };

/// U_D, applied to the transmitted rate C(e).
enum class RateTransform { Identity, Log1p, Table };

struct UtilityFunction {
    UtilityKind kind = UtilityKind::LogCapacity;
    RatePowerFunction rate_fn{};
    RateTransform transform = RateTransform::Identity;
    std::shared_ptr<const PiecewiseLinear> table;  // Tabulated: U(e); RateUtility+Table: U_D(x)

    std::string describe() const;
};

/// U(e) = C(e).
UtilityFunction make_log_capacity(RatePowerFunction rate_fn);
/// U(e) = U_D(C(e)). `table_knots` is required iff transform == Table.
UtilityFunction make_rate_utility(RatePowerFunction rate_fn, RateTransform transform,
                                  std::vector<std::pair<double, double>> table_knots = {});
UtilityFunction make_tabulated_utility(std::vector<std::pair<double, double>> knots);

/// U(e); throws DomainError for e < 0.
double utility_eval(const UtilityFunction& u, double e);

/// U_D(x) for rate utilities (identity for log-capacity); throws UnsupportedError for tables of energy.
double rate_utility_eval(const UtilityFunction& u, double rate);

}  // namespace ehsim
