#include "ehsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <sstream>

#include "ehsim/diagnostics.hpp"
#include "ehsim/errors.hpp"

namespace ehsim {

std::string to_string(DecayModel model) {
    return model == DecayModel::Polynomial ? "polynomial" : "exponential";
}

double ld_root(const LogMgf& log_mgf, double drift_offset, RootSide side) {
    if (std::abs(log_mgf(0.0)) > 1e-12) throw ParameterError("ld_root: log-MGF must vanish at s = 0");
    auto f = [&](double s) { return log_mgf(s) - s * drift_offset; };
    const double dir = side == RootSide::Negative ? -1.0 : 1.0;

    // Near 0 the drifted function is negative on the side where the root lives.
    double inner = dir * 1e-3;
    double fi = f(inner);
    while (!(fi < 0.0)) {
        inner *= 0.5;
        if (std::abs(inner) < 1e-14)
            throw ExistenceError("ld_root: no nonzero root on the requested side (drift is zero or points the "
                                 "wrong way)");
        fi = f(inner);
    }
    double outer = inner * 2.0;
    double fo = f(outer);
    while (fo < 0.0) {
        inner = outer;
        outer *= 2.0;
        if (std::abs(outer) > 1e12) throw ExistenceError("ld_root: root not bracketed below |s| = 1e12");
        fo = f(outer);
        if (std::isnan(fo)) throw ExistenceError("ld_root: log-MGF not finite while bracketing");
    }
    // Bisection down to adjacent doubles.
    double lo = inner, hi = outer;
    for (int it = 0; it < 2000; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (f(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    const double root = std::abs(f(lo)) <= std::abs(f(hi)) ? lo : hi;
    if (root == 0.0) throw ExistenceError("ld_root: root collapsed to 0");
    return root;
}

double ld_root_slope(const LogMgf& log_mgf, double mean) {
    constexpr double d1 = 1e-3;
    constexpr double d2 = 1e-4;
    const double g1 = ld_root(log_mgf, mean - d1, RootSide::Negative) / d1;
    const double g2 = ld_root(log_mgf, mean - d2, RootSide::Negative) / d2;
    return g2 - (g1 - g2) * d2 / (d1 - d2);
}

double variance_slope_check(const LogMgf& log_mgf, double mean, double sigma2) {
    if (!(sigma2 > 0.0)) throw DomainError("variance_slope_check: sigma2 must be positive");
    const double slope = ld_root_slope(log_mgf, mean);
    return std::abs(slope + 2.0 / sigma2) * sigma2 / 2.0;
}

DecayPrediction predict_discharge_scheme_b(const LogMgf& log_mgf, double mu, double sigma_r2, double beta,
                                           double M) {
    if (!(beta >= 2.0)) throw ParameterError("predict_discharge_scheme_b: beta must be at least 2");
    if (!(M > 1.0)) throw ParameterError("predict_discharge_scheme_b: M must exceed 1");
    DecayPrediction p;
    p.model = DecayModel::Polynomial;
    p.exponent = beta;
    p.delta = beta * sigma_r2 * std::log(M) / M;
    p.s_star = ld_root(log_mgf, mu - p.delta, RootSide::Negative);
    p.point_value = std::exp(p.s_star * M / 2.0);
    return p;
}

namespace {

void require_domain(double drift, double var, double size, const char* what) {
    if (!(drift > 0.0)) throw DomainError(std::string(what) + ": drift must be positive");
    if (!(var > 0.0)) throw DomainError(std::string(what) + ": variance must be positive");
    if (!(size >= 0.0)) throw DomainError(std::string(what) + ": size must be nonnegative");
}

}  // namespace

double diffusion_underflow(double delta_r, double sigma_r2, double M) {
    require_domain(delta_r, sigma_r2, M, "diffusion_underflow");
    return std::exp(-2.0 * delta_r * M / sigma_r2);
}

double renewal_overflow(double delta_a, double sigma_a2, double K) {
    require_domain(delta_a, sigma_a2, K, "renewal_overflow");
    return delta_a * delta_a / sigma_a2 * std::exp(-delta_a * K / sigma_a2);
}

double scheme_e_overflow(double delta_a, double sigma_a2, double K) {
    require_domain(delta_a, sigma_a2, K, "scheme_e_overflow");
    return std::exp(-2.0 * delta_a * K / sigma_a2);
}

TradeoffPoint tradeoff_point(double mu, double lambda, const RatePowerFunction& rate_fn, double sigma_r2,
                             double sigma_a2, double delta_r) {
    TradeoffPoint t;
    t.delta_r = delta_r;
    t.discharge_exponent = 2.0 * delta_r / sigma_r2;
    t.loss_exponent = 2.0 * (rate_fn.rate(mu - delta_r) - lambda) / sigma_a2;
    return t;
}

std::vector<TradeoffPoint> tradeoff_curve(double mu, double lambda, double gamma, double sigma_r2, double sigma_a2,
                                          std::size_t n_grid) {
    if (n_grid < 2) throw ParameterError("tradeoff_curve: need at least 2 grid points");
    if (!(sigma_r2 > 0.0) || !(sigma_a2 > 0.0)) throw DomainError("tradeoff_curve: variances must be positive");
    const RatePowerFunction rate_fn = make_awgn(gamma);
    if (!(lambda < rate_fn.rate(mu))) {
        std::ostringstream msg;
        msg << "stability condition lambda < C(mu) violated: lambda = " << lambda << ", C(mu) = " << rate_fn.rate(mu);
        throw StabilityError(msg.str());
    }
    const double width = mu - rate_fn.inverse(lambda);
    std::vector<TradeoffPoint> curve;
    curve.reserve(n_grid);
    for (std::size_t i = 1; i <= n_grid; ++i) {
        const double d = width * static_cast<double>(i) / static_cast<double>(n_grid + 1);
        curve.push_back(tradeoff_point(mu, lambda, rate_fn, sigma_r2, sigma_a2, d));
    }
    return curve;
}

DecayFit fit_decay(const std::vector<std::pair<double, double>>& points, DecayModel model) {
    std::vector<double> xs, ys;
    DecayFit fit;
    fit.model = model;
    for (const auto& [size, p] : points) {
        if (!(p > 0.0)) {
            ++fit.n_dropped;
            continue;
        }
        if (model == DecayModel::Polynomial && !(size > 0.0))
            throw FitError("fit_decay: polynomial model needs positive sizes");
        xs.push_back(model == DecayModel::Polynomial ? std::log(size) : size);
        ys.push_back(std::log(p));
    }
    if (fit.n_dropped > 0)
        warn("fit_decay: dropped " + std::to_string(fit.n_dropped) +
             " point(s) with no observed events; extend the horizon to include them");
    if (xs.size() < 3)
        throw FitError("fit_decay: need at least 3 points with positive probability, have " +
                       std::to_string(xs.size()));
    {
        auto sorted = xs;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw FitError("fit_decay: sizes must be distinct");
    }
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.exponent = std::abs(fit.slope);
    double ss_res = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
        ss_res += r * r;
    }
    fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    fit.n_points = xs.size();
    return fit;
}

namespace {

std::vector<double> block_sums(std::span<const double> samples, std::size_t block_len) {
    if (block_len < 1) throw EstimationError("empirical_log_mgf: block length must be at least 1");
    if (samples.size() < 100'000)
        throw EstimationError("empirical_log_mgf: need at least 1e5 samples, have " + std::to_string(samples.size()));
    const std::size_t n_blocks = samples.size() / block_len;
    std::vector<double> sums(n_blocks);
    for (std::size_t b = 0; b < n_blocks; ++b) {
        const auto block = samples.subspan(b * block_len, block_len);
        sums[b] = std::accumulate(block.begin(), block.end(), 0.0);
    }
    return sums;
}

double log_mean_exp(const std::vector<double>& sums, double s, std::size_t block_len) {
    if (s == 0.0) return 0.0;
    double peak = -std::numeric_limits<double>::infinity();
    for (double x : sums) peak = std::max(peak, s * x);
    for (double x : sums) {
        if (std::abs(s * x) > 700.0) {
            std::ostringstream msg;
            msg << "empirical_log_mgf: exp(s * block_sum) overflows at s = " << s << "; use a smaller |s|";
            throw RangeError(msg.str());
        }
    }
    double acc = 0.0;
    for (double x : sums) acc += std::exp(s * x - peak);
    return (peak + std::log(acc / static_cast<double>(sums.size()))) / static_cast<double>(block_len);
}

}  // namespace

double empirical_log_mgf(std::span<const double> samples, double s, std::size_t block_len) {
    return log_mean_exp(block_sums(samples, block_len), s, block_len);
}

LogMgf empirical_log_mgf_fn(std::span<const double> samples, std::size_t block_len) {
    auto sums = std::make_shared<const std::vector<double>>(block_sums(samples, block_len));
    return [sums, block_len](double s) { return log_mean_exp(*sums, s, block_len); };
}

}  // namespace ehsim
