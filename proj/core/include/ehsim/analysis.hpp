// Closed-form predictions and decay fits.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ehsim/channel.hpp"
#include "ehsim/processes.hpp"

namespace ehsim {

enum class RootSide { Negative, Positive };

/// Nonzero root of  log_mgf(s) - s * drift_offset  on the requested side of 0.
/// Throws ExistenceError when the drift points the wrong way (or is zero).
double ld_root(const LogMgf& log_mgf, double drift_offset, RootSide side);

/// ds*/d(delta) at delta -> 0, where s*(delta) is the negative root for offset
/// mean - delta. Secants at delta = 1e-3 and 1e-4, linearly extrapolated.
double ld_root_slope(const LogMgf& log_mgf, double mean);

/// |slope + 2/sigma2| * sigma2 / 2, i.e. relative error against -2/sigma2.
double variance_slope_check(const LogMgf& log_mgf, double mean, double sigma2);

enum class DecayModel { Polynomial, Exponential };

std::string to_string(DecayModel model);

struct DecayPrediction {
    DecayModel model = DecayModel::Polynomial;
    double exponent = 0.0;
    double delta = 0.0;
    double s_star = 0.0;
    double point_value = 0.0;  // exp(s_star * M / 2)
};

/// Scheme-B discharge order: polynomial with exponent beta, and the finite-M
/// value exp(s* M / 2) with s* the exact root for drift beta*sigma_r2*ln(M)/M.
DecayPrediction predict_discharge_scheme_b(const LogMgf& log_mgf, double mu, double sigma_r2, double beta, double M);

/// exp(-2 delta_r M / sigma_r2).
double diffusion_underflow(double delta_r, double sigma_r2, double M);

/// (delta_a^2 / sigma_a2) exp(-delta_a K / sigma_a2).
double renewal_overflow(double delta_a, double sigma_a2, double K);

/// exp(-2 delta_a K / sigma_a2).
double scheme_e_overflow(double delta_a, double sigma_a2, double K);

struct TradeoffPoint {
    double delta_r = 0.0;
    double discharge_exponent = 0.0;  // per unit of M
    double loss_exponent = 0.0;       // per unit of K
};

TradeoffPoint tradeoff_point(double mu, double lambda, const RatePowerFunction& rate_fn, double sigma_r2,
                             double sigma_a2, double delta_r);

/// n_grid interior points delta_r = D i / (n_grid + 1), D = mu - C^-1(lambda).
std::vector<TradeoffPoint> tradeoff_curve(double mu, double lambda, double gamma, double sigma_r2, double sigma_a2,
                                          std::size_t n_grid);

struct DecayFit {
    DecayModel model = DecayModel::Polynomial;
    double exponent = 0.0;  // |slope|
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::size_t n_points = 0;
    std::size_t n_dropped = 0;  // zero-probability points excluded
};

/// OLS of ln p on ln size (polynomial) or on size (exponential).
DecayFit fit_decay(const std::vector<std::pair<double, double>>& points, DecayModel model);

/// (1/L) ln mean_b exp(s * block_sum_b) over blocks of length L.
double empirical_log_mgf(std::span<const double> samples, double s, std::size_t block_len = 100);

/// Block sums are computed once; the returned callable evaluates the estimator at any s.
LogMgf empirical_log_mgf_fn(std::span<const double> samples, std::size_t block_len = 100);

}  // namespace ehsim
