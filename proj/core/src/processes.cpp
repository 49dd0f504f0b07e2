#include "ehsim/processes.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

#include <boost/random/normal_distribution.hpp>

#include "ehsim/diagnostics.hpp"
#include "ehsim/errors.hpp"

namespace ehsim {

std::string to_string(ProcessKind kind) {
    switch (kind) {
        case ProcessKind::IidGaussian: return "iid-gaussian";
        case ProcessKind::IidDiscrete: return "iid-discrete";
        case ProcessKind::Mmpp: return "mmpp";
        case ProcessKind::Trace: return "trace";
        case ProcessKind::Diurnal: return "diurnal";
    }
    return "unknown";
}

ProcessSource make_iid_gaussian(double mean, double var) {
    if (!(mean > 0.0) || !std::isfinite(mean))
        throw ParameterError("gaussian source: mean must be positive, got " + std::to_string(mean));
    if (!(var >= 0.0) || !std::isfinite(var))
        throw ParameterError("gaussian source: variance must be nonnegative, got " + std::to_string(var));
    if (mean < 3.0 * std::sqrt(var)) {
        std::ostringstream msg;
        msg << "gaussian source mean " << mean << " is below 3 standard deviations (" << 3.0 * std::sqrt(var)
            << "); clamping at 0 biases the declared statistics";
        warn(msg.str());
    }
    return ProcessSource(ProcessKind::IidGaussian, GaussianParams{mean, var}, mean, var);
}

ProcessSource make_iid_discrete(std::vector<double> values, std::vector<double> probabilities) {
    if (values.empty() || values.size() != probabilities.size())
        throw ParameterError("discrete source: values and probabilities must be non-empty and equally long");
    double total = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] >= 0.0) || !std::isfinite(values[i]))
            throw ParameterError("discrete source: values must be nonnegative");
        if (!(probabilities[i] >= 0.0) || probabilities[i] > 1.0)
            throw ParameterError("discrete source: probabilities must lie in [0,1]");
        total += probabilities[i];
    }
    if (std::abs(total - 1.0) > 1e-9) throw ParameterError("discrete source: probabilities must sum to 1");
    double mean = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) mean += values[i] * probabilities[i];
    double var = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) var += probabilities[i] * (values[i] - mean) * (values[i] - mean);
    return ProcessSource(ProcessKind::IidDiscrete, DiscreteParams{std::move(values), std::move(probabilities)}, mean,
                         var);
}

ProcessSource make_mmpp(const std::array<std::array<double, 2>, 2>& transition,
                        const std::array<double, 2>& state_means) {
    for (const auto& row : transition) {
        for (double p : row)
            if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("mmpp: transition entries must lie in [0,1]");
        if (std::abs(row[0] + row[1] - 1.0) > 1e-12) throw ParameterError("mmpp: transition rows must sum to 1");
    }
    for (double m : state_means)
        if (!(m >= 0.0) || !std::isfinite(m)) throw ParameterError("mmpp: state means must be nonnegative");
    const double p01 = transition[0][1];
    const double p10 = transition[1][0];
    if (p01 + p10 <= 0.0)
        throw ParameterError("mmpp: transition matrix is reducible, the long-run mean is undefined");

    MmppParams params;
    params.transition = transition;
    params.state_means = state_means;
    params.stationary = {p10 / (p01 + p10), p01 / (p01 + p10)};

    const double mean = params.stationary[0] * state_means[0] + params.stationary[1] * state_means[1];
    // Poisson mixture: marginal variance = E[c] + Var(c); the modulating chain has
    // autocorrelation theta^k with theta = 1 - p01 - p10.
    const double spread = state_means[0] - state_means[1];
    const double rate_var = params.stationary[0] * params.stationary[1] * spread * spread;
    const double theta = 1.0 - p01 - p10;
    const double asym_var = mean + rate_var * (1.0 + theta) / (1.0 - theta);
    return ProcessSource(ProcessKind::Mmpp, params, mean, asym_var);
}

ProcessSource make_poisson(double c) {
    if (!(c > 0.0)) throw ParameterError("poisson source: mean must be positive");
    return make_mmpp({{{0.5, 0.5}, {0.5, 0.5}}}, {c, c});
}

std::vector<double> load_trace_values(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("trace: cannot open " + path.string());
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    bool header_allowed = true;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        if (line[first] == '#') continue;
        auto last = line.find_first_of(",;\r", first);
        std::string field = line.substr(first, last == std::string::npos ? std::string::npos : last - first);
        while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.pop_back();
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
        if (ec != std::errc() || ptr != field.data() + field.size()) {
            if (header_allowed) {
                header_allowed = false;
                continue;
            }
            throw InputError("trace " + path.string() + ":" + std::to_string(line_no) + ": not a number: '" + field +
                             "'");
        }
        header_allowed = false;
        if (!(v >= 0.0) || !std::isfinite(v))
            throw InputError("trace " + path.string() + ":" + std::to_string(line_no) + ": negative entry");
        values.push_back(v);
    }
    if (values.empty()) throw InputError("trace " + path.string() + ": no samples");
    return values;
}

ProcessSource make_trace_from_values(std::vector<double> values, double scale, std::string origin) {
    if (values.empty()) throw InputError("trace: no samples");
    if (!(scale >= 0.0) || !std::isfinite(scale)) throw ParameterError("trace: scale must be nonnegative");
    double sum = 0.0;
    for (double v : values) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw InputError("trace: negative entry");
        sum += v;
    }
    const double mean = scale * sum / static_cast<double>(values.size());
    TraceParams params{std::make_shared<const std::vector<double>>(std::move(values)), scale, std::move(origin)};
    return ProcessSource(ProcessKind::Trace, std::move(params), mean, std::nullopt);
}

ProcessSource make_trace(const std::filesystem::path& path, double scale) {
    return make_trace_from_values(load_trace_values(path), scale, path.string());
}

namespace {

double half_sine(double peak, std::uint64_t slot, std::uint64_t period) {
    const double phase = 2.0 * std::numbers::pi * static_cast<double>(slot % period) / static_cast<double>(period);
    return peak * std::max(0.0, std::sin(phase));
}

}  // namespace

ProcessSource make_diurnal(double peak, std::uint64_t period, double noise_sd) {
    if (!(peak > 0.0)) throw ParameterError("diurnal source: peak must be positive");
    if (period < 2) throw ParameterError("diurnal source: period must be at least 2 slots");
    if (!(noise_sd >= 0.0)) throw ParameterError("diurnal source: noise_sd must be nonnegative");
    double sum = 0.0;
    for (std::uint64_t t = 0; t < period; ++t) sum += half_sine(peak, t, period);
    const double mean = sum / static_cast<double>(period);
    return ProcessSource(ProcessKind::Diurnal, DiurnalParams{peak, period, noise_sd}, mean, std::nullopt);
}

void write_diurnal_trace(const std::filesystem::path& path, std::uint64_t rows, double peak) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path.string());
    out << "# synthetic diurnal trace: half-sine day, zero night, peak " << peak << '\n';
    out.precision(17);
    for (std::uint64_t t = 0; t < rows; ++t) out << half_sine(peak, t, rows) << '\n';
}

ProcessSource ProcessSource::with_mean(double new_mean) const {
    if (!(new_mean > 0.0)) throw ParameterError("process mean must be positive");
    const double factor = mean_ > 0.0 ? new_mean / mean_ : 0.0;
    switch (kind_) {
        case ProcessKind::IidGaussian: {
            const auto& p = std::get<GaussianParams>(params_);
            return make_iid_gaussian(new_mean, p.variance);
        }
        case ProcessKind::IidDiscrete: {
            auto p = std::get<DiscreteParams>(params_);
            for (double& v : p.values) v *= factor;
            return make_iid_discrete(std::move(p.values), std::move(p.probabilities));
        }
        case ProcessKind::Mmpp: {
            const auto& p = std::get<MmppParams>(params_);
            return make_mmpp(p.transition, {p.state_means[0] * factor, p.state_means[1] * factor});
        }
        case ProcessKind::Trace: {
            const auto& p = std::get<TraceParams>(params_);
            return make_trace_from_values(*p.samples, p.scale * factor, p.origin);
        }
        case ProcessKind::Diurnal: {
            const auto& p = std::get<DiurnalParams>(params_);
            return make_diurnal(p.peak * factor, p.period, p.noise_sd);
        }
    }
    throw ParameterError("unknown process kind");
}

std::string ProcessSource::describe() const {
    std::ostringstream out;
    out << to_string(kind_) << "(mean=" << mean_;
    if (asym_var_) out << ", asym_var=" << *asym_var_;
    out << ')';
    return out.str();
}

namespace {

// Ziggurat sampler; stateless between calls, so one temporary per draw is fine.
inline double standard_normal(Rng& rng) { return boost::random::normal_distribution<double>{}(rng); }

}  // namespace

SampleStream::SampleStream(const ProcessSource& source, std::uint64_t seed) : source_(&source), rng_(seed) {
    switch (source.kind()) {
        case ProcessKind::IidGaussian: {
            const auto& p = std::get<GaussianParams>(source.params());
            gaussian_mean_ = p.mean;
            gaussian_sd_ = std::sqrt(p.variance);
            break;
        }
        case ProcessKind::IidDiscrete: {
            const auto& p = std::get<DiscreteParams>(source.params());
            discrete_ = std::discrete_distribution<std::size_t>(p.probabilities.begin(), p.probabilities.end());
            break;
        }
        case ProcessKind::Mmpp: {
            const auto& p = std::get<MmppParams>(source.params());
            for (int i = 0; i < 2; ++i)
                if (p.state_means[i] > 0.0) poisson_[i] = std::poisson_distribution<long>(p.state_means[i]);
            hidden_state_ = uniform_(rng_) < p.stationary[0] ? 0 : 1;
            break;
        }
        case ProcessKind::Trace:
        case ProcessKind::Diurnal: break;
    }
}

double SampleStream::next() {
    switch (source_->kind()) {
        case ProcessKind::IidGaussian: {
            if (gaussian_sd_ == 0.0) return gaussian_mean_;
            return std::max(0.0, gaussian_mean_ + gaussian_sd_ * standard_normal(rng_));
        }
        case ProcessKind::IidDiscrete: {
            const auto& p = std::get<DiscreteParams>(source_->params());
            return p.values[discrete_(rng_)];
        }
        case ProcessKind::Mmpp: {
            const auto& p = std::get<MmppParams>(source_->params());
            hidden_state_ = uniform_(rng_) < p.transition[hidden_state_][0] ? 0 : 1;
            if (p.state_means[hidden_state_] <= 0.0) return 0.0;
            return static_cast<double>(poisson_[hidden_state_](rng_));
        }
        case ProcessKind::Trace: {
            const auto& p = std::get<TraceParams>(source_->params());
            const double v = (*p.samples)[cursor_ % p.samples->size()] * p.scale;
            ++cursor_;
            return v;
        }
        case ProcessKind::Diurnal: {
            const auto& p = std::get<DiurnalParams>(source_->params());
            double v = half_sine(p.peak, cursor_++, p.period);
            if (p.noise_sd > 0.0) v *= std::max(0.0, 1.0 + p.noise_sd * standard_normal(rng_));
            return v;
        }
    }
    return 0.0;
}

AsymStats estimate_asymptotic_stats(std::span<const double> samples, std::uint64_t batch_len) {
    if (batch_len < 1) throw EstimationError("batch length must be at least 1");
    if (samples.size() < 100 * batch_len)
        throw EstimationError("horizon " + std::to_string(samples.size()) + " is shorter than 100 batches of " +
                              std::to_string(batch_len));
    const std::uint64_t n_batches = samples.size() / batch_len;
    std::vector<double> means(n_batches);
    for (std::uint64_t b = 0; b < n_batches; ++b) {
        const auto batch = samples.subspan(b * batch_len, batch_len);
        means[b] = std::accumulate(batch.begin(), batch.end(), 0.0) / static_cast<double>(batch_len);
    }
    const double mean = std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(n_batches);
    double ss = 0.0;
    for (double m : means) ss += (m - mean) * (m - mean);
    const double var_of_means = ss / static_cast<double>(n_batches - 1);
    return AsymStats{mean, static_cast<double>(batch_len) * var_of_means, n_batches * batch_len, batch_len};
}

AsymStats estimate_asymptotic_stats(const ProcessSource& source, std::uint64_t horizon, std::uint64_t batch_len,
                                    std::uint64_t seed) {
    if (batch_len < 1) throw EstimationError("batch length must be at least 1");
    if (horizon < 100 * batch_len)
        throw EstimationError("horizon " + std::to_string(horizon) + " is shorter than 100 batches of " +
                              std::to_string(batch_len));
    SampleStream stream(source, seed);
    std::vector<double> samples(horizon);
    for (auto& s : samples) s = stream.next();
    return estimate_asymptotic_stats(std::span<const double>(samples), batch_len);
}

namespace {

double discrete_log_mgf(const DiscreteParams& p, double s) {
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p.values.size(); ++i)
        if (p.probabilities[i] > 0.0) peak = std::max(peak, s * p.values[i]);
    double acc = 0.0;
    for (std::size_t i = 0; i < p.values.size(); ++i)
        if (p.probabilities[i] > 0.0) acc += p.probabilities[i] * std::exp(s * p.values[i] - peak);
    return peak + std::log(acc);
}

}  // namespace

LogMgf analytic_log_mgf_fn(const ProcessSource& source) {
    switch (source.kind()) {
        case ProcessKind::IidGaussian: {
            const auto p = std::get<GaussianParams>(source.params());
            return [p](double s) { return p.mean * s + 0.5 * p.variance * s * s; };
        }
        case ProcessKind::IidDiscrete: {
            auto p = std::get<DiscreteParams>(source.params());
            return [p = std::move(p)](double s) { return discrete_log_mgf(p, s); };
        }
        case ProcessKind::Mmpp: {
            const auto& p = std::get<MmppParams>(source.params());
            if (p.state_means[0] != p.state_means[1])
                throw UnsupportedError("mmpp with distinct state means has no closed-form log-MGF here; "
                                       "use empirical_log_mgf");
            const double c = p.state_means[0];
            return [c](double s) { return c * std::expm1(s); };
        }
        case ProcessKind::Trace:
        case ProcessKind::Diurnal:
            throw UnsupportedError(to_string(source.kind()) +
                                   " source has no closed-form log-MGF; use empirical_log_mgf");
    }
    throw UnsupportedError("unknown process kind");
}

double analytic_log_mgf(const ProcessSource& source, double s) { return analytic_log_mgf_fn(source)(s); }

}  // namespace ehsim
