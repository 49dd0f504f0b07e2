// Replenishment and arrival processes.
//
// A ProcessSource is an immutable description of an ergodic, nonnegative
// discrete-time process (energy harvested per slot, or bits arriving per slot).
// Sampling state lives in a SampleStream owned by one run, so a source can be
// shared freely between threads.
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ehsim/rng.hpp"

namespace ehsim {

enum class ProcessKind { IidGaussian, IidDiscrete, Mmpp, Trace, Diurnal };

std::string to_string(ProcessKind kind);

struct GaussianParams {
    double mean = 0.0;
    double variance = 0.0;
};

/// Finite-support i.i.d. law; values and probabilities are parallel arrays.
struct DiscreteParams {
    std::vector<double> values;
    std::vector<double> probabilities;
};

/// Two-state Markov-modulated Poisson process.
struct MmppParams {
    std::array<std::array<double, 2>, 2> transition{};
    std::array<double, 2> state_means{};
    std::array<double, 2> stationary{};  // derived at construction
};

struct TraceParams {
    std::shared_ptr<const std::vector<double>> samples;
    double scale = 1.0;
    std::string origin;  // file path, or "<inline>"
};

/// Half-sine daylight profile with zero output at night.
struct DiurnalParams {
    double peak = 0.0;
    std::uint64_t period = 1440;
    double noise_sd = 0.0;  // multiplicative cloud noise, 0 = deterministic
};

class ProcessSource {
public:
    using Params = std::variant<GaussianParams, DiscreteParams, MmppParams, TraceParams, DiurnalParams>;

    ProcessKind kind() const noexcept { return kind_; }
    const Params& params() const noexcept { return params_; }

    double declared_mean() const noexcept { return mean_; }
    /// Asymptotic variance lim Var(sum)/tau when known analytically.
    std::optional<double> declared_asym_var() const noexcept { return asym_var_; }

    /// Copy with the long-run mean rescaled to `new_mean` (used by rho sweeps).
    ProcessSource with_mean(double new_mean) const;

    std::string describe() const;

private:
    friend ProcessSource make_iid_gaussian(double, double);
    friend ProcessSource make_iid_discrete(std::vector<double>, std::vector<double>);
    friend ProcessSource make_mmpp(const std::array<std::array<double, 2>, 2>&, const std::array<double, 2>&);
    friend ProcessSource make_trace_from_values(std::vector<double>, double, std::string);
    friend ProcessSource make_diurnal(double, std::uint64_t, double);

    ProcessSource(ProcessKind kind, Params params, double mean, std::optional<double> asym_var)
        : kind_(kind), params_(std::move(params)), mean_(mean), asym_var_(asym_var) {}

    ProcessKind kind_;
    Params params_;
    double mean_;
    std::optional<double> asym_var_;
};

/// Gaussian(mean, var) clamped below at 0. `var == 0` gives a constant process.
/// Declared statistics are the pre-clamp values; warns when mean < 3 sd.
ProcessSource make_iid_gaussian(double mean, double var);

ProcessSource make_iid_discrete(std::vector<double> values, std::vector<double> probabilities);

/// Each slot the hidden chain steps, then Poisson(state mean) is emitted.
/// Rejects non-stochastic and reducible transition matrices.
ProcessSource make_mmpp(const std::array<std::array<double, 2>, 2>& transition,
                        const std::array<double, 2>& state_means);

/// i.i.d. Poisson(c), expressed as an MMPP with identical states.
ProcessSource make_poisson(double c);

/// Cyclic replay of a text trace (one nonnegative number per line, `#` comments,
/// optional header line) multiplied by `scale`.
ProcessSource make_trace(const std::filesystem::path& path, double scale = 1.0);
ProcessSource make_trace_from_values(std::vector<double> values, double scale = 1.0,
                                     std::string origin = "<inline>");

ProcessSource make_diurnal(double peak, std::uint64_t period, double noise_sd = 0.0);

/// Reads a trace file; throws InputError on missing file, bad rows or empty data.
std::vector<double> load_trace_values(const std::filesystem::path& path);

/// Writes `rows` slots of the deterministic half-sine profile, one value per line.
void write_diurnal_trace(const std::filesystem::path& path, std::uint64_t rows, double peak);

/// Per-run sampling context: RNG, hidden chain state and trace cursor.
class SampleStream {
public:
    SampleStream(const ProcessSource& source, std::uint64_t seed);

    double next();

    const ProcessSource& source() const noexcept { return *source_; }

private:
    const ProcessSource* source_;
    Rng rng_;
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
    std::discrete_distribution<std::size_t> discrete_;
    std::array<std::poisson_distribution<long>, 2> poisson_{};
    double gaussian_mean_ = 0.0;
    double gaussian_sd_ = 0.0;
    int hidden_state_ = 0;
    std::uint64_t cursor_ = 0;
};

/// Draws one sample from `stream`; equivalent to stream.next().
inline double next_sample(SampleStream& stream) { return stream.next(); }

struct AsymStats {
    double mean = 0.0;
    double asym_var = 0.0;
    std::uint64_t n_samples = 0;
    std::uint64_t batch_len = 0;
};

/// Batch-means estimate of the mean and asymptotic variance:
/// asym_var = batch_len * (sample variance of batch means).
/// Requires horizon >= 100 * batch_len.
AsymStats estimate_asymptotic_stats(const ProcessSource& source, std::uint64_t horizon,
                                    std::uint64_t batch_len, std::uint64_t seed = 1);

/// Same estimator over an existing sample path.
AsymStats estimate_asymptotic_stats(std::span<const double> samples, std::uint64_t batch_len);

using LogMgf = std::function<double(double)>;

/// Closed-form asymptotic log-MGF at `s` (Gaussian, finite discrete, Poisson).
/// Throws UnsupportedError for traces and genuinely modulated MMPPs.
double analytic_log_mgf(const ProcessSource& source, double s);

/// The closed form as a callable; throws UnsupportedError eagerly.
LogMgf analytic_log_mgf_fn(const ProcessSource& source);

}  // namespace ehsim
