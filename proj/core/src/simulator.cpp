#include "ehsim/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

#include "ehsim/analysis.hpp"
#include "ehsim/diagnostics.hpp"
#include "ehsim/errors.hpp"
#include "ehsim/rng.hpp"

namespace ehsim {

std::uint64_t SimConfig::effective_warmup() const noexcept {
    if (warmup) return *warmup;
    return std::min<std::uint64_t>(100'000, horizon / 10);
}

NodeState SimConfig::initial_state() const noexcept {
    NodeState s;
    s.battery = initial_battery.value_or(M / 2.0);
    s.queue = mode == Mode::Joint ? initial_queue.value_or(K / 2.0) : 0.0;
    return s;
}

double utility_reference(const SimConfig& cfg, double mean_r, double mean_a) {
    if (cfg.mode == Mode::Joint) return utility_eval(cfg.utility, cfg.rate_fn.inverse(std::max(mean_a, 0.0)));
    return utility_eval(cfg.utility, std::max(mean_r, 0.0));
}

std::vector<std::string> validate(const SimConfig& cfg) {
    if (!(cfg.M > 0.0) || !std::isfinite(cfg.M)) throw ConfigError("M: battery capacity must be positive");
    if (cfg.horizon == 0) throw ConfigError("horizon: must be positive");
    const std::uint64_t warm = cfg.effective_warmup();
    if (warm >= cfg.horizon) throw ConfigError("warmup: must be smaller than horizon");
    if (cfg.n_batches < 2) throw ConfigError("n_batches: need at least 2 batches");
    if (cfg.horizon - warm < cfg.n_batches) throw ConfigError("horizon: fewer measured slots than batches");
    const NodeState s0 = cfg.initial_state();
    if (!(s0.battery >= 0.0 && s0.battery <= cfg.M)) throw ConfigError("initial_battery: must lie in [0, M]");

    const double mu = cfg.replenishment.declared_mean();
    if (cfg.mode == Mode::Joint) {
        if (!(cfg.K > 0.0) || !std::isfinite(cfg.K)) throw ConfigError("K: buffer capacity must be positive");
        if (!cfg.arrivals) throw ConfigError("arrivals: joint mode needs an arrival process");
        if (!(s0.queue >= 0.0 && s0.queue <= cfg.K)) throw ConfigError("initial_queue: must lie in [0, K]");
        const double lambda = cfg.arrivals->declared_mean();
        const double cap = cfg.rate_fn.rate(mu);
        if (lambda >= cap) {
            std::ostringstream msg;
            msg << "stability condition lambda < C(mu) violated: lambda = " << lambda << ", C(mu) = " << cap;
            throw StabilityError(msg.str());
        }
    } else if (cfg.policy.kind == PolicyKind::SchemeQ) {
        throw ConfigurationError("scheme-q needs a data queue; use joint mode");
    }

    std::vector<std::string> warnings;
    auto note = [&](std::string msg) {
        warn(msg);
        warnings.push_back(std::move(msg));
    };

    if (cfg.policy.kind == PolicyKind::SchemeB && cfg.policy.battery_capacity != cfg.M)
        note("scheme-b threshold was built for M = " + std::to_string(cfg.policy.battery_capacity) +
             " but the battery has M = " + std::to_string(cfg.M));
    if (cfg.mode == Mode::Joint && cfg.policy.kind == PolicyKind::SchemeQ && cfg.policy.buffer_capacity != cfg.K)
        note("scheme-q threshold was built for K = " + std::to_string(cfg.policy.buffer_capacity) +
             " but the buffer has K = " + std::to_string(cfg.K));

    if (cfg.mode == Mode::Joint) {
        const double need = cfg.rate_fn.inverse(cfg.arrivals->declared_mean()) * cfg.K;
        if (cfg.M < need) {
            std::ostringstream msg;
            msg << "large-battery regime not met: M = " << cfg.M << " < C^-1(lambda) * K = " << need;
            note(msg.str());
        }
    }

    // Rare-event budget: compare closed-form predictions with the measured horizon.
    const double slots = static_cast<double>(cfg.horizon - warm);
    const auto var_r = cfg.replenishment.declared_asym_var();
    const auto var_a = cfg.arrivals ? cfg.arrivals->declared_asym_var() : std::nullopt;
    auto check = [&](const char* what, double p) {
        if (p > 0.0 && p * slots < 50.0) {
            std::ostringstream msg;
            msg << "predicted " << what << " probability " << p << " gives fewer than 50 expected events in "
                << slots << " measured slots";
            note(msg.str());
        }
    };
    const Policy& p = cfg.policy;
    if (var_r && *var_r > 0.0) {
        if (p.kind == PolicyKind::SchemeB && p.delta_b > 0.0)
            check("discharge", std::exp(-p.delta_b * cfg.M / *var_r));
        if (p.kind == PolicyKind::SchemeE) check("discharge", diffusion_underflow(p.delta_r, *var_r, cfg.M));
    }
    if (cfg.mode == Mode::Joint && var_a && *var_a > 0.0 && p.delta_a > 0.0) {
        if (p.kind == PolicyKind::SchemeQ) check("loss", renewal_overflow(p.delta_a, *var_a, cfg.K));
        if (p.kind == PolicyKind::SchemeE) check("loss", scheme_e_overflow(p.delta_a, *var_a, cfg.K));
    }
    return warnings;
}

namespace {

/// Neumaier compensated sum.
struct CompensatedSum {
    double sum = 0.0;
    double c = 0.0;
    void add(double x) noexcept {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            c += (sum - t) + x;
        else
            c += (x - t) + sum;
        sum = t;
    }
    double value() const noexcept { return sum + c; }
};

/// Remembers the last two evaluations of a pure function; policies mostly alternate between two draws.
template <class F>
class Memo2 {
public:
    explicit Memo2(F f) : f_(std::move(f)) {}
    double operator()(double x) {
        if (x == key_[0]) return val_[0];
        if (x == key_[1]) return val_[1];
        const double v = f_(x);
        key_[next_] = x;
        val_[next_] = v;
        next_ ^= 1;
        return v;
    }

private:
    F f_;
    double key_[2] = {-1.0, -1.0};
    double val_[2] = {0.0, 0.0};
    int next_ = 0;
};

template <bool Joint, class Rate, class Inverse, class Utility>
inline void advance(NodeState& s, const SimConfig& cfg, double r, double a, SlotRecord& rec, Rate&& rate,
                    Inverse&& inverse, Utility&& utility) {
    // Thresholds see the state at the start of the slot; feasibility sees what the slot makes available.
    const double raw = raw_request(cfg.policy, s);
    const NodeState view{s.battery + r, Joint ? s.queue + a : 0.0, s.slot};
    double wanted = raw;
    bool queue_bound = false;
    if constexpr (Joint) {
        // min(raw, C^-1(Q)) without the inverse when the queue can absorb the full rate.
        const double q = std::max(view.queue, 0.0);
        if (!(rate(std::max(raw, 0.0)) <= q)) {
            const double cap = inverse(q);
            if (cap < raw) {
                wanted = cap;
                queue_bound = true;
            }
        }
    }
    const double energy = std::max(0.0, std::min(wanted, view.battery));

    rec.r = r;
    rec.a = Joint ? a : 0.0;
    rec.discharged = view.battery - wanted <= 0.0;
    rec.prevented = wanted > view.battery;
    rec.battery_overflowed = false;
    rec.energy_overflow = 0.0;
    rec.data_lost = 0.0;
    if (rec.prevented) {
        rec.e_consumed = view.battery;
        rec.service = 0.0;
        rec.utility = 0.0;
    } else {
        rec.e_consumed = energy;
        if constexpr (Joint)
            rec.service = queue_bound ? std::max(view.queue, 0.0) : rate(energy);  // C(C^-1(Q)) = Q
        else
            rec.service = 0.0;
        rec.utility = utility(energy, queue_bound ? rec.service : -1.0);
    }

    double b = view.battery - rec.e_consumed;
    if (b > cfg.M) {
        rec.battery_overflowed = true;
        rec.energy_overflow = b - cfg.M;
        b = cfg.M;
    }
    s.battery = std::max(b, 0.0);

    if constexpr (Joint) {
        double q = view.queue - rec.service;
        if (q > cfg.K) {
            rec.data_lost = q - cfg.K;
            q = cfg.K;
        }
        s.queue = std::max(q, 0.0);
    }
    ++s.slot;
}

void write_trace_row(std::ostream& out, const NodeState& s, const SlotRecord& rec) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%llu,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%d,%.10g\n",
                  static_cast<unsigned long long>(s.slot - 1), s.battery, s.queue, rec.e_consumed, rec.service, rec.r,
                  rec.a, rec.discharged ? 1 : 0, rec.data_lost);
    out << buf;
}

double t_quantile_975(std::size_t dof) {
    boost::math::students_t dist(static_cast<double>(dof));
    return boost::math::quantile(boost::math::complement(dist, 0.025));
}

/// Plain sums over at most kChunk slots; folded into compensated sums afterwards.
struct ChunkSums {
    double r = 0.0, e = 0.0, overflow = 0.0, a = 0.0, service = 0.0, lost = 0.0, utility = 0.0;
    std::uint64_t discharges = 0, losses = 0;
};

constexpr std::uint64_t kChunk = 4096;

template <bool Joint>
Metrics run_kernel(const SimConfig& cfg, std::ostream* trace, std::uint64_t trace_limit) {
    const std::uint64_t warm = cfg.effective_warmup();
    const std::uint64_t measured = cfg.horizon - warm;
    const std::uint32_t n_b = cfg.n_batches;
    const std::uint64_t batch_len = measured / n_b;

    SampleStream r_stream(cfg.replenishment, derive_seed(cfg.seed, 0));
    std::optional<SampleStream> a_stream;
    if constexpr (Joint) a_stream.emplace(*cfg.arrivals, derive_seed(cfg.seed, 1));

    Metrics m;
    NodeState s = cfg.initial_state();
    m.initial_battery = s.battery;
    m.initial_queue = s.queue;
    CompensatedSum tot_r, tot_e, tot_over, tot_a, tot_srv, tot_lost;
    Memo2 rate([&](double e) { return cfg.rate_fn.rate(e); });
    Memo2 utility_memo([&](double e) { return utility_eval(cfg.utility, e); });
    // U(e) = U_D(C(e)) whenever the utility shares the channel's rate function.
    const bool rate_form = cfg.utility.kind != UtilityKind::Tabulated &&
                           cfg.utility.rate_fn.effective_gamma() == cfg.rate_fn.effective_gamma();
    auto utility = [&](double e, double known_rate) {
        if (known_rate >= 0.0 && rate_form) return rate_utility_eval(cfg.utility, known_rate);
        return utility_memo(e);
    };
    auto inverse = [&](double q) { return cfg.rate_fn.inverse(q); };
    SlotRecord rec;

    if (trace) *trace << "slot,B,Q,e,service,r,a,discharged,lost\n";

    // Runs n slots, accumulating into c; n <= kChunk keeps the plain sums accurate.
    auto simulate = [&](std::uint64_t n, ChunkSums& c) {
        for (std::uint64_t t = 0; t < n; ++t) {
            const double r = r_stream.next();
            const double a = Joint ? a_stream->next() : 0.0;
            advance<Joint>(s, cfg, r, a, rec, rate, inverse, utility);
            c.r += rec.r;
            c.e += rec.e_consumed;
            c.overflow += rec.energy_overflow;
            c.utility += rec.utility;
            c.discharges += rec.discharged;
            if constexpr (Joint) {
                c.a += rec.a;
                c.service += rec.service;
                c.lost += rec.data_lost;
                c.losses += rec.data_lost > 0.0;
            }
            if (trace && s.slot <= trace_limit) write_trace_row(*trace, s, rec);
        }
    };
    auto fold_totals = [&](const ChunkSums& c) {
        tot_r.add(c.r);
        tot_e.add(c.e);
        tot_over.add(c.overflow);
        tot_a.add(c.a);
        tot_srv.add(c.service);
        tot_lost.add(c.lost);
    };

    for (std::uint64_t done = 0; done < warm;) {
        const std::uint64_t n = std::min(kChunk, warm - done);
        ChunkSums c;
        simulate(n, c);
        fold_totals(c);
        done += n;
    }

    std::vector<double> b_dis(n_b), b_loss(n_b), b_util(n_b), b_energy(n_b), b_gap(n_b);
    std::uint64_t n_dis_total = 0, n_loss_total = 0;
    CompensatedSum util_total, energy_total, r_meas, a_meas, srv_meas;
    for (std::uint32_t b = 0; b < n_b; ++b) {
        const std::uint64_t len = b + 1 == n_b ? measured - batch_len * (n_b - 1) : batch_len;
        std::uint64_t n_dis = 0, n_loss = 0;
        CompensatedSum util, energy, r_sum, a_sum, srv;
        for (std::uint64_t done = 0; done < len;) {
            const std::uint64_t n = std::min(kChunk, len - done);
            ChunkSums c;
            simulate(n, c);
            fold_totals(c);
            n_dis += c.discharges;
            n_loss += c.losses;
            util.add(c.utility);
            energy.add(c.e);
            r_sum.add(c.r);
            a_sum.add(c.a);
            srv.add(c.service);
            done += n;
        }
        const double L = static_cast<double>(len);
        b_dis[b] = static_cast<double>(n_dis) / L;
        b_loss[b] = static_cast<double>(n_loss) / L;
        b_util[b] = util.value() / L;
        b_energy[b] = energy.value() / L;
        b_gap[b] = utility_reference(cfg, r_sum.value() / L, a_sum.value() / L) - b_util[b];
        n_dis_total += n_dis;
        n_loss_total += n_loss;
        util_total.add(util.value());
        energy_total.add(energy.value());
        r_meas.add(r_sum.value());
        a_meas.add(a_sum.value());
        srv_meas.add(srv.value());
    }

    const double Lm = static_cast<double>(measured);
    auto with_overall = [&](const std::vector<double>& batches, double overall) {
        Estimate e = mean_with_ci(batches);
        e.value = overall;
        return e;
    };
    m.p_discharge = with_overall(b_dis, static_cast<double>(n_dis_total) / Lm);
    m.p_loss = with_overall(b_loss, static_cast<double>(n_loss_total) / Lm);
    m.avg_utility = with_overall(b_util, util_total.value() / Lm);
    m.mean_energy = with_overall(b_energy, energy_total.value() / Lm);
    m.mean_replenishment = r_meas.value() / Lm;
    m.mean_arrivals = a_meas.value() / Lm;
    m.mean_service = srv_meas.value() / Lm;
    m.utility_gap = with_overall(b_gap, utility_reference(cfg, m.mean_replenishment, m.mean_arrivals) -
                                            m.avg_utility.value);
    m.n_batches = n_b;
    m.n_replications = 1;
    m.measured_slots = measured;

    m.final_battery = s.battery;
    m.final_queue = s.queue;
    m.total_replenished = tot_r.value();
    m.total_consumed = tot_e.value();
    m.total_energy_overflow = tot_over.value();
    m.total_arrivals = tot_a.value();
    m.total_served = tot_srv.value();
    m.total_lost = tot_lost.value();
    return m;
}

Metrics run_unchecked(const SimConfig& cfg, std::ostream* trace, std::uint64_t trace_limit) {
    return cfg.mode == Mode::Joint ? run_kernel<true>(cfg, trace, trace_limit)
                                   : run_kernel<false>(cfg, trace, trace_limit);
}

}  // namespace

std::pair<NodeState, SlotRecord> step(const NodeState& state, const SimConfig& cfg, double r, double a) {
    NodeState next = state;
    SlotRecord rec;
    auto rate = [&](double e) { return cfg.rate_fn.rate(e); };
    auto inverse = [&](double q) { return cfg.rate_fn.inverse(q); };
    auto utility = [&](double e, double) { return utility_eval(cfg.utility, e); };
    if (cfg.mode == Mode::Joint)
        advance<true>(next, cfg, r, a, rec, rate, inverse, utility);
    else
        advance<false>(next, cfg, r, a, rec, rate, inverse, utility);
    return {next, rec};
}

Estimate mean_with_ci(const std::vector<double>& values) {
    Estimate e;
    if (values.empty()) return e;
    const double n = static_cast<double>(values.size());
    CompensatedSum sum;
    for (double v : values) sum.add(v);
    e.value = sum.value() / n;
    if (values.size() < 2) return e;
    double ss = 0.0;
    for (double v : values) ss += (v - e.value) * (v - e.value);
    const double sd = std::sqrt(ss / (n - 1.0));
    e.half_width = t_quantile_975(values.size() - 1) * sd / std::sqrt(n);
    return e;
}

Metrics run(const SimConfig& cfg, std::ostream* trace, std::uint64_t trace_limit) {
    validate(cfg);
    return run_unchecked(cfg, trace, trace_limit);
}

Metrics run_batched(const SimConfig& cfg, std::uint32_t n_replications, std::uint32_t threads) {
    if (n_replications < 2) throw ParameterError("run_batched: need at least 2 replications");
    validate(cfg);
    std::vector<Metrics> results(n_replications);
    std::atomic<std::uint32_t> next{0};
    auto worker = [&] {
        for (std::uint32_t i = next++; i < n_replications; i = next++) {
            SimConfig rep = cfg;
            rep.seed = derive_seed(cfg.seed, i);
            results[i] = run_unchecked(rep, nullptr, 0);
        }
    };
    const std::uint32_t n_threads = std::clamp<std::uint32_t>(threads, 1, n_replications);
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::uint32_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    }

    auto across = [&](auto field) {
        std::vector<double> v;
        v.reserve(results.size());
        for (const auto& r : results) v.push_back(field(r));
        return mean_with_ci(v);
    };
    Metrics m;
    m.p_discharge = across([](const Metrics& r) { return r.p_discharge.value; });
    m.p_loss = across([](const Metrics& r) { return r.p_loss.value; });
    m.avg_utility = across([](const Metrics& r) { return r.avg_utility.value; });
    m.mean_energy = across([](const Metrics& r) { return r.mean_energy.value; });
    m.utility_gap = across([](const Metrics& r) { return r.utility_gap.value; });
    m.mean_replenishment = across([](const Metrics& r) { return r.mean_replenishment; }).value;
    m.mean_arrivals = across([](const Metrics& r) { return r.mean_arrivals; }).value;
    m.mean_service = across([](const Metrics& r) { return r.mean_service; }).value;
    m.n_batches = n_replications;
    m.n_replications = n_replications;
    CompensatedSum b0, b1, tr, te, to, q0, q1, ta, ts, tl;
    for (const auto& r : results) {
        m.measured_slots += r.measured_slots;
        b0.add(r.initial_battery);
        b1.add(r.final_battery);
        tr.add(r.total_replenished);
        te.add(r.total_consumed);
        to.add(r.total_energy_overflow);
        q0.add(r.initial_queue);
        q1.add(r.final_queue);
        ta.add(r.total_arrivals);
        ts.add(r.total_served);
        tl.add(r.total_lost);
    }
    m.initial_battery = b0.value();
    m.final_battery = b1.value();
    m.total_replenished = tr.value();
    m.total_consumed = te.value();
    m.total_energy_overflow = to.value();
    m.initial_queue = q0.value();
    m.final_queue = q1.value();
    m.total_arrivals = ta.value();
    m.total_served = ts.value();
    m.total_lost = tl.value();
    return m;
}

}  // namespace ehsim
