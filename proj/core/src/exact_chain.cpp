// Exact stationary analysis of small integer-valued node chains.
#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "ehsim/errors.hpp"
#include "ehsim/simulator.hpp"

namespace ehsim {
namespace {

struct Atom {
    double value;
    double prob;
};

bool is_integer(double x) { return std::abs(x - std::round(x)) <= 1e-9; }

std::vector<Atom> finite_support(const ProcessSource& src, const char* role) {
    std::vector<Atom> atoms;
    switch (src.kind()) {
        case ProcessKind::IidGaussian: {
            const auto& p = std::get<GaussianParams>(src.params());
            if (p.variance != 0.0)
                throw PreconditionError(std::string(role) +
                                        ": the exact oracle needs a finite-support process (gaussian with variance 0 "
                                        "or iid-discrete)");
            atoms.push_back({p.mean, 1.0});
            break;
        }
        case ProcessKind::IidDiscrete: {
            const auto& p = std::get<DiscreteParams>(src.params());
            for (std::size_t i = 0; i < p.values.size(); ++i)
                if (p.probabilities[i] > 0.0) atoms.push_back({p.values[i], p.probabilities[i]});
            break;
        }
        default:
            throw PreconditionError(std::string(role) + ": " + to_string(src.kind()) +
                                    " has unbounded or non-i.i.d. support; the exact oracle needs iid-discrete input");
    }
    for (const auto& a : atoms)
        if (!is_integer(a.value))
            throw PreconditionError(std::string(role) + ": value " + std::to_string(a.value) +
                                    " is not an integer; the exact oracle works on integer units");
    return atoms;
}

struct Edge {
    std::uint32_t to;
    double prob;
};

/// Iterative Tarjan; returns the component id of every node.
std::vector<std::uint32_t> strongly_connected(const std::vector<std::vector<Edge>>& adj, std::uint32_t& n_comp) {
    const std::uint32_t n = static_cast<std::uint32_t>(adj.size());
    constexpr std::uint32_t kUnset = UINT32_MAX;
    std::vector<std::uint32_t> index(n, kUnset), low(n, 0), comp(n, kUnset);
    std::vector<std::uint32_t> stack;
    std::vector<bool> on_stack(n, false);
    std::vector<std::pair<std::uint32_t, std::size_t>> call;
    std::uint32_t counter = 0;
    n_comp = 0;
    for (std::uint32_t root = 0; root < n; ++root) {
        if (index[root] != kUnset) continue;
        call.push_back({root, 0});
        while (!call.empty()) {
            auto& [v, i] = call.back();
            if (i == 0 && index[v] == kUnset) {
                index[v] = low[v] = counter++;
                stack.push_back(v);
                on_stack[v] = true;
            }
            if (i < adj[v].size()) {
                const std::uint32_t w = adj[v][i++].to;
                if (index[w] == kUnset) {
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                std::uint32_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = n_comp;
                } while (w != v);
                ++n_comp;
            }
            const std::uint32_t done = v;
            call.pop_back();
            if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
        }
    }
    return comp;
}

}  // namespace

Metrics exact_chain_analysis(const SimConfig& cfg) {
    const bool joint = cfg.mode == Mode::Joint;
    if (cfg.M > kMaxOracleBattery || (joint && cfg.K > kMaxOracleBuffer)) {
        std::ostringstream msg;
        msg << "state space too large for the exact oracle: need M <= " << kMaxOracleBattery << " (the 200-state cap)"
            << " and K <= " << kMaxOracleBuffer << ", got M = " << cfg.M;
        if (joint) msg << ", K = " << cfg.K;
        throw ResourceError(msg.str());
    }
    validate(cfg);
    if (!is_integer(cfg.M) || (joint && !is_integer(cfg.K)))
        throw PreconditionError("exact oracle needs integer M and K");
    const NodeState s0 = cfg.initial_state();
    if (!is_integer(s0.battery) || !is_integer(s0.queue))
        throw PreconditionError("exact oracle needs an integer initial state (use even M and K, or set "
                                "initial_battery / initial_queue)");

    const auto r_atoms = finite_support(cfg.replenishment, "replenishment");
    const auto a_atoms = joint ? finite_support(*cfg.arrivals, "arrivals") : std::vector<Atom>{{0.0, 1.0}};

    const auto Mi = static_cast<std::uint32_t>(std::lround(cfg.M));
    const auto Ki = joint ? static_cast<std::uint32_t>(std::lround(cfg.K)) : 0u;
    const std::uint32_t width = Ki + 1;
    auto id = [&](std::uint32_t b, std::uint32_t q) { return b * width + q; };
    constexpr std::uint32_t kUnseen = UINT32_MAX;
    std::vector<std::uint32_t> local((Mi + 1) * width, kUnseen);

    struct Node {
        NodeState state;
        double discharge = 0.0, loss = 0.0, utility = 0.0, energy = 0.0, service = 0.0;
    };
    std::vector<Node> nodes;
    std::vector<std::vector<Edge>> adj;

    auto intern = [&](const NodeState& s) -> std::uint32_t {
        if (!is_integer(s.battery) || !is_integer(s.queue)) {
            std::ostringstream msg;
            msg << "exact oracle reached the non-integer state (B=" << s.battery << ", Q=" << s.queue
                << "); choose draws whose rate C(e) is an integer";
            throw PreconditionError(msg.str());
        }
        const auto b = static_cast<std::uint32_t>(std::lround(s.battery));
        const auto q = static_cast<std::uint32_t>(std::lround(s.queue));
        auto& slot = local[id(b, q)];
        if (slot == kUnseen) {
            slot = static_cast<std::uint32_t>(nodes.size());
            Node n;
            n.state.battery = b;
            n.state.queue = q;
            nodes.push_back(n);
            adj.emplace_back();
        }
        return slot;
    };

    const std::uint32_t start = intern(s0);
    for (std::uint32_t v = 0; v < nodes.size(); ++v) {
        std::vector<Edge> out;
        Node acc = nodes[v];
        for (const auto& ra : r_atoms) {
            for (const auto& aa : a_atoms) {
                const double p = ra.prob * aa.prob;
                const auto [next, rec] = step(acc.state, cfg, std::round(ra.value), std::round(aa.value));
                acc.discharge += p * rec.discharged;
                acc.loss += p * (rec.data_lost > 0.0);
                acc.utility += p * rec.utility;
                acc.energy += p * rec.e_consumed;
                acc.service += p * rec.service;
                NodeState rounded = next;
                rounded.slot = 0;
                out.push_back({intern(rounded), p});
            }
        }
        std::sort(out.begin(), out.end(), [](const Edge& x, const Edge& y) { return x.to < y.to; });
        std::vector<Edge> merged;
        for (const auto& e : out) {
            if (!merged.empty() && merged.back().to == e.to)
                merged.back().prob += e.prob;
            else
                merged.push_back(e);
        }
        adj[v] = std::move(merged);
        acc.state = nodes[v].state;
        nodes[v] = acc;
    }

    std::uint32_t n_comp = 0;
    const auto comp = strongly_connected(adj, n_comp);
    std::vector<bool> closed(n_comp, true);
    for (std::uint32_t v = 0; v < adj.size(); ++v)
        for (const auto& e : adj[v])
            if (comp[e.to] != comp[v]) closed[comp[v]] = false;
    const auto n_closed = std::count(closed.begin(), closed.end(), true);
    if (n_closed != 1) {
        std::ostringstream msg;
        msg << "chain reachable from the initial state has " << n_closed
            << " closed classes; the stationary distribution is not unique";
        throw DecompositionError(msg.str());
    }
    // A self-loop in the recurrent class makes it aperiodic; otherwise iterate the lazy chain.
    bool aperiodic = false;
    for (std::uint32_t v = 0; v < adj.size() && !aperiodic; ++v)
        if (closed[comp[v]])
            for (const auto& e : adj[v])
                if (e.to == v && e.prob > 0.0) aperiodic = true;

    const std::size_t n = nodes.size();
    std::vector<double> pi(n, 0.0), next(n);
    pi[start] = 1.0;
    constexpr double kTol = 1e-12;
    constexpr std::uint64_t kMaxIter = 20'000'000;
    bool converged = false;
    for (std::uint64_t it = 0; it < kMaxIter; ++it) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t v = 0; v < n; ++v) {
            if (pi[v] == 0.0) continue;
            for (const auto& e : adj[v]) next[e.to] += pi[v] * e.prob;
        }
        double residual = 0.0;
        for (std::size_t v = 0; v < n; ++v) residual += std::abs(next[v] - pi[v]);
        if (residual < kTol) {
            pi.swap(next);
            converged = true;
            break;
        }
        if (aperiodic) {
            pi.swap(next);
        } else {
            for (std::size_t v = 0; v < n; ++v) pi[v] = 0.5 * (pi[v] + next[v]);
        }
    }
    if (!converged) throw EstimationError("exact oracle: power iteration did not reach residual 1e-12");
    double total = 0.0;
    for (double x : pi) total += x;
    for (double& x : pi) x /= total;

    Metrics m;
    for (std::size_t v = 0; v < n; ++v) {
        m.p_discharge.value += pi[v] * nodes[v].discharge;
        m.p_loss.value += pi[v] * nodes[v].loss;
        m.avg_utility.value += pi[v] * nodes[v].utility;
        m.mean_energy.value += pi[v] * nodes[v].energy;
        m.mean_service += pi[v] * nodes[v].service;
    }
    m.mean_replenishment = cfg.replenishment.declared_mean();
    m.mean_arrivals = joint ? cfg.arrivals->declared_mean() : 0.0;
    m.utility_gap.value = utility_reference(cfg, m.mean_replenishment, m.mean_arrivals) - m.avg_utility.value;
    m.exact = true;
    m.n_batches = 0;
    m.n_replications = 0;
    m.initial_battery = m.final_battery = s0.battery;
    m.initial_queue = m.final_queue = s0.queue;
    return m;
}

}  // namespace ehsim
