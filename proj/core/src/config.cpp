#include "ehsim/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ehsim/errors.hpp"

namespace ehsim {

using nlohmann::json;

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path.string() + ": cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

namespace {

/// Parsing context: source text for line lookups and the base directory for relative paths.
class Doc {
public:
    Doc(std::string_view text, std::string origin) : text_(text), origin_(std::move(origin)) {}

    json parse() const {
        try {
            return json::parse(text_);
        } catch (const json::parse_error& e) {
            const auto [line, col] = line_col(e.byte == 0 ? 0 : e.byte - 1);
            std::ostringstream msg;
            msg << origin_ << ':' << line << ':' << col << ": JSON syntax error: " << strip_prefix(e.what());
            throw ConfigError(msg.str());
        }
    }

    /// Throws ConfigError located at the first textual occurrence of the field path.
    [[noreturn]] void fail(const std::string& path, const std::string& what) const {
        std::ostringstream msg;
        msg << origin_;
        if (const auto line = locate(path)) msg << ':' << *line;
        msg << ": field '" << path << "': " << what;
        throw ConfigError(msg.str());
    }

    std::filesystem::path resolve(const std::string& p) const {
        std::filesystem::path path(p);
        if (path.is_relative()) {
            const std::filesystem::path base = std::filesystem::path(origin_).parent_path();
            if (!base.empty() && origin_.front() != '<') return base / path;
        }
        return path;
    }

private:
    std::pair<std::size_t, std::size_t> line_col(std::size_t byte) const {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i < byte && i < text_.size(); ++i) {
            if (text_[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        return {line, col};
    }

    std::optional<std::size_t> locate(const std::string& path) const {
        std::size_t pos = 0;
        bool found = false;
        std::stringstream parts(path);
        std::string part;
        while (std::getline(parts, part, '.')) {
            const auto bracket = part.find('[');
            if (bracket != std::string::npos) part = part.substr(0, bracket);
            if (part.empty()) continue;
            const auto at = text_.find('"' + part + '"', pos);
            if (at == std::string_view::npos) break;
            pos = at;
            found = true;
        }
        if (!found) return std::nullopt;
        return line_col(pos).first;
    }

    static std::string strip_prefix(const std::string& what) {
        const auto at = what.find("]: ");
        return at == std::string::npos ? what : what.substr(at + 3);
    }

    std::string_view text_;
    std::string origin_;
};

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void check_keys(const Doc& doc, const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) doc.fail(path.empty() ? "<root>" : path, "expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items()) {
        if (key.empty() || key[0] == '_') continue;  // annotations
        if (!ok.count(key)) doc.fail(join(path, key), "unknown field");
    }
}

std::optional<double> opt_num(const Doc& doc, const json& obj, const std::string& path, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_number()) doc.fail(join(path, key), "expected a number");
    return it->get<double>();
}

double req_num(const Doc& doc, const json& obj, const std::string& path, const char* key) {
    const auto v = opt_num(doc, obj, path, key);
    if (!v) doc.fail(join(path, key), "required field is missing");
    return *v;
}

std::optional<std::uint64_t> opt_count(const Doc& doc, const json& obj, const std::string& path, const char* key) {
    const auto v = opt_num(doc, obj, path, key);
    if (!v) return std::nullopt;
    if (*v < 0.0 || *v != std::floor(*v) || *v > 9.0e18)
        doc.fail(join(path, key), "expected a nonnegative integer");
    return static_cast<std::uint64_t>(*v);
}

std::optional<std::string> opt_str(const Doc& doc, const json& obj, const std::string& path, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) doc.fail(join(path, key), "expected a string");
    return it->get<std::string>();
}

std::vector<double> num_list(const Doc& doc, const json& obj, const std::string& path, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end()) doc.fail(join(path, key), "required field is missing");
    if (!it->is_array()) doc.fail(join(path, key), "expected an array of numbers");
    std::vector<double> out;
    for (const auto& v : *it) {
        if (!v.is_number()) doc.fail(join(path, key), "expected an array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

std::vector<std::pair<double, double>> knot_list(const Doc& doc, const json& obj, const std::string& path) {
    const auto it = obj.find("knots");
    if (it == obj.end() || !it->is_array()) doc.fail(join(path, "knots"), "expected an array of [x, y] pairs");
    std::vector<std::pair<double, double>> knots;
    for (const auto& k : *it) {
        if (!k.is_array() || k.size() != 2 || !k[0].is_number() || !k[1].is_number())
            doc.fail(join(path, "knots"), "expected an array of [x, y] pairs");
        knots.emplace_back(k[0].get<double>(), k[1].get<double>());
    }
    return knots;
}

template <class F>
auto wrap(const Doc& doc, const std::string& path, F&& build) {
    try {
        return build();
    } catch (const StabilityError&) {
        throw;
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        doc.fail(path, e.what());
    }
}

ProcessSource parse_process(const Doc& doc, const json& obj, const std::string& path) {
    if (!obj.is_object()) doc.fail(path, "expected an object with a 'kind'");
    const auto kind = opt_str(doc, obj, path, "kind");
    if (!kind) doc.fail(join(path, "kind"), "required field is missing");
    return wrap(doc, path, [&]() -> ProcessSource {
        if (*kind == "iid-gaussian" || *kind == "gaussian") {
            check_keys(doc, obj, path, {"kind", "mean", "variance"});
            return make_iid_gaussian(req_num(doc, obj, path, "mean"), req_num(doc, obj, path, "variance"));
        }
        if (*kind == "iid-discrete") {
            check_keys(doc, obj, path, {"kind", "values", "probabilities"});
            return make_iid_discrete(num_list(doc, obj, path, "values"), num_list(doc, obj, path, "probabilities"));
        }
        if (*kind == "poisson") {
            check_keys(doc, obj, path, {"kind", "mean"});
            return make_poisson(req_num(doc, obj, path, "mean"));
        }
        if (*kind == "mmpp") {
            check_keys(doc, obj, path, {"kind", "transition", "state_means"});
            const auto it = obj.find("transition");
            if (it == obj.end() || !it->is_array() || it->size() != 2)
                doc.fail(join(path, "transition"), "expected a 2x2 array");
            std::array<std::array<double, 2>, 2> t{};
            for (int i = 0; i < 2; ++i) {
                const auto& row = (*it)[i];
                if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number())
                    doc.fail(join(path, "transition"), "expected a 2x2 array");
                t[i] = {row[0].get<double>(), row[1].get<double>()};
            }
            const auto means = num_list(doc, obj, path, "state_means");
            if (means.size() != 2) doc.fail(join(path, "state_means"), "expected two state means");
            return make_mmpp(t, {means[0], means[1]});
        }
        if (*kind == "trace") {
            check_keys(doc, obj, path, {"kind", "path", "scale"});
            const auto p = opt_str(doc, obj, path, "path");
            if (!p) doc.fail(join(path, "path"), "required field is missing");
            return make_trace(doc.resolve(*p), opt_num(doc, obj, path, "scale").value_or(1.0));
        }
        if (*kind == "diurnal") {
            check_keys(doc, obj, path, {"kind", "peak", "period", "noise_sd"});
            return make_diurnal(req_num(doc, obj, path, "peak"), opt_count(doc, obj, path, "period").value_or(1440),
                                opt_num(doc, obj, path, "noise_sd").value_or(0.0));
        }
        doc.fail(join(path, "kind"),
                 "unknown process kind '" + *kind + "' (iid-gaussian, iid-discrete, poisson, mmpp, trace, diurnal)");
    });
}

PolicySpec parse_policy(const Doc& doc, const json& obj, const std::string& path) {
    check_keys(doc, obj, path,
               {"kind", "label", "mu", "lambda", "sigma_r2", "sigma_a2", "beta", "beta_q", "delta_r", "epsilon", "draw",
                "delta_minus", "delta_plus", "delta_r1", "delta_r2"});
    PolicySpec p;
    const auto kind = opt_str(doc, obj, path, "kind");
    if (!kind) doc.fail(join(path, "kind"), "required field is missing");
    static const std::set<std::string> kinds{"scheme-b", "scheme-q", "scheme-e", "scheme-to", "constant"};
    if (!kinds.count(*kind))
        doc.fail(join(path, "kind"), "unknown policy '" + *kind + "' (scheme-b, scheme-q, scheme-e, scheme-to, constant)");
    p.kind = *kind;
    p.label = opt_str(doc, obj, path, "label").value_or("");
    p.mu = opt_num(doc, obj, path, "mu");
    p.lambda = opt_num(doc, obj, path, "lambda");
    p.sigma_r2 = opt_num(doc, obj, path, "sigma_r2");
    p.sigma_a2 = opt_num(doc, obj, path, "sigma_a2");
    p.beta = opt_num(doc, obj, path, "beta");
    p.beta_q = opt_num(doc, obj, path, "beta_q");
    p.delta_r = opt_num(doc, obj, path, "delta_r");
    p.epsilon = opt_num(doc, obj, path, "epsilon");
    p.draw = opt_num(doc, obj, path, "draw");
    p.delta_minus = opt_num(doc, obj, path, "delta_minus");
    p.delta_plus = opt_num(doc, obj, path, "delta_plus");
    p.delta_r1 = opt_num(doc, obj, path, "delta_r1");
    p.delta_r2 = opt_num(doc, obj, path, "delta_r2");
    if (p.kind == "scheme-e" && !p.delta_r) doc.fail(join(path, "delta_r"), "required for scheme-e");
    if (p.kind == "scheme-to" && !p.epsilon) doc.fail(join(path, "epsilon"), "required for scheme-to");
    return p;
}

UtilityFunction parse_utility(const Doc& doc, const json& obj, const std::string& path, const RatePowerFunction& rf) {
    const auto kind = opt_str(doc, obj, path, "kind").value_or("log-capacity");
    return wrap(doc, path, [&]() -> UtilityFunction {
        if (kind == "log-capacity") {
            check_keys(doc, obj, path, {"kind"});
            return make_log_capacity(rf);
        }
        if (kind == "rate-utility") {
            check_keys(doc, obj, path, {"kind", "transform", "knots"});
            const auto t = opt_str(doc, obj, path, "transform").value_or("identity");
            if (t == "identity") return make_rate_utility(rf, RateTransform::Identity);
            if (t == "log") return make_rate_utility(rf, RateTransform::Log1p);
            if (t == "table") return make_rate_utility(rf, RateTransform::Table, knot_list(doc, obj, path));
            doc.fail(join(path, "transform"), "expected identity, log or table");
        }
        if (kind == "tabulated") {
            check_keys(doc, obj, path, {"kind", "knots"});
            return make_tabulated_utility(knot_list(doc, obj, path));
        }
        doc.fail(join(path, "kind"), "unknown utility '" + kind + "' (log-capacity, rate-utility, tabulated)");
    });
}

/// Fills an ExperimentConfig from a JSON object (policy optional when `need_policy` is false).
/// Sizes named in `supplied` ("M", "K") come from a grid and may be omitted.
ExperimentConfig parse_experiment_obj(const Doc& doc, const json& obj, const std::string& path, bool need_policy,
                                      const std::set<std::string>& supplied = {}) {
    check_keys(doc, obj, path,
               {"mode", "M", "K", "horizon", "warmup", "n_batches", "n_replications", "seed", "initial_battery",
                "initial_queue", "replenishment", "arrivals", "channel", "utility", "policy", "sigma_r2", "sigma_a2",
                "trace"});
    ExperimentConfig cfg;
    SimConfig& sim = cfg.sim;

    const auto mode = opt_str(doc, obj, path, "mode").value_or("battery-only");
    if (mode == "battery-only")
        sim.mode = Mode::BatteryOnly;
    else if (mode == "joint")
        sim.mode = Mode::Joint;
    else
        doc.fail(join(path, "mode"), "expected 'battery-only' or 'joint'");

    const bool grid_m = supplied.count("M") && !obj.contains("M");
    const bool grid_k = supplied.count("K") && !obj.contains("K");
    if (!grid_m) {
        sim.M = req_num(doc, obj, path, "M");
        if (!(sim.M > 0.0)) doc.fail(join(path, "M"), "battery capacity must be positive");
    }
    if (sim.mode == Mode::Joint && !grid_k) {
        sim.K = req_num(doc, obj, path, "K");
        if (!(sim.K > 0.0)) doc.fail(join(path, "K"), "buffer capacity must be positive");
    } else if (const auto k = opt_num(doc, obj, path, "K")) {
        sim.K = *k;
    }
    sim.horizon = opt_count(doc, obj, path, "horizon").value_or(1'000'000);
    if (sim.horizon == 0) doc.fail(join(path, "horizon"), "must be positive");
    sim.warmup = opt_count(doc, obj, path, "warmup");
    if (sim.warmup && *sim.warmup >= sim.horizon) doc.fail(join(path, "warmup"), "must be smaller than horizon");
    sim.n_batches = static_cast<std::uint32_t>(opt_count(doc, obj, path, "n_batches").value_or(32));
    if (sim.n_batches < 2) doc.fail(join(path, "n_batches"), "need at least 2 batches");
    cfg.n_replications = static_cast<std::uint32_t>(opt_count(doc, obj, path, "n_replications").value_or(8));
    if (cfg.n_replications < 2) doc.fail(join(path, "n_replications"), "need at least 2 replications");
    sim.seed = opt_count(doc, obj, path, "seed").value_or(1);
    sim.initial_battery = opt_num(doc, obj, path, "initial_battery");
    sim.initial_queue = opt_num(doc, obj, path, "initial_queue");
    if (sim.initial_battery && !grid_m && !(*sim.initial_battery >= 0.0 && *sim.initial_battery <= sim.M))
        doc.fail(join(path, "initial_battery"), "must lie in [0, M]");
    if (sim.initial_queue && !grid_k && !(*sim.initial_queue >= 0.0 && *sim.initial_queue <= sim.K))
        doc.fail(join(path, "initial_queue"), "must lie in [0, K]");

    if (const auto it = obj.find("channel"); it != obj.end()) {
        const std::string cpath = join(path, "channel");
        check_keys(doc, *it, cpath, {"gamma", "energy_unit_scale"});
        sim.rate_fn = wrap(doc, cpath, [&] {
            return make_awgn(opt_num(doc, *it, cpath, "gamma").value_or(1.0),
                             opt_num(doc, *it, cpath, "energy_unit_scale").value_or(1.0));
        });
    }

    const auto rep = obj.find("replenishment");
    if (rep == obj.end()) doc.fail(join(path, "replenishment"), "required field is missing");
    sim.replenishment = parse_process(doc, *rep, join(path, "replenishment"));
    if (const auto arr = obj.find("arrivals"); arr != obj.end()) {
        sim.arrivals = parse_process(doc, *arr, join(path, "arrivals"));
    } else if (sim.mode == Mode::Joint) {
        doc.fail(join(path, "arrivals"), "required in joint mode");
    }

    if (const auto u = obj.find("utility"); u != obj.end())
        sim.utility = parse_utility(doc, *u, join(path, "utility"), sim.rate_fn);
    else
        sim.utility = make_log_capacity(sim.rate_fn);

    cfg.sigma_r2 = opt_num(doc, obj, path, "sigma_r2");
    cfg.sigma_a2 = opt_num(doc, obj, path, "sigma_a2");
    if (cfg.sigma_r2 && !(*cfg.sigma_r2 > 0.0)) doc.fail(join(path, "sigma_r2"), "must be positive");
    if (cfg.sigma_a2 && !(*cfg.sigma_a2 > 0.0)) doc.fail(join(path, "sigma_a2"), "must be positive");

    if (const auto tr = obj.find("trace"); tr != obj.end()) {
        const std::string tpath = join(path, "trace");
        check_keys(doc, *tr, tpath, {"path", "limit"});
        const auto p = opt_str(doc, *tr, tpath, "path");
        if (!p) doc.fail(join(tpath, "path"), "required field is missing");
        cfg.trace_path = *p;
        cfg.trace_limit = opt_count(doc, *tr, tpath, "limit").value_or(cfg.trace_limit);
    }

    if (const auto pol = obj.find("policy"); pol != obj.end()) {
        cfg.policy = parse_policy(doc, *pol, join(path, "policy"));
        sim.policy = wrap(doc, join(path, "policy"), [&] { return build_policy(cfg.policy, cfg); });
    } else if (need_policy) {
        doc.fail(join(path, "policy"), "required field is missing");
    }
    return cfg;
}

std::vector<double> parse_grid(const Doc& doc, const json& obj, const std::string& path, const char* key) {
    const auto values = num_list(doc, obj, path, key);
    if (values.empty()) doc.fail(join(path, key), "grid must not be empty");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] > 0.0)) doc.fail(join(path, key), "grid values must be positive");
        if (i > 0 && !(values[i] > values[i - 1])) doc.fail(join(path, key), "grid values must be strictly increasing");
    }
    return values;
}

std::uint64_t hash_of(const json& j) { return fnv1a(j.dump()); }

}  // namespace

std::optional<double> replenishment_var(const ExperimentConfig& cfg) {
    if (cfg.sigma_r2) return cfg.sigma_r2;
    return cfg.sim.replenishment.declared_asym_var();
}

std::optional<double> arrivals_var(const ExperimentConfig& cfg) {
    if (cfg.sigma_a2) return cfg.sigma_a2;
    if (!cfg.sim.arrivals) return std::nullopt;
    return cfg.sim.arrivals->declared_asym_var();
}

std::string policy_label(const PolicySpec& spec) { return spec.label.empty() ? spec.kind : spec.label; }

Policy build_policy(const PolicySpec& spec, const ExperimentConfig& cfg) {
    const SimConfig& sim = cfg.sim;
    const double mu = spec.mu.value_or(sim.replenishment.declared_mean());
    const double lambda = spec.lambda.value_or(sim.arrivals ? sim.arrivals->declared_mean() : 0.0);
    if (spec.kind == "scheme-b") {
        if (spec.delta_minus || spec.delta_plus) {
            return make_scheme_b_asymmetric(mu, spec.delta_minus.value_or(0.0),
                                            spec.delta_plus.value_or(spec.delta_minus.value_or(0.0)), sim.M);
        }
        const auto var = spec.sigma_r2 ? spec.sigma_r2 : replenishment_var(cfg);
        if (!var) throw ConfigError("scheme-b needs sigma_r2 (the replenishment has no declared asymptotic variance)");
        return make_scheme_b(mu, *var, spec.beta.value_or(2.0), sim.M);
    }
    if (spec.kind == "scheme-q") {
        if (sim.mode != Mode::Joint) throw ConfigurationError("scheme-q needs a data queue; use joint mode");
        if (spec.delta_r1 || spec.delta_r2) {
            if (!spec.delta_r1 || !spec.delta_r2) throw ConfigError("scheme-q: give both delta_r1 and delta_r2");
            return make_scheme_q_explicit(mu, *spec.delta_r1, *spec.delta_r2, sim.K);
        }
        const auto var = spec.sigma_a2 ? spec.sigma_a2 : arrivals_var(cfg);
        if (!var) throw ConfigError("scheme-q needs sigma_a2 (the arrivals have no declared asymptotic variance)");
        return make_scheme_q(mu, lambda, *var, spec.beta_q.value_or(2.0), sim.K, sim.rate_fn);
    }
    if (spec.kind == "scheme-e") return make_scheme_e(mu, spec.delta_r.value_or(0.0), lambda, sim.rate_fn);
    if (spec.kind == "scheme-to") return make_scheme_to(mu, spec.epsilon.value_or(0.0), lambda, sim.rate_fn);
    if (spec.kind == "constant") return make_constant(spec.draw.value_or(mu));
    throw ConfigError("unknown policy kind '" + spec.kind + "'");
}

ExperimentConfig parse_experiment(std::string_view text, const std::string& origin) {
    const Doc doc(text, origin);
    const json root = doc.parse();
    ExperimentConfig cfg = parse_experiment_obj(doc, root, "", true);
    cfg.hash = hash_of(root);
    return cfg;
}

SweepSpec parse_sweep(std::string_view text, const std::string& origin) {
    const Doc doc(text, origin);
    const json root = doc.parse();
    check_keys(doc, root, "", {"name", "base", "policies", "sweep", "n_replications"});
    SweepSpec spec;
    const auto base = root.find("base");
    if (base == root.end()) doc.fail("base", "required field is missing");
    std::set<std::string> supplied;
    if (const auto sw = root.find("sweep"); sw != root.end() && sw->is_object() && sw->contains("axis") &&
                                            (*sw)["axis"].is_string())
        supplied.insert((*sw)["axis"].get<std::string>());
    spec.base = parse_experiment_obj(doc, *base, "base", false, supplied);
    if (const auto n = opt_count(doc, root, "", "n_replications")) {
        if (*n < 2) doc.fail("n_replications", "need at least 2 replications");
        spec.base.n_replications = static_cast<std::uint32_t>(*n);
    }
    spec.name = opt_str(doc, root, "", "name").value_or("sweep");

    const auto pols = root.find("policies");
    if (pols == root.end() || !pols->is_array()) doc.fail("policies", "expected a list of policies");
    if (pols->empty()) doc.fail("policies", "policy list must not be empty");
    for (std::size_t i = 0; i < pols->size(); ++i)
        spec.policies.push_back(parse_policy(doc, (*pols)[i], "policies[" + std::to_string(i) + "]"));

    const auto sw = root.find("sweep");
    if (sw == root.end()) doc.fail("sweep", "required field is missing");
    check_keys(doc, *sw, "sweep", {"axis", "values"});
    const auto axis = opt_str(doc, *sw, "sweep", "axis");
    if (!axis) doc.fail("sweep.axis", "required field is missing");
    static const std::set<std::string> axes{"M", "K", "rho", "delta_r"};
    if (!axes.count(*axis)) doc.fail("sweep.axis", "expected one of M, K, rho, delta_r");
    spec.axis = *axis;
    spec.values = parse_grid(doc, *sw, "sweep", "values");
    if (spec.axis == "rho") {
        if (spec.base.sim.mode != Mode::Joint) doc.fail("sweep.axis", "a rho sweep needs joint mode");
        for (double v : spec.values)
            if (!(v < 1.0)) doc.fail("sweep.values", "rho values must lie in (0, 1)");
    }
    if (spec.axis == "K" && spec.base.sim.mode != Mode::Joint) doc.fail("sweep.axis", "a K sweep needs joint mode");
    if (spec.axis == "delta_r")
        for (const auto& p : spec.policies)
            if (p.kind != "scheme-e") doc.fail("sweep.axis", "a delta_r sweep applies to scheme-e policies only");
    spec.hash = hash_of(root);
    return spec;
}

TradeoffSpec parse_tradeoff(std::string_view text, const std::string& origin) {
    const Doc doc(text, origin);
    const json root = doc.parse();
    check_keys(doc, root, "",
               {"name", "base", "n_grid", "operating_points", "M_grid", "K_grid", "loss_battery", "n_replications"});
    TradeoffSpec spec;
    const auto base = root.find("base");
    if (base == root.end()) doc.fail("base", "required field is missing");
    spec.base = parse_experiment_obj(doc, *base, "base", false, {"M", "K"});
    if (spec.base.sim.mode != Mode::Joint || !spec.base.sim.arrivals)
        doc.fail("base.mode", "the tradeoff needs joint mode with an arrival process");
    if (const auto n = opt_count(doc, root, "", "n_replications")) {
        if (*n < 2) doc.fail("n_replications", "need at least 2 replications");
        spec.base.n_replications = static_cast<std::uint32_t>(*n);
    }
    spec.name = opt_str(doc, root, "", "name").value_or("tradeoff");
    spec.n_grid = opt_count(doc, root, "", "n_grid").value_or(50);
    if (spec.n_grid < 2) doc.fail("n_grid", "need at least 2 grid points");
    if (root.contains("operating_points")) {
        spec.operating_points = parse_grid(doc, root, "", "operating_points");
        if (spec.operating_points.size() > 3) doc.fail("operating_points", "at most 3 operating points");
        spec.m_grid = parse_grid(doc, root, "", "M_grid");
        spec.k_grid = parse_grid(doc, root, "", "K_grid");
        spec.loss_battery = opt_num(doc, root, "", "loss_battery");
    }
    if (!replenishment_var(spec.base)) doc.fail("base.sigma_r2", "needed: replenishment variance is not declared");
    if (!arrivals_var(spec.base)) doc.fail("base.sigma_a2", "needed: arrival variance is not declared");
    spec.hash = hash_of(root);
    return spec;
}

StatsSpec parse_stats(std::string_view text, const std::string& origin) {
    const Doc doc(text, origin);
    const json root = doc.parse();
    check_keys(doc, root, "", {"source", "horizon", "batch_len", "seed"});
    StatsSpec spec;
    const auto src = root.find("source");
    if (src == root.end()) doc.fail("source", "required field is missing");
    spec.source = parse_process(doc, *src, "source");
    spec.horizon = opt_count(doc, root, "", "horizon").value_or(spec.horizon);
    spec.batch_len = opt_count(doc, root, "", "batch_len").value_or(spec.batch_len);
    if (spec.batch_len < 1) doc.fail("batch_len", "must be at least 1");
    if (spec.horizon < 100 * spec.batch_len) doc.fail("horizon", "must be at least 100 * batch_len");
    spec.seed = opt_count(doc, root, "", "seed").value_or(1);
    spec.hash = hash_of(root);
    return spec;
}

}  // namespace ehsim
