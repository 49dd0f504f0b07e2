// ehsim: energy-harvesting node simulator.
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ehsim/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Energy-harvesting sensor node simulator and scaling-law toolkit"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    std::uint32_t threads = 1;
    std::string out_dir = ".";
    bool quiet = false;
    auto* seed_opt = app.add_option("--seed", seed, "Override the config's seed");
    app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    app.add_option("--out-dir", out_dir, "Directory for CSV and plot output");
    app.add_flag("-q,--quiet", quiet, "Do not print summaries");

    std::string path;
    std::uint64_t batch_len = 1000;
    auto* simulate = app.add_subcommand("simulate", "Run one configuration with replications");
    simulate->add_option("config", path, "JSON config")->required();
    auto* sweep = app.add_subcommand("sweep", "Sweep M, K, rho or delta_r across policies");
    sweep->add_option("spec", path, "JSON sweep spec")->required();
    auto* tradeoff = app.add_subcommand("tradeoff", "Discharge/loss exponent tradeoff");
    tradeoff->add_option("spec", path, "JSON tradeoff spec")->required();
    auto* oracle = app.add_subcommand("oracle", "Compare simulation with the exact small chain");
    oracle->add_option("config", path, "JSON config with integer inputs")->required();
    auto* stats = app.add_subcommand("stats", "Mean and asymptotic variance of a process");
    stats->add_option("input", path, "JSON stats spec or a trace file")->required();
    stats->add_option("--batch-len", batch_len, "Batch length for trace files")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    ehsim::CommandOptions opts;
    if (seed_opt->count() > 0) opts.seed = seed;
    opts.threads = threads;
    opts.out_dir = out_dir;
    opts.log = quiet ? nullptr : &std::cout;

    try {
        ehsim::CommandResult result;
        if (simulate->parsed()) result = ehsim::cmd_simulate(path, opts);
        if (sweep->parsed()) result = ehsim::cmd_sweep(path, opts);
        if (tradeoff->parsed()) result = ehsim::cmd_tradeoff(path, opts);
        if (oracle->parsed()) result = ehsim::cmd_oracle(path, opts);
        if (stats->parsed()) result = ehsim::cmd_stats(path, opts, batch_len);
        return result.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return ehsim::exit_code_for(e);
    }
}
