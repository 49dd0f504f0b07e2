// Small random generators for property tests.
#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace ehsim::gen {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool coin(double p = 0.5) { return uniform(0.0, 1.0) < p; }

    /// n nonnegative reals; about a quarter of them exactly zero.
    std::vector<double> energies(std::size_t n, double hi) {
        std::vector<double> v(n);
        for (auto& x : v) x = coin(0.25) ? 0.0 : uniform(0.0, hi);
        return v;
    }

    /// Probability vector of length n with no zero entries.
    std::vector<double> simplex(std::size_t n) {
        std::vector<double> p(n);
        double total = 0.0;
        for (auto& x : p) total += (x = uniform(0.05, 1.0));
        for (auto& x : p) x /= total;
        return p;
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

}  // namespace ehsim::gen
