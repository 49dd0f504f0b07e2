#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "ehsim/channel.hpp"
#include "ehsim/errors.hpp"
#include "generators.hpp"

using namespace ehsim;

TEST(AwgnRate, Values) {
    EXPECT_EQ(awgn_rate(0.0, 1.0), 0.0);
    EXPECT_DOUBLE_EQ(awgn_rate(1.0, 1.0), 1.0);
    EXPECT_DOUBLE_EQ(awgn_rate(7.0, 1.0), 3.0);
    EXPECT_THROW(awgn_rate(-1e-9, 1.0), DomainError);
}

TEST(AwgnInverse, Values) {
    EXPECT_EQ(awgn_inverse_rate(0.0, 1.0), 0.0);
    EXPECT_DOUBLE_EQ(awgn_inverse_rate(2.0, 1.0), 3.0);
    const double e = awgn_inverse_rate(3.40, 1.0);
    EXPECT_NEAR(e, std::pow(2.0, 3.40) - 1.0, 1e-12);
    EXPECT_NEAR(e, 9.56, 0.01);
    EXPECT_NEAR(awgn_rate(e, 1.0), 3.40, 1e-12);
    EXPECT_THROW(awgn_inverse_rate(-0.5, 1.0), DomainError);
}

TEST(AwgnInverse, RoundTripOverGrid) {
    gen::Gen g(1);
    for (int i = 0; i <= 1000; ++i) {
        const double e = i;  // 0..1000
        const double gamma = g.uniform(0.1, 10.0);
        EXPECT_NEAR(awgn_inverse_rate(awgn_rate(e, gamma), gamma), e, 1e-12 * std::max(1.0, e));
    }
}

TEST(RatePower, EnergyUnitScaleMultipliesGamma) {
    const auto c = make_awgn(2.0, 0.5);
    EXPECT_DOUBLE_EQ(c.effective_gamma(), 1.0);
    EXPECT_DOUBLE_EQ(c.rate(7.0), 3.0);
    EXPECT_DOUBLE_EQ(c.inverse(3.0), 7.0);
    EXPECT_THROW(make_awgn(0.0), ParameterError);
    EXPECT_THROW(make_awgn(1.0, -1.0), ParameterError);
}

TEST(RatePower, StrictlyIncreasingAndConcave) {
    gen::Gen g(2);
    for (int i = 0; i < 1000; ++i) {
        double x[3] = {g.uniform(0, 100), g.uniform(0, 100), g.uniform(0, 100)};
        std::sort(x, x + 3);
        if (x[0] == x[2]) continue;
        const double gamma = g.uniform(0.1, 10);
        EXPECT_LT(awgn_rate(x[0], gamma), awgn_rate(x[2], gamma));
        EXPECT_GE(awgn_rate(0.5 * (x[0] + x[2]), gamma),
                  0.5 * (awgn_rate(x[0], gamma) + awgn_rate(x[2], gamma)));
    }
}

TEST(Utility, LogCapacity) {
    const auto u = make_log_capacity(make_awgn(1.0));
    EXPECT_EQ(utility_eval(u, 0.0), 0.0);
    EXPECT_NEAR(utility_eval(u, 9.58), std::log2(10.58), 1e-12);
    EXPECT_NEAR(utility_eval(u, 9.58), 3.404, 1e-3);
    EXPECT_THROW(utility_eval(u, -1.0), DomainError);
}

TEST(Utility, RateTransforms) {
    const auto c = make_awgn(1.0);
    EXPECT_DOUBLE_EQ(utility_eval(make_rate_utility(c, RateTransform::Identity), 7.0), 3.0);
    EXPECT_DOUBLE_EQ(utility_eval(make_rate_utility(c, RateTransform::Log1p), 7.0), std::log(4.0));
    const auto table = make_rate_utility(c, RateTransform::Table, {{0, 0}, {1, 2}, {3, 3}});
    EXPECT_DOUBLE_EQ(utility_eval(table, 1.0), 2.0);   // C(1) = 1 -> 2
    EXPECT_DOUBLE_EQ(utility_eval(table, 7.0), 3.0);   // C(7) = 3 -> 3
    EXPECT_DOUBLE_EQ(rate_utility_eval(table, 5.0), 4.0);  // final slope 0.5 continues
    EXPECT_THROW(make_rate_utility(c, RateTransform::Log1p, {{0, 0}, {1, 1}}), ParameterError);
}

TEST(Utility, TabulatedInterpolatesBetweenKnots) {
    const auto u = make_tabulated_utility({{0, 0}, {1, 1}, {2, 2}, {4, 3}});
    gen::Gen g(3);
    for (int i = 0; i < 200; ++i) {
        const double e = g.uniform(0.0, 4.0);
        const double v = utility_eval(u, e);
        const double lo = e < 1 ? 0 : e < 2 ? 1 : 2;
        const double hi = e < 1 ? 1 : e < 2 ? 2 : 3;
        EXPECT_GE(v, lo);
        EXPECT_LE(v, hi);
    }
    EXPECT_EQ(utility_eval(u, 0.0), 0.0);
    EXPECT_THROW(rate_utility_eval(u, 1.0), UnsupportedError);
}

TEST(Utility, TableValidation) {
    EXPECT_THROW(make_tabulated_utility({{0, 0}}), ParameterError);
    EXPECT_THROW(make_tabulated_utility({{1, 0}, {2, 1}}), ParameterError);
    EXPECT_THROW(make_tabulated_utility({{0, 0}, {1, 1}, {2, 3}}), ParameterError);  // convex kink
    EXPECT_THROW(make_tabulated_utility({{0, 0}, {1, 1}, {2, 0.5}}), ParameterError);
    EXPECT_THROW(make_tabulated_utility({{0, 0}, {1, 1}, {1, 2}}), ParameterError);
}

namespace {

std::vector<UtilityFunction> every_utility() {
    const auto c = make_awgn(1.5);
    return {make_log_capacity(c), make_rate_utility(c, RateTransform::Identity),
            make_rate_utility(c, RateTransform::Log1p),
            make_rate_utility(c, RateTransform::Table, {{0, 0}, {1, 1}, {2, 1.5}, {5, 2}}),
            make_tabulated_utility({{0, 0}, {2, 3}, {5, 4}, {10, 4.5}})};
}

}  // namespace

TEST(Utility, EveryKindIsMonotoneAndMidpointConcave) {
    gen::Gen g(4);
    for (const auto& u : every_utility()) {
        EXPECT_EQ(utility_eval(u, 0.0), 0.0) << u.describe();
        for (int i = 0; i < 1000; ++i) {
            double x[3] = {g.uniform(0, 50), g.uniform(0, 50), g.uniform(0, 50)};
            std::sort(x, x + 3);
            const double ua = utility_eval(u, x[0]), uc = utility_eval(u, x[2]);
            EXPECT_LE(ua, uc + 1e-12);
            EXPECT_GE(utility_eval(u, 0.5 * (x[0] + x[2])), 0.5 * (ua + uc) - 1e-12) << u.describe();
        }
    }
}

TEST(Utility, SecondDifferenceBoundedAwayFromZero) {
    // Smooth kinds: |U''| stays finite on a fine grid away from the origin.
    const auto c = make_awgn(1.0);
    for (const auto& u : {make_log_capacity(c), make_rate_utility(c, RateTransform::Log1p)}) {
        const double h = 1e-3;
        for (double e = 0.01; e < 100; e *= 1.5) {
            const double d2 = (utility_eval(u, e + h) - 2 * utility_eval(u, e) + utility_eval(u, e - h)) / (h * h);
            EXPECT_LE(d2, 1e-6);
            EXPECT_GT(d2, -10.0);
        }
    }
}

TEST(Utility, JensenOnRandomSequences) {
    gen::Gen g(5);
    for (const auto& u : every_utility()) {
        for (int trial = 0; trial < 200; ++trial) {
            const auto seq = g.energies(static_cast<std::size_t>(g.integer(1, 200)), 30.0);
            double mean = 0.0, avg_u = 0.0;
            for (double e : seq) mean += e, avg_u += utility_eval(u, e);
            mean /= seq.size();
            avg_u /= seq.size();
            EXPECT_LE(avg_u, utility_eval(u, mean) + 1e-12) << u.describe();
        }
    }
}
