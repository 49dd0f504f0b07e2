#include <gtest/gtest.h>

#include <cmath>

#include "ehsim/errors.hpp"
#include "ehsim/policies.hpp"
#include "generators.hpp"

using namespace ehsim;

namespace {

const RatePowerFunction kUnitGamma = make_awgn(1.0);

NodeState at(double battery, double queue = 0.0) { return NodeState{battery, queue, 0}; }

}  // namespace

TEST(SchemeB, DriftFormula) {
    const auto p = make_scheme_b(10.0, 1.0, 2.0, 100.0);
    EXPECT_NEAR(p.delta_b, 2.0 * std::log(100.0) / 100.0, 1e-15);
    EXPECT_NEAR(p.delta_b, 0.09210, 1e-5);
    EXPECT_EQ(p.delta_b_plus, p.delta_b);
}

TEST(SchemeB, DriftDecreasesBeyondE) {
    double prev = make_scheme_b(10.0, 1.0, 2.0, 3.0).delta_b;
    for (double M = 4.0; M <= 1e8; M *= 1.7) {
        const double d = make_scheme_b(10.0, 1.0, 2.0, M).delta_b;
        EXPECT_LT(d, prev) << M;
        prev = d;
    }
    EXPECT_LT(prev, 1e-6);
}

TEST(SchemeB, DriftTimesMOverLogMIsConstant) {
    gen::Gen g(8);
    for (int i = 0; i < 200; ++i) {
        const double sigma2 = g.uniform(0.1, 5.0), beta = g.uniform(2.0, 4.0), M = g.uniform(50.0, 1e6);
        const auto p = make_scheme_b(100.0, sigma2, beta, M);
        EXPECT_NEAR(p.delta_b * M / std::log(M), beta * sigma2, 1e-12 * beta * sigma2);
    }
}

TEST(SchemeB, Errors) {
    EXPECT_THROW(make_scheme_b(0.05, 1.0, 2.0, 100.0), ConfigurationError);
    EXPECT_THROW(make_scheme_b(10.0, 1.0, 1.5, 100.0), ParameterError);
    EXPECT_THROW(make_scheme_b(10.0, 1.0, 2.0, 1.0), ParameterError);
    EXPECT_THROW(make_scheme_b(10.0, 0.0, 2.0, 100.0), ParameterError);
}

TEST(SchemeB, ThresholdBelongsToUpperBranch) {
    const auto p = make_scheme_b(10.0, 1.0, 2.0, 100.0);
    EXPECT_EQ(raw_request(p, at(50.0)), 10.0 + p.delta_b);
    EXPECT_EQ(raw_request(p, at(std::nextafter(50.0, 0.0))), 10.0 - p.delta_b);
}

TEST(SchemeB, RawRequestTakesTwoValuesSplitAtHalfM) {
    const auto p = make_scheme_b(10.0, 1.0, 2.0, 100.0);
    gen::Gen g(9);
    for (int i = 0; i < 1000; ++i) {
        const double b = g.uniform(0.0, 100.0);
        EXPECT_EQ(raw_request(p, at(b)), b >= 50.0 ? 10.0 + p.delta_b : 10.0 - p.delta_b);
    }
}

TEST(SchemeQ, DriftRelationExample) {
    const auto p = make_scheme_q(31.0, 3.0, 1.0, 2.0, 1000.0, kUnitGamma);
    EXPECT_NEAR(p.delta_a, 2.0 * std::log(1000.0) / 1000.0, 1e-15);
    EXPECT_NEAR(p.delta_a, 0.013816, 1e-6);
    EXPECT_NEAR(p.delta_r1, 31.0 - (std::pow(2.0, 3.0 + p.delta_a) - 1.0), 1e-10);
    EXPECT_NEAR(p.delta_r2, 31.0 - (std::pow(2.0, 3.0 - p.delta_a) - 1.0), 1e-10);
    EXPECT_NEAR(p.delta_r1, 23.923, 1e-3);
    EXPECT_NEAR(p.delta_r2, 24.076, 1e-3);
    EXPECT_NEAR(awgn_rate(31.0 - p.delta_r1, 1.0) - 3.0, p.delta_a, 1e-10);
    EXPECT_NEAR(3.0 - awgn_rate(31.0 - p.delta_r2, 1.0), p.delta_a, 1e-10);
}

TEST(SchemeQ, SymmetricDriftOnRandomParameters) {
    gen::Gen g(10);
    int built = 0;
    for (int i = 0; i < 500; ++i) {
        const double gamma = g.uniform(0.2, 5.0);
        const auto c = make_awgn(gamma);
        const double mu = g.uniform(1.0, 50.0);
        const double lambda = g.uniform(0.05, 0.95) * c.rate(mu);
        try {
            const auto p = make_scheme_q(mu, lambda, g.uniform(0.1, 3.0), g.uniform(2.0, 3.0), g.uniform(50, 5000), c);
            const double up = c.rate(mu - p.delta_r1) - lambda;
            const double down = c.rate(mu - p.delta_r2) - lambda;
            EXPECT_NEAR(up, -down, 1e-10);
            EXPECT_NEAR(up, p.delta_a, 1e-10);
            ++built;
        } catch (const ConfigurationError&) {
        }
    }
    EXPECT_GT(built, 100);
}

TEST(SchemeQ, StabilityBoundary) {
    const double cap = kUnitGamma.rate(10.0);
    try {
        make_scheme_q(10.0, cap, 1.0, 2.0, 100.0, kUnitGamma);
        FAIL() << "expected StabilityError";
    } catch (const StabilityError& e) {
        EXPECT_NE(std::string(e.what()).find("lambda < C(mu)"), std::string::npos);
    }
    EXPECT_THROW(make_scheme_q(10.0, 3.0, 1.0, 2.0, 5.0, kUnitGamma), ConfigurationError);  // drift too large
}

TEST(SchemeQ, LargeBufferOffsetsConverge) {
    const double target = 10.0 - kUnitGamma.inverse(3.0);
    const auto p = make_scheme_q(10.0, 3.0, 1.0, 2.0, 1e9, kUnitGamma);
    EXPECT_NEAR(p.delta_r1, target, 1e-6);
    EXPECT_NEAR(p.delta_r2, target, 1e-6);
}

TEST(SchemeQ, ThresholdBelongsToUpperBranch) {
    const auto p = make_scheme_q(31.0, 3.0, 1.0, 2.0, 1000.0, kUnitGamma);
    EXPECT_EQ(raw_request(p, at(0.0, 500.0)), 31.0 - p.delta_r1);
    EXPECT_EQ(raw_request(p, at(0.0, 499.999)), 31.0 - p.delta_r2);
}

TEST(SchemeQ, EmptyQueueMeansNoDraw) {
    const auto p = make_scheme_q(31.0, 3.0, 1.0, 2.0, 1000.0, kUnitGamma);
    EXPECT_EQ(decide(p, at(100.0, 0.0), kUnitGamma, Mode::Joint), 0.0);
}

TEST(SchemeE, Example) {
    const auto p = make_scheme_e(10.0, 1.0, 2.0, kUnitGamma);
    EXPECT_EQ(raw_request(p, at(0.0)), 9.0);
    EXPECT_NEAR(p.delta_a, awgn_rate(9.0, 1.0) - 2.0, 1e-15);
    EXPECT_NEAR(p.delta_a, 1.3219, 1e-4);
}

TEST(SchemeE, OpenIntervalBoundary) {
    const double upper = 10.0 - kUnitGamma.inverse(2.0);
    EXPECT_THROW(make_scheme_e(10.0, upper, 2.0, kUnitGamma), ConfigurationError);
    EXPECT_THROW(make_scheme_e(10.0, 0.0, 2.0, kUnitGamma), ConfigurationError);
    EXPECT_NO_THROW(make_scheme_e(10.0, std::nextafter(upper, 0.0), 2.0, kUnitGamma));
}

TEST(SchemeE, SmallDriftApproachesCapacityGap) {
    const auto p = make_scheme_e(10.0, 1e-9, 2.0, kUnitGamma);
    EXPECT_NEAR(p.delta_a, kUnitGamma.rate(10.0) - 2.0, 1e-8);
}

TEST(SchemeTO, Examples) {
    const auto p = make_scheme_to(10.0, 0.5, 3.0, kUnitGamma);
    EXPECT_GT(kUnitGamma.rate(9.5), 3.0);
    EXPECT_NEAR(kUnitGamma.rate(9.5), 3.392, 1e-3);
    EXPECT_EQ(decide(p, at(0.0), kUnitGamma, Mode::BatteryOnly), 0.0);
    EXPECT_EQ(decide(p, at(9.5), kUnitGamma, Mode::BatteryOnly), 9.5);
    EXPECT_EQ(decide(p, at(50.0), kUnitGamma, Mode::BatteryOnly), 9.5);
    EXPECT_THROW(make_scheme_to(10.0, 0.5, 3.5, kUnitGamma), ConfigurationError);
    EXPECT_THROW(make_scheme_to(10.0, 10.0, 1.0, kUnitGamma), ConfigurationError);
}

TEST(SchemeTO, MonotoneInBatteryAndIgnoresQueue) {
    const auto p = make_scheme_to(10.0, 0.5, 3.0, kUnitGamma);
    gen::Gen g(12);
    for (int i = 0; i < 500; ++i) {
        const double b1 = g.uniform(0, 40), b2 = g.uniform(0, 40);
        const double q1 = g.uniform(0, 100), q2 = g.uniform(0, 100);
        EXPECT_EQ(raw_request(p, at(b1, q1)), raw_request(p, at(b1, q2)));
        if (b1 <= b2) EXPECT_LE(raw_request(p, at(b1, q1)), raw_request(p, at(b2, q1)));
    }
}

TEST(Constant, DrawIsFixed) {
    const auto p = make_constant(3.0);
    EXPECT_EQ(raw_request(p, at(0.0)), 3.0);
    EXPECT_EQ(decide(p, at(1.0), kUnitGamma, Mode::BatteryOnly), 1.0);
    EXPECT_THROW(make_constant(-1.0), ParameterError);
}

TEST(Decide, NeverExceedsBatteryOrQueueCapacity) {
    gen::Gen g(13);
    const std::vector<Policy> policies{make_scheme_b(10.0, 1.0, 2.0, 100.0),
                                       make_scheme_q(10.0, 3.0, 1.0, 2.0, 100.0, kUnitGamma),
                                       make_scheme_e(10.0, 0.5, 3.0, kUnitGamma),
                                       make_scheme_to(10.0, 0.5, 3.0, kUnitGamma), make_constant(7.0)};
    for (const auto& p : policies) {
        for (int i = 0; i < 2000; ++i) {
            const auto s = at(g.coin(0.2) ? 0.0 : g.uniform(0.0, 100.0), g.coin(0.2) ? 0.0 : g.uniform(0.0, 100.0));
            const double e_b = decide(p, s, kUnitGamma, Mode::BatteryOnly);
            EXPECT_GE(e_b, 0.0);
            EXPECT_LE(e_b, s.battery);
            if (p.kind == PolicyKind::SchemeQ) continue;  // queue rule is joint-only
            const double e_j = decide(p, s, kUnitGamma, Mode::Joint);
            EXPECT_GE(e_j, 0.0);
            EXPECT_LE(e_j, s.battery);
            EXPECT_LE(kUnitGamma.rate(e_j), s.queue + 1e-12) << p.describe();
        }
    }
}

TEST(Decide, DetailOrdersClamps) {
    const auto p = make_constant(7.0);
    const auto d = decide_detail(p, at(5.0, 2.0), kUnitGamma, Mode::Joint);
    EXPECT_EQ(d.raw, 7.0);
    EXPECT_DOUBLE_EQ(d.wanted, 3.0);  // C^-1(2)
    EXPECT_DOUBLE_EQ(d.energy, 3.0);
    const auto d2 = decide_detail(p, at(2.0, 2.0), kUnitGamma, Mode::Joint);
    EXPECT_DOUBLE_EQ(d2.energy, 2.0);
}
