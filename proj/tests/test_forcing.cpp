#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kvlab/forcing.hpp"
#include "kvlab/grid.hpp"

using namespace kvlab;
constexpr double pi = std::numbers::pi;

TEST(ForcingKind, StringRoundTrip) {
    for (ForcingKind k : {ForcingKind::Zero, ForcingKind::Example1, ForcingKind::Example2, ForcingKind::Custom}) {
        EXPECT_EQ(forcing_kind_from_string(to_string(k)), k);
    }
    EXPECT_THROW(forcing_kind_from_string("sine"), Error);
}

TEST(EvalForcing, ZeroIsZero) {
    const auto z = ForcingSpec::zero();
    EXPECT_EQ(eval_forcing(z, 0.3, 7.0, 1.0, -2.0, 3.0, 4.0), 0.0);
}

TEST(EvalForcing, Example1AtSpikeApex) {
    const double b0 = 0.04;
    const auto f = ForcingSpec::example1(b0);
    EXPECT_NEAR(eval_forcing(f, 0.5, 2.0, pi / 2, 0, 0, 0), std::sqrt(2.0 * b0), 1e-15);
    EXPECT_EQ(eval_forcing(f, 0.5, 1.2, pi / 2, 0, 0, 0), 0.0);
}

TEST(EvalForcing, Example2Linear) {
    const auto f = ForcingSpec::example2(1.0, 1.0);
    EXPECT_NEAR(eval_forcing(f, 0.5, 0.0, 0.3, 0, 0, 0), -0.3, 1e-15);
}

TEST(EvalForcing, Example2WithDamping) {
    auto f = ForcingSpec::example2(1.0, 1.0, 0.5, 0.5);
    f.custom_a = [](double, double, double, double, double, double) { return 0.5; };
    EXPECT_NEAR(eval_forcing(f, 0.5, 0.0, 0.3, 0, 0, 2.0), -0.3 - 1.0, 1e-15);
}

TEST(EvalForcing, NonFiniteCarriesLocation) {
    const auto f = ForcingSpec::custom([](double, double, double u, double, double, double) { return 1.0 / u; });
    try {
        eval_forcing(f, 0.25, 3.5, 0.0, 0, 0, 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ForcingEvaluation);
        const std::string msg = e.what();
        EXPECT_NE(msg.find("x=0.25"), std::string::npos);
        EXPECT_NE(msg.find("t=3.5"), std::string::npos);
    }
}

TEST(Example1BSquared, PiecewiseValues) {
    const double b0 = 0.3;
    for (int n = 2; n <= 12; ++n) EXPECT_NEAR(example1_b_squared(n, b0), b0 * n, 1e-13) << n;
    EXPECT_EQ(example1_b_squared(1.2, b0), 0.0);
    EXPECT_EQ(example1_b_squared(0.0, b0), 0.0);
    EXPECT_NEAR(example1_b_squared(1.5, b0), 0.0, 1e-15);  // left foot of the n = 2 spike
    EXPECT_NEAR(example1_b_squared(1.75, b0), b0 * 4.0 * 0.25, 1e-15);
    EXPECT_NEAR(example1_b_squared(2.25, b0), b0 * (2.0 - 4.0 * 0.25), 1e-15);
    EXPECT_EQ(example1_b_squared(3.5, b0), 0.0);  // between supports [2.5] and [3 - 1/3]
}

TEST(Example1BSquared, NonnegativeContinuousAndSupported) {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> ut(0.0, 200.0);
    for (int i = 0; i < 20000; ++i) {
        const double t = ut(rng);
        const double v = example1_b_squared(t, 1.0);
        EXPECT_GE(v, 0.0);
        const double n = std::round(t);
        if (std::abs(t - n) > 1.0 / n) {
            EXPECT_EQ(v, 0.0) << t;
        }
        // Lipschitz with constant n^2 on each spike; a tiny step must not jump.
        EXPECT_LE(std::abs(example1_b_squared(t + 1e-9, 1.0) - v), (n + 1) * (n + 1) * 1e-9 + 1e-15);
    }
}

TEST(Example1BSquared, RunningAverageTendsToB0) {
    const double b0 = 0.07;
    for (double T : {500.0, 1000.0}) {
        const double dt = 1e-3;
        double s = 0.0;
        double prev = example1_b_squared(0.0, b0);
        const auto n = static_cast<std::size_t>(T / dt);
        for (std::size_t i = 1; i <= n; ++i) {
            const double cur = example1_b_squared(static_cast<double>(i) * dt, b0);
            s += 0.5 * (prev + cur) * dt;
            prev = cur;
        }
        EXPECT_NEAR(s / T, b0, 0.05 * b0) << T;
    }
}

TEST(Example2F, SignConventionAndOddness) {
    EXPECT_EQ(example2_F(0.0, 2.0, 0.5), 0.0);
    EXPECT_NEAR(example2_F(1.0, 2.0, 0.5), -2.0, 1e-15);
    EXPECT_NEAR(example2_F(-1.0, 2.0, 0.5), 2.0, 1e-15);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> uu(-5.0, 5.0), tt(0.01, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double u = uu(rng), tau = tt(rng);
        EXPECT_DOUBLE_EQ(example2_F(-u, 1.3, tau), -example2_F(u, 1.3, tau));
    }
}

TEST(FPotential, ValuesEvenNonpositiveAndAntiderivative) {
    EXPECT_EQ(F_potential(0.0, 1.0, 1.0), 0.0);
    EXPECT_NEAR(F_potential(1.0, 1.0, 1.0), -0.5, 1e-15);
    EXPECT_NEAR(F_potential(-1.0, 1.0, 1.0), -0.5, 1e-15);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> uu(-3.0, 3.0), tt(0.05, 1.0);
    for (int i = 0; i < 500; ++i) {
        const double u = uu(rng), tau = tt(rng);
        EXPECT_LE(F_potential(u, 2.0, tau), 0.0);
        EXPECT_DOUBLE_EQ(F_potential(u, 2.0, tau), F_potential(-u, 2.0, tau));
        const double h = 1e-6;
        if (std::abs(u) > 1e-3) {
            const double deriv = (F_potential(u + h, 2.0, tau) - F_potential(u - h, 2.0, tau)) / (2 * h);
            EXPECT_NEAR(deriv, example2_F(u, 2.0, tau), 1e-6 * (1 + std::abs(deriv)));
        }
    }
}

TEST(Potential, AvailableOnlyForPotentialForcings) {
    EXPECT_TRUE(ForcingSpec::zero().has_potential());
    EXPECT_TRUE(ForcingSpec::example2(1, 0.5).has_potential());
    EXPECT_FALSE(ForcingSpec::example1(0.1).has_potential());
    try {
        forcing_potential(ForcingSpec::example1(0.1), 0.3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnsupportedFunctional);
    }
}

TEST(CurvatureSign, HoldsOnSineStates) {
    // int F(phi) phi_xx >= 0 for F(u) = -k sign(u)|u|^tau.
    const Grid g = make_grid(199);
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> c(-1.0, 1.0);
    for (int i = 0; i < 30; ++i) {
        std::vector<double> a(5);
        for (double& x : a) x = c(rng);
        const auto phi = sine_series(a, g);
        const auto pxx = derivative(phi, 2);
        GridFunction integrand(g);
        for (std::size_t j = 0; j < g.size(); ++j) integrand[j] = example2_F(phi[j], 1.0, 0.5) * pxx[j];
        EXPECT_GE(integrate(integrand), -1e-6);
    }
}

TEST(ValidateForcing, Preconditions) {
    const PdeParams p{1.0, 1.0};
    EXPECT_NO_THROW(validate_forcing(ForcingSpec::example1(0.1), p));
    EXPECT_THROW(validate_forcing(ForcingSpec::example1(-0.1), p), Error);
    EXPECT_THROW(validate_forcing(ForcingSpec::example2(0.0, 0.5), p), Error);
    EXPECT_THROW(validate_forcing(ForcingSpec::example2(1.0, 0.0), p), Error);
    EXPECT_THROW(validate_forcing(ForcingSpec::example2(1.0, 1.5), p), Error);
    try {
        validate_forcing(ForcingSpec::example2(1.0, 0.5, -5.0, 0.0), p);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::HypothesisViolated);
        EXPECT_NE(std::string(e.what()).find("-epsilon"), std::string::npos);
    }
    EXPECT_THROW(validate_forcing(ForcingSpec::example2(1.0, 0.5, 0.0, INFINITY), p), Error);
}

TEST(ValidateForcing, NullCompatibilityAndDampingSpotCheck) {
    const PdeParams p{1.0, 1.0};
    const auto shifted = ForcingSpec::custom([](double x, double, double, double, double, double) { return x; });
    try {
        validate_forcing(shifted, p);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::HypothesisViolated);
    }
    auto lying = ForcingSpec::example2(1.0, 0.5, 0.0, 1.0);
    lying.custom_a = [](double, double, double u, double, double, double) { return u; };  // unbounded
    EXPECT_THROW(validate_forcing(lying, p), Error);
    auto honest = ForcingSpec::example2(1.0, 0.5, 0.0, 1.0);
    honest.custom_a = [](double x, double, double, double, double, double) { return x; };
    EXPECT_NO_THROW(validate_forcing(honest, p));
}
