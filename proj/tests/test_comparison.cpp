#include <gtest/gtest.h>

#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <random>
#include <vector>

#include "kvlab/comparison.hpp"
#include "kvlab/forcing.hpp"

using namespace kvlab;

namespace {

const RateFn zero_g = [](double, double) { return 0.0; };

RateFn constant(double c) {
    return [c](double, double) { return c; };
}

/// Bracket maximum on a grid 10x finer than the scan under test, with an exact integral for constant g.
double brute_force_M(double t0, double t_prime, double p, double q_r, double g0, double scan_dt) {
    double best = 0.0;
    const double h = scan_dt / 10.0;
    for (double t = t0; t <= t_prime + 1e-12; t += h) {
        best = std::max(best, -0.5 * (p - q_r) * (t - t0) + g0 * (t - t0));
    }
    return best;
}

double odeint_solution(double y0, double k3, double D, double tau, double T) {
    using namespace boost::numeric::odeint;
    std::vector<double> y{y0};
    auto rhs = [&](const std::vector<double>& x, std::vector<double>& dxdt, double) {
        dxdt[0] = -k3 * std::pow(std::max(x[0], 0.0) / (2 * D), 2.0 / (tau + 1));
    };
    integrate_adaptive(make_controlled(1e-14, 1e-14, runge_kutta_dopri5<std::vector<double>>()), rhs, y, 0.0, T,
                       1e-3);
    return y[0];
}

}  // namespace

TEST(ScalarOde, Rk4AgainstExponential) {
    const TimeSeries s = solve_scalar_ode([](double, double y) { return -0.7 * y; }, 2.0, 1.0, 11.0, 1e-2);
    ASSERT_EQ(s.t.size(), 1001u);
    EXPECT_NEAR(s.t.back(), 11.0, 1e-12);
    EXPECT_NEAR(s.y.back(), 2.0 * std::exp(-7.0), 1e-10);
    EXPECT_NEAR(s.at(6.0), 2.0 * std::exp(-3.5), 1e-9);
}

TEST(ScalarOde, ClampedAtZeroAndErrors) {
    const TimeSeries s = solve_scalar_ode([](double, double) { return -1.0; }, 0.5, 0.0, 2.0, 0.1);
    EXPECT_EQ(s.y.back(), 0.0);
    EXPECT_THROW(solve_scalar_ode([](double, double y) { return y * y; }, 1.0, 0.0, 5.0, 0.1), Error);
    EXPECT_THROW(solve_comparison_ode(1.0, zero_g, -1.0, 0.0, 1.0, 0.1), Error);
    EXPECT_THROW(solve_scalar_ode([](double, double) { return 0.0; }, 1.0, 0.0, 1.0, 0.0), Error);
}

TEST(ComparisonOde, ConstantGrowth) {
    const TimeSeries s = solve_comparison_ode(0.5, constant(0.2), 1.0, 0.0, 10.0, 1e-2);
    EXPECT_NEAR(s.y.back(), std::exp(-3.0), 1e-10);
}

TEST(ComparisonOde, SpikeTrainBelowDrainDecays) {
    const double b0 = 1.0 / 18, p = 1.0 / 9;
    const RateFn g = [b0](double t, double) { return example1_b_squared(t, b0); };
    const TimeSeries s = solve_comparison_ode(p, g, 1.0, 0.0, 500.0, 1e-3);
    EXPECT_LT(s.y.back(), std::exp(-0.5 * (p - b0) * 400.0));
}

TEST(EstimateQ, ConstantIsExact) {
    const QEstimate q = estimate_q(constant(0.37), 0.0, 0.1, 100.0);
    EXPECT_EQ(q.q, 0.37);
    EXPECT_EQ(q.q_half, 0.37);
    EXPECT_FALSE(q.diverging);
}

TEST(EstimateQ, SpikeTrainAverageIsB0) {
    const double b0 = 1.0 / 18;
    const RateFn g_hat = [b0](double t, double) { return example1_b_squared(t, b0); };
    const QEstimate q = estimate_q(g_hat, 0.0, 1.0 / 16, 500.0);
    EXPECT_NEAR(q.q, b0, 0.05 * b0);
    EXPECT_FALSE(q.diverging);
}

TEST(EstimateQ, GrowingAverageFlagged) {
    const QEstimate q = estimate_q([](double t, double) { return t; }, 0.0, 1.0, 100.0);
    EXPECT_TRUE(q.diverging);
    EXPECT_NEAR(q.indicator, 0.5, 1e-6);
}

TEST(EstimateQ, LevelIsScaledByC1) {
    const QEstimate q = estimate_q([](double, double eta) { return eta; }, 0.5, 0.25, 10.0);
    EXPECT_NEAR(q.q, 2.0, 1e-12);
}

TEST(RBar, Cases) {
    const RBar a = find_r_bar([](double) { return 0.05; }, 0.1, 3.0);
    EXPECT_EQ(a.value, 3.0);
    EXPECT_TRUE(a.at_boundary);
    const RBar b = find_r_bar([](double eta) { return eta; }, 1.0, 10.0);
    EXPECT_NEAR(b.value, 1.0, 1e-8);
    EXPECT_FALSE(b.at_boundary);
    try {
        find_r_bar([](double) { return 1.0; }, 1.0, 10.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NoStabilityCertificate);
    }
}

TEST(TPrime, SettlingTimeAndIncomplete) {
    // g = 1 on [0, 1], then 0: average over [0, t] is 1/t, falls below (p + q)/2 = 0.25 after t = 4.
    const RateFn step_g = [](double t, double) { return t <= 1.0 ? 1.0 : 0.0; };
    TPrimeOptions opt;
    opt.cap = 50;
    EXPECT_NEAR(find_t_prime(0.0, 1.0, step_g, 0.5, 0.0, opt), 4.0, 2e-3);
    EXPECT_EQ(find_t_prime(0.0, 1.0, zero_g, 0.5, 0.0, opt), 0.0);
    try {
        find_t_prime(0.0, 1.0, constant(0.4), 0.5, 0.0, opt);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::CertificateIncomplete);
    }
}

TEST(ComputeM, ZeroGrowth) { EXPECT_EQ(compute_M(0.0, 1.0, zero_g, 0.3, 0.0, 1e-3, 10.0), 0.0); }

TEST(ComputeM, ConstantGrowthAgainstBruteForce) {
    const double p = 0.3;
    for (double g0 : {0.05, 0.12, 0.2, 0.29}) {
        const double M = compute_M(0.0, 1.0, constant(g0), p, g0, 1e-2, 7.0);
        EXPECT_NEAR(M, brute_force_M(0.0, 7.0, p, g0, g0, 1e-2), 1e-10) << g0;
        if (3 * g0 > p) {
            EXPECT_NEAR(M, 0.5 * (3 * g0 - p) * 7.0, 1e-10);
        } else {
            EXPECT_EQ(M, 0.0);
        }
    }
}

TEST(ComputeM, SpikeTrainPositiveAndStableUnderRefinement) {
    const double b0 = 1.0 / 18, p = 1.0 / 9;
    const RateFn g = [b0](double t, double) { return example1_b_squared(t, b0); };
    const double q = estimate_q(g, 0.0, 1.0, 500.0).q;
    // Starting at t0 = 0 the running average never reaches (p + q)/2; starting just before a spike it does.
    EXPECT_EQ(find_t_prime(0.0, 1.0, g, p, q), 0.0);
    const double t0 = 1.9;
    const double tp = find_t_prime(t0, 1.0, g, p, q);
    EXPECT_GT(tp, t0);
    const double M1 = compute_M(t0, 1.0, g, p, q, 1e-3, tp);
    const double M2 = compute_M(t0, 1.0, g, p, q, 5e-4, tp);
    EXPECT_GT(M1, 0.0);
    EXPECT_NEAR(M1, M2, 0.01 * M2);
}

TEST(Attraction, ZeroGrowthRadius) {
    const auto q = [](double) { return 0.0; };
    const AttractionResult r = attraction_radius(0.0, 1.5, 1.0 / 9, q, zero_g, RBar{1.0, true});
    EXPECT_NEAR(r.radius, std::sqrt(2.0 / 3.0), 1e-12);
    EXPECT_EQ(r.M_best, 0.0);
}

TEST(Attraction, InteriorMaximumFromLevelDependentGrowth) {
    // g(t, y) = y with q(r) = r: objective (r/c2) exp(-M) with M = max(0, (3r - p)/2 T'), T' driven by threshold.
    const double p = 0.5;
    const auto q = [](double eta) { return eta; };
    const RateFn g = [](double, double y) { return y; };
    const RBar rb = find_r_bar(q, p, 10.0);
    const AttractionResult r = attraction_radius(0.0, 1.0, p, q, g, rb);
    EXPECT_GT(r.radius, 0.0);
    EXPECT_LT(r.r_best, rb.value);
    EXPECT_NEAR(r.objective, r.radius * r.radius, 1e-15);
}

TEST(Attraction, AbsorptionProperty) {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> up(0.1, 1.0), ufrac(0.05, 0.6), ur(0.01, 2.0), ut0(0.0, 5.0);
    for (int trial = 0; trial < 30; ++trial) {
        const double p = up(rng), amp = ufrac(rng) * p, r = ur(rng), t0 = ut0(rng);
        const RateFn g = [amp](double t, double) { return amp * (1.0 + std::sin(3.0 * t)); };
        const double q = amp;
        TPrimeOptions opt;
        opt.cap = 200;
        const double tp = find_t_prime(t0, r, g, p, q, opt);
        const double M = compute_M(t0, r, g, p, q, 1e-3, tp);
        const double y0 = 0.999 * r * std::exp(-M);
        const TimeSeries y = solve_comparison_ode(p, g, y0, t0, t0 + 150.0, 1e-2);
        const double ymax = *std::max_element(y.y.begin(), y.y.end());
        EXPECT_LT(ymax, r) << "trial " << trial;
        for (std::size_t i = 0; i < y.t.size(); i += 100) {
            EXPECT_LE(y.y[i], y0 * std::exp(M - 0.5 * (p - q) * (y.t[i] - t0)) * (1 + 1e-6));
        }
    }
}

TEST(Envelope, ExponentialArithmetic) {
    EnvelopeParams e;
    e.rate = 0.5 * (1.0 / 9);
    e.prefactor = 24.0;
    e.t0 = 3.0;
    EXPECT_DOUBLE_EQ(exponential_envelope(0.1, e, 3.0), 2.4);
    const double halving = 2 * std::log(2.0) / (1.0 / 9);
    EXPECT_NEAR(halving, 12.48, 5e-3);
    EXPECT_NEAR(exponential_envelope(0.1, e, 3.0 + halving), 1.2, 1e-12);
    EXPECT_THROW(exponential_envelope(0.1, e, 2.0), Error);
    e.kind = EnvelopeKind::Algebraic;
    EXPECT_THROW(exponential_envelope(0.1, e, 3.0), Error);
}

TEST(Envelope, AlgebraicMatchesOdeOracle) {
    const double k3 = 0.25, D = 0.7, W0 = 0.3;
    for (double tau : {0.1, 0.5, 0.9}) {
        EnvelopeParams e;
        e.kind = EnvelopeKind::Algebraic;
        e.tau = tau;
        e.k1 = 1.0;
        e.E = k3 / std::pow(2 * D, 2 / (tau + 1)) * (1 - tau) / (1 + tau);
        EXPECT_DOUBLE_EQ(algebraic_envelope_thm2(W0, e, 0.0), W0);
        for (double T : {1.0, 10.0, 100.0}) {
            const double ref = odeint_solution(W0, k3, D, tau, T);
            EXPECT_NEAR(algebraic_envelope_thm2(W0, e, T) / ref, 1.0, 1e-8) << tau << " " << T;
        }
    }
}

TEST(Envelope, AlgebraicDomainAndDecayExponent) {
    EnvelopeParams e;
    e.kind = EnvelopeKind::Algebraic;
    e.tau = 0.5;
    e.E = 0.05;
    e.k1 = 0.125;
    EXPECT_NEAR(algebraic_envelope_thm2(0.2, e, 0.0), 0.2 / 0.125, 1e-13);
    // Far-field log-log slope tends to -(1 + tau)/(1 - tau) = -3.
    const double t1 = 1e6, t2 = 1e7;
    const double slope = std::log(algebraic_envelope_thm2(0.2, e, t2) / algebraic_envelope_thm2(0.2, e, t1)) /
                         std::log(t2 / t1);
    EXPECT_NEAR(slope, -3.0, 1e-3);
    e.tau = 1.0;
    EXPECT_THROW(algebraic_envelope_thm2(0.2, e, 1.0), Error);
    e.tau = 0.5;
    EXPECT_THROW(algebraic_envelope_thm2(0.0, e, 1.0), Error);
    EXPECT_THROW(algebraic_envelope_thm2(0.2, e, -1.0), Error);
}

TEST(Regime, BoundaryAndRate) {
    const double c2 = 1.75, D = 0.7, tau = 0.5;
    const double Wc = std::pow(2 * D, 4) / std::pow(2 * c2, 3);  // equality point for tau = 1/2
    EXPECT_TRUE(in_algebraic_regime(0.5 * Wc, c2, D, tau));
    EXPECT_FALSE(in_algebraic_regime(2.0 * Wc, c2, D, tau));
    EXPECT_NEAR(thm2_decay_rate(2.0 * Wc, 0.25, c2, D, tau), -0.25 * 2.0 * Wc / (2 * c2), 1e-15);
    EXPECT_NEAR(thm2_decay_rate(0.5 * Wc, 0.25, c2, D, tau), -0.25 * std::pow(0.5 * Wc / (2 * D), 4.0 / 3), 1e-15);
    EXPECT_EQ(thm2_decay_rate(-1.0, 0.25, c2, D, tau), 0.0);
}
