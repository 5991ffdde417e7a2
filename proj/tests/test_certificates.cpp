#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "kvlab/analysis.hpp"
#include "kvlab/certificates.hpp"

using namespace kvlab;

namespace {

RunSpec base_spec(ForcingKind kind) {
    RunSpec s;
    s.forcing.kind = kind;
    s.initial.u_modes = {1e-3};
    s.time.t_end = 20.0;
    s.time.dt = 1e-2;
    s.analysis.samples = 20;
    return s;
}

}  // namespace

TEST(Constants1, UnitParameters) {
    const Constants1 k = constants_thm1(PdeParams{1, 1});
    EXPECT_DOUBLE_EQ(k.c1_sq, 1.0 / 16);
    EXPECT_DOUBLE_EQ(k.c2_sq, 1.5);
    EXPECT_DOUBLE_EQ(k.c3_sq, 1.0 / 6);
    EXPECT_DOUBLE_EQ(k.A, 2.5);
    EXPECT_DOUBLE_EQ(k.p, 1.0 / 9);
}

TEST(Constants1, FormulaBranches) {
    // eps = 2, c^2 = 0.25, gamma = 3: each min/max picks a different branch than at unit parameters.
    const Constants1 k = constants_thm1(PdeParams{2.0, 0.25}, 3.0);
    EXPECT_DOUBLE_EQ(k.c2_sq, std::max({0.25 * 4 / 2, 2.0 * 3 / 2, (1 + 2.0 + 3) / 2}));
    EXPECT_DOUBLE_EQ(k.c1_sq, std::min({4.0 / 16, 0.25 * 4 / 2, 2.5 / 2}));
    EXPECT_DOUBLE_EQ(k.c3_sq, std::min(2.0 * 0.25 / 6, 1.0));
    EXPECT_DOUBLE_EQ(k.A, 2.0 / 0.5 + 1.0);
    EXPECT_THROW(constants_thm1(PdeParams{1, 1}, 0.5), Error);
    EXPECT_THROW(constants_thm1(PdeParams{0, 1}), Error);
}

TEST(Constants1, SandwichOrdering) {
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> r(0.1, 5.0), g(0.51, 6.0);
    for (int i = 0; i < 200; ++i) {
        const Constants1 k = constants_thm1(PdeParams{r(rng), r(rng)}, g(rng));
        EXPECT_GT(k.c1_sq, 0.0);
        EXPECT_LE(k.c1_sq, k.c2_sq);
        EXPECT_GT(k.p, 0.0);
    }
}

TEST(Constants2, Example2Values) {
    const PdeParams p{1, 1};
    EXPECT_DOUBLE_EQ(gamma_thm2(p, 0.0, 0.0), 1.5);
    const Constants2 k = constants_thm2(p, 1.5, 1.0, 0.5);
    EXPECT_DOUBLE_EQ(k.k1, 1.0 / 8);
    EXPECT_DOUBLE_EQ(k.k3, 1.0 / 4);
    EXPECT_NEAR(k.E, 0.03307, 5e-6);
    EXPECT_FALSE(k.exponential_only);
    EXPECT_TRUE(constants_thm2(p, 1.5, 1.0, 1.0).exponential_only);
    EXPECT_THROW(constants_thm2(p, 1.5, 0.0, 0.5), Error);
}

TEST(GammaThm2, VertexAndViolation) {
    const PdeParams p{1, 1};
    // Vertex of a(a eps/c^2 - 1) sits at 1/2 with value -1/4.
    EXPECT_DOUBLE_EQ(damping_excursion(p, 0.0, 1.0), 0.25);
    EXPECT_DOUBLE_EQ(damping_excursion(p, 0.0, 3.0), 6.0);
    EXPECT_DOUBLE_EQ(gamma_thm2(p, 0.0, 1.0), 1.25 / 1.0 + 0.5);
    try {
        gamma_thm2(p, -1.0, 0.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::HypothesisViolated);
    }
}

TEST(GammaThm2, VelocityCoefficientAtLeastOneProperty) {
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> r(0.1, 4.0), lo(-0.99, 3.0), w(0.0, 4.0);
    for (int i = 0; i < 2000; ++i) {
        const PdeParams p{r(rng), r(rng)};
        const double a_inf = lo(rng) * p.epsilon, a_sup = a_inf + w(rng);
        const double gamma = gamma_thm2(p, a_inf, a_sup);
        EXPECT_GE(velocity_coefficient_min(p, gamma, a_inf, a_sup), 1.0 - 1e-12);
        // Dense check of the concave coefficient over the damping range.
        for (int j = 0; j <= 20; ++j) {
            const double a = a_inf + (a_sup - a_inf) * j / 20.0;
            EXPECT_GE(p.epsilon * gamma + a * (1 + gamma - p.epsilon * a / p.c2), 1.0 - 1e-12);
        }
    }
}

TEST(PotentialBound, Example2ClosedForm) {
    const auto states = random_sine_states(make_grid(199), 50, 3);
    for (double tau : {1.0, 0.5}) {
        const Hyp1Certificate h = certify_hyp1_D_tau(ForcingSpec::example2(1.0, tau), states, 1.5);
        EXPECT_TRUE(h.verdict.pass);
        EXPECT_FALSE(h.empirical);
        EXPECT_GE(h.chain_margin, 0.0);
        EXPECT_DOUBLE_EQ(h.D, 2.5 / ((tau + 1) * std::pow(3.0, (tau + 1) / 2)));
    }
    EXPECT_NEAR(certify_hyp1_D_tau(ForcingSpec::example2(1.0, 1.0), states, 1.5).D, 5.0 / 12, 1e-15);
    EXPECT_NEAR(certify_hyp1_D_tau(ForcingSpec::example2(1.0, 0.5), states, 1.5).D, 0.7312, 1e-4);
}

TEST(PotentialBound, ZeroCustomAndSignViolation) {
    const auto states = random_sine_states(make_grid(99), 20, 4);
    EXPECT_EQ(certify_hyp1_D_tau(ForcingSpec::zero(), states, 1.5).D, 0.0);

    ForcingSpec restoring;
    restoring.kind = ForcingKind::Custom;
    restoring.custom_F = [](double u) { return -2.0 * u; };
    restoring.custom_potential = [](double u) { return -u * u; };
    restoring.tau = 1.0;
    const Hyp1Certificate h = certify_hyp1_D_tau(restoring, states, 1.5);
    EXPECT_TRUE(h.empirical);
    EXPECT_GT(h.D, 0.0);

    ForcingSpec repelling = restoring;
    repelling.custom_F = [](double u) { return u; };
    repelling.custom_potential = [](double u) { return 0.5 * u * u; };
    try {
        certify_hyp1_D_tau(repelling, states, 1.5);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::HypothesisViolated);
    }
    EXPECT_THROW(certify_hyp1_D_tau(ForcingSpec::example1(0.1), states, 1.5), Error);
}

TEST(CurvatureSign, Example2PassesRepellingFails) {
    const auto states = random_sine_states(make_grid(199), 30, 6);
    EXPECT_TRUE(check_hyp3(ForcingSpec::example2(1.0, 0.5), states).pass);
    ForcingSpec repelling;
    repelling.kind = ForcingKind::Custom;
    repelling.custom_F = [](double u) { return u; };
    repelling.custom_potential = [](double u) { return 0.5 * u * u; };
    EXPECT_FALSE(check_hyp3(repelling, states).pass);
}

TEST(ForcingEnergyBound, AlongExample1Trajectory) {
    const PdeParams p{1, 1};
    const Constants1 k = constants_thm1(p);
    const std::vector<double> a{0.05, 0.02};
    ObserverConfig obs;
    obs.stride = 10;
    obs.forcing_energy = true;
    obs.keep_states = false;
    const auto f = ForcingSpec::example1(1.0 / 18);
    const Trajectory tr = simulate(sine_series_state(a, {}, make_grid(99)), 0, 10, 1e-2, p, f, obs);
    const RateFn g_hat = [](double t, double) { return example1_b_squared(t, 1.0 / 18); };
    EXPECT_TRUE(check_hyp1_along_trajectory(tr, g_hat, k).pass);
    const RateFn too_small = [](double t, double) { return 0.1 * example1_b_squared(t, 1.0 / 18); };
    const Verdict bad = check_hyp1_along_trajectory(tr, too_small, k);
    EXPECT_FALSE(bad.pass);
    EXPECT_NE(bad.detail.find("first violation"), std::string::npos);

    ObserverConfig no_energy = obs;
    no_energy.forcing_energy = false;
    const Trajectory plain = simulate(sine_series_state(a, {}, make_grid(99)), 0, 1, 1e-2, p, f, no_energy);
    EXPECT_THROW(check_hyp1_along_trajectory(plain, g_hat, k), Error);
}

TEST(Lipschitz, FiniteForBuiltins) {
    SampleBox box;
    box.t_max = 50;
    const Verdict v = estimate_lipschitz(ForcingSpec::example1(0.1), box);
    EXPECT_TRUE(v.pass);
    EXPECT_LE(v.margin, std::sqrt(0.1 * 50) + 1e-9);  // |b(t)| |cos| bounds the ratio
}

TEST(Tolerance, Allowance) {
    const Tolerance t{1e-8, 1e-6};
    EXPECT_DOUBLE_EQ(t.allowance(0.0), 1e-8);
    EXPECT_DOUBLE_EQ(t.allowance(-100.0), 1e-8 + 1e-4);
}

TEST(Certify, Example1Report) {
    RunSpec s = base_spec(ForcingKind::Example1);
    s.forcing.b0 = 1.0 / 18;
    const CertificateReport r = certify(s);
    EXPECT_EQ(r.theorem, 1);
    EXPECT_TRUE(r.pass());
    ASSERT_TRUE(r.attraction && r.envelope && r.constants1);
    EXPECT_NEAR(r.attraction->radius, std::sqrt(2.0 / 3.0), 1e-9);  // q constant: r_bar is the search cap
    EXPECT_TRUE(r.attraction->r_bar_at_boundary);
    EXPECT_NEAR(r.envelope->rate, 0.5 * (1.0 / 9 - r.attraction->q_r), 1e-15);
    EXPECT_GE(r.envelope->prefactor, 1.0);
    EXPECT_NE(std::find(r.notes.begin(), r.notes.end(), std::string(kNoteDissipationConstant)), r.notes.end());
}

TEST(Certify, GrowthAboveDrainFails) {
    RunSpec s = base_spec(ForcingKind::Example1);
    s.forcing.b0 = 0.2;  // q(0) = 0.2 >= p = 1/9
    const CertificateReport r = certify(s);
    EXPECT_FALSE(r.pass());
    const Verdict* v = r.find("averaged_growth_below_drain");
    ASSERT_NE(v, nullptr);
    EXPECT_FALSE(v->pass);
    EXPECT_FALSE(r.attraction.has_value());
}

TEST(Certify, ZeroForcingRadius) {
    const CertificateReport r = certify(base_spec(ForcingKind::Zero));
    ASSERT_TRUE(r.attraction);
    EXPECT_EQ(r.attraction->M, 0.0);
    EXPECT_NEAR(r.attraction->radius, std::sqrt(1.0 / 1.5), 1e-9);
}

TEST(Certify, Example2Report) {
    RunSpec s = base_spec(ForcingKind::Example2);
    s.forcing.tau = 0.5;
    const CertificateReport r = certify(s);
    EXPECT_EQ(r.theorem, 2);
    EXPECT_TRUE(r.pass());
    ASSERT_TRUE(r.constants2 && r.envelope);
    EXPECT_DOUBLE_EQ(r.constants2->gamma, 1.5);
    EXPECT_DOUBLE_EQ(r.constants2->k1, 0.125);
    EXPECT_DOUBLE_EQ(r.constants2->k3, 0.25);
    EXPECT_NEAR(r.constants2->D, 0.7312, 1e-4);
    EXPECT_EQ(r.envelope->kind, EnvelopeKind::Algebraic);
    EXPECT_NE(std::find(r.notes.begin(), r.notes.end(), std::string(kNoteAlgebraicSlot)), r.notes.end());
}

TEST(Certify, TauOneIsExponentialOnly) {
    RunSpec s = base_spec(ForcingKind::Example2);
    s.forcing.tau = 1.0;
    const CertificateReport r = certify(s);
    ASSERT_TRUE(r.constants2 && r.envelope);
    EXPECT_TRUE(r.constants2->exponential_only);
    EXPECT_EQ(r.envelope->kind, EnvelopeKind::Exponential);
    EXPECT_NEAR(r.envelope->rate, 0.25 / (2 * 1.75), 1e-15);
}

TEST(DecayCheck, Example1AndExample2Pass) {
    RunSpec a = base_spec(ForcingKind::Example1);
    a.forcing.b0 = 1.0 / 18;
    const DecayResult ra = decay_check(a);
    EXPECT_TRUE(ra.report.pass());
    EXPECT_EQ(ra.envelope.size(), ra.trajectory.observations.size());

    RunSpec b = base_spec(ForcingKind::Example2);
    b.initial.u_modes = {0.5, 0.2};
    b.time.t_end = 50;
    const DecayResult rb = decay_check(b);
    EXPECT_TRUE(rb.report.pass());
    EXPECT_TRUE(rb.crossover_time.has_value());
}
