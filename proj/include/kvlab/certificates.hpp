#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kvlab/comparison.hpp"
#include "kvlab/forcing.hpp"
#include "kvlab/functionals.hpp"
#include "kvlab/grid.hpp"
#include "kvlab/params.hpp"
#include "kvlab/simulator.hpp"

namespace kvlab {

/// Constants of the exponential-stability certificate.
struct Constants1 {
    double gamma = 1.0;
    double c1_sq = 0.0;  ///< lower sandwich constant: V >= c1_sq d^2
    double c2_sq = 0.0;  ///< upper sandwich constant: V <= c2_sq d^2
    double c3_sq = 0.0;  ///< dissipation constant in the V-dot bound
    double A = 0.0;      ///< forcing-energy weight
    double p = 0.0;      ///< c3_sq / c2_sq
};

/// Constants of the asymptotic-stability-in-the-large certificate for F(u) - a u_t forcing.
struct Constants2 {
    double gamma = 1.5;
    double k1 = 0.0;  ///< W >= k1 d^2
    double k3 = 0.0;  ///< W-dot <= -k3 d^2
    double D = 0.0;
    double tau = 0.0;
    double E = 0.0;
    double c2_sq = 0.0;  ///< at the same gamma, for W <= c2_sq d^2 + D d^{tau+1}
    bool exponential_only = false;  ///< tau == 1: E vanishes
};

inline double upper_sandwich_constant(const PdeParams& p, double gamma) {
    return std::max({p.c2 * (1.0 + gamma) / 2.0, p.epsilon * (1.0 + p.epsilon) / 2.0,
                     (1.0 + p.epsilon + gamma) / 2.0});
}

inline Constants1 constants_thm1(const PdeParams& params, double gamma = 1.0) {
    params.validate();
    detail::require_gamma(gamma);
    const double eps = params.epsilon, c2 = params.c2;
    Constants1 k;
    k.gamma = gamma;
    k.c2_sq = upper_sandwich_constant(params, gamma);
    k.c1_sq = std::min({eps * eps / 16.0, c2 * (1.0 + gamma) / 2.0, (gamma - 0.5) / 2.0});
    k.A = eps / (2.0 * c2) + 2.0 / eps;
    k.c3_sq = std::min(eps * c2 / 6.0, eps / 2.0);
    k.p = k.c3_sq / k.c2_sq;
    return k;
}

/// Largest |a (a eps / c^2 - 1)| over a in [a_inf, a_sup]; the quadratic's vertex sits at c^2 / (2 eps).
inline double damping_excursion(const PdeParams& params, double a_inf, double a_sup) {
    const auto h = [&](double a) { return std::abs(a * (a * params.epsilon / params.c2 - 1.0)); };
    double s = std::max(h(a_inf), h(a_sup));
    const double vertex = params.c2 / (2.0 * params.epsilon);
    if (vertex > a_inf && vertex < a_sup) s = std::max(s, h(vertex));
    return s;
}

/// gamma chosen so that eps*gamma + a(1 + gamma - eps a / c^2) >= 1 on the damping range.
inline double gamma_thm2(const PdeParams& params, double a_inf, double a_sup) {
    params.validate();
    if (!(a_inf > -params.epsilon)) {
        throw Error(ErrorCode::HypothesisViolated,
                    "damping lower bound violated: need inf a > -epsilon, got a_inf=" + std::to_string(a_inf));
    }
    if (a_inf > a_sup) throw Error(ErrorCode::Parameter, "a_inf must not exceed a_sup");
    return (1.0 + damping_excursion(params, a_inf, a_sup)) / (params.epsilon + a_inf) + 0.5;
}

/// Minimum over a in [a_inf, a_sup] of eps*gamma + a(1 + gamma - eps a/c^2); concave in a.
inline double velocity_coefficient_min(const PdeParams& params, double gamma, double a_inf, double a_sup) {
    const auto coeff = [&](double a) {
        return params.epsilon * gamma + a * (1.0 + gamma - params.epsilon * a / params.c2);
    };
    return std::min(coeff(a_inf), coeff(a_sup));
}

inline Constants2 constants_thm2(const PdeParams& params, double gamma, double D, double tau) {
    params.validate();
    detail::require_gamma(gamma);
    if (!(D > 0.0) || !std::isfinite(D)) throw Error(ErrorCode::Parameter, "D must be positive");
    if (!(tau >= 0.0 && tau <= 1.0)) throw Error(ErrorCode::Parameter, "tau must lie in [0, 1]");
    const double eps = params.epsilon, c2 = params.c2;
    Constants2 k;
    k.gamma = gamma;
    k.D = D;
    k.tau = tau;
    k.k1 = 0.5 * std::min({gamma - 0.5, eps * eps / 4.0, c2 * (1.0 + gamma) / 2.0});
    k.k3 = std::min(c2 * eps / 4.0, 1.0);
    k.c2_sq = upper_sandwich_constant(params, gamma);
    k.E = k.k3 / std::pow(2.0 * D, 2.0 / (tau + 1.0)) * (1.0 - tau) / (1.0 + tau);
    k.exponential_only = tau == 1.0;
    return k;
}

struct Tolerance {
    double abs = 1e-8;
    double rel = 1e-6;

    double allowance(double scale) const { return abs + rel * std::abs(scale); }
};

/// Named pass/fail outcome with the numeric margin behind it (positive margin = slack).
struct Verdict {
    std::string name;
    bool pass = true;
    double margin = std::numeric_limits<double>::infinity();
    std::string detail;
    std::vector<std::string> warnings;
};

struct Hyp1Certificate {
    double D = 0.0;
    double tau = 0.0;
    bool empirical = false;       ///< fitted over samples, not proven
    double chain_margin = std::numeric_limits<double>::infinity();  ///< slack of the Holder/Poincare chain
    Verdict verdict;
};

/// (D, tau) with 0 <= -int(potential) <= D/(gamma+1) d^{tau+1}.
/// example2 uses the closed-form chain int|u|^{tau+1} <= (int u^2)^{(tau+1)/2} <= 3^{-(tau+1)/2} d^{tau+1};
/// custom forcings get the smallest D consistent with the sample set.
inline Hyp1Certificate certify_hyp1_D_tau(const ForcingSpec& spec, const std::vector<State>& samples, double gamma,
                                          const Tolerance& tol = {}) {
    if (!spec.has_potential()) {
        throw Error(ErrorCode::UnsupportedFunctional, "potential bound needs a forcing with a potential");
    }
    Hyp1Certificate out;
    out.verdict.name = "potential_bound";
    out.tau = spec.tau;

    double worst_sign = std::numeric_limits<double>::infinity();
    for (const State& s : samples) {
        const double neg_pot = -detail::potential_integral(s, spec);
        worst_sign = std::min(worst_sign, neg_pot);
        if (neg_pot < -tol.allowance(neg_pot)) {
            std::ostringstream os;
            os << "negative potential term: -int(int_0^u F) = " << neg_pot << " < 0";
            throw Error(ErrorCode::HypothesisViolated, os.str());
        }
    }

    switch (spec.kind) {
        case ForcingKind::Zero:
            out.D = 0.0;
            out.verdict.detail = "zero potential; any tau, D -> 0";
            break;
        case ForcingKind::Example2: {
            const double tp1 = spec.tau + 1.0;
            out.D = (1.0 + gamma) * spec.k / (tp1 * std::pow(3.0, tp1 / 2.0));
            for (const State& s : samples) {
                const double lhs = integrate_pointwise(s.u, [&](double u) { return std::pow(std::abs(u), tp1); });
                const double l2 = integrate_pointwise(s.u, [](double u) { return u * u; });
                const double d = std::sqrt(distance_sq(s));
                const double mid = std::pow(l2, tp1 / 2.0);
                const double rhs = std::pow(3.0, -tp1 / 2.0) * std::pow(d, tp1);
                out.chain_margin = std::min({out.chain_margin, mid - lhs, rhs - mid});
            }
            out.verdict.detail = "closed-form D from the Holder and Poincare chain";
            if (out.chain_margin < -tol.allowance(1.0)) {
                out.verdict.pass = false;
                out.verdict.detail += "; chain violated on a sample";
            }
            break;
        }
        case ForcingKind::Custom: {
            out.empirical = true;
            double D = 0.0;
            for (const State& s : samples) {
                const double d2 = distance_sq(s);
                if (d2 <= 0.0) continue;
                const double neg_pot = -detail::potential_integral(s, spec);
                D = std::max(D, (1.0 + gamma) * neg_pot / std::pow(d2, (spec.tau + 1.0) / 2.0));
            }
            out.D = D;
            out.verdict.detail = "empirical fit over the sample set (supporting evidence, not a proof)";
            break;
        }
        case ForcingKind::Example1: break;
    }
    out.verdict.margin = samples.empty() ? 0.0 : worst_sign;
    out.verdict.pass = out.verdict.pass && (samples.empty() || worst_sign >= -tol.allowance(worst_sign));
    return out;
}

/// int F(u) u_xx >= 0 on every sample.
inline Verdict check_hyp3(const ForcingSpec& spec, const std::vector<State>& samples, const Tolerance& tol = {}) {
    Verdict v;
    v.name = "curvature_sign";
    double worst = std::numeric_limits<double>::infinity();
    for (const State& s : samples) {
        const GridFunction uxx = derivative(s.u, 2);
        const std::size_t n = s.u.size();
        double sum = 0.5 * (forcing_F(spec, s.u[0]) * uxx[0] + forcing_F(spec, s.u[n - 1]) * uxx[n - 1]);
        for (std::size_t i = 1; i + 1 < n; ++i) sum += forcing_F(spec, s.u[i]) * uxx[i];
        worst = std::min(worst, sum * s.grid().h());
    }
    v.margin = samples.empty() ? 0.0 : worst;
    v.pass = samples.empty() || worst >= -tol.allowance(worst);
    if (spec.kind == ForcingKind::Example2) {
        v.detail = "integration by parts gives tau*k*int u_x^2 |u|^(tau-1) >= 0 for this forcing";
    }
    return v;
}

struct SandwichVerdict {
    Verdict lower;          ///< V >= c1_sq d^2
    Verdict upper;          ///< V <= c2_sq d^2
    Verdict poincare_first;   ///< int u_x^2 >= int u^2
    Verdict poincare_second;  ///< int u_xx^2 >= int u_x^2

    bool pass() const { return lower.pass && upper.pass && poincare_first.pass && poincare_second.pass; }
};

/// Worst scaled margins (rhs - lhs)/(1 + d^2) over the batch; a state fails when rhs - lhs < -tol.allowance(1 + d^2).
inline SandwichVerdict check_sandwich_and_poincare(const std::vector<State>& states, double gamma,
                                                   const PdeParams& params, const Tolerance& tol = {}) {
    const Constants1 k = constants_thm1(params, gamma);
    SandwichVerdict out;
    out.lower.name = "sandwich_lower";
    out.upper.name = "sandwich_upper";
    out.poincare_first.name = "poincare_first";
    out.poincare_second.name = "poincare_second";

    const auto account = [&](Verdict& v, double slack, double scale) {
        v.margin = std::min(v.margin, slack / scale);
        if (slack < -tol.allowance(scale)) v.pass = false;
    };
    for (const State& s : states) {
        const detail::StateDerivatives d(s);
        const double h = s.grid().h();
        const std::size_t n = s.u.size();
        const double d2 = detail::distance_sq(s, d);
        const double V = detail::lyapunov_V(s, d, gamma, params);
        const double u2 = integrate_pointwise(s.u, [](double x) { return x * x; });
        const double ux2 = detail::integrate_nodes(n, h, [&](std::size_t i) { return d.ux[i] * d.ux[i]; });
        const double uxx2 = detail::integrate_nodes(n, h, [&](std::size_t i) { return d.uxx[i] * d.uxx[i]; });
        const double scale = 1.0 + d2;
        account(out.lower, V - k.c1_sq * d2, scale);
        account(out.upper, k.c2_sq * d2 - V, scale);
        account(out.poincare_first, ux2 - u2, scale);
        account(out.poincare_second, uxx2 - ux2, scale);
    }
    if (!out.pass() && !states.empty() && states.front().grid().n_interior() < 50) {
        for (Verdict* v : {&out.lower, &out.upper, &out.poincare_first, &out.poincare_second}) {
            if (!v->pass) v->warnings.push_back("grid-resolution: n_interior < 50, refine before concluding");
        }
    }
    return out;
}

/// A int f^2 <= g_hat(t, d^2) c1_sq d^2 at every observation of the trajectory.
inline Verdict check_hyp1_along_trajectory(const Trajectory& traj, const RateFn& g_hat, const Constants1& k,
                                           const Tolerance& tol = {}) {
    Verdict v;
    v.name = "forcing_energy_bound";
    for (const Observation& o : traj.observations) {
        if (!o.forcing_sq) {
            throw Error(ErrorCode::Parameter, "trajectory was recorded without forcing-energy observations");
        }
        const double d2 = o.values.d2;
        const double lhs = k.A * *o.forcing_sq;
        const double rhs = g_hat(o.t, d2) * k.c1_sq * d2;
        const double slack = rhs - lhs;
        v.margin = std::min(v.margin, slack);
        if (slack < -tol.allowance(rhs)) {
            if (v.pass) {
                std::ostringstream os;
                os << "first violation at t=" << o.t << ": A*int f^2=" << lhs << " > " << rhs;
                v.detail = os.str();
            }
            v.pass = false;
        }
    }
    return v;
}

/// Sampled Lipschitz ratio of f over a box; finite means the sampled pairs are consistent with a global bound.
inline Verdict estimate_lipschitz(const ForcingSpec& spec, const SampleBox& box) {
    Verdict v;
    v.name = "lipschitz_estimate";
    std::mt19937 rng(box.seed + 1);
    std::uniform_real_distribution<double> ux(0.0, 1.0), ut(0.0, box.t_max),
        uf(-box.field_max, box.field_max), du(-1e-3, 1e-3);
    double mu = 0.0;
    for (int i = 0; i < box.samples; ++i) {
        const double x = ux(rng), t = ut(rng);
        const double a[4] = {uf(rng), uf(rng), uf(rng), uf(rng)};
        const double b[4] = {a[0] + du(rng), a[1] + du(rng), a[2] + du(rng), a[3] + du(rng)};
        const double diff = std::abs(eval_forcing(spec, x, t, a[0], a[1], a[2], a[3]) -
                                     eval_forcing(spec, x, t, b[0], b[1], b[2], b[3]));
        const double dist = std::abs(a[0] - b[0]) + std::abs(a[1] - b[1]) + std::abs(a[2] - b[2]) + std::abs(a[3] - b[3]);
        if (dist > 0.0) mu = std::max(mu, diff / dist);
    }
    v.margin = mu;
    v.pass = std::isfinite(mu);
    v.detail = "sampled Lipschitz ratio over t in [0, " + std::to_string(box.t_max) + "]";
    return v;
}

}  // namespace kvlab
