#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "kvlab/error.hpp"

namespace kvlab {

using RateFn = std::function<double(double t, double y)>;
using LevelFn = std::function<double(double eta)>;

struct TimeSeries {
    std::vector<double> t;
    std::vector<double> y;

    /// Linear interpolation; t must lie inside the series.
    double at(double time) const {
        if (t.empty()) throw Error(ErrorCode::Domain, "empty time series");
        if (time <= t.front()) return y.front();
        if (time >= t.back()) return y.back();
        const auto it = std::upper_bound(t.begin(), t.end(), time);
        const std::size_t j = static_cast<std::size_t>(it - t.begin());
        const double w = (time - t[j - 1]) / (t[j] - t[j - 1]);
        return (1.0 - w) * y[j - 1] + w * y[j];
    }
};

/// Classical RK4 for y' = rhs(t, y) on a fixed step; the result is clamped at zero.
inline TimeSeries solve_scalar_ode(const RateFn& rhs, double y0, double t0, double t_end, double dt) {
    if (!(dt > 0.0) || !(t_end >= t0)) throw Error(ErrorCode::Parameter, "need dt > 0 and t_end >= t0");
    const auto n = static_cast<std::size_t>(std::llround((t_end - t0) / dt));
    TimeSeries out;
    out.t.reserve(n + 1);
    out.y.reserve(n + 1);
    double y = y0;
    out.t.push_back(t0);
    out.y.push_back(y);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = t0 + static_cast<double>(i) * dt;
        const double k1 = rhs(t, y);
        const double k2 = rhs(t + 0.5 * dt, y + 0.5 * dt * k1);
        const double k3 = rhs(t + 0.5 * dt, y + 0.5 * dt * k2);
        const double k4 = rhs(t + dt, y + dt * k3);
        y += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!std::isfinite(y)) {
            std::ostringstream os;
            os << "comparison ODE became non-finite at t=" << t + dt;
            throw Error(ErrorCode::Integrator, os.str());
        }
        y = std::max(y, 0.0);
        out.t.push_back(t0 + static_cast<double>(i + 1) * dt);
        out.y.push_back(y);
    }
    return out;
}

/// y' = [-p + g(t,y)] y, y(t0) = y0.
inline TimeSeries solve_comparison_ode(double p, const RateFn& g, double y0, double t0, double t_end, double dt) {
    if (!(y0 >= 0.0)) throw Error(ErrorCode::Parameter, "comparison ODE needs y0 >= 0");
    return solve_scalar_ode(
        [&](double t, double y) {
            const double gv = g(t, std::max(y, 0.0));
            if (!std::isfinite(gv)) {
                std::ostringstream os;
                os << "growth bound is non-finite at t=" << t;
                throw Error(ErrorCode::Integrator, os.str());
            }
            return (-p + gv) * y;
        },
        y0, t0, t_end, dt);
}

struct QEstimate {
    double q = 0.0;       ///< running average at the horizon
    double q_half = 0.0;  ///< running average at half the horizon
    double indicator = 0.0;  ///< relative difference between the two
    bool diverging = false;
};

/// Time average of g_hat(tau, eta/c1_sq) over [0, horizon] and over [0, horizon/2].
inline QEstimate estimate_q(const RateFn& g_hat, double eta, double c1_sq, double horizon, double quad_dt = 1e-3,
                            double divergence_factor = 0.05) {
    if (!(horizon > 0.0)) throw Error(ErrorCode::Parameter, "q horizon must be positive");
    const double level = eta / c1_sq;
    const auto n = static_cast<std::size_t>(std::ceil(horizon / quad_dt));
    const std::size_t half = n / 2;
    const double h = horizon / static_cast<double>(n);
    // Accumulated relative to the first sample so a constant g_hat averages to itself exactly.
    const double base = g_hat(0.0, level);
    double sum = 0.0, sum_half = 0.0;
    double prev = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        const double cur = g_hat(static_cast<double>(i) * h, level) - base;
        sum += 0.5 * (prev + cur);
        prev = cur;
        if (i == half) sum_half = sum;
    }
    QEstimate out;
    out.q = base + sum / static_cast<double>(n);
    out.q_half = base + sum_half / static_cast<double>(half);
    const double scale = std::max(std::abs(out.q), std::abs(out.q_half));
    out.indicator = scale > 0.0 ? std::abs(out.q - out.q_half) / scale : 0.0;
    out.diverging = out.indicator > divergence_factor;
    return out;
}

struct RBar {
    double value = 0.0;
    bool at_boundary = false;  ///< q stayed below p on the whole search interval
};

/// Bisection for sup{rho >= 0 : q(rho) < p} on [0, search_max]; q must be nondecreasing.
inline RBar find_r_bar(const LevelFn& q, double p, double search_max, double rel_tol = 1e-10) {
    const double q0 = q(0.0);
    if (!(q0 < p)) {
        std::ostringstream os;
        os << "averaged growth q(0)=" << q0 << " is not below the drain rate p=" << p;
        throw Error(ErrorCode::NoStabilityCertificate, os.str());
    }
    if (q(search_max) < p) return {search_max, true};
    double lo = 0.0, hi = search_max;
    while (hi - lo > rel_tol * search_max) {
        const double mid = 0.5 * (lo + hi);
        if (q(mid) < p) lo = mid; else hi = mid;
    }
    return {lo, false};
}

struct TPrimeOptions {
    double scan_dt = 1e-3;
    double cap = 1000.0;            ///< longest scanned span after t0
    double confirm_window = 10.0;   ///< the average must stay below threshold this long before the cap
};

/// Last scanned time at which the running average of g(., r) over [t0, t] is not below (p + q_r)/2.
inline double find_t_prime(double t0, double r, const RateFn& g, double p, double q_r,
                           const TPrimeOptions& opt = {}) {
    if (!(q_r < p)) throw Error(ErrorCode::Parameter, "need q(r) < p");
    const double threshold = 0.5 * (p + q_r);
    const auto n = static_cast<std::size_t>(std::ceil(opt.cap / opt.scan_dt));
    double integral = 0.0, prev = g(t0, r), last_bad = t0;
    for (std::size_t i = 1; i <= n; ++i) {
        const double t = t0 + static_cast<double>(i) * opt.scan_dt;
        const double cur = g(t, r);
        integral += 0.5 * (prev + cur) * opt.scan_dt;
        prev = cur;
        if (integral / (t - t0) >= threshold) last_bad = t;
    }
    if (last_bad > t0 + opt.cap - opt.confirm_window) {
        std::ostringstream os;
        os << "running average of g(., r=" << r << ") still reaches (p+q)/2 at t=" << last_bad
           << "; no settling time found within the scan cap";
        throw Error(ErrorCode::CertificateIncomplete, os.str());
    }
    return last_bad;
}

/// Overshoot budget: max{0, max over [t0, t_prime] of -(p - q_r)/2 (t - t0) + int_{t0}^t g(s, r) ds}.
inline double compute_M(double t0, double r, const RateFn& g, double p, double q_r, double scan_dt,
                        double t_prime) {
    if (!(q_r < p)) throw Error(ErrorCode::Parameter, "need q(r) < p");
    if (!(scan_dt > 0.0)) throw Error(ErrorCode::Parameter, "scan_dt must be positive");
    const double drain = 0.5 * (p - q_r);
    const auto n = static_cast<std::size_t>(std::ceil((t_prime - t0) / scan_dt - 1e-9));
    double best = 0.0, integral = 0.0, prev = g(t0, r);
    for (std::size_t i = 1; i <= n; ++i) {
        const double t = std::min(t0 + static_cast<double>(i) * scan_dt, t_prime);
        const double dt = t - (t0 + static_cast<double>(i - 1) * scan_dt);
        const double cur = g(t, r);
        integral += 0.5 * (prev + cur) * dt;
        prev = cur;
        best = std::max(best, -drain * (t - t0) + integral);
    }
    return best;
}

struct AttractionOptions {
    int grid_points = 40;
    double min_fraction = 1e-6;  ///< smallest r scanned, as a fraction of r_bar
    int golden_iterations = 40;
    TPrimeOptions t_prime{};
};

struct AttractionResult {
    double radius = 0.0;   ///< in d-units
    double r_best = 0.0;
    double M_best = 0.0;
    double t_prime_best = 0.0;
    double objective = 0.0;  ///< sup of (r / c2_sq) exp(-M)
};

/// sup over r in ]0, r_bar[ of (r / c2_sq) exp(-M(t0, r)); the radius is its square root.
/// Any r whose settling time cannot be certified contributes zero.
inline AttractionResult attraction_radius(double t0, double c2_sq, double p, const LevelFn& q, const RateFn& g,
                                          const RBar& r_bar, const AttractionOptions& opt = {}) {
    if (!(r_bar.value > 0.0)) throw Error(ErrorCode::Parameter, "r_bar must be positive");
    struct Eval {
        double objective = 0.0, M = 0.0, t_prime = 0.0;
    };
    const auto evaluate = [&](double r) -> Eval {
        const double q_r = q(r);
        if (!(q_r < p)) return {};
        try {
            const double tp = find_t_prime(t0, r, g, p, q_r, opt.t_prime);
            const double M = compute_M(t0, r, g, p, q_r, opt.t_prime.scan_dt, tp);
            return {r / c2_sq * std::exp(-M), M, tp};
        } catch (const Error& e) {
            if (e.code() == ErrorCode::CertificateIncomplete) return {};
            throw;
        }
    };

    // Open interval at r_bar unless r_bar is only the search cap.
    const double r_hi = r_bar.at_boundary ? r_bar.value : r_bar.value * (1.0 - 1e-9);
    const double log_lo = std::log(r_hi * opt.min_fraction), log_hi = std::log(r_hi);
    std::vector<double> logs(static_cast<std::size_t>(opt.grid_points));
    std::size_t best_i = 0;
    Eval best{};
    for (std::size_t i = 0; i < logs.size(); ++i) {
        logs[i] = log_lo + (log_hi - log_lo) * static_cast<double>(i) / static_cast<double>(logs.size() - 1);
        const Eval e = evaluate(std::exp(logs[i]));
        if (e.objective > best.objective) {  // strict: ties keep the smaller r
            best = e;
            best_i = i;
        }
    }
    double r_best = std::exp(logs[best_i]);

    if (best.objective > 0.0) {
        double a = logs[best_i == 0 ? 0 : best_i - 1];
        double b = logs[std::min(best_i + 1, logs.size() - 1)];
        const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
        double c = b - invphi * (b - a), d = a + invphi * (b - a);
        Eval ec = evaluate(std::exp(c)), ed = evaluate(std::exp(d));
        for (int it = 0; it < opt.golden_iterations; ++it) {
            if (ec.objective >= ed.objective) {
                b = d; d = c; ed = ec;
                c = b - invphi * (b - a);
                ec = evaluate(std::exp(c));
            } else {
                a = c; c = d; ec = ed;
                d = a + invphi * (b - a);
                ed = evaluate(std::exp(d));
            }
        }
        const Eval& cand = ec.objective >= ed.objective ? ec : ed;
        const double cand_r = std::exp(ec.objective >= ed.objective ? c : d);
        if (cand.objective > best.objective) {
            best = cand;
            r_best = cand_r;
        }
    }

    AttractionResult out;
    out.objective = best.objective;
    out.radius = std::sqrt(best.objective);
    out.r_best = r_best;
    out.M_best = best.M;
    out.t_prime_best = best.t_prime;
    return out;
}

enum class EnvelopeKind { Exponential, Algebraic };

/// Exponential: value * prefactor * exp(-rate (t - t0)).
/// Algebraic:   (1/k1) [value^{-(1-tau)/(1+tau)} + E (t - t0)]^{-(1+tau)/(1-tau)}.
struct EnvelopeParams {
    EnvelopeKind kind = EnvelopeKind::Exponential;
    double rate = 0.0;
    double prefactor = 1.0;
    double r = 0.0;
    double E = 0.0;
    double tau = 0.0;
    double k1 = 1.0;
    double t0 = 0.0;
};

inline double exponential_envelope(double d2_t0, const EnvelopeParams& env, double t) {
    if (env.kind != EnvelopeKind::Exponential) throw Error(ErrorCode::Domain, "envelope is not exponential");
    if (t < env.t0) throw Error(ErrorCode::Domain, "envelope evaluated before its start time");
    return d2_t0 * env.prefactor * std::exp(-env.rate * (t - env.t0));
}

/// Bound on d^2 from the exact solution of y' = -k3 (y / 2D)^{2/(tau+1)}, y(t0) = W_t0, divided by k1.
inline double algebraic_envelope_thm2(double W_t0, const EnvelopeParams& env, double t) {
    if (env.kind != EnvelopeKind::Algebraic) throw Error(ErrorCode::Domain, "envelope is not algebraic");
    if (env.tau >= 1.0) {
        throw Error(ErrorCode::Domain,
                    "tau = 1 has E = 0; the decay bound is exponential, use exponential_envelope");
    }
    if (!(env.tau >= 0.0)) throw Error(ErrorCode::Domain, "tau must lie in [0, 1)");
    if (!(W_t0 > 0.0)) throw Error(ErrorCode::Domain, "algebraic envelope needs W(t0) > 0");
    if (t < env.t0) throw Error(ErrorCode::Domain, "envelope evaluated before its start time");
    const double a = (1.0 - env.tau) / (1.0 + env.tau);
    // W0 [1 + E W0^a (t - t0)]^(-1/a), algebraically equal to [W0^-a + E (t - t0)]^(-1/a) and exact at t0.
    return W_t0 * std::pow(1.0 + env.E * std::pow(W_t0, a) * (t - env.t0), -1.0 / a) / env.k1;
}

/// True when W/(2 c2_sq) >= (W/(2D))^{2/(tau+1)}, i.e. the power-law branch of the decay bound is active.
inline bool in_algebraic_regime(double W, double c2_sq, double D, double tau) {
    return W / (2.0 * c2_sq) >= std::pow(W / (2.0 * D), 2.0 / (tau + 1.0));
}

/// Right-hand side -k3 min{y/(2 c2_sq), (y/(2D))^{2/(tau+1)}} of the W comparison problem.
inline double thm2_decay_rate(double y, double k3, double c2_sq, double D, double tau) {
    y = std::max(y, 0.0);
    return -k3 * std::min(y / (2.0 * c2_sq), std::pow(y / (2.0 * D), 2.0 / (tau + 1.0)));
}

}  // namespace kvlab
