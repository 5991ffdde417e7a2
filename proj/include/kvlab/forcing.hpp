#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>

#include "kvlab/error.hpp"
#include "kvlab/params.hpp"

namespace kvlab {

/// f(x, t, u, u_x, u_xx, u_t)
using PointFn = std::function<double(double x, double t, double u, double u_x, double u_xx, double u_t)>;
/// Scalar function of u (F or its antiderivative).
using ScalarFn = std::function<double(double u)>;
/// g_hat(t, eta), the growth bound in the forcing-energy hypothesis.
using GrowthFn = std::function<double(double t, double eta)>;

enum class ForcingKind { Zero, Example1, Example2, Custom };

constexpr std::string_view to_string(ForcingKind kind) {
    switch (kind) {
        case ForcingKind::Zero: return "zero";
        case ForcingKind::Example1: return "example1";
        case ForcingKind::Example2: return "example2";
        case ForcingKind::Custom: return "custom";
    }
    return "unknown";
}

inline ForcingKind forcing_kind_from_string(std::string_view s) {
    if (s == "zero") return ForcingKind::Zero;
    if (s == "example1") return ForcingKind::Example1;
    if (s == "example2") return ForcingKind::Example2;
    if (s == "custom") return ForcingKind::Custom;
    throw Error(ErrorCode::Config, "unknown forcing kind '" + std::string(s) + "'");
}

/// Box over which user-declared damping bounds are spot-checked.
struct SampleBox {
    double t_max = 100.0;
    double field_max = 10.0;  ///< |u|, |u_x|, |u_xx|, |u_t| range
    int samples = 2000;
    unsigned seed = 12345;
};

struct ForcingSpec {
    ForcingKind kind = ForcingKind::Zero;

    double b0 = 0.0;   // example1 amplitude
    double k = 1.0;    // example2
    double tau = 0.5;  // example2
    double a_inf = 0.0;
    double a_sup = 0.0;

    PointFn custom_f;   // custom: full right-hand side
    PointFn custom_a;   // damping coefficient a(x,t,u,u_x,u_xx,u_t); absent means a == 0
    ScalarFn custom_F;  // custom: the u-only part F(u), when f = F(u) - a*u_t
    ScalarFn custom_potential;  // custom: antiderivative of custom_F from 0
    GrowthFn custom_g_hat;      // custom: declared g_hat for the forcing-energy bound

    /// Multiplier on b^2(t) used as g_hat for example1.
    double example1_gain = 1.0;

    static ForcingSpec zero() { return {}; }

    static ForcingSpec example1(double b0) {
        ForcingSpec s;
        s.kind = ForcingKind::Example1;
        s.b0 = b0;
        return s;
    }

    static ForcingSpec example2(double k, double tau, double a_inf = 0.0, double a_sup = 0.0) {
        ForcingSpec s;
        s.kind = ForcingKind::Example2;
        s.k = k;
        s.tau = tau;
        s.a_inf = a_inf;
        s.a_sup = a_sup;
        return s;
    }

    static ForcingSpec custom(PointFn f) {
        ForcingSpec s;
        s.kind = ForcingKind::Custom;
        s.custom_f = std::move(f);
        return s;
    }

    /// True when the forcing has the form F(u) - a*u_t with a known antiderivative of F.
    bool has_potential() const {
        switch (kind) {
            case ForcingKind::Zero:
            case ForcingKind::Example2: return true;
            case ForcingKind::Custom: return static_cast<bool>(custom_F) && static_cast<bool>(custom_potential);
            case ForcingKind::Example1: return false;
        }
        return false;
    }
};

/// Spike train b^2(t): triangles centred at n = 2, 3, ... of half-width 1/n and height b0*n.
inline double example1_b_squared(double t, double b0) {
    const double n = std::round(t);
    if (n < 2.0) return 0.0;
    const double w = 1.0 / n;
    // Clamped: rounding in t - n + w can dip below zero at the spike feet.
    if (t >= n - w && t <= n) return std::max(0.0, b0 * n * n * (t - n + w));
    if (t > n && t <= n + w) return std::max(0.0, b0 * (n - n * n * (t - n)));
    return 0.0;
}

inline double example2_F(double u, double k, double tau) {
    if (u == 0.0) return 0.0;
    return -k * std::copysign(std::pow(std::abs(u), tau), u);
}

/// Antiderivative of example2_F from 0 to u.
inline double F_potential(double u, double k, double tau) {
    return -k * std::pow(std::abs(u), tau + 1.0) / (tau + 1.0);
}

inline double damping_coefficient(const ForcingSpec& spec, double x, double t, double u, double u_x,
                                  double u_xx, double u_t) {
    return spec.custom_a ? spec.custom_a(x, t, u, u_x, u_xx, u_t) : 0.0;
}

inline double eval_forcing(const ForcingSpec& spec, double x, double t, double u, double u_x, double u_xx,
                           double u_t) {
    double f = 0.0;
    switch (spec.kind) {
        case ForcingKind::Zero: return 0.0;
        case ForcingKind::Example1:
            f = std::sqrt(example1_b_squared(t, spec.b0)) * std::sin(u);
            break;
        case ForcingKind::Example2:
            f = example2_F(u, spec.k, spec.tau) - damping_coefficient(spec, x, t, u, u_x, u_xx, u_t) * u_t;
            break;
        case ForcingKind::Custom:
            if (spec.custom_f) {
                f = spec.custom_f(x, t, u, u_x, u_xx, u_t);
            } else if (spec.custom_F) {
                f = spec.custom_F(u) - damping_coefficient(spec, x, t, u, u_x, u_xx, u_t) * u_t;
            } else {
                throw Error(ErrorCode::Parameter, "custom forcing without a callback");
            }
            break;
    }
    if (!std::isfinite(f)) {
        std::ostringstream os;
        os << "non-finite forcing value at x=" << x << ", t=" << t;
        throw Error(ErrorCode::ForcingEvaluation, os.str());
    }
    return f;
}

/// F(u), the u-only part of a potential-type forcing.
inline double forcing_F(const ForcingSpec& spec, double u) {
    switch (spec.kind) {
        case ForcingKind::Zero: return 0.0;
        case ForcingKind::Example2: return example2_F(u, spec.k, spec.tau);
        case ForcingKind::Custom:
            if (spec.custom_F) return spec.custom_F(u);
            break;
        case ForcingKind::Example1: break;
    }
    throw Error(ErrorCode::UnsupportedFunctional,
                "forcing kind '" + std::string(to_string(spec.kind)) + "' has no F(u) part");
}

/// Antiderivative of F from 0 to u.
inline double forcing_potential(const ForcingSpec& spec, double u) {
    switch (spec.kind) {
        case ForcingKind::Zero: return 0.0;
        case ForcingKind::Example2: return F_potential(u, spec.k, spec.tau);
        case ForcingKind::Custom:
            if (spec.custom_potential) return spec.custom_potential(u);
            break;
        case ForcingKind::Example1: break;
    }
    throw Error(ErrorCode::UnsupportedFunctional,
                "forcing kind '" + std::string(to_string(spec.kind)) + "' has no potential");
}

/// Parameter checks, null-solution compatibility, and a randomized spot check of the damping bounds.
inline void validate_forcing(const ForcingSpec& spec, const PdeParams& params, const SampleBox& box = {}) {
    switch (spec.kind) {
        case ForcingKind::Zero: break;
        case ForcingKind::Example1:
            if (!(spec.b0 >= 0.0) || !std::isfinite(spec.b0)) {
                throw Error(ErrorCode::Parameter, "example1 requires b0 >= 0");
            }
            break;
        case ForcingKind::Example2:
            if (!(spec.k > 0.0)) throw Error(ErrorCode::Parameter, "example2 requires k > 0");
            if (!(spec.tau > 0.0 && spec.tau <= 1.0)) {
                throw Error(ErrorCode::Parameter, "example2 requires 0 < tau <= 1");
            }
            [[fallthrough]];
        case ForcingKind::Custom:
            if (!(spec.a_inf > -params.epsilon)) {
                throw Error(ErrorCode::HypothesisViolated,
                            "damping lower bound violated: need inf a > -epsilon, got a_inf=" +
                                std::to_string(spec.a_inf) + ", epsilon=" + std::to_string(params.epsilon));
            }
            if (!std::isfinite(spec.a_sup)) {
                throw Error(ErrorCode::HypothesisViolated, "damping upper bound must be finite (sup a < inf)");
            }
            if (spec.a_inf > spec.a_sup) {
                throw Error(ErrorCode::Parameter, "a_inf must not exceed a_sup");
            }
            if (spec.kind == ForcingKind::Custom && !spec.custom_f && !spec.custom_F) {
                throw Error(ErrorCode::Parameter, "custom forcing needs custom_f or custom_F");
            }
            break;
    }

    std::mt19937 rng(box.seed);
    std::uniform_real_distribution<double> ux(0.0, 1.0);
    std::uniform_real_distribution<double> ut(0.0, box.t_max);
    std::uniform_real_distribution<double> uf(-box.field_max, box.field_max);

    for (int i = 0; i < 64; ++i) {
        const double x = ux(rng), t = ut(rng);
        if (eval_forcing(spec, x, t, 0.0, 0.0, 0.0, 0.0) != 0.0) {
            std::ostringstream os;
            os << "forcing does not vanish on the null state (x=" << x << ", t=" << t << ")";
            throw Error(ErrorCode::HypothesisViolated, os.str());
        }
    }

    if (spec.custom_a) {
        for (int i = 0; i < box.samples; ++i) {
            const double x = ux(rng), t = ut(rng);
            const double a = spec.custom_a(x, t, uf(rng), uf(rng), uf(rng), uf(rng));
            if (!(a >= spec.a_inf && a <= spec.a_sup)) {
                std::ostringstream os;
                os << "damping coefficient a=" << a << " at x=" << x << ", t=" << t
                   << " lies outside the declared bounds [" << spec.a_inf << ", " << spec.a_sup << "]";
                throw Error(ErrorCode::HypothesisViolated, os.str());
            }
        }
    }
}

}  // namespace kvlab
