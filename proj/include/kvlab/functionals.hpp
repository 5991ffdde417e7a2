#pragma once

#include <optional>
#include <string>

#include "kvlab/forcing.hpp"
#include "kvlab/grid.hpp"
#include "kvlab/params.hpp"

namespace kvlab {

struct FunctionalValues {
    double d2 = 0.0;
    std::optional<double> d1_2;
    double V = 0.0;
    std::optional<double> V1;
    std::optional<double> W;
    double gamma = 1.0;
};

namespace detail {

inline void require_gamma(double gamma) {
    if (!(gamma > 0.5)) {
        throw Error(ErrorCode::Parameter, "gamma must exceed 1/2, got " + std::to_string(gamma));
    }
}

/// Spatial derivatives shared by every functional of one state.
struct StateDerivatives {
    GridFunction ux, uxx, vx;

    explicit StateDerivatives(const State& s)
        : ux(derivative(s.u, 1)), uxx(derivative(s.u, 2)), vx(derivative(s.v, 1)) {}
};

template <class Fn>
double integrate_nodes(std::size_t n, double h, Fn&& at) {
    double s = 0.5 * (at(0) + at(n - 1));
    for (std::size_t i = 1; i + 1 < n; ++i) s += at(i);
    return s * h;
}

inline double distance_sq(const State& s, const StateDerivatives& d) {
    return integrate_nodes(s.u.size(), s.grid().h(), [&](std::size_t i) {
        return s.u[i] * s.u[i] + d.ux[i] * d.ux[i] + d.uxx[i] * d.uxx[i] + s.v[i] * s.v[i];
    });
}

inline double velocity_gradient_sq(const State& s, const StateDerivatives& d) {
    return integrate_nodes(s.u.size(), s.grid().h(), [&](std::size_t i) { return d.vx[i] * d.vx[i]; });
}

inline double lyapunov_V(const State& s, const StateDerivatives& d, double gamma, const PdeParams& p) {
    return 0.5 * integrate_nodes(s.u.size(), s.grid().h(), [&](std::size_t i) {
               const double w = p.epsilon * d.uxx[i] - s.v[i];
               return w * w + gamma * s.v[i] * s.v[i] + p.c2 * (1.0 + gamma) * d.ux[i] * d.ux[i];
           });
}

inline double v1_correction(const State& s, const StateDerivatives& d, const PdeParams& p) {
    return 0.5 * p.epsilon * integrate_nodes(s.u.size(), s.grid().h(), [&](std::size_t i) {
               return p.epsilon * d.vx[i] * d.vx[i] - 2.0 * p.c2 * s.v[i] * d.uxx[i];
           });
}

inline double potential_integral(const State& s, const ForcingSpec& spec) {
    return integrate_pointwise(s.u, [&](double u) { return forcing_potential(spec, u); });
}

}  // namespace detail

/// Integral of u^2 + u_x^2 + u_xx^2 + v^2.
inline double distance_sq(const State& s) {
    return detail::distance_sq(s, detail::StateDerivatives(s));
}

/// distance_sq plus the integral of v_x^2.
inline double distance1_sq(const State& s) {
    const detail::StateDerivatives d(s);
    return detail::distance_sq(s, d) + detail::velocity_gradient_sq(s, d);
}

inline double lyapunov_V(const State& s, double gamma, const PdeParams& params) {
    detail::require_gamma(gamma);
    return detail::lyapunov_V(s, detail::StateDerivatives(s), gamma, params);
}

/// Higher-regularity functional paired with distance1_sq.
inline double lyapunov_V1(const State& s, double gamma, const PdeParams& params) {
    detail::require_gamma(gamma);
    const detail::StateDerivatives d(s);
    return detail::lyapunov_V(s, d, gamma, params) + detail::v1_correction(s, d, params);
}

/// V plus -(1+gamma) times the integral of the forcing potential; requires F(u) with an antiderivative.
inline double lyapunov_W(const State& s, double gamma, const PdeParams& params, const ForcingSpec& spec) {
    detail::require_gamma(gamma);
    if (!spec.has_potential()) {
        throw Error(ErrorCode::UnsupportedFunctional,
                    "W needs a forcing with a potential; '" + std::string(to_string(spec.kind)) + "' has none");
    }
    return detail::lyapunov_V(s, detail::StateDerivatives(s), gamma, params) -
           (1.0 + gamma) * detail::potential_integral(s, spec);
}

struct FunctionalRequest {
    double gamma = 1.0;
    bool d1 = false;
    bool v1 = false;
    std::optional<double> gamma_w;  ///< evaluate W with this gamma when set
};

inline FunctionalValues evaluate_functionals(const State& s, const PdeParams& params, const ForcingSpec& spec,
                                             const FunctionalRequest& req) {
    detail::require_gamma(req.gamma);
    const detail::StateDerivatives d(s);
    FunctionalValues out;
    out.gamma = req.gamma;
    out.d2 = detail::distance_sq(s, d);
    out.V = detail::lyapunov_V(s, d, req.gamma, params);
    if (req.d1) out.d1_2 = out.d2 + detail::velocity_gradient_sq(s, d);
    if (req.v1) out.V1 = out.V + detail::v1_correction(s, d, params);
    if (req.gamma_w) {
        detail::require_gamma(*req.gamma_w);
        if (!spec.has_potential()) {
            throw Error(ErrorCode::UnsupportedFunctional, "W requested for a forcing without a potential");
        }
        const double vpart =
            *req.gamma_w == req.gamma ? out.V : detail::lyapunov_V(s, d, *req.gamma_w, params);
        out.W = vpart - (1.0 + *req.gamma_w) * detail::potential_integral(s, spec);
    }
    return out;
}

/// Trapezoid value of the integral of f^2 over [0,1] at the given state.
inline double forcing_sq_integral(const State& s, const ForcingSpec& spec) {
    const detail::StateDerivatives d(s);
    const Grid& g = s.grid();
    return detail::integrate_nodes(s.u.size(), g.h(), [&](std::size_t i) {
        const double f = eval_forcing(spec, g.x(i), s.t, s.u[i], d.ux[i], d.uxx[i], s.v[i]);
        return f * f;
    });
}

}  // namespace kvlab
