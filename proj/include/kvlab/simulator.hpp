#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "kvlab/forcing.hpp"
#include "kvlab/functionals.hpp"
#include "kvlab/grid.hpp"
#include "kvlab/params.hpp"
#include "kvlab/tridiagonal.hpp"

namespace kvlab {

/// IMEX integrator for u_t = v, v_t = eps*v_xx + c^2*u_xx + f.
///
/// The linear part is advanced with the trapezoidal rule. Eliminating u^{n+1}
/// leaves one tridiagonal system in the interior velocities:
///
///   (I - alpha*D) v^{n+1} = (I + alpha*D) v^n + dt*c^2*D u^n + dt*fbar,
///   u^{n+1} = u^n + dt/2 (v^n + v^{n+1}),       alpha = eps*dt/2 + c^2*dt^2/4,
///
/// with D the Dirichlet Laplacian. The forcing average fbar comes from a
/// predictor (f at the current state) and a corrector (f at the predicted state).
class Stepper {
public:
    Stepper(const Grid& grid, double dt, const PdeParams& params, const ForcingSpec& forcing)
        : grid_(grid), dt_(dt), params_(params), forcing_(&forcing) {
        if (!(dt > 0.0) || !std::isfinite(dt)) {
            throw Error(ErrorCode::Parameter, "dt must be positive, got " + std::to_string(dt));
        }
        params.validate();
        const double h2 = grid.h() * grid.h();
        alpha_ = params.epsilon * dt / 2.0 + params.c2 * dt * dt / 4.0;
        system_ = ConstantTridiagonal(grid.n_interior(), 1.0 + 2.0 * alpha_ / h2, -alpha_ / h2);
        f0_.assign(grid.size(), 0.0);
        f1_.assign(grid.size(), 0.0);
        rhs_.assign(grid.n_interior(), 0.0);
    }

    double dt() const noexcept { return dt_; }

    State step(const State& s) {
        eval_forcing_into(s, s.t, f0_);
        State predicted = advance(s, f0_);
        eval_forcing_into(predicted, s.t + dt_, f1_);
        for (std::size_t i = 0; i < f0_.size(); ++i) f1_[i] = 0.5 * (f0_[i] + f1_[i]);
        return advance(s, f1_);
    }

private:
    void eval_forcing_into(const State& s, double t, std::vector<double>& out) const {
        if (forcing_->kind == ForcingKind::Zero) {
            std::fill(out.begin(), out.end(), 0.0);
            return;
        }
        const double h = grid_.h();
        const double inv2h = 1.0 / (2.0 * h), invh2 = 1.0 / (h * h);
        const auto& u = s.u;
        for (std::size_t i = 1; i + 1 < out.size(); ++i) {
            const double ux = (u[i + 1] - u[i - 1]) * inv2h;
            const double uxx = (u[i + 1] - 2.0 * u[i] + u[i - 1]) * invh2;
            out[i] = eval_forcing(*forcing_, grid_.x(i), t, u[i], ux, uxx, s.v[i]);
        }
        out.front() = out.back() = 0.0;
    }

    State advance(const State& s, const std::vector<double>& fbar) {
        const std::size_t n = grid_.n_interior();
        const double invh2 = 1.0 / (grid_.h() * grid_.h());
        const double cu = dt_ * params_.c2;
        const auto& u = s.u;
        const auto& v = s.v;
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t i = j + 1;
            const double lap_v = (v[i + 1] - 2.0 * v[i] + v[i - 1]) * invh2;
            const double lap_u = (u[i + 1] - 2.0 * u[i] + u[i - 1]) * invh2;
            rhs_[j] = v[i] + alpha_ * lap_v + cu * lap_u + dt_ * fbar[i];
        }
        system_.solve(rhs_);

        State out = State::zero(grid_, s.t + dt_);
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t i = j + 1;
            out.v[i] = rhs_[j];
            out.u[i] = u[i] + 0.5 * dt_ * (v[i] + rhs_[j]);
            if (!std::isfinite(out.u[i]) || !std::isfinite(out.v[i])) {
                throw Error(ErrorCode::Integrator, "non-finite state at t=" + std::to_string(out.t));
            }
        }
        return out;
    }

    Grid grid_;
    double dt_;
    PdeParams params_;
    const ForcingSpec* forcing_;
    double alpha_ = 0.0;
    ConstantTridiagonal system_;
    std::vector<double> f0_, f1_, rhs_;
};

inline State step(const State& state, double dt, const PdeParams& params, const ForcingSpec& forcing) {
    return Stepper(state.grid(), dt, params, forcing).step(state);
}

struct ObserverConfig {
    std::size_t stride = 100;
    FunctionalRequest functionals{};
    bool forcing_energy = false;  ///< record the integral of f^2
    bool keep_states = true;
};

struct Observation {
    std::size_t step = 0;
    double t = 0.0;
    FunctionalValues values;
    std::optional<double> forcing_sq;
};

/// Observed run. states[i] and observations[i] belong to step observations[i].step,
/// so states[i].t = t0 + observations[i].step * dt.
struct Trajectory {
    double t0 = 0.0;
    double dt = 0.0;
    std::size_t n_steps = 0;
    std::size_t stride = 1;
    PdeParams params;
    ForcingSpec forcing;
    std::vector<State> states;
    std::vector<Observation> observations;
    std::optional<std::string> error;  ///< set when integration stopped early

    bool complete() const noexcept { return !error.has_value(); }
};

inline void validate_initial_state(State& s, double boundary_tol = 1e-12) {
    const auto check = [&](GridFunction& g, const char* name) {
        const std::size_t last = g.size() - 1;
        if (std::abs(g[0]) > boundary_tol || std::abs(g[last]) > boundary_tol) {
            throw Error(ErrorCode::InvalidInitialData,
                        std::string("initial ") + name +
                            " must vanish at x=0 and x=1 (compatibility with the Dirichlet conditions)");
        }
        for (double x : g.values()) {
            if (!std::isfinite(x)) {
                throw Error(ErrorCode::InvalidInitialData, std::string("initial ") + name + " is not finite");
            }
        }
        g[0] = g[last] = 0.0;
    };
    if (!(s.u.grid() == s.v.grid())) {
        throw Error(ErrorCode::InvalidInitialData, "u and v live on different grids");
    }
    check(s.u, "displacement");
    check(s.v, "velocity");
}

inline std::size_t step_count(double t0, double t_end, double dt) {
    if (!(t_end > t0)) throw Error(ErrorCode::Parameter, "t_end must exceed t0");
    if (!(dt > 0.0)) throw Error(ErrorCode::Parameter, "dt must be positive");
    const double span = t_end - t0;
    const double n = std::round(span / dt);
    if (n < 1.0 || std::abs(n * dt - span) > 1e-9 * std::max(1.0, span)) {
        throw Error(ErrorCode::Parameter, "dt must divide t_end - t0");
    }
    return static_cast<std::size_t>(n);
}

/// Integrates from t0 to t_end; observes every `stride` steps and always at the final step.
/// An integrator error stops the run and returns what was computed with `error` set.
inline Trajectory simulate(const State& initial, double t0, double t_end, double dt, const PdeParams& params,
                           const ForcingSpec& forcing, const ObserverConfig& observe = {}) {
    params.validate();
    State s = initial;
    validate_initial_state(s);
    s.t = t0;

    Trajectory traj;
    traj.t0 = t0;
    traj.dt = dt;
    traj.n_steps = step_count(t0, t_end, dt);
    traj.stride = std::max<std::size_t>(1, observe.stride);
    traj.params = params;
    traj.forcing = forcing;

    const auto record = [&](std::size_t k) {
        Observation obs;
        obs.step = k;
        obs.t = s.t;
        obs.values = evaluate_functionals(s, params, forcing, observe.functionals);
        if (observe.forcing_energy) obs.forcing_sq = forcing_sq_integral(s, forcing);
        traj.observations.push_back(std::move(obs));
        if (observe.keep_states) traj.states.push_back(s);
    };

    Stepper stepper(s.grid(), dt, params, forcing);
    record(0);
    for (std::size_t k = 1; k <= traj.n_steps; ++k) {
        try {
            s = stepper.step(s);
        } catch (const Error& e) {
            traj.error = e.what();
            return traj;
        }
        s.t = t0 + static_cast<double>(k) * dt;
        if (k % traj.stride == 0 || k == traj.n_steps) record(k);
    }
    return traj;
}

}  // namespace kvlab
