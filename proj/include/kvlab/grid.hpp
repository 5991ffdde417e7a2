#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "kvlab/error.hpp"

namespace kvlab {

/// Uniform grid on [0,1] with n_interior interior nodes and both endpoints.
class Grid {
public:
    Grid() = default;

    std::size_t n_interior() const noexcept { return n_interior_; }
    std::size_t size() const noexcept { return n_interior_ + 2; }
    double h() const noexcept { return h_; }

    /// Node i; the last node is exactly 1.
    double x(std::size_t i) const noexcept {
        return i == n_interior_ + 1 ? 1.0 : static_cast<double>(i) * h_;
    }

    std::vector<double> nodes() const {
        std::vector<double> out(size());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = x(i);
        return out;
    }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    friend Grid make_grid(std::size_t n_interior);
    explicit Grid(std::size_t n) : n_interior_(n), h_(1.0 / static_cast<double>(n + 1)) {}

    std::size_t n_interior_ = 0;
    double h_ = 0.0;
};

inline Grid make_grid(std::size_t n_interior) {
    if (n_interior < 3) {
        throw Error(ErrorCode::InvalidGrid,
                    "n_interior must be at least 3, got " + std::to_string(n_interior));
    }
    return Grid(n_interior);
}

/// Samples of a scalar field at every node of a Grid (endpoints included).
class GridFunction {
public:
    GridFunction() = default;

    explicit GridFunction(const Grid& grid) : grid_(grid), values_(grid.size(), 0.0) {}

    GridFunction(const Grid& grid, std::vector<double> values)
        : grid_(grid), values_(std::move(values)) {
        if (values_.size() != grid_.size()) {
            throw Error(ErrorCode::Parameter,
                        "grid function needs " + std::to_string(grid_.size()) +
                            " values, got " + std::to_string(values_.size()));
        }
    }

    template <class Fn>
    static GridFunction sample(const Grid& grid, Fn&& fn) {
        GridFunction g(grid);
        for (std::size_t i = 0; i < g.size(); ++i) g.values_[i] = fn(grid.x(i));
        return g;
    }

    const Grid& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }

    double operator[](std::size_t i) const noexcept { return values_[i]; }
    double& operator[](std::size_t i) noexcept { return values_[i]; }

    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }

    bool satisfies_dirichlet() const noexcept {
        return values_.front() == 0.0 && values_.back() == 0.0;
    }

    double max_abs() const noexcept {
        double m = 0.0;
        for (double v : values_) m = std::max(m, std::abs(v));
        return m;
    }

private:
    Grid grid_;
    std::vector<double> values_;
};

/// Phase point (u, v = u_t) at time t.
struct State {
    GridFunction u;
    GridFunction v;
    double t = 0.0;

    const Grid& grid() const noexcept { return u.grid(); }

    static State zero(const Grid& grid, double t = 0.0) {
        return State{GridFunction(grid), GridFunction(grid), t};
    }
};

/// Second-order finite differences. Interior nodes use central stencils;
/// endpoints use one-sided second-order stencils (order 2 needs four points).
inline GridFunction derivative(const GridFunction& g, int order) {
    const std::size_t n = g.size();
    const double h = g.grid().h();
    GridFunction out(g.grid());
    if (order == 1) {
        const double inv = 1.0 / (2.0 * h);
        for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (g[i + 1] - g[i - 1]) * inv;
        out[0] = (-3.0 * g[0] + 4.0 * g[1] - g[2]) * inv;
        out[n - 1] = (3.0 * g[n - 1] - 4.0 * g[n - 2] + g[n - 3]) * inv;
    } else if (order == 2) {
        const double inv = 1.0 / (h * h);
        for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (g[i + 1] - 2.0 * g[i] + g[i - 1]) * inv;
        out[0] = (2.0 * g[0] - 5.0 * g[1] + 4.0 * g[2] - g[3]) * inv;
        out[n - 1] = (2.0 * g[n - 1] - 5.0 * g[n - 2] + 4.0 * g[n - 3] - g[n - 4]) * inv;
    } else {
        throw Error(ErrorCode::Parameter, "derivative order must be 1 or 2");
    }
    return out;
}

/// Composite trapezoid rule over [0,1].
inline double integrate(std::span<const double> values, double h) {
    const std::size_t n = values.size();
    double s = 0.5 * (values[0] + values[n - 1]);
    for (std::size_t i = 1; i + 1 < n; ++i) s += values[i];
    return s * h;
}

inline double integrate(const GridFunction& g) { return integrate(g.values(), g.grid().h()); }

/// Trapezoid value of the integral of f(g[i]) without materializing the integrand.
template <class Fn>
double integrate_pointwise(const GridFunction& g, Fn&& fn) {
    const std::size_t n = g.size();
    double s = 0.5 * (fn(g[0]) + fn(g[n - 1]));
    for (std::size_t i = 1; i + 1 < n; ++i) s += fn(g[i]);
    return s * g.grid().h();
}

/// sum_k a_k sin(k pi x); boundary values are set to exactly zero.
inline GridFunction sine_series(std::span<const double> coeffs, const Grid& grid) {
    GridFunction g(grid);
    for (std::size_t i = 1; i + 1 < g.size(); ++i) {
        const double x = grid.x(i);
        double s = 0.0;
        for (std::size_t k = 0; k < coeffs.size(); ++k) {
            s += coeffs[k] * std::sin(static_cast<double>(k + 1) * std::numbers::pi * x);
        }
        g[i] = s;
    }
    return g;
}

inline State sine_series_state(std::span<const double> coeffs_u, std::span<const double> coeffs_v,
                               const Grid& grid, double t = 0.0) {
    return State{sine_series(coeffs_u, grid), sine_series(coeffs_v, grid), t};
}

}  // namespace kvlab
