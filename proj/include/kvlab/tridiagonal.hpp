#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "kvlab/error.hpp"

namespace kvlab {

/// Thomas algorithm for a constant-coefficient tridiagonal matrix
/// (diag on the main diagonal, off on both neighbours). Factorization is cached.
class ConstantTridiagonal {
public:
    ConstantTridiagonal() = default;

    ConstantTridiagonal(std::size_t n, double diag, double off) : off_(off), inv_pivot_(n), c_prime_(n) {
        double pivot = diag;
        for (std::size_t i = 0; i < n; ++i) {
            if (i > 0) pivot = diag - off * c_prime_[i - 1];
            if (!(std::abs(pivot) > 1e-300) || !std::isfinite(pivot)) {
                throw Error(ErrorCode::Integrator, "singular tridiagonal system");
            }
            inv_pivot_[i] = 1.0 / pivot;
            c_prime_[i] = off * inv_pivot_[i];
        }
    }

    std::size_t size() const noexcept { return inv_pivot_.size(); }

    /// Solves in place: rhs is overwritten with the solution.
    void solve(std::span<double> rhs) const {
        const std::size_t n = size();
        rhs[0] *= inv_pivot_[0];
        for (std::size_t i = 1; i < n; ++i) rhs[i] = (rhs[i] - off_ * rhs[i - 1]) * inv_pivot_[i];
        for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c_prime_[i] * rhs[i + 1];
    }

private:
    double off_ = 0.0;
    std::vector<double> inv_pivot_;
    std::vector<double> c_prime_;
};

}  // namespace kvlab
