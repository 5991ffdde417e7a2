#pragma once

#include <cmath>
#include <string>

#include "kvlab/error.hpp"

namespace kvlab {

/// Coefficients of -eps*u_xxt + u_tt - c^2*u_xx.
struct PdeParams {
    double epsilon = 1.0;  ///< viscous coefficient
    double c2 = 1.0;       ///< squared wave speed

    double c() const { return std::sqrt(c2); }

    friend bool operator==(const PdeParams&, const PdeParams&) = default;

    void validate() const {
        if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
            throw Error(ErrorCode::Parameter,
                        "epsilon must be a finite positive constant, got " + std::to_string(epsilon));
        }
        if (!(c2 > 0.0) || !std::isfinite(c2)) {
            throw Error(ErrorCode::Parameter,
                        "c2 must be a finite positive constant, got " + std::to_string(c2));
        }
    }
};

}  // namespace kvlab
