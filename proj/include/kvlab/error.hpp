#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kvlab {

enum class ErrorCode {
    InvalidGrid,
    Parameter,
    HypothesisViolated,
    ForcingEvaluation,
    Integrator,
    InvalidInitialData,
    UnsupportedFunctional,
    NoStabilityCertificate,
    CertificateIncomplete,
    Domain,
    Config,
    Io,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidGrid: return "invalid-grid";
        case ErrorCode::Parameter: return "parameter";
        case ErrorCode::HypothesisViolated: return "hypothesis-violated";
        case ErrorCode::ForcingEvaluation: return "forcing-evaluation";
        case ErrorCode::Integrator: return "integrator";
        case ErrorCode::InvalidInitialData: return "invalid-initial-data";
        case ErrorCode::UnsupportedFunctional: return "unsupported-functional";
        case ErrorCode::NoStabilityCertificate: return "no-stability-certificate";
        case ErrorCode::CertificateIncomplete: return "certificate-incomplete";
        case ErrorCode::Domain: return "domain";
        case ErrorCode::Config: return "config";
        case ErrorCode::Io: return "io";
    }
    return "unknown";
}

/// Single exception type for the library; the code distinguishes the failure class.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace kvlab
