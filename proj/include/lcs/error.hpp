#pragma once

#include <stdexcept>
#include <string>

namespace lcs {

enum class ErrorKind {
    WildRamification,
    ExpLogRadius,
    DivisionByZero,
    PrecisionLoss,
    Capacity,
    AmbientTooSmall,
    ConductorTooSmall,
    EvenConductor,
    NotAdmissible,
    ConductorMismatch,
    ConfigInvalid,
    UnsupportedShape,
    InternalContradiction,
    RangeViolation,
    InvalidArgument,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::WildRamification: return "WildRamification";
    case ErrorKind::ExpLogRadius: return "ExpLogRadius";
    case ErrorKind::DivisionByZero: return "DivisionByZero";
    case ErrorKind::PrecisionLoss: return "PrecisionLoss";
    case ErrorKind::Capacity: return "CapacityExceeded";
    case ErrorKind::AmbientTooSmall: return "AmbientTooSmall";
    case ErrorKind::ConductorTooSmall: return "ConductorTooSmall";
    case ErrorKind::EvenConductor: return "EvenConductor";
    case ErrorKind::NotAdmissible: return "NotAdmissible";
    case ErrorKind::ConductorMismatch: return "ConductorMismatch";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::UnsupportedShape: return "UnsupportedShape";
    case ErrorKind::InternalContradiction: return "InternalContradiction";
    case ErrorKind::RangeViolation: return "RangeViolation";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

} // namespace lcs
