#pragma once
/**
 * @file error.hpp
 * @brief Exception type shared by every module.
 */

#include <stdexcept>
#include <string>

namespace subdyn {

enum class ErrorKind {
    InvalidArgument,
    BudgetExceeded,
    NotPrimitive,
    NotFound,
    NotInLanguage,
    NotSquarefree,
    PrecisionExhausted,
    WrongClass,
    RadiusTooLarge,
    NotMeanZero,
    DegenerateF,
    TailNotConverged,
    RepeatedEigenvalue,
    ZeroEigenvalue,
    HalfIntegerAmbiguity,
    ConfigError
};

inline const char* kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::BudgetExceeded: return "BudgetExceeded";
        case ErrorKind::NotPrimitive: return "NotPrimitive";
        case ErrorKind::NotFound: return "NotFound";
        case ErrorKind::NotInLanguage: return "NotInLanguage";
        case ErrorKind::NotSquarefree: return "NotSquarefree";
        case ErrorKind::PrecisionExhausted: return "PrecisionExhausted";
        case ErrorKind::WrongClass: return "WrongClass";
        case ErrorKind::RadiusTooLarge: return "RadiusTooLarge";
        case ErrorKind::NotMeanZero: return "NotMeanZero";
        case ErrorKind::DegenerateF: return "DegenerateF";
        case ErrorKind::TailNotConverged: return "TailNotConverged";
        case ErrorKind::RepeatedEigenvalue: return "RepeatedEigenvalue";
        case ErrorKind::ZeroEigenvalue: return "ZeroEigenvalue";
        case ErrorKind::HalfIntegerAmbiguity: return "HalfIntegerAmbiguity";
        case ErrorKind::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(kind_name(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

inline void require(bool ok, const std::string& what) {
    if (!ok) fail(ErrorKind::InvalidArgument, what);
}

} // namespace subdyn
