#pragma once

#include <stdexcept>
#include <string>

namespace ddc {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Caller handed us something malformed: wrong dimensions, NaN entries,
// inconsistent config values.
struct InvalidInputError : Error {
    using Error::Error;
};

// A matrix that must be inverted is singular or too ill-conditioned.
// Carries the reciprocal condition estimate that triggered the refusal.
struct SingularMatrixError : Error {
    double rcond;
    SingularMatrixError(const std::string& what, double rc)
        : Error(what + " (rcond=" + std::to_string(rc) + ")"), rcond(rc) {}
};

// A matrix fails an inertia requirement that the surrounding math needs.
struct InertiaError : Error {
    using Error::Error;
};

// Data cannot have been produced by any admissible plant/noise pair.
struct InconsistentDataError : Error {
    using Error::Error;
};

// The consistency set admits arbitrarily large values where a finite
// bound is required (e.g. unbounded interconnection degree).
struct UnboundedDegreeError : Error {
    using Error::Error;
};

// A feature combination the implementation deliberately does not cover.
struct UnsupportedConfigurationError : Error {
    using Error::Error;
};

// The SDP engine finished without a usable verdict: neither a strictly
// feasible point nor an infeasibility certificate.
struct SolverError : Error {
    using Error::Error;
};

}  // namespace ddc
