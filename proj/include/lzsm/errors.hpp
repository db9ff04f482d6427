#pragma once

#include <stdexcept>
#include <string>

namespace lzsm {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad parameters at profile construction.
struct ValidationError : Error {
    using Error::Error;
};

// Operation not defined for this family/configuration.
struct UnsupportedError : Error {
    using Error::Error;
};

// Evaluation at or beyond a pole / outside the family domain.
struct SingularityError : Error {
    using Error::Error;
};

// Adaptive ODE integration failed (step underflow, non-convergent window).
struct IntegrationError : Error {
    using Error::Error;
};

// Zero search could not converge from any seed.
struct SearchError : Error {
    using Error::Error;
};

// Branch ambiguity that path deformation could not resolve.
struct ContourError : Error {
    using Error::Error;
};

// Time map cannot cover the requested range (bounded integral of the gap).
struct CoverageError : Error {
    using Error::Error;
};

} // namespace lzsm
