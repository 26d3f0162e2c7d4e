#pragma once

#include <stdexcept>
#include <string>

namespace qid {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid inputs: malformed specs, violated preconditions, bad arguments.
struct SpecError : Error {
    using Error::Error;
};

// Numerical failures: overflow, unmet quadrature targets, exhausted budgets,
// aliasing in spectral grids.  These are reported, never silently absorbed.
struct NumericalError : Error {
    using Error::Error;
};

} // namespace qid
