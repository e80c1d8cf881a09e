// Exception types shared across the library.
#pragma once

#include <stdexcept>
#include <string>

namespace flq {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// linear algebra
struct NotHermitian : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct IllConditioned : Error { using Error::Error; };
struct Singular : Error { using Error::Error; };
struct Overflow : Error { using Error::Error; };

// eigensystem labeling / physics
struct DegenerateDetuning : Error { using Error::Error; };
struct AmbiguousLabeling : Error { using Error::Error; };
struct NotNormalized : Error { using Error::Error; };
struct DivisionByZero : Error { using Error::Error; };

// propagation
struct TraceDrift : Error { using Error::Error; };
struct StepUnderflow : Error { using Error::Error; };
struct CapExceeded : Error { using Error::Error; };
struct OutOfRange : Error { using Error::Error; };

// configuration
struct ParseError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };

} // namespace flq
