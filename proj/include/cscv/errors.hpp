#pragma once

#include <stdexcept>
#include <string>

namespace cscv {

// Precondition violations: bad sizes, out-of-range parameters, malformed input.
struct InvalidArgument : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// The selected support produced a (nearly) rank-deficient least-squares system.
struct IllConditionedSupport : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The stopping rule's denominator sqrt(r_j) - 3*ln(p) is not positive.
struct InsufficientCvRows : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input whose value makes the requested quantity undefined (e.g. zero norms).
struct DegenerateInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Stage schedule fails validation before any decoding starts.
struct InvalidSchedule : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File I/O failures for signal/table serialization.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace cscv
