#pragma once

#include <stdexcept>
#include <string>

namespace tryon {

// Invalid extents, mismatched shapes, malformed parameters.
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Arguments outside their documented domain (negative radius, t out of range, ...).
struct ValueError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// NaN/Inf escaped a public operation, or a training run diverged.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File level problems: missing inputs, bad magic bytes, undecodable PNGs.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace tryon
