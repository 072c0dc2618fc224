#pragma once

#include <stdexcept>
#include <string>

namespace kakeya {

// Input validation failures (dimension mismatch, out-of-range parameters, ...).
struct input_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A configured resource cap was exceeded (cell counts, enumeration sizes, ...).
struct resource_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Degenerate numerics: regression on constant data, zero volume estimates, ...
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// All Monte Carlo draws were discarded / no admissible sample was found.
struct sampling_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed configuration; carries the offending key in the message.
struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace kakeya
