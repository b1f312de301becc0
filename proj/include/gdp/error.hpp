#pragma once

#include <stdexcept>
#include <string>

namespace gdp {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : Error {
    using Error::Error;
};

// Unsupported file contents (bit depth, magic number, ...).
struct FormatError : Error {
    using Error::Error;
};

struct DimensionError : Error {
    using Error::Error;
};

// Bad argument values (empty corpus, too few bins, ...).
struct InputError : Error {
    using Error::Error;
};

// Model evaluation hit a pole (e.g. Model 2 with b2 = 0 at the origin).
struct SingularityError : Error {
    using Error::Error;
};

// A statistic could not be estimated from the given data.
struct EstimationError : Error {
    using Error::Error;
};

struct NumericError : Error {
    using Error::Error;
};

// An iterative solver failed to make progress.
struct DivergenceError : Error {
    using Error::Error;
};

} // namespace gdp
