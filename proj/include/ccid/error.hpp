#pragma once

#include <stdexcept>

namespace ccid {

// Malformed or out-of-contract input data (bad file, NaN sample, record too
// short for the requested window, missing feature column).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input is well-formed but numerically degenerate for the requested measure
// (constant window for R/S, zero-diameter trajectory, zero noise floor).
class DegenerateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace ccid
