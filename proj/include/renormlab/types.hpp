#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace renormlab {

using C = std::complex<double>;

// Numerical failure (wrong root, divergence, degeneracy). CLI maps these to exit 2.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Working precision cannot represent the requested computation.
struct PrecisionExhausted : NumericalError {
    using NumericalError::NumericalError;
};

// Filesystem / format failures. CLI maps these to exit 3.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
    int column;
    ParseError(const std::string& msg, int col)
        : std::runtime_error(msg + " (column " + std::to_string(col) + ")"), column(col) {}
};

}  // namespace renormlab
