#pragma once

#include <stdexcept>
#include <string>

namespace filanet {

/// Malformed or inconsistent input data (bad file, dimension mismatch,
/// out-of-range parameter). CLI maps this to exit code 2.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure (singular normal matrix and the like). CLI exit code 3.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace filanet
