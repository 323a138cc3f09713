#pragma once

#include <stdexcept>
#include <string>

namespace bmk {

// Bad inputs: out-of-range parameters, malformed files, dimension mismatches.
// The CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Runtime numerical failure: NaN/Inf in training, divergence. Exit code 2.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bmk
