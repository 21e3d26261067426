#pragma once

#include <stdexcept>
#include <string>

namespace vargram {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad invocation: invalid flag combinations, out-of-range parameters.
struct UsageError : Error {
  using Error::Error;
};

// Malformed or inconsistent input data: unknown tokens, missing files,
// alphabet mismatches.
struct DataError : Error {
  using Error::Error;
};

// Invalid numeric state: probability rows not summing to one, non-finite
// intermediate values.
struct NumericError : Error {
  using Error::Error;
};

}  // namespace vargram
