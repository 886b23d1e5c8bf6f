#pragma once

#include <stdexcept>
#include <string>

namespace tensorcue {

// Request exceeds a configured size cap (correlation order, matrix size, ...).
class capacity_error : public std::length_error {
 public:
  using std::length_error::length_error;
};

// File system or stream failure; the message carries the offending path.
class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tensorcue
