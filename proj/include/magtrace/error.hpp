#pragma once

#include <stdexcept>
#include <string>

namespace magtrace {

/// Raised when a computation cannot reach its requested accuracy
/// (non-certifiable tails, stalled eigensolves, diverging extrapolation).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Precondition violations are reported as std::invalid_argument.
inline void require(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument(message);
}

}  // namespace magtrace
