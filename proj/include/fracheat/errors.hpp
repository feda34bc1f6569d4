#pragma once

#include <stdexcept>
#include <string>

namespace fracheat {

/// Bad input: malformed configuration, out-of-range parameters, violated
/// preconditions.  The CLI maps it to exit status 1.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// A computation could not deliver a trustworthy result (failed
/// factorization, non-converged quadrature, broken invariant).  Exit status 2.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fracheat
