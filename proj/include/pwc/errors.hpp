#pragma once

#include <stdexcept>
#include <string>

namespace pwc {

/// Argument lies outside the real analyticity domain of the requested function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Argument hits a pole of the integrand family (r cos(theta) + shift vanishes).
class SingularityError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Adaptive quadrature exhausted its subdivision budget.
class NonConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A recursion or table index exceeded its supported bound.
class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Linear-algebra problem was numerically singular.
class RankDeficiencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sign changes of a scanned function could not be separated by grid refinement.
class UnresolvedClusterError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Trajectory left the period annulus or approached a singular line.
class BlowUpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vector field is tangent to the switching line (sliding / grazing).
class SlidingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pwc
