#pragma once

#include <limits>

namespace pwc {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Constants a, b of the unperturbed piecewise center
///   x >= 0:  (-y (x+a)^2, x (x+a)^2)
///   x <  0:  (-y (x+b)^2, x (x+b)^2)
/// and the outer radius r0 of its period annulus.
///
/// The invariant line x = -a bounds the annulus only when it lies in the
/// right half-plane (a < 0); likewise x = -b only when b > 0.
class SystemParams {
 public:
  /// Throws std::invalid_argument unless a*b != 0 and both are finite.
  SystemParams(double a, double b);

  double a() const { return a_; }
  double b() const { return b_; }

  double r1() const { return a_ < 0 ? -a_ : kInf; }
  double r2() const { return b_ > 0 ? b_ : kInf; }
  double r0() const;

  bool annulus_bounded() const { return r0() < kInf; }

  /// Exact equality a == -b; near-resonant inputs are treated as generic.
  bool resonant() const { return a_ == -b_; }

  /// Truncation used when the caller does not supply a search radius:
  /// (1 - 1e-3) r0 for a bounded annulus, 10 max(|a|, |b|) otherwise.
  double default_search_bound() const;

  friend bool operator==(const SystemParams&, const SystemParams&) = default;

 private:
  double a_;
  double b_;
};

}  // namespace pwc
