#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>

namespace pwc {

using Rational = boost::multiprecision::cpp_rational;

/// p + q pi with p, q rational.
///
/// Closed under + and -, and under products where at most one factor carries
/// a pi part. That is all the averaged-function reduction needs: every term
/// contains at most one Wallis integral m(k), which is rational for odd k and
/// a rational multiple of pi for even k.
class PiRational {
 public:
  PiRational() = default;
  PiRational(Rational rational, Rational pi_part = 0)  // NOLINT(google-explicit-constructor)
      : rational_(std::move(rational)), pi_part_(std::move(pi_part)) {}
  PiRational(int value) : rational_(value) {}  // NOLINT(google-explicit-constructor)

  /// Exact conversion of a binary double.
  static PiRational from_double(double value);
  static PiRational pi() { return PiRational(0, 1); }

  const Rational& rational_part() const { return rational_; }
  const Rational& pi_part() const { return pi_part_; }
  bool is_zero() const { return rational_ == 0 && pi_part_ == 0; }

  double to_double() const;
  std::string str() const;

  PiRational& operator+=(const PiRational& rhs);
  PiRational& operator-=(const PiRational& rhs);
  /// Throws std::domain_error if both factors carry a pi part.
  PiRational& operator*=(const PiRational& rhs);
  /// Division by a pi-free nonzero value.
  PiRational& operator/=(const PiRational& rhs);

  friend PiRational operator+(PiRational lhs, const PiRational& rhs) { return lhs += rhs; }
  friend PiRational operator-(PiRational lhs, const PiRational& rhs) { return lhs -= rhs; }
  friend PiRational operator*(PiRational lhs, const PiRational& rhs) { return lhs *= rhs; }
  friend PiRational operator/(PiRational lhs, const PiRational& rhs) { return lhs /= rhs; }
  friend PiRational operator-(const PiRational& v) { return PiRational(-v.rational_, -v.pi_part_); }
  friend bool operator==(const PiRational& lhs, const PiRational& rhs) {
    return lhs.rational_ == rhs.rational_ && lhs.pi_part_ == rhs.pi_part_;
  }

 private:
  Rational rational_ = 0;
  Rational pi_part_ = 0;
};

/// m(k) as an exact value: pi (k-1)!!/k!! for even k, 2 (k-1)!!/k!! for odd k.
PiRational wallis_half_exact(int k);

/// p(k) as an exact value.
PiRational wallis_full_exact(int k);

}  // namespace pwc
