#include "pwc/exact.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace pwc {

PiRational PiRational::from_double(double value) {
  if (!std::isfinite(value)) throw std::domain_error("PiRational: non-finite input");
  int exponent = 0;
  const double mantissa = std::frexp(value, &exponent);
  // mantissa * 2^53 is an integer for every finite double.
  const auto scaled = static_cast<long long>(std::ldexp(mantissa, 53));
  Rational r(scaled);
  const int shift = exponent - 53;
  if (shift >= 0) {
    r *= Rational(boost::multiprecision::cpp_int(1) << shift);
  } else {
    r /= Rational(boost::multiprecision::cpp_int(1) << (-shift));
  }
  return PiRational(r);
}

double PiRational::to_double() const {
  return rational_.convert_to<double>() + pi_part_.convert_to<double>() * std::numbers::pi;
}

std::string PiRational::str() const {
  std::ostringstream out;
  out << rational_ << " + (" << pi_part_ << ")pi";
  return out.str();
}

PiRational& PiRational::operator+=(const PiRational& rhs) {
  rational_ += rhs.rational_;
  pi_part_ += rhs.pi_part_;
  return *this;
}

PiRational& PiRational::operator-=(const PiRational& rhs) {
  rational_ -= rhs.rational_;
  pi_part_ -= rhs.pi_part_;
  return *this;
}

PiRational& PiRational::operator*=(const PiRational& rhs) {
  if (pi_part_ != 0 && rhs.pi_part_ != 0) {
    throw std::domain_error("PiRational: product would contain pi^2");
  }
  const Rational rat = rational_ * rhs.rational_;
  const Rational pi = rational_ * rhs.pi_part_ + pi_part_ * rhs.rational_;
  rational_ = rat;
  pi_part_ = pi;
  return *this;
}

PiRational& PiRational::operator/=(const PiRational& rhs) {
  if (rhs.pi_part_ != 0) throw std::domain_error("PiRational: division by a value containing pi");
  if (rhs.rational_ == 0) throw std::domain_error("PiRational: division by zero");
  rational_ /= rhs.rational_;
  pi_part_ /= rhs.rational_;
  return *this;
}

PiRational wallis_half_exact(int k) {
  if (k < 0) throw std::invalid_argument("wallis_half_exact: k must be nonnegative");
  Rational ratio = 1;  // (k-1)!! / k!!
  for (int t = k; t >= 2; t -= 2) ratio = ratio * Rational(t - 1) / Rational(t);
  if (k % 2 == 0) return PiRational(0, ratio);
  return PiRational(2 * ratio);
}

PiRational wallis_full_exact(int k) {
  if (k < 0) throw std::invalid_argument("wallis_full_exact: k must be nonnegative");
  if (k % 2 == 1) return PiRational(0);
  return wallis_half_exact(k) * PiRational(2);
}

}  // namespace pwc
