#pragma once

#include <functional>

namespace pwc {

struct QuadratureSpec {
  double abs_tol = 1e-14;
  double rel_tol = 1e-12;
  int max_subdivisions = 2000;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int subdivisions = 0;
};

struct Interval {
  double lo;
  double hi;
};

/// Globally adaptive 21-point Gauss-Kronrod integration (QAG strategy: keep
/// bisecting the interval with the largest error estimate).
///
/// Terminates once the summed error estimate is below
///   max(abs_tol, rel_tol * |value|, 4 eps * integral of |f|);
/// the last term is the roundoff floor for integrals with heavy cancellation.
/// Throws NonConvergenceError when max_subdivisions is exhausted and
/// std::invalid_argument if the spec is malformed.
QuadratureResult integrate(const std::function<double(double)>& f, Interval interval,
                           const QuadratureSpec& spec = {});

/// cos^cos_power(t) sin^sin_power(t) / (r cos(t) + shift)^denom_power
struct TrigRationalIntegrand {
  int cos_power = 0;
  int sin_power = 0;
  double r = 0.0;
  double shift = 1.0;
  int denom_power = 2;

  double operator()(double theta) const;
};

/// Reference value of a trig-rational integral, independent of the closed
/// forms and recursions in kernel_integrals.
double quad_oracle(const TrigRationalIntegrand& integrand, Interval interval,
                   const QuadratureSpec& spec = {});

/// Same as above for an arbitrary integrand.
double quad_oracle(const std::function<double(double)>& integrand, Interval interval,
                   const QuadratureSpec& spec = {});

}  // namespace pwc
