#pragma once

#include <utility>

#include "pwc/quadrature.hpp"
#include "pwc/system_params.hpp"

namespace pwc {

/// m(k): integral of cos^k over (-pi/2, pi/2).
double wallis_half(int k);

/// p(k): integral of cos^k over (0, 2 pi); zero for odd k.
double wallis_full(int k);

/// Angular ranges over which the kernel integrals are taken.
///   right: (-pi/2, pi/2)   the x >= 0 half plane (A, I families)
///   left:  (pi/2, 3 pi/2)  the x <  0 half plane (B, J families)
///   full:  (0, 2 pi)       the smooth system (V, U families)
enum class Arc { right, left, full };

Interval arc_interval(Arc arc);

/// Integral of cos^k over the arc.
double arc_moment(Arc arc, int k);

/// Largest i + j accepted by the family evaluators.
inline constexpr int kMaxFamilyIndex = 64;

/// Integral over `arc` of cos^i sin^j / (r cos + shift)^2.
///
/// Odd j vanishes by symmetry; even j is reduced to j = 0 through the
/// binomial expansion of sin^2 = 1 - cos^2. The j = 0 ladder is seeded with the
/// closed forms for i = 0 and climbs in i with
///   r K2[i+1] = K1[i] - shift K2[i],   r K1[i] = moment(i-1) - shift K1[i-1],
/// except for |r / shift| <= 3/4, where the ladder loses (shift / r)^i digits
/// and the convergent power series in r / shift is summed instead.
///
/// Throws SingularityError when the integrand has a pole at an arc endpoint
/// and DomainError when the pole lies inside the arc.
double kernel_sq(Arc arc, int i, int j, double r, double shift);

/// Integral over `arc` of cos^i sin^j / (r cos + shift).
double kernel_lin(Arc arc, int i, int j, double r, double shift);

/// A_{0,0}(r) = integral over (-pi/2, pi/2) of (r cos + a)^-2.
///
/// Real-analytic for r/a > -1. Writing x = r/a,
///   A00 = (2/a^2) (g(x) - x) / (1 - x^2),
///   g(x) = arccos(x)/sqrt(1-x^2)  (x < 1),  arccosh(x)/sqrt(x^2-1)  (x > 1),
/// which covers every branch of the piecewise closed form (a < 0 reduces to
/// a > 0 via A00(r; a) = A00(-r; -a)). Around the removable seam x = 1 the
/// quotient is 0/0, so for |x - 1| < 0.05 a Taylor series generated by
///   a (a^2 - r^2) A00' = 3 a r A00 - 4
/// is summed instead; A00(a; a) = 4 / (3 a^2).
double eval_A00(double r, const SystemParams& params);

/// B_{0,0}(r) = integral over (pi/2, 3 pi/2) of (r cos + b)^-2 = A00(-r; b).
double eval_B00(double r, const SystemParams& params);

/// (I_{0,0}, J_{0,0}) from the elimination identities
///   I00 =  (2/a^2) r + a A00 - (r^2/a) A00
///   J00 = -(2/b^2) r + b B00 - (r^2/b) B00.
std::pair<double, double> eval_I00_J00(double r, const SystemParams& params);

enum class Family { A, B, I, J };

struct IntegralFamilyIndex {
  Family family;
  int i;
  int j;
};

/// A_{i,j}, B_{i,j}, I_{i,j} or J_{i,j} at r.
double eval_family(const IntegralFamilyIndex& index, double r, const SystemParams& params);

/// The integrand of eval_family, for cross-checking against quad_oracle.
TrigRationalIntegrand family_integrand(const IntegralFamilyIndex& index, double r,
                                       const SystemParams& params);
Interval family_interval(Family family);

}  // namespace pwc
