#pragma once

// Closed forms behind A00 and I00, generic in the floating type.
//   g(x) = arccos(x)/sqrt(1-x^2)  (x < 1),  arccosh(x)/sqrt(x^2-1)  (x > 1)
//   h(x) = (g(x) - x) / (1 - x^2)
// Around x = 1 both are summed as Taylor series in u = x - 1; the closed
// forms lose about log10(1/|u|) digits there.

#include <cmath>

namespace pwc::detail {

struct SeamRule {
  double window;
  int terms;
};

inline constexpr SeamRule kDoubleSeam{0.05, 18};

template <class Real>
Real g_seam_series(const Real& u, int terms) {
  // (1 - x^2) g' = x g - 1:  e_k = -k e_{k-1} / (2k + 1)
  Real coeff(1);
  Real sum(1);
  Real power(1);
  for (int k = 1; k < terms; ++k) {
    coeff *= Real(-k) / Real(2 * k + 1);
    power *= u;
    sum += coeff * power;
  }
  return sum;
}

template <class Real>
Real h_seam_series(const Real& u, int terms) {
  // (1 - x^2) h' = 3 x h - 2:  c_k = -(k+2) c_{k-1} / (2k + 3)
  Real coeff = Real(2) / Real(3);
  Real sum = coeff;
  Real power(1);
  for (int k = 1; k < terms; ++k) {
    coeff *= Real(-(k + 2)) / Real(2 * k + 3);
    power *= u;
    sum += coeff * power;
  }
  return sum;
}

template <class Real>
Real g_closed(const Real& x, const SeamRule& rule) {
  using std::abs, std::acos, std::acosh, std::asin, std::sqrt;
  const Real u = x - 1;
  if (abs(u) < rule.window) return g_seam_series(u, rule.terms);
  if (x < 1) {
    const Real num = x > Real(0.5) ? Real(2 * asin(sqrt((1 - x) / 2))) : Real(acos(x));
    return num / sqrt((1 - x) * (1 + x));
  }
  return acosh(x) / sqrt((x - 1) * (x + 1));
}

template <class Real>
Real h_closed(const Real& x, const SeamRule& rule) {
  using std::abs;
  const Real u = x - 1;
  if (abs(u) < rule.window) return h_seam_series(u, rule.terms);
  return (g_closed(x, rule) - x) / ((1 - x) * (1 + x));
}

}  // namespace pwc::detail
