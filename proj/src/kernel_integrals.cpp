#include "pwc/kernel_integrals.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "pwc/errors.hpp"
#include "seed_forms.hpp"

namespace pwc {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMomentTableSize = 4096;
constexpr double kSeriesRadius = 0.75;

const std::vector<double>& half_moments() {
  static const std::vector<double> table = [] {
    std::vector<double> m(kMomentTableSize);
    m[0] = kPi;
    m[1] = 2.0;
    for (int k = 2; k < kMomentTableSize; ++k) {
      m[k] = m[k - 2] * static_cast<double>(k - 1) / static_cast<double>(k);
    }
    return m;
  }();
  return table;
}

double g_closed(double x) { return detail::g_closed(x, detail::kDoubleSeam); }

double h_closed(double x) { return detail::h_closed(x, detail::kDoubleSeam); }

void check_half_domain(double x, double r, double shift) {
  if (std::isnan(x)) throw DomainError("kernel argument is NaN");
  if (x == -1.0) {
    std::ostringstream msg;
    msg << "integrand pole at the arc endpoint: r = " << r << ", shift = " << shift;
    throw SingularityError(msg.str());
  }
  if (x < -1.0) {
    std::ostringstream msg;
    msg << "r = " << r << " outside the analyticity domain for shift = " << shift;
    throw DomainError(msg.str());
  }
}

// Closed-form seeds: integral over `arc` of 1/(r cos + s)^2 and 1/(r cos + s).
struct Seeds {
  double sq;
  double lin;
};

Seeds half_seeds(double r, double shift) {
  const double x = r / shift;
  check_half_domain(x, r, shift);
  return {2.0 * h_closed(x) / (shift * shift), 2.0 * g_closed(x) / shift};
}

Seeds arc_seeds(Arc arc, double r, double shift) {
  switch (arc) {
    case Arc::right:
      return half_seeds(r, shift);
    case Arc::left:
      return half_seeds(-r, shift);
    case Arc::full: {
      const double ratio = std::abs(r / shift);
      if (ratio >= 1.0) {
        std::ostringstream msg;
        msg << "full-circle kernel requires |r| < |shift|: r = " << r << ", shift = " << shift;
        if (ratio == 1.0) throw SingularityError(msg.str());
        throw DomainError(msg.str());
      }
      const Seeds right = half_seeds(r, shift);
      const Seeds left = half_seeds(-r, shift);
      return {right.sq + left.sq, right.lin + left.lin};
    }
  }
  throw std::logic_error("unreachable");
}

void check_indices(int i, int j) {
  if (i < 0 || j < 0) throw IndexError("family indices must be nonnegative");
  if (i + j > kMaxFamilyIndex) {
    std::ostringstream msg;
    msg << "family index i + j = " << i + j << " exceeds bound " << kMaxFamilyIndex;
    throw IndexError(msg.str());
  }
}

// Values K2[0..top] (squared denominator) and K1[0..top] (linear), cos^i only.
struct Ladder {
  std::vector<double> sq;
  std::vector<double> lin;
};

Ladder cos_ladder(Arc arc, int top, double r, double shift) {
  const Seeds seeds = arc_seeds(arc, r, shift);  // validates the domain
  Ladder out{std::vector<double>(top + 1), std::vector<double>(top + 1)};
  const double x = r / shift;

  if (std::abs(x) <= kSeriesRadius) {
    const double inv = 1.0 / shift;
    for (int i = 0; i <= top; ++i) {
      double sum_sq = 0.0;
      double sum_lin = 0.0;
      double power = 1.0;
      for (int k = 0; i + k < kMomentTableSize; ++k) {
        const double mom = arc_moment(arc, i + k);
        const double t_lin = power * mom;
        const double t_sq = static_cast<double>(k + 1) * t_lin;
        sum_lin += t_lin;
        sum_sq += t_sq;
        // Odd full-circle moments vanish, so bound the term by |m| rather than testing it.
        const double bound = static_cast<double>(k + 1) * std::abs(power) * 2.0 * wallis_half(i + k);
        if (k > 2 && bound <= 1e-18 * std::min(std::abs(sum_sq), std::abs(sum_lin))) break;
        if (k > 2 && power == 0.0) break;
        power *= -x;
      }
      out.sq[i] = sum_sq * inv * inv;
      out.lin[i] = sum_lin * inv;
    }
    return out;
  }

  out.sq[0] = seeds.sq;
  out.lin[0] = seeds.lin;
  for (int i = 1; i <= top; ++i) {
    out.lin[i] = (arc_moment(arc, i - 1) - shift * out.lin[i - 1]) / r;
    out.sq[i] = (out.lin[i - 1] - shift * out.sq[i - 1]) / r;
  }
  return out;
}

double binomial(int n, int k) {
  double c = 1.0;
  for (int t = 1; t <= k; ++t) c = c * static_cast<double>(n - k + t) / static_cast<double>(t);
  return c;
}

double reduce_sin_power(const std::vector<double>& cos_values, int i, int j) {
  if (j % 2 == 1) return 0.0;
  const int l = j / 2;
  double sum = 0.0;
  for (int k = 0; k <= l; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    sum += sign * binomial(l, k) * cos_values[i + 2 * k];
  }
  return sum;
}

}  // namespace

double wallis_half(int k) {
  if (k < 0) throw std::invalid_argument("wallis_half: k must be nonnegative");
  if (k < kMomentTableSize) return half_moments()[k];
  double m = half_moments()[kMomentTableSize - 2 + (k % 2)];
  for (int t = kMomentTableSize + (k % 2); t <= k; t += 2) {
    m *= static_cast<double>(t - 1) / static_cast<double>(t);
  }
  return m;
}

double wallis_full(int k) {
  if (k < 0) throw std::invalid_argument("wallis_full: k must be nonnegative");
  if (k % 2 == 1) return 0.0;
  return 2.0 * wallis_half(k);
}

Interval arc_interval(Arc arc) {
  switch (arc) {
    case Arc::right:
      return {-0.5 * kPi, 0.5 * kPi};
    case Arc::left:
      return {0.5 * kPi, 1.5 * kPi};
    case Arc::full:
      return {0.0, 2.0 * kPi};
  }
  throw std::logic_error("unreachable");
}

double arc_moment(Arc arc, int k) {
  switch (arc) {
    case Arc::right:
      return wallis_half(k);
    case Arc::left:
      return (k % 2 == 0) ? wallis_half(k) : -wallis_half(k);
    case Arc::full:
      return wallis_full(k);
  }
  throw std::logic_error("unreachable");
}

double kernel_sq(Arc arc, int i, int j, double r, double shift) {
  check_indices(i, j);
  if (shift == 0.0) throw DomainError("kernel shift must be nonzero");
  if (j % 2 == 1) {
    arc_seeds(arc, r, shift);
    return 0.0;
  }
  const Ladder ladder = cos_ladder(arc, i + j, r, shift);
  return reduce_sin_power(ladder.sq, i, j);
}

double kernel_lin(Arc arc, int i, int j, double r, double shift) {
  check_indices(i, j);
  if (shift == 0.0) throw DomainError("kernel shift must be nonzero");
  if (j % 2 == 1) {
    arc_seeds(arc, r, shift);
    return 0.0;
  }
  const Ladder ladder = cos_ladder(arc, i + j, r, shift);
  return reduce_sin_power(ladder.lin, i, j);
}

double eval_A00(double r, const SystemParams& params) {
  return half_seeds(r, params.a()).sq;
}

double eval_B00(double r, const SystemParams& params) {
  return half_seeds(-r, params.b()).sq;
}

std::pair<double, double> eval_I00_J00(double r, const SystemParams& params) {
  const double a = params.a();
  const double b = params.b();
  const double A00 = eval_A00(r, params);
  const double B00 = eval_B00(r, params);
  const double I00 = 2.0 / (a * a) * r + a * A00 - r * r / a * A00;
  const double J00 = -2.0 / (b * b) * r + b * B00 - r * r / b * B00;
  return {I00, J00};
}

double eval_family(const IntegralFamilyIndex& index, double r, const SystemParams& params) {
  switch (index.family) {
    case Family::A:
      return kernel_sq(Arc::right, index.i, index.j, r, params.a());
    case Family::B:
      return kernel_sq(Arc::left, index.i, index.j, r, params.b());
    case Family::I:
      return kernel_lin(Arc::right, index.i, index.j, r, params.a());
    case Family::J:
      return kernel_lin(Arc::left, index.i, index.j, r, params.b());
  }
  throw std::logic_error("unreachable");
}

TrigRationalIntegrand family_integrand(const IntegralFamilyIndex& index, double r,
                                       const SystemParams& params) {
  const bool right = index.family == Family::A || index.family == Family::I;
  const bool squared = index.family == Family::A || index.family == Family::B;
  return TrigRationalIntegrand{index.i, index.j, r, right ? params.a() : params.b(),
                               squared ? 2 : 1};
}

Interval family_interval(Family family) {
  return (family == Family::A || family == Family::I) ? arc_interval(Arc::right)
                                                      : arc_interval(Arc::left);
}

}  // namespace pwc
