#include "pwc/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "pwc/errors.hpp"

namespace pwc {
namespace {

// Kronrod abscissae on [0, 1]; odd indices are the 10-point Gauss nodes.
constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};

constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208067745938, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Panel {
  double lo;
  double hi;
  double value;
  double error;
  double abs_value;

  bool operator<(const Panel& other) const { return error < other.error; }
};

Panel gk21(const std::function<double(double)>& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double f_center = f(center);

  double res_gauss = 0.0;
  double res_kronrod = kWgk[10] * f_center;
  double res_abs = std::abs(res_kronrod);
  std::array<double, 10> f_lo{};
  std::array<double, 10> f_hi{};

  for (int j = 0; j < 10; ++j) {
    const double dx = half * kXgk[j];
    const double fl = f(center - dx);
    const double fh = f(center + dx);
    f_lo[j] = fl;
    f_hi[j] = fh;
    res_kronrod += kWgk[j] * (fl + fh);
    res_abs += kWgk[j] * (std::abs(fl) + std::abs(fh));
    if (j % 2 == 1) res_gauss += kWg[j / 2] * (fl + fh);
  }

  const double mean = 0.5 * res_kronrod;
  double res_asc = kWgk[10] * std::abs(f_center - mean);
  for (int j = 0; j < 10; ++j) {
    res_asc += kWgk[j] * (std::abs(f_lo[j] - mean) + std::abs(f_hi[j] - mean));
  }

  const double scale = std::abs(half);
  double err = std::abs((res_kronrod - res_gauss) * half);
  res_asc *= scale;
  res_abs *= scale;
  if (res_asc != 0.0 && err != 0.0) {
    err = res_asc * std::min(1.0, std::pow(200.0 * err / res_asc, 1.5));
  }
  const double eps = std::numeric_limits<double>::epsilon();
  err = std::max(err, 2.0 * eps * res_abs);
  return Panel{lo, hi, res_kronrod * half, err, res_abs};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, Interval interval,
                           const QuadratureSpec& spec) {
  if (spec.max_subdivisions < 1 || spec.abs_tol < 0.0 ||
      spec.rel_tol < 100.0 * std::numeric_limits<double>::epsilon()) {
    throw std::invalid_argument("QuadratureSpec: invalid tolerances");
  }
  if (interval.lo == interval.hi) return {};

  const double eps = std::numeric_limits<double>::epsilon();
  std::priority_queue<Panel> panels;
  Panel first = gk21(f, interval.lo, interval.hi);
  double value = first.value;
  double error = first.error;
  double abs_value = first.abs_value;
  panels.push(first);

  int subdivisions = 1;
  auto done = [&] {
    const double target = std::max({spec.abs_tol, spec.rel_tol * std::abs(value),
                                    4.0 * eps * abs_value});
    return error <= target;
  };

  while (!done()) {
    if (subdivisions >= spec.max_subdivisions) {
      std::ostringstream msg;
      msg << "adaptive quadrature did not converge on [" << interval.lo << ", "
          << interval.hi << "]: value " << value << ", error " << error << " after "
          << subdivisions << " subdivisions";
      throw NonConvergenceError(msg.str());
    }
    Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    Panel left = gk21(f, worst.lo, mid);
    Panel right = gk21(f, mid, worst.hi);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    abs_value += left.abs_value + right.abs_value - worst.abs_value;
    if (!std::isfinite(value)) {
      throw NonConvergenceError("adaptive quadrature produced a non-finite value");
    }
    panels.push(left);
    panels.push(right);
    ++subdivisions;
  }

  // Re-sum to shed the drift of the incremental updates.
  double total = 0.0;
  double total_err = 0.0;
  while (!panels.empty()) {
    total += panels.top().value;
    total_err += panels.top().error;
    panels.pop();
  }
  return {total, total_err, subdivisions};
}

double TrigRationalIntegrand::operator()(double theta) const {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double denom = r * c + shift;
  return std::pow(c, cos_power) * std::pow(s, sin_power) / std::pow(denom, denom_power);
}

double quad_oracle(const TrigRationalIntegrand& integrand, Interval interval,
                   const QuadratureSpec& spec) {
  return integrate(std::function<double(double)>(integrand), interval, spec).value;
}

double quad_oracle(const std::function<double(double)>& integrand, Interval interval,
                   const QuadratureSpec& spec) {
  return integrate(integrand, interval, spec).value;
}

}  // namespace pwc
