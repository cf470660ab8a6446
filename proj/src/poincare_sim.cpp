#include "pwc/poincare_sim.hpp"

#include <algorithm>
#include <boost/math/tools/toms748_solve.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "pwc/errors.hpp"

namespace pwc {
namespace {

namespace odeint = boost::numeric::odeint;

constexpr double kPi = std::numbers::pi;
constexpr double kSingular = 1e-10;

using State1 = std::array<double, 1>;
using State2 = std::array<double, 2>;

// Dormand-Prince 5(4). The Fehlberg 7(8) estimate is blind to error terms
// that do not depend on the state, and for small eps the polar equation is
// close to a pure quadrature.
template <class State>
auto controlled(const IntegratorOptions& o, double max_step) {
  return odeint::make_controlled(o.abs_tol, o.rel_tol, max_step, odeint::runge_kutta_dopri5<State>());
}

double shift_of(const SystemParams& p, Side side) { return side == Side::plus ? p.a() : p.b(); }

std::pair<double, double> fg(const PerturbationSpec& pert, Side side, double x, double y) {
  return side == Side::plus ? std::pair{evaluate(pert.plus_f, x, y), evaluate(pert.plus_g, x, y)}
                            : std::pair{evaluate(pert.minus_f, x, y), evaluate(pert.minus_g, x, y)};
}

}  // namespace

PolarField::PolarField(const SystemParams& params, PerturbationSpec pert, double epsilon, double r_max,
                       double r_min)
    : params_(params),
      pert_(std::move(pert)),
      epsilon_(epsilon),
      r_max_(r_max > 0.0 ? r_max : params.default_search_bound()),
      r_min_(r_min > 0.0 ? r_min : 1e-3 * r_max_),
      averaged_(assemble(params, pert_)) {
  pert_.validate();
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("PolarField: epsilon must be finite and >= 0");
  }
  if (!(r_max_ < params.r0())) throw DomainError("PolarField: r_max must lie below r0");
  if (!(r_min_ < r_max_)) throw std::invalid_argument("PolarField: r_min must lie below r_max");
  constexpr int kRadii = 64;
  constexpr int kAngles = 256;
  for (int i = 0; i < kRadii; ++i) {
    const double r = r_min_ + (r_max_ - r_min_) * i / (kRadii - 1);
    for (int k = 0; k < kAngles; ++k) {
      const double theta = 2.0 * kPi * k / kAngles;
      const Side side = std::cos(theta) >= 0.0 ? Side::plus : Side::minus;
      if (!(angular_speed(side, theta, r) > 0.0)) {
        std::ostringstream msg;
        msg << "PolarField: dtheta/dt vanishes near r = " << r << ", theta = " << theta
            << "; epsilon = " << epsilon << " is too large";
        throw DomainError(msg.str());
      }
    }
  }
}

double PolarField::angular_speed(Side side, double theta, double r) const {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double base = r * c + shift_of(params_, side);
  const auto [f, g] = fg(pert_, side, r * c, r * s);
  return base * base + epsilon_ * (g * c - f * s) / r;
}

double PolarField::rhs(Side side, double theta, double r) const {
  if (!(r > 0.0) || !(r < params_.r0())) {
    std::ostringstream msg;
    msg << "polar_rhs: r = " << r << " left the annulus (0, " << params_.r0() << ")";
    throw BlowUpError(msg.str());
  }
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double base = r * c + shift_of(params_, side);
  const double h = base * base;
  if (h < kSingular) throw SingularityError("polar_rhs: (r cos(theta) + shift)^2 below 1e-10");
  if (epsilon_ == 0.0) return 0.0;
  const auto [f, g] = fg(pert_, side, r * c, r * s);
  return epsilon_ * (f * c + g * s) / (h + epsilon_ * (g * c - f * s) / r);
}

std::array<double, 2> PolarField::velocity(Side side, double x, double y) const {
  const double base = x + shift_of(params_, side);
  const auto [f, g] = fg(pert_, side, x, y);
  return {-y * base * base + epsilon_ * f, x * base * base + epsilon_ * g};
}

double polar_rhs(const PolarField& field, double theta, double r, std::optional<Side> side) {
  if (!side) side = std::cos(theta) >= 0.0 ? Side::plus : Side::minus;
  return field.rhs(*side, theta, r);
}

double return_map(const PolarField& field, double r_start, const IntegratorOptions& options) {
  const double hi = std::min(field.params().r0() - field.margin(), field.r_max());
  if (!(r_start >= field.r_min()) || !(r_start <= hi)) {
    std::ostringstream msg;
    msg << "return_map: r_start = " << r_start << " outside [" << field.r_min() << ", " << hi << "]";
    throw std::invalid_argument(msg.str());
  }
  if (field.epsilon() == 0.0) return r_start;
  State1 state{r_start};
  const std::array<std::pair<double, Side>, 3> legs{
      {{0.5 * kPi, Side::plus}, {1.5 * kPi, Side::minus}, {2.0 * kPi, Side::plus}}};
  double theta = 0.0;
  for (const auto& [end, side] : legs) {
    auto sys = [&field, side = side](const State1& r, State1& dr, double t) {
      dr[0] = field.rhs(side, t, r[0]);
    };
    odeint::integrate_adaptive(controlled<State1>(options, kPi / 16.0), sys, state, theta, end, 1e-3);
    theta = end;
  }
  return state[0];
}

std::vector<DisplacementSample> displacement_profile(const PolarField& field,
                                                     const std::vector<double>& r_grid,
                                                     const IntegratorOptions& options) {
  if (!(field.epsilon() > 0.0)) throw std::invalid_argument("displacement_profile: epsilon must be > 0");
  std::vector<DisplacementSample> out;
  out.reserve(r_grid.size());
  for (double r : r_grid) {
    DisplacementSample s;
    s.r = r;
    s.scaled_displacement = (return_map(field, r, options) - r) / field.epsilon();
    s.f0_prediction = eval_F(field.averaged(), r) / r;
    s.abs_error = std::abs(s.scaled_displacement - s.f0_prediction);
    out.push_back(s);
  }
  return out;
}

Stability predicted_stability(double derivative) {
  if (derivative < 0.0) return Stability::attracting;
  if (derivative > 0.0) return Stability::repelling;
  return Stability::neutral;
}

ReturnMapResult scan_return_map(const PolarField& field, double r_lo, double r_hi, int samples,
                                const IntegratorOptions& options) {
  if (samples < 2 || !(r_lo < r_hi)) throw std::invalid_argument("scan_return_map: bad range");
  const double eps = field.epsilon();
  ReturnMapResult out;
  out.epsilon = eps;
  std::vector<double> d;
  for (int k = 0; k < samples; ++k) {
    const double r = r_lo + (r_hi - r_lo) * k / (samples - 1);
    const double p = return_map(field, r, options);
    out.samples.emplace_back(r, p);
    d.push_back(p - r);
  }
  if (eps == 0.0) return out;

  auto displacement = [&](double r) { return (return_map(field, r, options) - r) / eps; };
  for (int k = 0; k + 1 < samples; ++k) {
    const double lo = out.samples[static_cast<std::size_t>(k)].first;
    const double hi = out.samples[static_cast<std::size_t>(k + 1)].first;
    const double d_lo = d[static_cast<std::size_t>(k)] / eps;
    const double d_hi = d[static_cast<std::size_t>(k + 1)] / eps;
    if (d_lo == 0.0 && k > 0) continue;  // counted as the upper end of the previous bracket
    if (!(d_lo * d_hi < 0.0) && d_hi != 0.0) continue;
    double z = hi;
    if (d_hi != 0.0) {
      std::uintmax_t iterations = 200;
      auto tol = [](double x, double y) { return std::abs(y - x) <= 1e-12; };
      const auto [a, b] = boost::math::tools::toms748_solve(displacement, lo, hi, d_lo, d_hi, tol, iterations);
      z = 0.5 * (a + b);
    }
    const double h = std::min({1e-4 * std::max(1.0, z), 0.5 * (z - field.r_min()), 0.5 * (field.r_max() - z)});
    FixedPoint fp;
    fp.location = z;
    fp.slope = (displacement(z + h) - displacement(z - h)) / (2.0 * h);
    fp.stability = std::abs(fp.slope) < 1e-9 ? Stability::neutral
                                             : (fp.slope < 0.0 ? Stability::attracting : Stability::repelling);
    out.fixed_points.push_back(fp);
  }
  return out;
}

CartesianSummary cartesian_crosscheck(const PolarField& field, std::array<double, 2> start,
                                      int n_crossings, const IntegratorOptions& options) {
  if (n_crossings < 1) throw std::invalid_argument("cartesian_crosscheck: n_crossings must be >= 1");
  const double r_start = std::hypot(start[0], start[1]);
  if (start[1] == 0.0 && !(start[0] > 0.0)) {
    throw std::invalid_argument("cartesian_crosscheck: the section is {y = 0, x > 0}");
  }
  if (start[0] == 0.0) throw std::invalid_argument("cartesian_crosscheck: start lies on the switching line");
  if (!(r_start >= field.r_min()) || !(r_start < field.params().r0())) {
    throw std::invalid_argument("cartesian_crosscheck: start outside the annulus");
  }

  Side side = start[0] > 0.0 ? Side::plus : Side::minus;
  auto flow = [&field, &side](const State2& s, State2& ds, double) { ds = field.velocity(side, s[0], s[1]); };

  // Last step onto a coordinate line, integrating in that coordinate:
  // d(other, t)/d(coord) = (other' / coord', 1 / coord').
  auto land = [&](const State2& s, double t, int coord) {
    const int other = 1 - coord;
    auto sys = [&](const State2& u, State2& du, double q) {
      State2 p{};
      p[coord] = q;
      p[other] = u[0];
      const auto v = field.velocity(side, p[0], p[1]);
      du[0] = v[other] / v[coord];
      du[1] = 1.0 / v[coord];
    };
    State2 u{s[other], t};
    // no step cap: a capped controller resets rejected steps to +max_dt,
    // which reverses a backward integration
    odeint::integrate_adaptive(controlled<State2>(options, 0.0), sys, u, s[coord], 0.0, -s[coord]);
    State2 p{};
    p[coord] = 0.0;
    p[other] = u[0];
    return std::pair{p, u[1]};
  };

  CartesianSummary out;
  State2 state{start[0], start[1]};
  double t = 0.0;
  double dt = 1e-3;
  auto stepper = controlled<State2>(options, 1e3);
  const double r0 = field.params().r0();
  constexpr long kMaxSteps = 50'000'000;
  for (long steps = 0; static_cast<int>(out.section_radii.size()) < n_crossings; ++steps) {
    if (steps > kMaxSteps) throw NonConvergenceError("cartesian_crosscheck: step budget exhausted");
    // keep the angular advance per step small so crossings are never skipped
    const double theta = std::atan2(state[1], state[0]);
    const double r = std::hypot(state[0], state[1]);
    dt = std::min(dt, 0.1 / field.angular_speed(side, theta, r));
    State2 next = state;
    double t_next = t;
    if (stepper.try_step(flow, next, t_next, dt) == odeint::fail) continue;

    const double r_next = std::hypot(next[0], next[1]);
    if (!(r_next > 0.0) || !(r_next < r0)) throw BlowUpError("cartesian_crosscheck: trajectory left the annulus");
    const bool switches = (side == Side::plus && next[0] < 0.0) || (side == Side::minus && next[0] > 0.0);
    const bool sections = state[1] < 0.0 && next[1] >= 0.0 && next[0] > 0.0;
    if (!switches && !sections) {
      state = next;
      t = t_next;
      continue;
    }
    stepper.reset();  // first-same-as-last derivative is stale once the state is replaced
    std::optional<std::pair<State2, double>> at_switch, at_section;
    if (switches) at_switch = land(state, t, 0);
    if (sections) at_section = land(state, t, 1);
    if (at_switch && (!at_section || at_switch->second <= at_section->second)) {
      std::tie(state, t) = *at_switch;
      const double y = state[1];
      const double plus = field.velocity(Side::plus, 0.0, y)[0];
      const double minus = field.velocity(Side::minus, 0.0, y)[0];
      if (std::abs(plus) < 1e-9 || std::abs(minus) < 1e-9 || plus * minus < 0.0) {
        std::ostringstream msg;
        msg << "cartesian_crosscheck: x' changes sign across x = 0 at y = " << y << " (" << plus
            << " vs " << minus << ")";
        throw SlidingError(msg.str());
      }
      side = plus < 0.0 ? Side::minus : Side::plus;
      out.switch_times.push_back(t);
    } else {
      std::tie(state, t) = *at_section;
      out.section_radii.push_back(state[0]);
      out.max_radius_drift =
          std::max(out.max_radius_drift, std::abs(state[0] * state[0] - r_start * r_start) / (r_start * r_start));
    }
  }
  out.elapsed = t;
  return out;
}

ConvergenceStudy first_order_study(const SystemParams& params, const PerturbationSpec& pert,
                                   const std::vector<double>& epsilons,
                                   const std::vector<double>& r_grid, double r_max,
                                   const IntegratorOptions& options) {
  if (r_grid.empty()) throw std::invalid_argument("first_order_study: empty grid");
  const double r_min = *std::min_element(r_grid.begin(), r_grid.end());
  if (epsilons.size() < 2) throw std::invalid_argument("first_order_study: need at least two epsilons");
  ConvergenceStudy out;
  out.epsilons = epsilons;
  for (double eps : epsilons) {
    const PolarField field(params, pert, eps, r_max, r_min);
    double worst = 0.0;
    for (const auto& s : displacement_profile(field, r_grid, options)) worst = std::max(worst, s.abs_error);
    out.errors.push_back(worst);
  }
  double mx = 0.0;
  double my = 0.0;
  const auto m = static_cast<double>(epsilons.size());
  for (std::size_t k = 0; k < epsilons.size(); ++k) {
    mx += std::log(epsilons[k]) / m;
    my += std::log(out.errors[k]) / m;
  }
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t k = 0; k < epsilons.size(); ++k) {
    const double dx = std::log(epsilons[k]) - mx;
    sxy += dx * (std::log(out.errors[k]) - my);
    sxx += dx * dx;
  }
  out.slope = sxy / sxx;
  return out;
}

}  // namespace pwc
