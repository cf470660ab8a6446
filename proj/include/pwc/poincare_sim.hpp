#pragma once

#include <array>
#include <optional>
#include <vector>

#include "pwc/averaged_function.hpp"
#include "pwc/system_params.hpp"

namespace pwc {

enum class Side { plus, minus };

struct IntegratorOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
};

/// Perturbed piecewise system
///   x >= 0:  x' = -y (x+a)^2 + eps f+,  y' = x (x+a)^2 + eps g+
///   x <  0:  the same with b, f-, g-
/// in polar form
///   dr/dtheta = eps P / (h + eps Q / r),  P = f cos + g sin,  Q = g cos - f sin,
///   h = (r cos + a)^2 or (r cos + b)^2.
/// Expanding in eps gives eps X + eps^2 Y + ...; the exact quotient is
/// integrated, so no truncation is involved.
class PolarField {
 public:
  /// [r_min, r_max] is the sampled annulus (defaults: 1e-3 r_max and
  /// params.default_search_bound()). Throws std::invalid_argument for eps < 0
  /// and DomainError when dtheta/dt = h + eps Q / r fails to stay positive on
  /// a 64 x 256 grid over [r_min, r_max] x [0, 2 pi). Near the origin eps Q / r
  /// grows like 1/r, so larger eps needs a larger r_min.
  PolarField(const SystemParams& params, PerturbationSpec pert, double epsilon, double r_max = 0.0,
             double r_min = 0.0);

  const SystemParams& params() const { return params_; }
  const PerturbationSpec& perturbation() const { return pert_; }
  double epsilon() const { return epsilon_; }
  double r_max() const { return r_max_; }
  double r_min() const { return r_min_; }
  /// Distance kept from r0: 1e-3 r_max.
  double margin() const { return 1e-3 * r_max_; }

  /// dtheta/dt on the given side.
  double angular_speed(Side side, double theta, double r) const;
  /// dr/dtheta on the given side; SingularityError when h < 1e-10.
  double rhs(Side side, double theta, double r) const;

  /// Cartesian velocity on the given side.
  std::array<double, 2> velocity(Side side, double x, double y) const;

  /// Averaged function F = r f0 of the perturbation (exact assembly).
  const AveragedFunction& averaged() const { return averaged_; }

 private:
  SystemParams params_;
  PerturbationSpec pert_;
  double epsilon_;
  double r_max_;
  double r_min_;
  AveragedFunction averaged_;
};

/// dr/dtheta: + side when cos(theta) > 0, - side when cos(theta) < 0. On
/// cos(theta) = 0 the caller picks the side it integrates from (plus when
/// omitted).
double polar_rhs(const PolarField& field, double theta, double r,
                 std::optional<Side> side = std::nullopt);

/// Return map on the section {theta = 0} = {y = 0, x > 0}: legs
/// [0, pi/2] (+), [pi/2, 3 pi/2] (-), [3 pi/2, 2 pi] (+), each integrated with
/// an adaptive Dormand-Prince 5(4) pair, steps at most pi/16. Requires
/// r_min <= r_start <= min(r_max, r0 - margin); BlowUpError if r leaves (0, r0).
double return_map(const PolarField& field, double r_start, const IntegratorOptions& options = {});

struct DisplacementSample {
  double r = 0.0;
  double scaled_displacement = 0.0;  // (P(r) - r) / eps
  double f0_prediction = 0.0;        // F(r) / r
  double abs_error = 0.0;
};

/// Requires eps > 0.
std::vector<DisplacementSample> displacement_profile(const PolarField& field,
                                                     const std::vector<double>& r_grid,
                                                     const IntegratorOptions& options = {});

enum class Stability { attracting, repelling, neutral };

struct FixedPoint {
  double location = 0.0;
  Stability stability = Stability::neutral;
  double slope = 0.0;  // d/dr (P(r) - r) / eps
};

struct ReturnMapResult {
  std::vector<std::pair<double, double>> samples;  // (r_in, r_out)
  std::vector<FixedPoint> fixed_points;
  double epsilon = 0.0;
};

/// Samples P on `samples` points evenly spread over [r_lo, r_hi], brackets
/// the sign changes of P(r) - r and refines them to 1e-12. Neutral when
/// |slope| < 1e-9.
ReturnMapResult scan_return_map(const PolarField& field, double r_lo, double r_hi, int samples = 200,
                                const IntegratorOptions& options = {});

/// Stability the averaged function predicts for a simple zero with
/// derivative F'(z): attracting when negative.
Stability predicted_stability(double derivative);

struct CartesianSummary {
  std::vector<double> section_radii;  // x at successive upward crossings of y = 0, x > 0
  std::vector<double> switch_times;   // times of the x = 0 crossings
  double max_radius_drift = 0.0;      // max |x^2 + y^2 - r_start^2| / r_start^2 at the crossings
  double elapsed = 0.0;
};

/// Integrates the Cartesian field in time from (x, y), locating x = 0 and
/// y = 0 crossings exactly by switching the independent variable to the
/// crossing coordinate for the last step. SlidingError when the two sides
/// disagree on the sign of x' at a switching point or |x'| < 1e-9 there;
/// std::invalid_argument unless x > 0 (or y != 0) and the start is inside the
/// annulus.
CartesianSummary cartesian_crosscheck(const PolarField& field, std::array<double, 2> start,
                                      int n_crossings, const IntegratorOptions& options = {});

struct ConvergenceStudy {
  std::vector<double> epsilons;
  std::vector<double> errors;  // max over the grid of |(P - r)/eps - f0|
  double slope = 0.0;          // least-squares slope of log error against log eps
};

/// First-order law over the given eps values (each builds its own PolarField
/// whose sampled annulus starts at the smallest grid radius).
ConvergenceStudy first_order_study(const SystemParams& params, const PerturbationSpec& pert,
                                   const std::vector<double>& epsilons,
                                   const std::vector<double>& r_grid, double r_max = 0.0,
                                   const IntegratorOptions& options = {});

}  // namespace pwc
