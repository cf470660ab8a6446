#include "pwc/zero_analysis.hpp"

#include <algorithm>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/eigen.hpp>

#include "pwc/errors.hpp"
#include "pwc/extended.hpp"
#include "pwc/kernel_integrals.hpp"

namespace pwc {
namespace {

constexpr double kPi = std::numbers::pi;

struct Bracket {
  double lo;
  double hi;
  double f_lo;
  double f_hi;
};

double refine(const std::function<double(double)>& fn, const Bracket& b, double tolerance) {
  if (b.f_lo == 0.0) return b.lo;
  if (b.f_hi == 0.0) return b.hi;
  std::uintmax_t iterations = 200;
  auto tol = [tolerance](double x, double y) { return std::abs(y - x) <= tolerance; };
  const auto [lo, hi] =
      boost::math::tools::toms748_solve(fn, b.lo, b.hi, b.f_lo, b.f_hi, tol, iterations);
  return 0.5 * (lo + hi);
}

double central_difference(const std::function<double(double)>& fn, double z, double r_max) {
  const double h = std::min(1e-6 * std::max(1.0, r_max), 0.5 * z);
  return (fn(z + h) - fn(z - h)) / (2.0 * h);
}

std::vector<double> chebyshev_points(double lo, double hi, int count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  for (int k = 0; k < count; ++k) {
    out[static_cast<std::size_t>(k)] = mid + half * std::cos(kPi * (k + 0.5) / count);
  }
  std::sort(out.begin(), out.end());
  return out;
}

double dot(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * y[k];
  return s;
}

std::function<double(double)> family_function(const LinearFamily& family,
                                              std::vector<double> coeffs) {
  return [sample = family.sample, c = std::move(coeffs)](double r) { return dot(sample(r), c); };
}

void check_targets(const std::vector<double>& targets, int family_size, double r_max) {
  if (static_cast<int>(targets.size()) > family_size - 1) {
    std::ostringstream msg;
    msg << "place_zeros: " << targets.size() << " targets but only " << family_size - 1
        << " can be placed";
    throw std::invalid_argument(msg.str());
  }
  for (std::size_t k = 0; k < targets.size(); ++k) {
    if (!(targets[k] > 0.0) || !(targets[k] < r_max)) {
      throw std::invalid_argument("place_zeros: targets must lie in (0, r_max)");
    }
    if (k > 0 && !(targets[k] > targets[k - 1])) {
      throw std::invalid_argument("place_zeros: targets must be strictly increasing");
    }
  }
}

double max_on_grid(const std::function<double(double)>& fn, double r_max, int points) {
  double m = 0.0;
  for (int k = 1; k <= points; ++k) m = std::max(m, std::abs(fn(r_max * k / points)));
  return m;
}

SmoothExpansion scaled(SmoothExpansion e, double factor) {
  for (double& v : e.alpha) v *= factor;
  for (double& v : e.beta) v *= factor;
  return e;
}

SmoothExpansion& add_scaled(SmoothExpansion& dst, const SmoothExpansion& src, double factor) {
  for (std::size_t k = 0; k < dst.alpha.size(); ++k) dst.alpha[k] += factor * src.alpha[k];
  for (std::size_t k = 0; k < dst.beta.size(); ++k) dst.beta[k] += factor * src.beta[k];
  return dst;
}

std::vector<double> to_vector(const BasisExpansion& e) {
  std::vector<double> v(e.coeff_A);
  v.insert(v.end(), e.coeff_B.begin(), e.coeff_B.end());
  v.insert(v.end(), e.coeff_poly.begin(), e.coeff_poly.end());
  return v;
}

PerturbationSpec random_pert(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  PerturbationSpec p(n);
  for (auto* t : {&p.plus_f, &p.plus_g, &p.minus_f, &p.minus_g}) {
    t->for_each([&](int, int, double& v) { v = u(rng); });
  }
  return p;
}

std::vector<double> random_targets(int count, double r_max, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.02 * r_max, 0.98 * r_max);
  std::vector<double> t(static_cast<std::size_t>(count));
  for (double& v : t) v = u(rng);
  std::sort(t.begin(), t.end());
  return t;
}

void record(SearchSummary& s, int draw, int count) {
  ++s.histogram[count];
  s.max_count = std::max(s.max_count, count);
  if (count > s.bound) s.exceeding.push_back(draw);
}

// Value of a generator at r given the kernel values, and the sum of the
// magnitudes of its terms (the scale that roundoff is relative to).
template <class Real>
struct Term {
  Real value;
  Real magnitude;
};

template <class Real>
Term<Real> generator_term(const Generator& g, const Real& r, const Real& A, const Real& B,
                          const Real& a, const Real& b, const Real& pi) {
  using std::abs;
  using std::pow;
  const Real rp = pow(r, g.power);
  switch (g.kind) {
    case GeneratorKind::monomial:
      return {rp, abs(rp)};
    case GeneratorKind::kernel_a:
      if (g.power == 0) return {A - pi / (a * a), abs(A) + pi / (a * a)};
      return {rp * A, abs(rp * A)};
    case GeneratorKind::kernel_b:
      if (g.power == 0) return {B - pi / (b * b), abs(B) + pi / (b * b)};
      return {rp * B, abs(rp * B)};
    case GeneratorKind::tied_a: {
      const Real low = 2 / a * pow(r, g.power - 1);
      return {rp * A - low, abs(rp * A) + abs(low)};
    }
    case GeneratorKind::tied_b: {
      const Real low = 2 / b * pow(r, g.power - 1);
      return {rp * B + low, abs(rp * B) + abs(low)};
    }
  }
  return {Real(0), Real(0)};
}

template <class Sampler>
IndependenceResult extended_independence(int size, double r_max, Sampler&& sample) {
  using Matrix = Eigen::Matrix<Extended, Eigen::Dynamic, Eigen::Dynamic>;
  const int rows = 4 * size;
  const Extended lo = Extended(r_max) / 100;
  const Extended hi(r_max);
  const Extended pi = boost::math::constants::pi<Extended>();
  Matrix m(rows, size);
  for (int k = 0; k < rows; ++k) {
    const Extended r = (lo + hi) / 2 + (hi - lo) / 2 * cos(pi * (k + Extended(0.5)) / rows);
    const auto values = sample(r);
    for (int l = 0; l < size; ++l) m(k, l) = values[static_cast<std::size_t>(l)];
  }
  for (int l = 0; l < size; ++l) m.col(l) /= m.col(l).norm();
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  IndependenceResult out;
  out.size = size;
  const Extended tol = s(0) * Extended(std::max(rows, size)) * Extended(1e-40);
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    out.singular_values.push_back(static_cast<double>(s(k)));
    if (s(k) > tol) ++out.rank;
  }
  out.min_singular_value = out.singular_values.back();
  return out;
}

}  // namespace

int hn_formula(const CountFormulaInput& input) {
  if (input.n < 1) throw std::invalid_argument("hn_formula: n must be >= 1");
  const int half = (input.n + 1) / 2;
  const bool even = input.n % 2 == 0;
  if (input.resonant) return 3 * half + (even ? 1 : -1);
  return 4 * half + (even ? 3 : 0);
}

ZeroReport count_simple_zeros(const std::function<double(double)>& fn, double r_max,
                              const ZeroSearchOptions& options) {
  if (!(r_max > 0.0) || !std::isfinite(r_max)) {
    throw std::invalid_argument("count_simple_zeros: r_max must be positive and finite");
  }
  if (options.grid < 4) throw std::invalid_argument("count_simple_zeros: grid too coarse");

  int grid = options.grid;
  for (int attempt = 0;; ++attempt, grid *= 2) {
    ZeroReport report;
    report.interval_hi = r_max;
    report.grid_resolution = grid;
    const double h = r_max / grid;

    std::vector<double> r(static_cast<std::size_t>(grid - 1));
    std::vector<double> v(r.size());
    double max_abs = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) {
      r[k] = h * static_cast<double>(k + 1);
      v[k] = fn(r[k]);
      if (!std::isfinite(v[k])) {
        std::ostringstream msg;
        msg << "count_simple_zeros: non-finite value at r = " << r[k];
        throw DomainError(msg.str());
      }
      max_abs = std::max(max_abs, std::abs(v[k]));
    }
    if (max_abs == 0.0) {
      report.degenerate = true;
      report.warnings.emplace_back("function vanishes on the whole grid");
      return report;
    }

    std::vector<Bracket> brackets;
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (v[k] == 0.0) {
        brackets.push_back({r[k], r[k], 0.0, 0.0});
      } else if (k + 1 < r.size() && v[k + 1] != 0.0 && (v[k] > 0.0) != (v[k + 1] > 0.0)) {
        brackets.push_back({r[k], r[k + 1], v[k], v[k + 1]});
      }
    }

    std::vector<double> located;
    located.reserve(brackets.size());
    for (const auto& b : brackets) located.push_back(refine(fn, b, options.tolerance));

    bool clustered = false;
    for (std::size_t k = 1; k < located.size(); ++k) {
      if (located[k] - located[k - 1] < 2.0 * h) clustered = true;
    }
    if (clustered) {
      if (attempt < options.max_doublings) continue;
      std::ostringstream msg;
      msg << "count_simple_zeros: sign changes closer than " << 2.0 * h
          << " survive grid refinement to " << grid << " points";
      throw UnresolvedClusterError(msg.str());
    }

    const double threshold = 1e-8 * (1.0 + max_abs);
    for (double z : located) {
      Zero zero{z, central_difference(fn, z, r_max), 0.0};
      if (options.noise && zero.derivative != 0.0) {
        zero.uncertainty = options.noise(z) / std::abs(zero.derivative);
      }
      if (std::abs(zero.derivative) > threshold) {
        report.zeros.push_back(zero);
      } else {
        report.non_simple.push_back(zero);
        std::ostringstream msg;
        msg << "non-simple zero at r = " << z << " (|F'| = " << std::abs(zero.derivative)
            << " <= " << threshold << ")";
        report.warnings.push_back(msg.str());
      }
    }
    return report;
  }
}

ZeroReport count_simple_zeros(const AveragedFunction& fn, double r_max,
                              const ZeroSearchOptions& options) {
  if (!(r_max > 0.0) || !(r_max < fn.params.r0())) {
    std::ostringstream msg;
    msg << "count_simple_zeros: r_max = " << r_max << " outside (0, r0 = " << fn.params.r0() << ")";
    throw DomainError(msg.str());
  }
  ZeroSearchOptions opts = options;
  if (!opts.noise) opts.noise = [&fn](double r) { return expansion_noise(fn, r); };
  return count_simple_zeros([&fn](double r) { return eval_F(fn, r); }, r_max, opts);
}

double expansion_noise(const AveragedFunction& fn, double r) {
  BasisExpansion mag = fn.expansion;
  for (auto* v : {&mag.coeff_A, &mag.coeff_B, &mag.coeff_poly}) {
    for (double& c : *v) c = std::abs(c);
  }
  const double total = combine(mag, std::abs(r), std::abs(eval_A00(r, fn.params)),
                               std::abs(eval_B00(r, fn.params)));
  return 8.0 * std::numeric_limits<double>::epsilon() * total;
}

std::vector<Generator> generator_set(const SystemParams& params, int n, GeneratingSet set) {
  if (n < 1) throw std::invalid_argument("generator_set: n must be >= 1");
  const int half = (n + 1) / 2;
  const int kernel_top = n / 2 + 1;
  const bool tie = set == GeneratingSet::realizable && n % 2 == 0;
  std::vector<Generator> out;
  auto kernels = [&](GeneratorKind plain, GeneratorKind tied) {
    for (int i = 0; i <= kernel_top; ++i) {
      out.push_back({(tie && i == kernel_top) ? tied : plain, 2 * i});
    }
  };
  kernels(GeneratorKind::kernel_a, GeneratorKind::tied_a);
  if (!params.resonant()) kernels(GeneratorKind::kernel_b, GeneratorKind::tied_b);
  for (int p = 1; p <= 2 * half - 1; ++p) out.push_back({GeneratorKind::monomial, p});
  if (n % 2 == 0 && !tie) out.push_back({GeneratorKind::monomial, 2 * half + 1});
  return out;
}

int realizable_bound(int n, bool resonant) {
  return hn_formula({n, resonant}) - (n % 2 == 0 ? 1 : 0);
}

BasisExpansion generator_expansion(const Generator& g, const SystemParams& params, int n) {
  BasisExpansion e = BasisExpansion::zero(n);
  const auto index = static_cast<std::size_t>(g.power);
  switch (g.kind) {
    case GeneratorKind::monomial:
      e.coeff_poly.at(index) = 1.0;
      break;
    case GeneratorKind::kernel_a:
      e.coeff_A.at(index / 2) = 1.0;
      if (g.power == 0) e.coeff_poly[0] = -kPi / (params.a() * params.a());
      break;
    case GeneratorKind::kernel_b:
      e.coeff_B.at(index / 2) = 1.0;
      if (g.power == 0) e.coeff_poly[0] = -kPi / (params.b() * params.b());
      break;
    case GeneratorKind::tied_a:
      e.coeff_A.at(index / 2) = 1.0;
      e.coeff_poly.at(index - 1) = -2.0 / params.a();
      break;
    case GeneratorKind::tied_b:
      e.coeff_B.at(index / 2) = 1.0;
      e.coeff_poly.at(index - 1) = 2.0 / params.b();
      break;
  }
  return e;
}

std::string describe(const Generator& g) {
  std::ostringstream out;
  switch (g.kind) {
    case GeneratorKind::monomial:
      out << "r^" << g.power;
      break;
    case GeneratorKind::kernel_a:
      if (g.power == 0) {
        out << "A00-pi/a^2";
      } else {
        out << "r^" << g.power << "*A00";
      }
      break;
    case GeneratorKind::kernel_b:
      if (g.power == 0) {
        out << "B00-pi/b^2";
      } else {
        out << "r^" << g.power << "*B00";
      }
      break;
    case GeneratorKind::tied_a:
      out << "r^" << g.power << "*A00-(2/a)r^" << g.power - 1;
      break;
    case GeneratorKind::tied_b:
      out << "r^" << g.power << "*B00+(2/b)r^" << g.power - 1;
      break;
  }
  return out.str();
}

LinearFamily piecewise_family(const SystemParams& params, int n, double r_max,
                              GeneratingSet set) {
  if (r_max <= 0.0) r_max = params.default_search_bound();
  std::vector<BasisExpansion> units;
  for (const auto& g : generator_set(params, n, set)) units.push_back(generator_expansion(g, params, n));
  LinearFamily family;
  family.size = static_cast<int>(units.size());
  family.r_max = r_max;
  family.sample = [params, units = std::move(units)](double r) {
    const double A = eval_A00(r, params);
    const double B = eval_B00(r, params);
    std::vector<double> out;
    out.reserve(units.size());
    for (const auto& u : units) out.push_back(combine(u, r, A, B));
    return out;
  };
  return family;
}

int smooth_generator_count(int n) {
  if (n < 1) throw std::invalid_argument("smooth_generator_count: n must be >= 1");
  return 1 + (n / 2 + 1) + (n - 1) / 2;
}

SmoothExpansion smooth_generator_expansion(double a, int n, int index) {
  SmoothExpansion e = SmoothExpansion::zero(n);
  const int kernel_top = n / 2 + 1;
  if (index < 0 || index >= smooth_generator_count(n)) {
    throw IndexError("smooth_generator_expansion: index out of range");
  }
  if (index == 0) {
    e.alpha[0] = 1.0;
    e.beta[0] = -2.0 * kPi / (a * a);
  } else if (index <= kernel_top) {
    e.alpha.at(static_cast<std::size_t>(index)) = 1.0;
  } else {
    e.beta.at(static_cast<std::size_t>(index - kernel_top)) = 1.0;
  }
  return e;
}

LinearFamily smooth_family(double a, int n, double r_max) {
  if (r_max <= 0.0) r_max = (1.0 - 1e-3) * std::abs(a);
  if (r_max >= std::abs(a)) throw DomainError("smooth_family: r_max must be below |a|");
  std::vector<SmoothExpansion> units;
  for (int k = 0; k < smooth_generator_count(n); ++k) units.push_back(smooth_generator_expansion(a, n, k));
  LinearFamily family;
  family.size = static_cast<int>(units.size());
  family.r_max = r_max;
  family.sample = [a, units = std::move(units)](double r) {
    std::vector<double> out;
    out.reserve(units.size());
    for (const auto& u : units) out.push_back(eval_smooth(a, u, r));
    return out;
  };
  return family;
}

std::vector<double> place_in_family(const LinearFamily& family, const std::vector<double>& targets,
                                    const PlacementOptions& options) {
  const int m = family.size;
  const int p = static_cast<int>(targets.size());
  const double r_max = family.r_max;
  check_targets(targets, m, r_max);

  if (p == 0) {
    std::vector<double> c(static_cast<std::size_t>(m), 0.0);
    c[0] = 1.0;
    return c;
  }

  constexpr int kScalePoints = 256;
  std::vector<double> scale(static_cast<std::size_t>(m), 0.0);
  for (int k = 1; k <= kScalePoints; ++k) {
    const auto values = family.sample(r_max * k / kScalePoints);
    for (std::size_t l = 0; l < scale.size(); ++l) scale[l] = std::max(scale[l], std::abs(values[l]));
  }

  Eigen::MatrixXd mat(p, m);
  for (int row = 0; row < p; ++row) {
    const auto values = family.sample(targets[static_cast<std::size_t>(row)]);
    for (int l = 0; l < m; ++l) mat(row, l) = values[static_cast<std::size_t>(l)] / scale[static_cast<std::size_t>(l)];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(mat, Eigen::ComputeFullV);
  const auto& sigma = svd.singularValues();
  const double condition = sigma(p - 1) > 0.0 ? sigma(0) / sigma(p - 1) : std::numeric_limits<double>::infinity();
  if (!(condition <= options.max_condition)) {
    std::ostringstream msg;
    msg << "place_zeros: interpolation matrix condition number " << condition << " exceeds "
        << options.max_condition;
    throw RankDeficiencyError(msg.str());
  }
  const Eigen::MatrixXd null_space = svd.matrixV().rightCols(m - p);

  auto unscale = [&](const Eigen::VectorXd& w) {
    std::vector<double> c(static_cast<std::size_t>(m));
    for (int l = 0; l < m; ++l) c[static_cast<std::size_t>(l)] = w(l) / scale[static_cast<std::size_t>(l)];
    return c;
  };
  if (null_space.cols() == 1) return unscale(null_space.col(0));

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal;
  ZeroSearchOptions search;
  search.grid = options.grid;
  std::vector<double> best;
  bool best_clean = false;
  double best_ratio = -1.0;
  for (int cand = 0; cand < std::max(1, options.candidates); ++cand) {
    Eigen::VectorXd w(null_space.cols());
    for (Eigen::Index k = 0; k < w.size(); ++k) w(k) = normal(rng);
    auto c = unscale(null_space * w.normalized());
    const auto fn = family_function(family, c);
    bool clean = false;
    try {
      const auto report = count_simple_zeros(fn, r_max, search);
      clean = report.count() == targets.size() && report.non_simple.empty();
    } catch (const UnresolvedClusterError&) {
      continue;
    }
    const double peak = max_on_grid(fn, r_max, search.grid);
    double ratio = std::numeric_limits<double>::infinity();
    for (double t : targets) ratio = std::min(ratio, std::abs(central_difference(fn, t, r_max)) / peak);
    if (best.empty() || (clean && !best_clean) || (clean == best_clean && ratio > best_ratio)) {
      best = std::move(c);
      best_clean = clean;
      best_ratio = ratio;
    }
  }
  if (best.empty()) throw UnresolvedClusterError("place_zeros: every candidate had clustered zeros");
  return best;
}

BasisExpansion place_zeros(const SystemParams& params, int n, const std::vector<double>& targets,
                           const PlacementOptions& options) {
  return place_zeros_extended(params, n, targets, options).expansion();
}

SmoothExpansion place_smooth_zeros(double a, int n, const std::vector<double>& targets,
                                   const PlacementOptions& options) {
  const auto family = smooth_family(a, n, options.r_max);
  const auto c = place_in_family(family, targets, options);
  SmoothExpansion e = SmoothExpansion::zero(n);
  for (int l = 0; l < family.size; ++l) {
    add_scaled(e, smooth_generator_expansion(a, n, l), c[static_cast<std::size_t>(l)]);
  }
  const double peak = max_on_grid([&](double r) { return eval_smooth(a, e, r); }, family.r_max, options.grid);
  return scaled(e, 1.0 / peak);
}

PlacedMember::PlacedMember(const SystemParams& params, int n, GeneratingSet set,
                           std::vector<Extended> coeffs)
    : params_(params),
      n_(n),
      gens_(generator_set(params, n, set)),
      coeffs_(std::move(coeffs)),
      a_(params.a()),
      b_(params.b()),
      pi_(boost::math::constants::pi<Extended>()) {
  if (coeffs_.size() != gens_.size()) {
    throw std::invalid_argument("PlacedMember: one coefficient per generator required");
  }
  scale(Extended(1));
}

void PlacedMember::scale(const Extended& factor) {
  rounded_.clear();
  for (auto& c : coeffs_) {
    c *= factor;
    rounded_.push_back(static_cast<double>(c));
  }
}

double PlacedMember::operator()(double r) const {
  const double A = eval_A00(r, params_);
  const double B = eval_B00(r, params_);
  double value = 0.0;
  double magnitude = 0.0;
  for (std::size_t l = 0; l < gens_.size(); ++l) {
    const auto t = generator_term(gens_[l], r, A, B, params_.a(), params_.b(), kPi);
    value += rounded_[l] * t.value;
    magnitude += std::abs(rounded_[l]) * t.magnitude;
  }
  if (std::abs(value) > 1e-11 * magnitude) return value;
  return evaluate_extended(r);
}

double PlacedMember::evaluate_extended(double r) const {
  const Extended er(r);
  const Extended A = eval_A00_extended(er, a_);
  const Extended B = eval_B00_extended(er, b_);
  Extended value = 0;
  for (std::size_t l = 0; l < gens_.size(); ++l) {
    value += coeffs_[l] * generator_term(gens_[l], er, A, B, a_, b_, pi_).value;
  }
  return static_cast<double>(value);
}

BasisExpansion PlacedMember::expansion() const {
  BasisExpansion e = BasisExpansion::zero(n_);
  for (std::size_t l = 0; l < gens_.size(); ++l) {
    e += rounded_[l] * generator_expansion(gens_[l], params_, n_);
  }
  return e;
}

PlacedMember place_zeros_extended(const SystemParams& params, int n,
                                  const std::vector<double>& targets,
                                  const PlacementOptions& options) {
  using Matrix = Eigen::Matrix<Extended, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Extended, Eigen::Dynamic, 1>;
  const double r_max = options.r_max > 0.0 ? options.r_max : params.default_search_bound();
  if (!(r_max < params.r0())) throw DomainError("place_zeros: r_max must be below r0");
  const auto family = piecewise_family(params, n, r_max, options.set);
  const auto gens = generator_set(params, n, options.set);
  const int m = family.size;
  const int p = static_cast<int>(targets.size());
  check_targets(targets, m, r_max);

  auto normalized = [&](std::vector<Extended> c) {
    PlacedMember member(params, n, options.set, std::move(c));
    double peak = 0.0;
    for (int k = 1; k <= options.grid; ++k) peak = std::max(peak, std::abs(member(r_max * k / options.grid)));
    member.scale(Extended(1) / Extended(peak));
    return member;
  };
  if (p == 0) {
    std::vector<Extended> c(static_cast<std::size_t>(m), Extended(0));
    c[0] = 1;
    return normalized(std::move(c));
  }

  constexpr int kScalePoints = 256;
  std::vector<double> scale(static_cast<std::size_t>(m), 0.0);
  for (int k = 1; k <= kScalePoints; ++k) {
    const auto values = family.sample(r_max * k / kScalePoints);
    for (std::size_t l = 0; l < scale.size(); ++l) scale[l] = std::max(scale[l], std::abs(values[l]));
  }

  const Extended a(params.a());
  const Extended b(params.b());
  const Extended pi = boost::math::constants::pi<Extended>();
  Matrix mat(p, m);
  for (int row = 0; row < p; ++row) {
    const Extended r(targets[static_cast<std::size_t>(row)]);
    const Extended A = eval_A00_extended(r, a);
    const Extended B = eval_B00_extended(r, b);
    for (int l = 0; l < m; ++l) {
      mat(row, l) = generator_term(gens[static_cast<std::size_t>(l)], r, A, B, a, b, pi).value /
                    scale[static_cast<std::size_t>(l)];
    }
  }
  Eigen::JacobiSVD<Matrix> svd(mat, Eigen::ComputeFullV);
  const auto& sigma = svd.singularValues();
  const double condition = sigma(p - 1) > 0 ? static_cast<double>(sigma(0) / sigma(p - 1))
                                            : std::numeric_limits<double>::infinity();
  if (!(condition <= options.max_condition_extended)) {
    std::ostringstream msg;
    msg << "place_zeros: interpolation matrix condition number " << condition << " exceeds "
        << options.max_condition_extended;
    throw RankDeficiencyError(msg.str());
  }
  const Matrix null_space = svd.matrixV().rightCols(m - p);
  auto unscale = [&](const Vector& w) {
    std::vector<Extended> c(static_cast<std::size_t>(m));
    for (int l = 0; l < m; ++l) c[static_cast<std::size_t>(l)] = w(l) / scale[static_cast<std::size_t>(l)];
    return c;
  };
  if (null_space.cols() == 1) return normalized(unscale(null_space.col(0)));

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal;
  ZeroSearchOptions search;
  search.grid = options.grid;
  std::optional<PlacedMember> best;
  bool best_clean = false;
  double best_ratio = -1.0;
  for (int cand = 0; cand < std::max(1, options.candidates); ++cand) {
    Vector w(null_space.cols());
    for (Eigen::Index k = 0; k < w.size(); ++k) w(k) = normal(rng);
    auto member = normalized(unscale(null_space * w));
    bool clean = false;
    try {
      const auto report = count_simple_zeros(std::cref(member), r_max, search);
      clean = report.count() == targets.size() && report.non_simple.empty();
    } catch (const UnresolvedClusterError&) {
      continue;
    }
    double ratio = std::numeric_limits<double>::infinity();
    for (double t : targets) {
      ratio = std::min(ratio, std::abs(central_difference(std::cref(member), t, r_max)));
    }
    if (!best || (clean && !best_clean) || (clean == best_clean && ratio > best_ratio)) {
      best = std::move(member);
      best_clean = clean;
      best_ratio = ratio;
    }
  }
  if (!best) throw UnresolvedClusterError("place_zeros: every candidate had clustered zeros");
  return *best;
}

int numerical_rank(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  const double tol = s(0) * static_cast<double>(std::max(m.rows(), m.cols())) *
                     std::numeric_limits<double>::epsilon();
  int rank = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k) rank += s(k) > tol ? 1 : 0;
  return rank;
}

Eigen::MatrixXd sample_generators(const LinearFamily& family, int rows) {
  const auto points = chebyshev_points(family.r_max / 100.0, family.r_max, rows);
  Eigen::MatrixXd out(rows, family.size);
  for (int k = 0; k < rows; ++k) {
    const auto values = family.sample(points[static_cast<std::size_t>(k)]);
    for (int l = 0; l < family.size; ++l) out(k, l) = values[static_cast<std::size_t>(l)];
  }
  return out;
}

IndependenceResult independence_of(const Eigen::MatrixXd& samples) {
  Eigen::MatrixXd normalized = samples;
  for (Eigen::Index l = 0; l < normalized.cols(); ++l) {
    const double norm = normalized.col(l).norm();
    if (norm > 0.0) normalized.col(l) /= norm;
  }
  IndependenceResult out;
  out.size = static_cast<int>(samples.cols());
  out.rank = numerical_rank(normalized);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(normalized);
  const auto& s = svd.singularValues();
  out.singular_values.assign(s.data(), s.data() + s.size());
  out.min_singular_value = s.size() > 0 ? s(s.size() - 1) : 0.0;
  return out;
}

IndependenceResult independence_check(const SystemParams& params, int n, double r_max) {
  if (!(r_max > 0.0) || !(r_max < params.r0())) {
    throw DomainError("independence_check: r_max must lie in (0, r0)");
  }
  const auto gens = generator_set(params, n);
  const Extended a(params.a());
  const Extended b(params.b());
  const Extended pi = boost::math::constants::pi<Extended>();
  return extended_independence(static_cast<int>(gens.size()), r_max, [&](const Extended& r) {
    const Extended A = eval_A00_extended(r, a);
    const Extended B = eval_B00_extended(r, b);
    std::vector<Extended> out;
    for (const auto& g : gens) out.push_back(generator_term(g, r, A, B, a, b, pi).value);
    return out;
  });
}

IndependenceResult smooth_independence_check(double a, int n, double r_max) {
  if (!(r_max > 0.0) || !(r_max < std::abs(a))) {
    throw DomainError("smooth_independence_check: r_max must lie in (0, |a|)");
  }
  const Extended ea(a);
  const Extended two_pi = 2 * boost::math::constants::pi<Extended>();
  const int kernel_top = n / 2 + 1;
  return extended_independence(smooth_generator_count(n), r_max, [&](const Extended& r) {
    const Extended V = eval_A00_extended(r, ea) + eval_A00_extended(-r, ea);
    std::vector<Extended> out{V - two_pi / (ea * ea)};
    for (int i = 1; i <= kernel_top; ++i) out.push_back(pow(r, 2 * i) * V);
    for (int i = 1; i <= (n - 1) / 2; ++i) out.push_back(pow(r, 2 * i));
    return out;
  });
}

SmoothRankResult smooth_coefficient_rank(double a, int n) {
  SmoothPerturbationSpec probe(n);
  const auto zero = SmoothExpansion::zero(n);
  SmoothRankResult out;
  out.generators = smooth_generator_count(n);
  out.alpha_size = static_cast<int>(zero.alpha.size());
  out.beta_size = static_cast<int>(zero.beta.size());
  Eigen::MatrixXd m(out.alpha_size + out.beta_size, static_cast<Eigen::Index>(2 * probe.f.size()));
  Eigen::Index col = 0;
  for (auto* table : {&probe.f, &probe.g}) {
    table->for_each([&](int, int, double& v) {
      v = 1.0;
      const auto e = assemble_smooth(a, probe);
      v = 0.0;
      Eigen::Index row = 0;
      for (double c : e.alpha) m(row++, col) = c;
      for (double c : e.beta) m(row++, col) = c;
      ++col;
    });
  }
  out.rank = numerical_rank(m);
  return out;
}

SurjectivityResult coefficient_surjectivity_check(const SystemParams& params, int n) {
  const PerturbationSpec shape(n);
  const std::size_t columns = shape.flatten().size();
  const int half = (n + 1) / 2;

  struct Row {
    char vec;  // 'a', 'b', 'c' or 'd'
    int index;
  };
  std::vector<Row> rows;
  const int kernel_top = n % 2 == 1 ? half : half + 1;
  for (char kernel : {'a', 'c'}) {
    const char mono = kernel == 'a' ? 'b' : 'd';
    for (int i = 0; i <= kernel_top; ++i) rows.push_back({kernel, i});
    for (int k = 1; k <= 2 * half - 1; ++k) rows.push_back({mono, k});
    if (n % 2 == 0) rows.push_back({mono, 2 * half + 1});
  }

  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(columns));
  std::vector<double> unit(columns, 0.0);
  for (std::size_t col = 0; col < columns; ++col) {
    unit[col] = 1.0;
    const auto ex = assemble_exact(params, PerturbationSpec::unflatten(n, unit));
    unit[col] = 0.0;
    for (std::size_t row = 0; row < rows.size(); ++row) {
      const auto& src = rows[row].vec == 'a' ? ex.a : rows[row].vec == 'b' ? ex.b : rows[row].vec == 'c' ? ex.c : ex.d;
      m(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) =
          src.at(static_cast<std::size_t>(rows[row].index)).to_double();
    }
  }

  SurjectivityResult out;
  out.rank = numerical_rank(m);
  out.expected = static_cast<int>(rows.size());
  for (const auto& r : rows) out.claimed.push_back(std::string(1, r.vec) + "_" + std::to_string(r.index));
  return out;
}

Eigen::MatrixXd expansion_map(const SystemParams& params, int n) {
  const std::size_t columns = PerturbationSpec(n).flatten().size();
  const std::size_t rows = to_vector(BasisExpansion::zero(n)).size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(columns));
  std::vector<double> unit(columns, 0.0);
  for (std::size_t col = 0; col < columns; ++col) {
    unit[col] = 1.0;
    const auto v = to_vector(assemble(params, PerturbationSpec::unflatten(n, unit)).expansion);
    unit[col] = 0.0;
    for (std::size_t row = 0; row < rows; ++row) {
      m(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = v[row];
    }
  }
  return m;
}

Realization realize_perturbation(const SystemParams& params, const BasisExpansion& target,
                                 double null_weight, std::uint64_t seed) {
  const Eigen::MatrixXd m = expansion_map(params, target.degree);
  const auto t = to_vector(target);
  const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(t.data(), static_cast<Eigen::Index>(t.size()));
  Eigen::VectorXd p = m.completeOrthogonalDecomposition().solve(rhs);
  if (null_weight != 0.0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
    const int rank = numerical_rank(m);
    const Eigen::MatrixXd null_space = svd.matrixV().rightCols(m.cols() - rank);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Eigen::VectorXd w(null_space.cols());
    for (Eigen::Index k = 0; k < w.size(); ++k) w(k) = normal(rng);
    p += null_weight * p.norm() * (null_space * w).normalized();
  }
  Realization out{PerturbationSpec(target.degree), 0.0};
  const double norm = rhs.norm();
  out.residual = norm > 0.0 ? (m * p - rhs).norm() / norm : 0.0;
  const double peak = p.cwiseAbs().maxCoeff();
  std::vector<double> values(p.data(), p.data() + p.size());
  if (peak > 0.0) {
    for (double& v : values) v /= peak;
  }
  out.pert = PerturbationSpec::unflatten(target.degree, values);
  return out;
}

SearchSummary random_search(const SystemParams& params, int n, int draws, std::uint64_t seed,
                            double r_max, int grid) {
  if (r_max <= 0.0) r_max = params.default_search_bound();
  SearchSummary s;
  s.bound = hn_formula({n, params.resonant()});
  const int realizable_targets = realizable_bound(n, params.resonant());
  std::mt19937_64 rng(seed);
  ZeroSearchOptions search;
  search.grid = grid;
  PlacementOptions placement;
  placement.grid = grid;
  placement.r_max = r_max;
  for (int d = 0; d < draws; ++d) {
    ++s.draws;
    try {
      std::function<double(double)> fn;
      switch (d % 3) {
        case 0:
          fn = [f = assemble(params, random_pert(n, rng))](double r) { return eval_F(f, r); };
          break;
        case 1:
          placement.set = GeneratingSet::lemma;
          fn = place_zeros_extended(params, n, random_targets(s.bound, r_max, rng), placement);
          break;
        default:
          placement.set = GeneratingSet::realizable;
          fn = place_zeros_extended(params, n, random_targets(realizable_targets, r_max, rng), placement);
          break;
      }
      const int count = static_cast<int>(count_simple_zeros(fn, r_max, search).count());
      record(s, d, count);
      if (d % 3 != 1) s.max_realizable_count = std::max(s.max_realizable_count, count);
    } catch (const RankDeficiencyError&) {
      ++s.skipped;
    } catch (const UnresolvedClusterError&) {
      ++s.skipped;
    }
  }
  return s;
}

SearchSummary random_smooth_search(double a, int n, int draws, std::uint64_t seed, double r_max,
                                   int grid) {
  const auto family = smooth_family(a, n, r_max);
  r_max = family.r_max;
  SearchSummary s;
  s.bound = n;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ZeroSearchOptions search;
  search.grid = grid;
  PlacementOptions placement;
  placement.grid = grid;
  placement.r_max = r_max;
  for (int d = 0; d < draws; ++d) {
    ++s.draws;
    try {
      std::function<double(double)> fn;
      if (d % 2 == 0) {
        SmoothPerturbationSpec p(n);
        p.f.for_each([&](int, int, double& v) { v = u(rng); });
        p.g.for_each([&](int, int, double& v) { v = u(rng); });
        fn = [a, e = assemble_smooth(a, p)](double r) { return eval_smooth(a, e, r); };
      } else {
        fn = family_function(family, place_in_family(family, random_targets(n, r_max, rng), placement));
      }
      record(s, d, static_cast<int>(count_simple_zeros(fn, r_max, search).count()));
    } catch (const RankDeficiencyError&) {
      ++s.skipped;
    } catch (const UnresolvedClusterError&) {
      ++s.skipped;
    }
  }
  return s;
}

}  // namespace pwc
