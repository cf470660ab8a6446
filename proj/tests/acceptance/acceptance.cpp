// Acceptance run: one PASS/FAIL line per criterion, tolerances pinned below.
//
// Criteria 5 and 7 are known not to hold as stated (see README, "Known
// results"); they print FAIL with the measured values, and the exit status
// is nonzero only when some other criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pwc/averaged_function.hpp"
#include "pwc/errors.hpp"
#include "pwc/kernel_integrals.hpp"
#include "pwc/poincare_sim.hpp"
#include "pwc/quadrature.hpp"
#include "pwc/smooth_case.hpp"
#include "pwc/zero_analysis.hpp"

using namespace pwc;

namespace {

constexpr double kPi = std::numbers::pi;

// criterion 1
constexpr int kKernelCases = 500;
constexpr double kKernelRel = 1e-9;
constexpr double kKernelSeconds = 10.0;
// criterion 2
constexpr double kOde1 = 1e-8;
constexpr double kOde2 = 1e-6;
constexpr double kAnchorRel = 1e-12;
// criterion 3
constexpr int kPipelineCases = 100;
constexpr double kPipelineRel = 1e-8;
// criterion 4
constexpr int kSearchDraws = 500;
constexpr double kHnSeconds = 300.0;
// criterion 5
constexpr double kEpsilon = 1e-3;
constexpr double kOffsetFactor = 10.0;
constexpr double kSlopeTol = 0.2;
constexpr double kDynamicsSeconds = 600.0;
// criterion 6
constexpr int kSmoothDraws = 200;
// criterion 7
constexpr double kMinSingular = 1e-10;
// criterion 8
constexpr int kCrossCases = 20;
constexpr double kCrossAbs = 1e-8;
constexpr double kDriftPerRevolution = 1e-10;

const std::set<int> kKnownUnattainable = {5, 7};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

PerturbationSpec random_pert(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  PerturbationSpec p(n);
  for (auto* t : {&p.plus_f, &p.plus_g, &p.minus_f, &p.minus_g}) {
    t->for_each([&](int, int, double& v) { v = u(rng); });
  }
  return p;
}

SystemParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mag(0.3, 3.0);
  std::bernoulli_distribution sign(0.5);
  const double a = sign(rng) ? mag(rng) : -mag(rng);
  const double b = sign(rng) ? mag(rng) : -mag(rng);
  return SystemParams(a, b);
}

// r inside the analyticity domain of both kernels, away from the poles
double random_radius(std::mt19937_64& rng, double a, double b) {
  double lo = -4.0 * std::max(std::abs(a), std::abs(b));
  double hi = -lo;
  if (a > 0) lo = std::max(lo, -0.9 * a);
  if (a < 0) hi = std::min(hi, -0.9 * a);
  if (b > 0) hi = std::min(hi, 0.9 * b);
  if (b < 0) lo = std::max(lo, 0.9 * b);
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::vector<double> geomspace(double lo, double hi, int count) {
  std::vector<double> out;
  for (int k = 0; k < count; ++k) out.push_back(lo * std::pow(hi / lo, double(k) / (count - 1)));
  return out;
}

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> out;
  for (int k = 0; k < count; ++k) out.push_back(lo + (hi - lo) * k / (count - 1));
  return out;
}

// ------------------------------------------------------------------ 1

Outcome kernel_correctness() {
  const auto start = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> index(0, 8);
  std::uniform_int_distribution<int> family(0, 3);
  double worst = 0.0;
  double odd_worst = 0.0;
  for (int k = 0; k < kKernelCases; ++k) {
    const auto p = random_params(rng);
    const double r = random_radius(rng, p.a(), p.b());
    const IntegralFamilyIndex idx{static_cast<Family>(family(rng)), index(rng), index(rng)};
    const double want = quad_oracle(family_integrand(idx, r, p), family_interval(idx.family));
    const double got = eval_family(idx, r, p);
    if (idx.j % 2 == 1) {
      odd_worst = std::max(odd_worst, std::abs(got - want));
    } else {
      worst = std::max(worst, std::abs(got - want) / std::abs(want));
    }
    const double a00 = quad_oracle(TrigRationalIntegrand{0, 0, r, p.a(), 2}, {-kPi / 2, kPi / 2});
    const double b00 = quad_oracle(TrigRationalIntegrand{0, 0, r, p.b(), 2}, {kPi / 2, 3 * kPi / 2});
    worst = std::max(worst, std::abs(eval_A00(r, p) - a00) / a00);
    worst = std::max(worst, std::abs(eval_B00(r, p) - b00) / b00);
  }
  const double elapsed = seconds_since(start);
  Outcome out;
  out.pass = worst < kKernelRel && odd_worst < 1e-12 && elapsed < kKernelSeconds;
  out.detail = std::to_string(kKernelCases) + " cases (i, j <= 8, random a, b, r): max rel error " + fmt(worst) +
               " (tol " + fmt(kKernelRel) + "), odd-j max abs " + fmt(odd_worst) + ", " + fmt(elapsed) +
               " s (limit " + fmt(kKernelSeconds) + " s)";
  return out;
}

// ------------------------------------------------------------------ 2

Outcome ode_residuals() {
  double first = 0.0;
  double second = 0.0;
  double anchor = 0.0;
  for (double a : {1.0, 2.0, -1.0, -3.0, 0.5}) {
    const SystemParams p(a, 1.0);
    // central differences degrade against the pole at r = -a
    const double lo = a > 0 ? -0.75 * a : 4.0 * a;
    const double hi = a > 0 ? 4.0 * a : -0.75 * a;
    for (int k = 0; k < 200; ++k) {
      const double r = lo + (hi - lo) * (k + 0.5) / 200.0;
      const double A = eval_A00(r, p);
      const double h = 1e-6 * std::max(1.0, std::abs(r));
      const double d1 = (eval_A00(r + h, p) - eval_A00(r - h, p)) / (2 * h);
      first = std::max(first, std::abs(a * (a * a - r * r) * d1 - 3 * a * r * A + 4));
      const double h2 = 1e-3 * std::max(1.0, std::abs(r));
      const double f2m = eval_A00(r - 2 * h2, p), f1m = eval_A00(r - h2, p);
      const double f1p = eval_A00(r + h2, p), f2p = eval_A00(r + 2 * h2, p);
      const double d2 = (-f2p + 16 * f1p - 30 * A + 16 * f1m - f2m) / (12 * h2 * h2);
      const double d1b = (-f2p + 8 * f1p - 8 * f1m + f2m) / (12 * h2);
      second = std::max(second, std::abs((a * a - r * r) * d2 - 5 * r * d1b - 3 * A));
    }
    const double want = 4.0 / (3.0 * a * a);
    anchor = std::max(anchor, std::abs(eval_A00(a, p) - want) / want);
  }
  Outcome out;
  out.pass = first < kOde1 && second < kOde2 && anchor < kAnchorRel;
  out.detail = "a in {1, 2, -1, -3, 0.5}, 200 points each: first-order residual " + fmt(first) + " (tol " +
               fmt(kOde1) + "), second-order " + fmt(second) + " (tol " + fmt(kOde2) + "), A00(a; a) rel error " +
               fmt(anchor) + " (tol " + fmt(kAnchorRel) + ")";
  return out;
}

// ------------------------------------------------------------------ 3

Outcome pipeline_equivalence() {
  std::mt19937_64 rng(303);
  double worst = 0.0;
  int structural = 0;
  for (int k = 0; k < kPipelineCases; ++k) {
    const int n = 1 + k % 6;
    const auto params = random_params(rng);
    const auto pert = random_pert(n, rng);
    const double hi = std::isfinite(params.r0()) ? 0.9 * params.r0()
                                                 : 3.0 * std::max(std::abs(params.a()), std::abs(params.b()));
    const double r = std::uniform_real_distribution<double>(0.02 * hi, hi)(rng);

    const auto ex = assemble_exact(params, pert);
    const auto a = PiRational::from_double(params.a());
    const auto b = PiRational::from_double(params.b());
    const std::size_t top = static_cast<std::size_t>(2 * ((n + 1) / 2));
    const bool ok = (ex.a[0] * PiRational::pi() + a * a * ex.b[0]).is_zero() &&
                    (ex.c[0] * PiRational::pi() + b * b * ex.d[0]).is_zero() &&
                    (top >= ex.b.size() || ex.b[top].is_zero()) && (top >= ex.d.size() || ex.d[top].is_zero());
    if (!ok) ++structural;

    const double want = oracle_F(params, pert, r);
    const double got = eval_F(assemble(params, pert), r);
    worst = std::max(worst, std::abs(got - want) / (1.0 + std::abs(want)));
  }
  Outcome out;
  out.pass = worst < kPipelineRel && structural == 0;
  out.detail = std::to_string(kPipelineCases) + " random perturbations, n <= 6: max |F - oracle| / (1 + |oracle|) " +
               fmt(worst) + " (tol " + fmt(kPipelineRel) + "); exact structural identities violated in " +
               std::to_string(structural) + " cases";
  return out;
}

// ------------------------------------------------------------------ 4

Outcome hn_attainability() {
  const auto start = Clock::now();
  const double r_max = 5.0;
  std::ostringstream detail;
  bool pass = true;
  for (const auto& params : {SystemParams(1.0, -2.0), SystemParams(1.0, -1.0)}) {
    detail << (params.resonant() ? "resonant" : "a=1 b=-2") << " {";
    for (int n = 1; n <= 4; ++n) {
      const int H = hn_formula({n, params.resonant()});
      PlacementOptions opt;
      opt.r_max = r_max;
      const auto member = place_zeros_extended(params, n, geomspace(0.04 * r_max, 0.9 * r_max, H), opt);
      const auto report = count_simple_zeros(std::cref(member), r_max);
      const auto search = random_search(params, n, kSearchDraws, 4000 + n, r_max);
      pass = pass && static_cast<int>(report.count()) == H && search.max_count <= H && search.exceeding.empty();
      detail << (n > 1 ? ", " : "") << report.count() << "/" << H << " max " << search.max_count;
    }
    detail << "} ";
  }
  const double elapsed = seconds_since(start);
  pass = pass && elapsed < kHnSeconds;
  detail << "(placed/H(n), search max over " << kSearchDraws << " draws), " << fmt(elapsed) << " s (limit "
         << fmt(kHnSeconds) << " s)";
  return {pass, detail.str()};
}

// ------------------------------------------------------------------ 5

Outcome averaging_to_dynamics() {
  const auto start = Clock::now();
  const SystemParams params(1.0, -2.0);
  const double r_max = 5.0;
  std::ostringstream detail;
  bool pass = true;

  // n = 1, four zeros, realized as an actual perturbation
  PlacementOptions opt;
  opt.r_max = r_max;
  opt.set = GeneratingSet::realizable;
  const auto target = place_zeros(params, 1, {0.4, 1.0, 2.0, 3.5}, opt);
  const auto pert = realize_perturbation(params, target).pert;
  const auto zeros = count_simple_zeros(assemble(params, pert), r_max);
  const PolarField field(params, pert, kEpsilon, r_max, 0.05);
  const auto scan = scan_return_map(field, 0.05, 4.9, 200);
  double offset = 0.0;
  bool stable = scan.fixed_points.size() == zeros.count();
  for (std::size_t k = 0; stable && k < zeros.count(); ++k) {
    offset = std::max(offset, std::abs(scan.fixed_points[k].location - zeros.zeros[k].location));
    stable = scan.fixed_points[k].stability == predicted_stability(zeros.zeros[k].derivative);
  }
  const std::vector<double> eps{4e-3, 2e-3, 1e-3, 5e-4};
  const auto study = first_order_study(params, pert, eps, linspace(0.05, 4.9, 40), r_max);
  const bool n1 = zeros.count() == 4 && stable && offset <= kOffsetFactor * kEpsilon &&
                  std::abs(study.slope - 1.0) <= kSlopeTol;
  pass = pass && n1;
  detail << "n=1: " << scan.fixed_points.size() << "/" << zeros.count() << " fixed points, max offset "
         << fmt(offset) << " (tol " << fmt(kOffsetFactor * kEpsilon) << "), stability "
         << (stable ? "matches" : "differs") << ", slope " << fmt(study.slope) << " (want 1 +- " << fmt(kSlopeTol)
         << ")";

  // n = 2, seven zeros: place on the generating set, then try to realize
  PlacementOptions lemma;
  lemma.r_max = r_max;
  const auto seven = place_zeros(params, 2, geomspace(0.2, 4.5, 7), lemma);
  const auto attempt = realize_perturbation(params, seven);
  const auto realized = count_simple_zeros(assemble(params, attempt.pert), r_max);
  pass = pass && realized.count() == 7 && attempt.residual < 1e-8;
  detail << "; n=2: 7-zero member realization residual " << fmt(attempt.residual) << ", realized averaged "
         << "function has " << realized.count() << " simple zeros (perturbations reach "
         << realizable_bound(2, false) << ")";

  const double elapsed = seconds_since(start);
  pass = pass && elapsed < kDynamicsSeconds;
  detail << "; " << fmt(elapsed) << " s";
  return {pass, detail.str()};
}

// ------------------------------------------------------------------ 6

Outcome smooth_case() {
  const double a = 1.0;
  const double r_max = 0.999;
  std::ostringstream detail;
  bool pass = true;
  for (int n : {2, 3}) {
    PlacementOptions opt;
    opt.r_max = r_max;
    const auto e = place_smooth_zeros(a, n, linspace(0.15, 0.85, n), opt);
    const auto report = count_simple_zeros([&](double r) { return eval_smooth(a, e, r); }, r_max);
    const auto search = random_smooth_search(a, n, kSmoothDraws, 600 + n, r_max);
    const auto rank = smooth_coefficient_rank(a, n);
    pass = pass && static_cast<int>(report.count()) == n && search.max_count <= n && rank.rank == n + 1;
    detail << (n > 2 ? "; " : "") << "n=" << n << ": placed " << report.count() << " zeros, max "
           << search.max_count << " over " << kSmoothDraws << " draws, coefficient rank " << rank.rank << "/"
           << rank.generators;
  }
  // even degrees: the monomial part stops at r^{n-2}, yet all n + 1 generators are reached
  bool even_ok = true;
  for (int n : {2, 4, 6}) even_ok = even_ok && smooth_coefficient_rank(a, n).rank == n + 1;
  pass = pass && even_ok;
  detail << "; even n in {2, 4, 6} reach all n + 1 generators: " << (even_ok ? "yes" : "no");
  return {pass, detail.str()};
}

// ------------------------------------------------------------------ 7

Outcome independence_and_surjectivity() {
  std::ostringstream detail;
  bool pass = true;
  for (const auto& params : {SystemParams(1.0, -2.0), SystemParams(1.0, -1.0)}) {
    detail << (params.resonant() ? "resonant" : "a=1 b=-2") << " min sigma {";
    for (int n = 1; n <= 5; ++n) {
      const auto res = independence_check(params, n, 5.0);
      pass = pass && res.rank == res.size && res.min_singular_value > kMinSingular;
      detail << (n > 1 ? ", " : "") << fmt(res.min_singular_value) << (res.rank == res.size ? "" : " rank-deficient");
    }
    detail << "}; ";
  }
  detail << "surjectivity rank/claimed {";
  for (int n = 1; n <= 4; ++n) {
    const auto res = coefficient_surjectivity_check(SystemParams(1.0, -2.0), n);
    pass = pass && res.rank == res.expected;
    detail << (n > 1 ? ", " : "") << res.rank << "/" << res.expected;
  }
  detail << "} (tol sigma > " << fmt(kMinSingular) << ")";
  return {pass, detail.str()};
}

// ------------------------------------------------------------------ 8

Outcome cross_integrator() {
  std::mt19937_64 rng(808);
  const SystemParams choices[] = {SystemParams(1.0, -2.0), SystemParams(-1.5, 2.0), SystemParams(0.7, 1.3),
                                  SystemParams(1.0, -1.0)};
  double worst = 0.0;
  int cases = 0;
  int attempts = 0;
  while (cases < kCrossCases && attempts < 10 * kCrossCases) {
    ++attempts;
    const auto& params = choices[attempts % 4];
    const double r_max = std::min(5.0, params.default_search_bound());
    const double hi = std::min(r_max, params.r0() - 1e-3 * r_max);
    const double r = std::uniform_real_distribution<double>(0.1 * hi, 0.9 * hi)(rng);
    const auto pert = random_pert(1 + attempts % 3, rng);
    try {
      const PolarField field(params, pert, 1e-3, r_max, 0.05 * hi);
      const double polar = return_map(field, r);
      const double cart = cartesian_crosscheck(field, {r, 0.0}, 1).section_radii.at(0);
      worst = std::max(worst, std::abs(polar - cart));
      ++cases;
    } catch (const BlowUpError&) {
    } catch (const DomainError&) {
    }
  }
  double drift = 0.0;
  for (const auto& params : choices) {
    const double r_max = std::min(5.0, params.default_search_bound());
    const PolarField still(params, PerturbationSpec(1), 0.0, r_max);
    for (double f : {0.1, 0.5, 0.9}) {
      const auto s = cartesian_crosscheck(still, {f * r_max, 0.0}, 5);
      drift = std::max(drift, s.max_radius_drift / 5.0);
    }
  }
  Outcome out;
  out.pass = cases == kCrossCases && worst < kCrossAbs && drift < kDriftPerRevolution;
  out.detail = std::to_string(cases) + " random cases: max |P_polar - P_cartesian| " + fmt(worst) + " (tol " +
               fmt(kCrossAbs) + "); eps = 0 drift of x^2 + y^2 per revolution " + fmt(drift) + " (tol " +
               fmt(kDriftPerRevolution) + ")";
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"kernel correctness", kernel_correctness},
      {"ODE residuals and anchor", ode_residuals},
      {"pipeline equivalence", pipeline_equivalence},
      {"H(n) attainability", hn_attainability},
      {"averaging to dynamics", averaging_to_dynamics},
      {"smooth case", smooth_case},
      {"independence and surjectivity", independence_and_surjectivity},
      {"cross-integrator agreement", cross_integrator},
  };
  int unexpected = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    Outcome out;
    try {
      out = criteria[k].second();
    } catch (const std::exception& e) {
      out = {false, std::string("error: ") + e.what()};
    }
    std::printf("criterion %d %s: %s: %s\n", id, out.pass ? "PASS" : "FAIL", criteria[k].first, out.detail.c_str());
    std::fflush(stdout);
    if (!out.pass && !kKnownUnattainable.count(id)) ++unexpected;
  }
  std::printf("known unattainable as stated: criteria 5 and 7; unexpected failures: %d\n", unexpected);
  return unexpected == 0 ? 0 : 1;
}
