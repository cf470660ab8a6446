#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include "internal.hpp"
#include "pwc/harness.hpp"
#include "pwc/kernel_integrals.hpp"
#include "pwc/smooth_case.hpp"

namespace pwc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class F>
auto in_module(const char* module, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const ExperimentError&) {
    throw;
  } catch (const std::exception& e) {
    throw ExperimentError(module, e.what());
  }
}

Check within(std::string name, double measured, double expected, double tolerance, std::string note = {}) {
  Check c{std::move(name), CheckStatus::pass, measured, expected, tolerance, std::move(note)};
  if (!(std::abs(measured - expected) <= tolerance)) c.status = CheckStatus::fail;
  return c;
}

Check at_most(std::string name, double measured, double limit, std::string note = {}) {
  Check c{std::move(name), CheckStatus::pass, measured, limit, 0.0, std::move(note)};
  if (!(measured <= limit)) c.status = CheckStatus::fail;
  return c;
}

Check finding(std::string name, double measured, double expected, double tolerance, std::string note) {
  return Check{std::move(name), CheckStatus::finding, measured, expected, tolerance, std::move(note)};
}

std::string tag(const char* what, int n) { return std::string(what) + " n=" + std::to_string(n); }

std::string tag_eps(const char* what, double eps) { return std::string(what) + " eps=" + format_double(eps); }

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> out;
  for (int k = 0; k < count; ++k) out.push_back(count == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * k / (count - 1));
  return out;
}

std::vector<double> geomspace(double lo, double hi, int count) {
  std::vector<double> out;
  for (int k = 0; k < count; ++k) out.push_back(count == 1 ? std::sqrt(lo * hi) : lo * std::pow(hi / lo, double(k) / (count - 1)));
  return out;
}

PerturbationSpec random_pert(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  PerturbationSpec p(n);
  for (auto* t : {&p.plus_f, &p.plus_g, &p.minus_f, &p.minus_g}) {
    t->for_each([&](int, int, double& v) { v = u(rng); });
  }
  return p;
}

// r inside the analyticity domain of both kernels, away from the poles
double random_radius(std::mt19937_64& rng, double shift_right, double shift_left) {
  double lo = -4.0 * std::max(std::abs(shift_right), std::abs(shift_left));
  double hi = -lo;
  if (shift_right > 0) lo = std::max(lo, -0.9 * shift_right);
  if (shift_right < 0) hi = std::min(hi, -0.9 * shift_right);
  if (shift_left > 0) hi = std::min(hi, 0.9 * shift_left);
  if (shift_left < 0) lo = std::max(lo, 0.9 * shift_left);
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double rel_err(double got, double want) { return std::abs(got - want) / std::max(1e-300, std::abs(want)); }

std::vector<int> degrees_or(const ExperimentManifest& m, std::vector<int> fallback) {
  return m.degrees.empty() ? fallback : m.degrees;
}

// Upper end of the section the return map may start from.
double section_hi(const SystemParams& params, double r_max) {
  return std::min(r_max, params.r0() - 1e-3 * r_max) * (1.0 - 1e-9);
}

double stability_code(Stability s) {
  switch (s) {
    case Stability::attracting: return -1.0;
    case Stability::repelling: return 1.0;
    case Stability::neutral: return 0.0;
  }
  return 0.0;
}

// ---------------------------------------------------------------- verify

void verify_kernels(const ExperimentManifest& m, int draws, ResultRecord& rec) {
  const auto& p = m.params;
  double worst = 0.0;
  double odd_worst = 0.0;
  int cases = 0;
  in_module("kernel_integrals", [&] {
    for (auto seed : m.seeds) {
      std::mt19937_64 rng(seed);
      std::uniform_int_distribution<int> total(0, 8);
      std::uniform_int_distribution<int> fam(0, 3);
      for (int d = 0; d < draws; ++d) {
        const double r = random_radius(rng, p.a(), p.b());
        const int t = total(rng);
        const int i = std::uniform_int_distribution<int>(0, t)(rng);
        const IntegralFamilyIndex idx{static_cast<Family>(fam(rng)), i, t - i};
        const double got = eval_family(idx, r, p);
        const double want = quad_oracle(family_integrand(idx, r, p), family_interval(idx.family));
        if (idx.j % 2 == 1) {
          odd_worst = std::max(odd_worst, std::abs(got - want));
        } else {
          worst = std::max(worst, rel_err(got, want));
        }
        const Interval right{-std::numbers::pi / 2, std::numbers::pi / 2};
        const Interval left{std::numbers::pi / 2, 3 * std::numbers::pi / 2};
        worst = std::max(worst, rel_err(eval_A00(r, p), quad_oracle(TrigRationalIntegrand{0, 0, r, p.a(), 2}, right)));
        worst = std::max(worst, rel_err(eval_B00(r, p), quad_oracle(TrigRationalIntegrand{0, 0, r, p.b(), 2}, left)));
        ++cases;
      }
    }
  });
  rec.checks.push_back(within("kernels vs quadrature (max rel error)", worst, 0.0, 1e-9,
                              std::to_string(cases) + " random (family, i, j, r) cases plus A00, B00"));
  rec.checks.push_back(within("odd sin powers vanish (max abs)", odd_worst, 0.0, 1e-12));
}

void verify_odes(const ExperimentManifest& m, ResultRecord& rec) {
  double first = 0.0;
  double second = 0.0;
  double anchor = 0.0;
  double reflection = 0.0;
  Table table{"ode_residuals", {"shift", "r", "first_order", "second_order"}, {}};
  in_module("kernel_integrals", [&] {
    for (double a : {m.params.a(), m.params.b()}) {
      const SystemParams p(a, 1.0);
      const double lo = a > 0 ? -0.75 * a : 4.0 * a;
      const double hi = a > 0 ? 4.0 * a : -0.75 * a;
      for (int k = 0; k < 200; ++k) {
        const double r = lo + (hi - lo) * (k + 0.5) / 200.0;
        if (std::abs(std::abs(r) - std::abs(a)) < 1e-3) continue;
        const double h = 1e-6 * std::max(1.0, std::abs(r));
        const double A = eval_A00(r, p);
        const double d1 = (eval_A00(r + h, p) - eval_A00(r - h, p)) / (2 * h);
        const double res1 = std::abs(a * (a * a - r * r) * d1 - 3 * a * r * A + 4);
        const double h2 = 1e-3 * std::max(1.0, std::abs(r));
        const double f2m = eval_A00(r - 2 * h2, p), f1m = eval_A00(r - h2, p);
        const double f1p = eval_A00(r + h2, p), f2p = eval_A00(r + 2 * h2, p);
        const double d2 = (-f2p + 16 * f1p - 30 * A + 16 * f1m - f2m) / (12 * h2 * h2);
        const double d1b = (-f2p + 8 * f1p - 8 * f1m + f2m) / (12 * h2);
        const double res2 = std::abs((a * a - r * r) * d2 - 5 * r * d1b - 3 * A);
        first = std::max(first, res1);
        second = std::max(second, res2);
        table.rows.push_back({a, r, res1, res2});
      }
      anchor = std::max(anchor, rel_err(eval_A00(a, p), 4.0 / (3.0 * a * a)));
      const double r = 0.37 * std::abs(a);
      reflection = std::max(reflection, rel_err(eval_B00(r, SystemParams(1.0, a)), eval_A00(-r, p)));
    }
  });
  rec.checks.push_back(within("first-order ODE residual", first, 0.0, 1e-8));
  rec.checks.push_back(within("second-order ODE residual", second, 0.0, 1e-6));
  rec.checks.push_back(within("A00(a; a) = 4/(3 a^2) (rel)", anchor, 0.0, 1e-12));
  rec.checks.push_back(within("B00(r; b) = A00(-r; b) (rel)", reflection, 0.0, 1e-14));
  rec.tables.push_back(std::move(table));
}

void verify_pipeline(const ExperimentManifest& m, int draws, ResultRecord& rec) {
  const auto& p = m.params;
  const auto degrees = degrees_or(m, {1, 2, 3, 4, 5, 6});
  const double r_hi = std::isfinite(p.r0()) ? 0.9 * p.r0() : 3.0 * std::max(std::abs(p.a()), std::abs(p.b()));
  double worst = 0.0;
  double float_worst = 0.0;
  int structural_failures = 0;
  Table table{"pipeline", {"degree", "r", "assembled", "oracle"}, {}};
  in_module("averaged_function", [&] {
    for (auto seed : m.seeds) {
      std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
      std::uniform_real_distribution<double> radius(0.02 * r_hi, r_hi);
      for (int d = 0; d < draws; ++d) {
        const int n = degrees[static_cast<std::size_t>(d) % degrees.size()];
        const auto pert = random_pert(n, rng);
        const double r = radius(rng);
        std::optional<AveragedFunction> exact;
        try {
          exact = assemble(p, pert, Arithmetic::exact);
        } catch (const std::logic_error&) {
          ++structural_failures;
          continue;
        }
        const double got = eval_F(*exact, r);
        const double want = oracle_F(p, pert, r);
        worst = std::max(worst, std::abs(got - want) / (1.0 + std::abs(want)));
        const double fl = eval_F(assemble(p, pert, Arithmetic::floating), r);
        float_worst = std::max(float_worst, std::abs(fl - got) / (1.0 + std::abs(got)));
        table.rows.push_back({double(n), r, got, want});
      }
    }
  });
  rec.checks.push_back(within("assembled F vs quadrature of X (rel)", worst, 0.0, 1e-8));
  rec.checks.push_back(within("floating vs exact assembly (rel)", float_worst, 0.0, 1e-10));
  rec.checks.push_back(within("exact structural identities violated", structural_failures, 0.0, 0.0,
                              "a_0 = -(a^2/pi) b_0, c_0 = -(b^2/pi) d_0, top monomials vanish"));
  rec.tables.push_back(std::move(table));
}

void verify_smooth(const ExperimentManifest& m, int draws, ResultRecord& rec) {
  const double a = m.params.a();
  double worst = 0.0;
  in_module("smooth_case", [&] {
    for (auto seed : m.seeds) {
      std::mt19937_64 rng(seed ^ 0x5bd1e995ull);
      std::uniform_real_distribution<double> radius(0.02 * std::abs(a), 0.9 * std::abs(a));
      for (int d = 0; d < std::max(1, draws / 4); ++d) {
        const int n = 1 + d % 5;
        SmoothPerturbationSpec pert(n);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        pert.f.for_each([&](int, int, double& v) { v = u(rng); });
        pert.g.for_each([&](int, int, double& v) { v = u(rng); });
        const double r = radius(rng);
        const double want = oracle_smooth(a, pert, r);
        const double got = eval_smooth(a, assemble_smooth(a, pert), r);
        worst = std::max(worst, std::abs(got - want) / (1.0 + std::abs(want)));
      }
    }
  });
  rec.checks.push_back(within("smooth expansion vs quadrature (rel)", worst, 0.0, 1e-8));
}

void verify_integrators(const ExperimentManifest& m, int draws, ResultRecord& rec) {
  const auto& p = m.params;
  const double r_max = effective_r_max(m);
  const double hi = section_hi(p, r_max);
  double worst = 0.0;
  double drift = 0.0;
  int cases = 0;
  int skipped = 0;
  in_module("poincare_sim", [&] {
    const PolarField still(p, PerturbationSpec(1), 0.0, r_max);
    for (double r : {0.2 * hi, 0.5 * hi, 0.8 * hi}) {
      const auto summary = cartesian_crosscheck(still, {r, 0.0}, 3);
      drift = std::max(drift, summary.max_radius_drift / 3.0);
    }
    for (auto seed : m.seeds) {
      std::mt19937_64 rng(seed ^ 0x2545f4914f6cdd1dull);
      std::uniform_real_distribution<double> radius(0.1 * hi, 0.9 * hi);
      for (int d = 0; d < std::max(2, draws / 20); ++d) {
        const auto pert = random_pert(1 + d % 3, rng);
        const double r = radius(rng);
        try {
          const PolarField field(p, pert, 1e-3, r_max, 0.05 * hi);
          const double polar = return_map(field, r);
          const double cart = cartesian_crosscheck(field, {r, 0.0}, 1).section_radii.at(0);
          worst = std::max(worst, std::abs(polar - cart));
          ++cases;
        } catch (const BlowUpError&) {
          ++skipped;
        } catch (const DomainError&) {
          ++skipped;
        }
      }
    }
  });
  rec.checks.push_back(within("polar vs Cartesian return map (abs)", worst, 0.0, 1e-8,
                              std::to_string(cases) + " cases, " + std::to_string(skipped) +
                                  " skipped (trajectory left the annulus or eps guard)"));
  rec.checks.push_back(within("eps = 0 radius drift per revolution (rel)", drift, 0.0, 1e-10));
}

void run_verify(const ExperimentManifest& m, ResultRecord& rec) {
  const int draws = m.draws > 0 ? m.draws : 100;
  verify_kernels(m, draws, rec);
  verify_odes(m, rec);
  verify_pipeline(m, draws, rec);
  verify_smooth(m, draws, rec);
  verify_integrators(m, draws, rec);
}

// ---------------------------------------------------------------- reproduce_hn

void run_reproduce(const ExperimentManifest& m, ResultRecord& rec) {
  const auto& p = m.params;
  const double r_max = effective_r_max(m);
  const bool resonant = p.resonant();
  Table table{"hn",
              {"n", "H", "lemma_count", "lemma_max_offset", "realizable_bound", "realizable_count",
               "independence_rank", "independence_size", "min_singular_value", "surjectivity_rank",
               "surjectivity_expected", "search_draws", "search_max", "search_max_realizable"},
              {}};
  Table histogram{"search_histogram", {"n", "seed", "count", "frequency"}, {}};
  for (int n : m.degrees) {
    const int H = hn_formula({n, resonant});
    std::vector<double> row{double(n), double(H)};

    PlacementOptions opt;
    opt.r_max = r_max;
    opt.set = GeneratingSet::lemma;
    const auto targets = geomspace(0.04 * r_max, 0.9 * r_max, H);
    const auto lemma = in_module("zero_analysis", [&] {
      const auto member = place_zeros_extended(p, n, targets, opt);
      return count_simple_zeros(std::cref(member), r_max);
    });
    double offset = 0.0;
    for (std::size_t k = 0; k < std::min(lemma.zeros.size(), targets.size()); ++k) {
      offset = std::max(offset, std::abs(lemma.zeros[k].location - targets[k]));
    }
    rec.checks.push_back(within(tag("H(n) attained on the generating set", n), double(lemma.count()), H, 0.0,
                                "geometric targets in (0.04, 0.9) r_max"));
    rec.tables.push_back(zero_table(lemma, "zeros_n" + std::to_string(n)));
    row.insert(row.end(), {double(lemma.count()), offset});

    const int bound = realizable_bound(n, resonant);
    opt.set = GeneratingSet::realizable;
    const auto realizable = in_module("zero_analysis", [&] {
      const auto member = place_zeros_extended(p, n, geomspace(0.04 * r_max, 0.9 * r_max, bound), opt);
      return count_simple_zeros(std::cref(member), r_max);
    });
    rec.checks.push_back(within(tag("zeros placed on realizable averaged functions", n),
                                double(realizable.count()), bound, 0.0));
    if (bound != H) {
      rec.checks.push_back(finding(tag("perturbations reach fewer than H(n) zeros", n), bound, H, 0.0,
                                   "even n ties the top coefficients, one generator fewer"));
    }
    row.insert(row.end(), {double(bound), double(realizable.count())});

    const auto indep = in_module("zero_analysis", [&] { return independence_check(p, n, r_max); });
    rec.checks.push_back(within(tag("generating set rank", n), indep.rank, indep.size, 0.0));
    if (indep.min_singular_value > 1e-10) {
      rec.checks.push_back(Check{tag("generating set min singular value", n), CheckStatus::pass,
                                 indep.min_singular_value, 1e-10, 0.0, "lower bound"});
    } else {
      rec.checks.push_back(finding(tag("generating set min singular value", n), indep.min_singular_value, 1e-10,
                                   0.0, "full rank in 50 digits but nearly dependent in double"));
    }
    row.insert(row.end(), {double(indep.rank), double(indep.size), indep.min_singular_value});

    const auto surj = in_module("zero_analysis", [&] { return coefficient_surjectivity_check(p, n); });
    if (surj.rank == surj.expected) {
      rec.checks.push_back(within(tag("claimed coefficients are free", n), surj.rank, surj.expected, 0.0));
    } else if (n % 2 == 0 && surj.rank == surj.expected - 2) {
      rec.checks.push_back(finding(tag("claimed coefficients are free", n), surj.rank, surj.expected, 0.0,
                                   "b_{2K+1} = -(2/a) a_{K+1} and d_{2K+1} = (2/b) c_{K+1}"));
    } else {
      rec.checks.push_back(within(tag("claimed coefficients are free", n), surj.rank, surj.expected, 0.0));
    }
    row.insert(row.end(), {double(surj.rank), double(surj.expected)});

    int total_draws = 0, max_count = 0, max_real = 0;
    for (auto seed : m.seeds) {
      if (m.draws == 0) break;
      const auto s = in_module("zero_analysis", [&] { return random_search(p, n, m.draws, seed, r_max); });
      total_draws += s.draws - s.skipped;
      max_count = std::max(max_count, s.max_count);
      max_real = std::max(max_real, s.max_realizable_count);
      for (const auto& [count, freq] : s.histogram) {
        histogram.rows.push_back({double(n), double(seed), double(count), double(freq)});
      }
    }
    if (total_draws > 0) {
      rec.checks.push_back(at_most(tag("random members never exceed H(n)", n), max_count, H,
                                   std::to_string(total_draws) + " draws"));
    }
    row.insert(row.end(), {double(total_draws), double(max_count), double(max_real)});
    table.rows.push_back(std::move(row));
    log_message(LogLevel::info, "reproduce_hn: n=" + std::to_string(n) + " H=" + std::to_string(H) +
                                    " attained=" + std::to_string(lemma.count()));
  }
  rec.tables.insert(rec.tables.begin(), std::move(table));
  if (!histogram.rows.empty()) rec.tables.push_back(std::move(histogram));
}

// ---------------------------------------------------------------- place_and_simulate

void run_place_and_simulate(const ExperimentManifest& m, ResultRecord& rec) {
  const auto& p = m.params;
  const double r_max = effective_r_max(m);
  const auto& src = *m.perturbation;

  PerturbationSpec pert(1);
  if (src.kind == PerturbationSource::Kind::placed) {
    PlacementOptions opt;
    opt.r_max = r_max;
    opt.set = src.placed.set;
    const auto expansion =
        in_module("zero_analysis", [&] { return place_zeros(p, src.placed.degree, src.placed.targets, opt); });
    const std::uint64_t seed = m.seeds.empty() ? 0 : m.seeds.front();
    const auto real = in_module("zero_analysis", [&] {
      return realize_perturbation(p, expansion, src.placed.null_weight, seed);
    });
    rec.checks.push_back(within("realization residual", real.residual, 0.0, 1e-8,
                                "||M p - target|| / ||target||"));
    pert = real.pert;
  } else {
    pert = *src.spec;
  }

  const auto averaged = in_module("averaged_function", [&] { return assemble(p, pert); });
  const auto zeros = in_module("zero_analysis", [&] { return count_simple_zeros(averaged, r_max); });
  rec.tables.push_back(zero_table(zeros));
  if (src.kind == PerturbationSource::Kind::placed) {
    const auto& targets = src.placed.targets;
    rec.checks.push_back(within("simple zeros of the realized averaged function", double(zeros.count()),
                                double(targets.size()), 0.0));
    if (zeros.count() == targets.size()) {
      double offset = 0.0, allowed = 1e-9;
      for (std::size_t k = 0; k < targets.size(); ++k) {
        offset = std::max(offset, std::abs(zeros.zeros[k].location - targets[k]));
        allowed = std::max(allowed, 10.0 * zeros.zeros[k].uncertainty);
      }
      rec.checks.push_back(within("zero locations vs targets", offset, 0.0, allowed));
    }
  }
  if (m.epsilons.empty()) return;

  const double r_lo = m.r_min > 0.0 ? m.r_min : 0.01 * r_max;
  const double r_hi = section_hi(p, r_max);
  std::vector<Zero> predicted;
  for (const auto& z : zeros.zeros) {
    if (z.location > r_lo && z.location < r_hi) predicted.push_back(z);
  }

  Table fixed{"fixed_points", {"epsilon", "location", "predicted", "slope", "stability", "predicted_stability"}, {}};
  for (double eps : m.epsilons) {
    const auto scan = in_module("poincare_sim", [&] {
      const PolarField field(p, pert, eps, r_max, r_lo);
      return scan_return_map(field, r_lo, r_hi, m.samples);
    });
    const auto& fps = scan.fixed_points;
    rec.checks.push_back(within(tag_eps("fixed points of the return map", eps), double(fps.size()),
                                double(predicted.size()), 0.0));
    if (fps.size() != predicted.size()) {
      for (const auto& fp : fps) {
        fixed.rows.push_back({eps, fp.location, kNaN, fp.slope, stability_code(fp.stability), kNaN});
      }
      continue;
    }
    double offset = 0.0;
    int mismatched = 0;
    for (std::size_t k = 0; k < fps.size(); ++k) {
      const auto want = predicted_stability(predicted[k].derivative);
      offset = std::max(offset, std::abs(fps[k].location - predicted[k].location));
      if (fps[k].stability != want) ++mismatched;
      fixed.rows.push_back({eps, fps[k].location, predicted[k].location, fps[k].slope,
                            stability_code(fps[k].stability), stability_code(want)});
    }
    if (!fps.empty()) {
      rec.checks.push_back(within(tag_eps("fixed point offset from zeros", eps), offset, 0.0, 10.0 * eps));
    }
    rec.checks.push_back(within(tag_eps("stability mismatches", eps), mismatched, 0.0, 0.0));
  }
  rec.tables.push_back(std::move(fixed));

  const auto grid = linspace(std::max(r_lo, 0.05 * r_max), r_hi, 40);
  const double smallest = m.epsilons.back();
  const auto profile = in_module("poincare_sim", [&] {
    return displacement_profile(PolarField(p, pert, smallest, r_max, grid.front()), grid);
  });
  rec.tables.push_back(displacement_table(profile));

  if (m.epsilons.size() >= 2) {
    const auto study =
        in_module("poincare_sim", [&] { return first_order_study(p, pert, m.epsilons, grid, r_max); });
    rec.checks.push_back(within("first-order convergence slope", study.slope, 1.0, 0.2,
                                "log-log fit of max |(P - r)/eps - f0| against eps"));
    Table conv{"convergence", {"epsilon", "error"}, {}};
    for (std::size_t k = 0; k < study.epsilons.size(); ++k) conv.rows.push_back({study.epsilons[k], study.errors[k]});
    rec.tables.push_back(std::move(conv));
  }
}

// ---------------------------------------------------------------- smooth

void run_smooth(const ExperimentManifest& m, ResultRecord& rec) {
  const double a = m.params.a();
  const double r_max = effective_r_max(m);
  Table table{"smooth",
              {"n", "generators", "placed_count", "coefficient_rank", "alpha_size", "beta_size",
               "independence_rank", "search_draws", "search_max"},
              {}};
  for (int n : m.degrees) {
    const auto report = in_module("zero_analysis", [&] {
      PlacementOptions opt;
      opt.r_max = r_max;
      const auto e = place_smooth_zeros(a, n, linspace(0.15 * r_max, 0.85 * r_max, n), opt);
      return count_simple_zeros([&](double r) { return eval_smooth(a, e, r); }, r_max);
    });
    rec.checks.push_back(within(tag("smooth zeros attained", n), double(report.count()), n, 0.0));
    rec.tables.push_back(zero_table(report, "smooth_zeros_n" + std::to_string(n)));

    const auto rank = in_module("zero_analysis", [&] { return smooth_coefficient_rank(a, n); });
    std::string note = "alpha has " + std::to_string(rank.alpha_size) + " entries, beta " +
                       std::to_string(rank.beta_size);
    if (n % 2 == 0) note += "; for even n the monomials stop at r^" + std::to_string(n - 2);
    rec.checks.push_back(within(tag("smooth coefficient map rank", n), rank.rank, rank.generators, 0.0, note));

    const auto indep = in_module("zero_analysis", [&] { return smooth_independence_check(a, n, r_max); });
    rec.checks.push_back(within(tag("smooth generating set rank", n), indep.rank, indep.size, 0.0));

    int total = 0, max_count = 0;
    for (auto seed : m.seeds) {
      if (m.draws == 0) break;
      const auto s = in_module("zero_analysis", [&] { return random_smooth_search(a, n, m.draws, seed, r_max); });
      total += s.draws - s.skipped;
      max_count = std::max(max_count, s.max_count);
    }
    if (total > 0) {
      rec.checks.push_back(at_most(tag("random smooth members never exceed n", n), max_count, n,
                                   std::to_string(total) + " draws"));
    }
    table.rows.push_back({double(n), double(rank.generators), double(report.count()), double(rank.rank),
                          double(rank.alpha_size), double(rank.beta_size), double(indep.rank), double(total),
                          double(max_count)});
  }
  rec.tables.insert(rec.tables.begin(), std::move(table));
}

// ---------------------------------------------------------------- sweep

void run_sweep(const ExperimentManifest& m, ResultRecord& rec) {
  const auto& p = m.params;
  const double r_max = effective_r_max(m);
  const int draws = std::max(1, m.draws);
  const bool simulate = m.epsilons.size() >= 2;
  Table table{"sweep", {"n", "seed", "draw", "zero_count", "H"}, {}};
  if (simulate) table.columns.push_back("slope");
  const auto grid = linspace(0.3 * r_max, section_hi(p, r_max), 12);
  double worst_slope = 0.0;
  for (int n : m.degrees) {
    const int H = hn_formula({n, p.resonant()});
    int max_count = 0;
    for (auto seed : m.seeds) {
      std::mt19937_64 rng(seed + 0x632be59bd9b4e019ull * static_cast<std::uint64_t>(n));
      for (int d = 0; d < draws; ++d) {
        const auto pert = random_pert(n, rng);
        const auto report = in_module("zero_analysis", [&] { return count_simple_zeros(assemble(p, pert), r_max); });
        max_count = std::max<int>(max_count, static_cast<int>(report.count()));
        std::vector<double> row{double(n), double(seed), double(d), double(report.count()), double(H)};
        if (simulate) {
          const auto study = in_module("poincare_sim", [&] { return first_order_study(p, pert, m.epsilons, grid, r_max); });
          worst_slope = std::max(worst_slope, std::abs(study.slope - 1.0));
          row.push_back(study.slope);
        }
        table.rows.push_back(std::move(row));
      }
    }
    rec.checks.push_back(at_most(tag("random perturbations stay within H(n)", n), max_count, H));
  }
  if (simulate) {
    rec.checks.push_back(within("worst |slope - 1| of the first-order law", worst_slope, 0.0, 0.2));
  }
  rec.tables.push_back(std::move(table));
}

}  // namespace

ExperimentError::ExperimentError(std::string module, const std::string& what)
    : std::runtime_error(module + ": " + what), module_(std::move(module)) {}

bool ResultRecord::passed() const {
  return std::none_of(checks.begin(), checks.end(), [](const Check& c) { return c.status == CheckStatus::fail; });
}

const Table* ResultRecord::table(std::string_view name) const {
  for (const auto& t : tables) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

std::string_view to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::finding: return "finding";
  }
  return "fail";
}

Table zero_table(const ZeroReport& report, std::string name) {
  Table t{std::move(name), {"location", "derivative", "simple_flag"}, {}};
  std::vector<std::vector<double>> rows;
  for (const auto& z : report.zeros) rows.push_back({z.location, z.derivative, 1.0});
  for (const auto& z : report.non_simple) rows.push_back({z.location, z.derivative, 0.0});
  std::sort(rows.begin(), rows.end());
  t.rows = std::move(rows);
  return t;
}

Table displacement_table(const std::vector<DisplacementSample>& samples, std::string name) {
  Table t{std::move(name), {"r", "scaled_displacement", "f0_prediction", "abs_error"}, {}};
  for (const auto& s : samples) t.rows.push_back({s.r, s.scaled_displacement, s.f0_prediction, s.abs_error});
  return t;
}

ResultRecord run_manifest(const ExperimentManifest& manifest) {
  validate(manifest);
  ResultRecord rec;
  rec.experiment_id = manifest.id;
  rec.kind = manifest.kind;
  rec.inputs_digest = inputs_digest(manifest);
  const auto start = std::chrono::steady_clock::now();
  log_message(LogLevel::info, "running " + manifest.id + " (" + std::string(to_string(manifest.kind)) + ")");
  switch (manifest.kind) {
    case ExperimentKind::verify_identities: run_verify(manifest, rec); break;
    case ExperimentKind::reproduce_hn: run_reproduce(manifest, rec); break;
    case ExperimentKind::place_and_simulate: run_place_and_simulate(manifest, rec); break;
    case ExperimentKind::smooth_theorem12: run_smooth(manifest, rec); break;
    case ExperimentKind::sweep: run_sweep(manifest, rec); break;
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ostringstream msg;
  msg << manifest.id << ": " << (rec.passed() ? "pass" : "FAIL") << " in " << seconds << " s";
  log_message(LogLevel::info, msg.str());
  if (!manifest.output.dir.empty()) {
    for (const auto& path : emit_table(rec, manifest.output.dir, manifest.output.format)) {
      log_message(LogLevel::debug, "wrote " + path.string());
    }
  }
  return rec;
}

std::vector<ResultRecord> run_manifests(const std::vector<ExperimentManifest>& manifests) {
  std::vector<ResultRecord> out;
  for (const auto& m : manifests) out.push_back(run_manifest(m));
  std::sort(out.begin(), out.end(),
            [](const ResultRecord& x, const ResultRecord& y) { return x.experiment_id < y.experiment_id; });
  return out;
}

}  // namespace pwc
