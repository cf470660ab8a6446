#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "pwc/errors.hpp"
#include "pwc/kernel_integrals.hpp"
#include "pwc/zero_analysis.hpp"

using namespace pwc;

namespace {

std::vector<double> linspace(double lo, double hi, int count) {
  if (count == 1) return {0.5 * (lo + hi)};
  std::vector<double> out;
  for (int k = 0; k < count; ++k) out.push_back(lo + (hi - lo) * k / (count - 1));
  return out;
}

std::vector<double> geomspace(double lo, double hi, int count) {
  std::vector<double> out;
  for (int k = 1; k <= count; ++k) out.push_back(lo * std::pow(hi / lo, static_cast<double>(k) / (count + 1)));
  return out;
}

void check_round_trip(const SystemParams& params, int n, const std::vector<double>& targets,
                      double r_max, GeneratingSet set = GeneratingSet::lemma) {
  PlacementOptions opt;
  opt.r_max = r_max;
  opt.set = set;
  const auto member = place_zeros_extended(params, n, targets, opt);
  const auto report = count_simple_zeros(std::cref(member), r_max);
  // The simple-zero threshold is relative to max |F|. With a bounded annulus
  // the zeros crowd into a short interval where F is many decades below its
  // peak, so there only the sign changes are required.
  auto all = report.zeros;
  all.insert(all.end(), report.non_simple.begin(), report.non_simple.end());
  std::sort(all.begin(), all.end(), [](const Zero& x, const Zero& y) { return x.location < y.location; });
  REQUIRE_MESSAGE(all.size() == targets.size(), "n=" << n << " a=" << params.a() << " b=" << params.b());
  if (!params.annulus_bounded()) CHECK(report.non_simple.empty());
  for (std::size_t k = 0; k < targets.size(); ++k) {
    CHECK(std::abs(all[k].location - targets[k]) < 1e-9);
  }

  // rounded to double the zeros may drift, but only within their uncertainty
  const AveragedFunction fn{params, member.expansion(), Provenance::placed};
  ZeroReport rounded;
  try {
    rounded = count_simple_zeros(fn, r_max);
  } catch (const UnresolvedClusterError&) {
    return;  // roundoff sign flips next to a zero
  }
  if (rounded.count() != targets.size()) return;
  for (std::size_t k = 0; k < targets.size(); ++k) {
    CHECK(std::abs(rounded.zeros[k].location - targets[k]) <
          std::max(1e-9, 10.0 * rounded.zeros[k].uncertainty));
  }
}

}  // namespace

TEST_CASE("hn_formula") {
  CHECK(hn_formula({1, false}) == 4);
  CHECK(hn_formula({2, false}) == 7);
  CHECK(hn_formula({3, false}) == 8);
  CHECK(hn_formula({4, false}) == 11);
  CHECK(hn_formula({1, true}) == 2);
  CHECK(hn_formula({2, true}) == 4);
  CHECK(hn_formula({3, true}) == 5);
  CHECK(hn_formula({4, true}) == 7);
  CHECK_THROWS_AS(hn_formula({0, false}), std::invalid_argument);
}

TEST_CASE("generating set has H(n) + 1 members") {
  for (int n = 1; n <= 8; ++n) {
    CHECK(generator_set(SystemParams(1.0, -2.0), n).size() ==
          static_cast<std::size_t>(hn_formula({n, false}) + 1));
    CHECK(generator_set(SystemParams(1.0, -1.0), n).size() ==
          static_cast<std::size_t>(hn_formula({n, true}) + 1));
    CHECK(smooth_generator_count(n) == n + 1);
  }
  CHECK(describe({GeneratorKind::kernel_a, 0}) == "A00-pi/a^2");
  CHECK(describe({GeneratorKind::kernel_b, 4}) == "r^4*B00");
}

TEST_CASE("count_simple_zeros on simple functions") {
  const auto report = count_simple_zeros([](double r) { return std::sin(3.0 * r); }, 4.0);
  REQUIRE(report.count() == 3);
  for (int k = 0; k < 3; ++k) {
    CHECK(std::abs(report.zeros[static_cast<std::size_t>(k)].location - (k + 1) * std::numbers::pi / 3.0) < 1e-11);
    CHECK(std::abs(std::abs(report.zeros[static_cast<std::size_t>(k)].derivative) - 3.0) < 1e-6);
  }

  const auto zero = count_simple_zeros([](double) { return 0.0; }, 1.0);
  CHECK(zero.degenerate);
  CHECK(zero.count() == 0);

  // (r - 1/2)^3: a sign change with vanishing derivative
  const auto triple = count_simple_zeros([](double r) { return std::pow(r - 0.5, 3); }, 1.0);
  CHECK(triple.count() == 0);
  CHECK(triple.non_simple.size() == 1);
  CHECK(!triple.warnings.empty());

  // a pair straddling the grid point 0.3 that no number of doublings separates
  ZeroSearchOptions coarse;
  coarse.grid = 100;
  CHECK_THROWS_AS(count_simple_zeros([](double r) { return (r - 0.3 + 4e-8) * (r - 0.3 - 6e-8) * (r - 0.8); }, 1.0, coarse),
                  UnresolvedClusterError);
  // 3e-3 apart around a grid point: resolved after doubling
  const auto pair = count_simple_zeros([](double r) { return (r - 0.2995) * (r - 0.3025); }, 1.0, coarse);
  CHECK(pair.count() == 2);
  CHECK(pair.grid_resolution > 100);
  CHECK_THROWS_AS(count_simple_zeros([](double r) { return r; }, -1.0), std::invalid_argument);
}

TEST_CASE("count_simple_zeros on averaged functions") {
  const SystemParams params(1.0, -2.0);
  auto e = BasisExpansion::zero(1);
  const AveragedFunction zero{params, e, Provenance::fitted};
  CHECK(count_simple_zeros(zero, 5.0).degenerate);

  e.coeff_A[1] = 1.0;
  const AveragedFunction positive{params, e, Provenance::fitted};
  CHECK(count_simple_zeros(positive, 5.0).count() == 0);
  CHECK_THROWS_AS(count_simple_zeros(AveragedFunction{SystemParams(-1.0, 1.0), e, Provenance::fitted}, 1.5),
                  DomainError);
}

TEST_CASE("place_zeros examples") {
  const SystemParams params(1.0, -2.0);
  check_round_trip(params, 1, {0.2, 0.5, 0.8}, 5.0);
  check_round_trip(params, 1, {0.5, 1.0, 1.5, 2.0}, 5.0);
  check_round_trip(params, 3, linspace(0.2, 3.0, 8), 5.0);
  check_round_trip(params, 4, linspace(0.3, 4.5, 11), 5.0);

  const auto empty = place_zeros(params, 2, {});
  CHECK(count_simple_zeros(AveragedFunction{params, empty, Provenance::placed}, 5.0).count() == 0);

  CHECK_THROWS_AS(place_zeros(params, 1, {0.1, 0.2, 0.3, 0.4, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(place_zeros(params, 1, {0.5, 0.2}), std::invalid_argument);
  CHECK_THROWS_AS(place_zeros(params, 1, {0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(place_zeros(params, 1, {0.5, 6.0}, PlacementOptions{.r_max = 5.0}), std::invalid_argument);
  PlacementOptions strict;
  strict.max_condition_extended = 1e6;
  CHECK_THROWS_AS(place_zeros(params, 2, {1.0, 1.0 + 1e-9, 2.0}, strict), RankDeficiencyError);
  CHECK_THROWS_AS(place_zeros(SystemParams(-1.0, 1.0), 1, {0.5}, PlacementOptions{.r_max = 2.0}), DomainError);
}

TEST_CASE("place_zeros round trip for n <= 5") {
  const SystemParams configs[] = {SystemParams(1.0, -2.0), SystemParams(1.0, -1.0),
                                  SystemParams(-1.5, 2.0), SystemParams(2.0, 3.0)};
  for (const auto& params : configs) {
    for (int n = 1; n <= 5; ++n) {
      const double r_max = std::min(5.0, params.default_search_bound());
      const int h = hn_formula({n, params.resonant()});
      for (int count : {1, h / 2, h}) {
        check_round_trip(params, n, linspace(0.1 * r_max, 0.9 * r_max, count), r_max);
      }
      check_round_trip(params, n, geomspace(0.04 * r_max, 0.9 * r_max, h), r_max);
      check_round_trip(params, n, linspace(0.1 * r_max, 0.9 * r_max, realizable_bound(n, params.resonant())),
                       r_max, GeneratingSet::realizable);
    }
  }
}

TEST_CASE("doubling the grid never loses zeros") {
  const SystemParams params(1.0, -2.0);
  PlacementOptions opt;
  opt.r_max = 5.0;
  const auto fn = place_zeros_extended(params, 4, linspace(0.3, 4.5, 11), opt);
  std::size_t previous = 0;
  for (int grid : {250, 500, 1000, 2000, 4000}) {
    ZeroSearchOptions o;
    o.grid = grid;
    o.max_doublings = 0;
    std::size_t count = 0;
    try {
      count = count_simple_zeros(std::cref(fn), 5.0, o).count();
    } catch (const UnresolvedClusterError&) {
      continue;
    }
    CHECK(count >= previous);
    previous = count;
  }
  CHECK(previous == 11);
}

TEST_CASE("independence_check") {
  CHECK(independence_check(SystemParams(1.0, -2.0), 1, 5.0).rank == 5);
  CHECK(independence_check(SystemParams(1.0, -1.0), 1, 5.0).rank == 3);
  CHECK(independence_check(SystemParams(1.0, -2.0), 3, 5.0).rank == 9);
  CHECK(independence_check(SystemParams(1.0, -1.0), 3, 5.0).rank == 6);
  for (int n = 1; n <= 5; ++n) {
    for (const auto& p : {SystemParams(1.0, -2.0), SystemParams(1.0, -1.0), SystemParams(-1.5, 2.0)}) {
      const double r_max = std::min(5.0, p.default_search_bound());
      const auto res = independence_check(p, n, r_max);
      CHECK(res.rank == res.size);
      // the non-resonant sets are nearly dependent from n = 4 on (~1e-14)
      if (n <= 3 || p.resonant()) CHECK(res.min_singular_value > 1e-10);
    }
    const auto smooth = smooth_independence_check(1.0, n, 0.999);
    CHECK(smooth.rank == n + 1);
  }

  const auto family = piecewise_family(SystemParams(1.0, -2.0), 2, 5.0);
  Eigen::MatrixXd samples = sample_generators(family, 4 * family.size);
  Eigen::MatrixXd dup(samples.rows(), samples.cols() + 1);
  dup << samples, samples.col(2);
  const auto res = independence_of(dup);
  CHECK(res.size == family.size + 1);
  CHECK(res.rank == family.size);
}

TEST_CASE("resonant generators are dependent when both kernels are kept") {
  // A00 == B00 when a == -b, so the non-resonant set collapses
  const SystemParams p(1.0, -1.0);
  for (double r : {0.3, 1.7, 4.0}) CHECK(std::abs(eval_A00(r, p) - eval_B00(r, p)) < 1e-14);
}

TEST_CASE("smooth_coefficient_rank") {
  for (int n = 1; n <= 6; ++n) {
    const auto res = smooth_coefficient_rank(1.0, n);
    CHECK(res.generators == n + 1);
    CHECK(res.alpha_size + res.beta_size == n + 3 - (n % 2 == 0 ? 1 : 0));
    CHECK_MESSAGE(res.rank == n + 1, "n=" << n);
  }
}

TEST_CASE("coefficient_surjectivity_check") {
  // for even n one relation per kernel side ties the top coefficients
  for (const auto& p : {SystemParams(1.0, -2.0), SystemParams(1.0, -1.0), SystemParams(0.7, 1.3)}) {
    for (int n = 1; n <= 6; ++n) {
      const auto res = coefficient_surjectivity_check(p, n);
      CHECK_MESSAGE(res.rank == res.expected - (n % 2 == 0 ? 2 : 0), "n=" << n);
    }
  }
  const auto n1 = coefficient_surjectivity_check(SystemParams(1.0, -2.0), 1);
  CHECK(n1.claimed == std::vector<std::string>{"a_0", "a_1", "b_1", "c_0", "c_1", "d_1"});
  const auto n2 = coefficient_surjectivity_check(SystemParams(1.0, -2.0), 2);
  CHECK(std::find(n2.claimed.begin(), n2.claimed.end(), "b_3") != n2.claimed.end());
  CHECK(numerical_rank(Eigen::MatrixXd::Zero(6, 9)) == 0);
}

TEST_CASE("even degrees tie the top coefficients") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const auto& params : {SystemParams(1.0, -2.0), SystemParams(0.6, 1.7)}) {
    for (int n : {2, 4, 6}) {
      PerturbationSpec p(n);
      for (auto* t : {&p.plus_f, &p.plus_g, &p.minus_f, &p.minus_g}) t->for_each([&](int, int, double& v) { v = u(rng); });
      const auto e = assemble(params, p).expansion;
      const auto top = static_cast<std::size_t>(n / 2 + 1);
      const double b_top = e.coeff_poly.at(2 * top - 1);
      // both kernel sides feed the single r^{2K+1} slot
      CHECK(b_top == doctest::Approx(-2.0 / params.a() * e.coeff_A.at(top) + 2.0 / params.b() * e.coeff_B.at(top)).epsilon(1e-10));
    }
  }

  // the realizable generators span exactly the image of the perturbation map
  for (const auto& params : {SystemParams(1.0, -2.0), SystemParams(1.0, -1.0)}) {
    for (int n = 1; n <= 4; ++n) {
      const Eigen::MatrixXd map = expansion_map(params, n);
      const auto gens = generator_set(params, n, GeneratingSet::realizable);
      Eigen::MatrixXd joined(map.rows(), map.cols() + static_cast<Eigen::Index>(gens.size()));
      joined.leftCols(map.cols()) = map;
      for (std::size_t l = 0; l < gens.size(); ++l) {
        const auto e = generator_expansion(gens[l], params, n);
        std::vector<double> v(e.coeff_A);
        v.insert(v.end(), e.coeff_B.begin(), e.coeff_B.end());
        v.insert(v.end(), e.coeff_poly.begin(), e.coeff_poly.end());
        joined.col(map.cols() + static_cast<Eigen::Index>(l)) = Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
      }
      const int rank = numerical_rank(map);
      CHECK_MESSAGE(rank == numerical_rank(joined), "n=" << n);
      // the resonant merge folds B into A, so count distinct functions there
      if (!params.resonant()) CHECK(rank == static_cast<int>(gens.size()));
    }
  }
}

TEST_CASE("unclaimed expansion coefficients vanish") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int n = 1; n <= 6; ++n) {
    PerturbationSpec p(n);
    for (auto* t : {&p.plus_f, &p.plus_g, &p.minus_f, &p.minus_g}) t->for_each([&](int, int, double& v) { v = u(rng); });
    const auto e = assemble(SystemParams(1.0, -2.0), p).expansion;
    const int half = (n + 1) / 2;
    if (n % 2 == 1) {
      CHECK(e.coeff_A.back() == 0.0);
      CHECK(e.coeff_B.back() == 0.0);
      CHECK(e.coeff_poly[static_cast<std::size_t>(2 * half + 1)] == 0.0);
    }
    CHECK(e.coeff_poly[static_cast<std::size_t>(2 * half)] == 0.0);
  }
}

TEST_CASE("realize_perturbation reproduces placed expansions") {
  for (const auto& params : {SystemParams(1.0, -2.0), SystemParams(1.0, -1.0)}) {
    for (int n = 1; n <= 3; ++n) {
      const int h = realizable_bound(n, params.resonant());
      PlacementOptions opt;
      opt.r_max = 5.0;
      opt.set = GeneratingSet::realizable;
      const auto target = place_zeros(params, n, geomspace(0.2, 4.5, h), opt);
      const auto real = realize_perturbation(params, target);
      CHECK(real.residual < 1e-10);
      const auto fn = assemble(params, real.pert);
      const auto report = count_simple_zeros(fn, 5.0);
      CHECK(report.count() == static_cast<std::size_t>(h));
    }
  }
}

TEST_CASE("random search stays under H(n)") {
  for (const auto& params : {SystemParams(1.0, -2.0), SystemParams(1.0, -1.0)}) {
    for (int n = 1; n <= 2; ++n) {
      const auto s = random_search(params, n, 40, 1234 + n, 5.0, 1000);
      CHECK(s.exceeding.empty());
      CHECK(s.max_count <= s.bound);
      CHECK(s.skipped < s.draws / 2);
    }
  }
}

TEST_CASE("smooth placement attains n zeros") {
  for (int n = 1; n <= 4; ++n) {
    const auto targets = linspace(0.15, 0.85, n);
    const auto e = place_smooth_zeros(1.0, n, targets);
    const auto report = count_simple_zeros([&](double r) { return eval_smooth(1.0, e, r); }, 0.999);
    REQUIRE(report.count() == static_cast<std::size_t>(n));
    // the coefficients, and with them the rounding of the zeros, grow with n
    const double tol = n <= 3 ? 1e-9 : 1e-7;
    for (int k = 0; k < n; ++k) {
      CHECK(std::abs(report.zeros[static_cast<std::size_t>(k)].location - targets[static_cast<std::size_t>(k)]) < tol);
    }
  }
  const auto s = random_smooth_search(1.0, 2, 40, 77, 0.0, 1000);
  CHECK(s.exceeding.empty());
}
