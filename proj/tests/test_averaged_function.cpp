#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "pwc/averaged_function.hpp"
#include "pwc/errors.hpp"
#include "pwc/kernel_integrals.hpp"

using namespace pwc;

namespace {

constexpr double kPi = std::numbers::pi;

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

double random_interior(const SystemParams& p, std::mt19937_64& rng) {
  const double hi = std::isfinite(p.r0()) ? 0.9 * p.r0() : 3.0 * std::max(std::abs(p.a()), std::abs(p.b()));
  return std::uniform_real_distribution<double>(0.02 * hi, hi)(rng);
}

}  // namespace

TEST_CASE("sigma_tau") {
  {
    const auto st = sigma_tau(PerturbationSpec(3));
    st.sigma.for_each([](int, int, double v) { CHECK(v == 0.0); });
    st.tau.for_each([](int, int, double v) { CHECK(v == 0.0); });
  }
  {
    PerturbationSpec p(2);
    p.plus_f.at(0, 0) = 1.0;
    const auto st = sigma_tau(p);
    CHECK(st.sigma.degree() == 3);
    st.sigma.for_each([](int i, int j, double v) { CHECK(v == ((i == 1 && j == 0) ? 1.0 : 0.0)); });
  }
  {
    PerturbationSpec p(2);
    p.minus_f.at(0, 1) = 2.0;
    p.minus_g.at(1, 0) = 3.0;
    CHECK(sigma_tau(p).tau.at(1, 1) == 5.0);
  }
}

TEST_CASE("st_coeffs") {
  {
    SigmaTauTable<double> st{TriangularTable<double>(3), TriangularTable<double>(3)};
    st.sigma.at(1, 0) = 1.0;
    CHECK(st_coeffs(st).S.at(1, 0) == 1.0);
  }
  {
    SigmaTauTable<double> st{TriangularTable<double>(3), TriangularTable<double>(3)};
    st.sigma.at(2, 0) = 1.0;
    st.sigma.at(0, 2) = 1.0;
    CHECK(st_coeffs(st).S.at(2, 0) == 0.0);
  }
  {
    SigmaTauTable<double> st{TriangularTable<double>(4), TriangularTable<double>(4)};
    const auto out = st_coeffs(st);
    out.S.for_each([](int, int, double v) { CHECK(v == 0.0); });
  }
  {
    // S_{4,0} = s40 - C(1,1) s22 + C(2,2) s04
    SigmaTauTable<double> st{TriangularTable<double>(4), TriangularTable<double>(4)};
    st.sigma.at(4, 0) = 2.0;
    st.sigma.at(2, 2) = 3.0;
    st.sigma.at(0, 4) = 5.0;
    CHECK(st_coeffs(st).S.at(4, 0) == 4.0);
  }
}

TEST_CASE("zero perturbation assembles to zero") {
  const auto fn = assemble(SystemParams(1.0, -2.0), PerturbationSpec(3));
  for (double c : fn.expansion.coeff_A) CHECK(c == 0.0);
  for (double c : fn.expansion.coeff_B) CHECK(c == 0.0);
  for (double c : fn.expansion.coeff_poly) CHECK(c == 0.0);
  CHECK(eval_F(fn, 0.7) == 0.0);
  CHECK(oracle_F(SystemParams(1.0, -2.0), PerturbationSpec(3), 0.7) == 0.0);
}

TEST_CASE("expansion shapes") {
  for (int n = 1; n <= 6; ++n) {
    const auto fn = assemble(SystemParams(1.0, 2.0), PerturbationSpec(n));
    const int K = (n + 1) / 2;
    CHECK(fn.expansion.coeff_A.size() == static_cast<size_t>(K + 2));
    CHECK(fn.expansion.coeff_B.size() == static_cast<size_t>(K + 2));
    CHECK(fn.expansion.coeff_poly.size() == static_cast<size_t>(2 * K + 2));
  }
}

TEST_CASE("n = 1, a = 1, b = -1, a+_{0,0} = 1") {
  const SystemParams params(1.0, -1.0);
  PerturbationSpec p(1);
  p.plus_f.at(0, 0) = 1.0;
  const auto fn = assemble(params, p);
  for (double r : {0.1, 0.5, 0.9}) {
    const double want = oracle_F(params, p, r);
    CHECK(std::abs(eval_F(fn, r) - want) <= 1e-9 * std::abs(want));
  }
}

TEST_CASE("odd-symmetric integrand gives zero") {
  PerturbationSpec p(1);
  p.plus_g.at(0, 0) = 1.0;
  const SystemParams params(1.0, 1.0);
  CHECK(std::abs(oracle_F(params, p, 0.5)) < 1e-14);
  CHECK(std::abs(eval_F(assemble(params, p), 0.5)) < 1e-14);
}

TEST_CASE("n = 2 random perturbation at r = 0.7") {
  std::mt19937_64 rng(11);
  const SystemParams params(1.0, 2.0);
  const auto p = random_pert(2, rng);
  const double want = oracle_F(params, p, 0.7);
  CHECK(std::abs(eval_F(assemble(params, p), 0.7) - want) <= 1e-8 * std::abs(want));
}

TEST_CASE("eval_F basics") {
  const SystemParams params(2.0, 1.0);
  auto e = BasisExpansion::zero(1);
  e.coeff_A[1] = 1.0;
  const AveragedFunction fn{params, e, Provenance::fitted};
  CHECK(std::abs(eval_F(fn, 0.5) - 0.25 * eval_A00(0.5, params)) < 1e-15);
  CHECK(eval_F(fn, 0.0) == 0.0);

  const AveragedFunction bounded{SystemParams(-1.0, 2.0), e, Provenance::fitted};
  CHECK_THROWS_AS(eval_F(bounded, 1.0), DomainError);
  CHECK_THROWS_AS(eval_F(bounded, -0.1), DomainError);
}

TEST_CASE("eval_F matches term-by-term summation") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto params = random_params(rng);
    auto e = BasisExpansion::zero(4);
    for (auto& c : e.coeff_A) c = u(rng);
    for (auto& c : e.coeff_B) c = u(rng);
    for (auto& c : e.coeff_poly) c = u(rng);
    const double r = random_interior(params, rng);
    const double A = eval_A00(r, params), B = eval_B00(r, params);
    double want = 0.0;
    for (size_t i = 0; i < e.coeff_A.size(); ++i) want += e.coeff_A[i] * std::pow(r, 2.0 * i) * A;
    for (size_t i = 0; i < e.coeff_B.size(); ++i) want += e.coeff_B[i] * std::pow(r, 2.0 * i) * B;
    for (size_t i = 0; i < e.coeff_poly.size(); ++i) want += e.coeff_poly[i] * std::pow(r, 1.0 * i);
    const AveragedFunction fn{params, e, Provenance::fitted};
    CHECK(std::abs(eval_F(fn, r) - want) <= 1e-12 * (1.0 + std::abs(want)));
  }
}

TEST_CASE("oracle equivalence over random draws") {
  std::mt19937_64 rng(20240612);
  int worst_n = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 6;
    const auto params = random_params(rng);
    const auto p = random_pert(n, rng);
    const double r = random_interior(params, rng);
    const double want = oracle_F(params, p, r);
    const double got = eval_F(assemble(params, p), r);
    const double err = std::abs(got - want) / (1.0 + std::abs(want));
    if (err > worst) {
      worst = err;
      worst_n = n;
    }
    CHECK_MESSAGE(err <= 1e-8, "n=" << n << " a=" << params.a() << " b=" << params.b() << " r=" << r);
  }
  MESSAGE("worst relative deviation " << worst << " at n = " << worst_n);
}

TEST_CASE("floating assembly agrees with exact assembly") {
  std::mt19937_64 rng(3);
  for (int n = 1; n <= 6; ++n) {
    const auto params = random_params(rng);
    const auto p = random_pert(n, rng);
    const auto ex = assemble(params, p, Arithmetic::exact);
    const auto fl = assemble(params, p, Arithmetic::floating);
    const double r = random_interior(params, rng);
    const double want = eval_F(ex, r);
    CHECK(std::abs(eval_F(fl, r) - want) <= 1e-10 * (1.0 + std::abs(want)));
  }
}

TEST_CASE("assemble is linear") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 1 + trial % 5;
    const auto params = random_params(rng);
    const auto p = random_pert(n, rng);
    const auto q = random_pert(n, rng);
    const double alpha = 0.7, beta = -1.9;
    const auto combined = assemble(params, alpha * p + beta * q);
    const auto fp = assemble(params, p);
    const auto fq = assemble(params, q);
    for (int k = 0; k < 5; ++k) {
      const double r = random_interior(params, rng);
      const double want = alpha * eval_F(fp, r) + beta * eval_F(fq, r);
      CHECK(std::abs(eval_F(combined, r) - want) <= 1e-12 * (1.0 + std::abs(want)));
    }
  }
}

TEST_CASE("exact assembly satisfies the structural identities") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + trial % 6;
    const auto params = random_params(rng);
    const auto p = random_pert(n, rng);
    const auto ex = assemble_exact(params, p);
    const PiRational a2 = PiRational::from_double(params.a()) * PiRational::from_double(params.a());
    const PiRational b2 = PiRational::from_double(params.b()) * PiRational::from_double(params.b());
    CHECK((ex.a[0] * PiRational::pi() + a2 * ex.b[0]).is_zero());
    CHECK((ex.c[0] * PiRational::pi() + b2 * ex.d[0]).is_zero());
    const size_t top = 2 * ((n + 1) / 2);
    CHECK(ex.b[top].is_zero());
    CHECK(ex.d[top].is_zero());

    // F(0) = 0 in floating point, from the merged coefficients
    const auto fn = assemble(params, p);
    const auto& e = fn.expansion;
    const double f0 = e.coeff_A[0] * kPi / (params.a() * params.a()) +
                      e.coeff_B[0] * kPi / (params.b() * params.b()) + e.coeff_poly[0];
    CHECK(std::abs(f0) <= 1e-12 * (1.0 + std::abs(e.coeff_poly[0])));
    CHECK(e.coeff_poly[top] == 0.0);
  }
}

TEST_CASE("PerturbationSpec flatten round trip and validation") {
  std::mt19937_64 rng(1);
  const auto p = random_pert(3, rng);
  const auto flat = p.flatten();
  CHECK(flat.size() == 4 * 10);
  const auto back = PerturbationSpec::unflatten(3, flat);
  CHECK(back.plus_f == p.plus_f);
  CHECK(back.minus_g == p.minus_g);
  CHECK_THROWS_AS(PerturbationSpec::unflatten(3, std::vector<double>(7)), std::invalid_argument);
  auto bad = p;
  bad.plus_g.at(1, 1) = std::nan("");
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK_THROWS_AS(PerturbationSpec(0), std::invalid_argument);
}
