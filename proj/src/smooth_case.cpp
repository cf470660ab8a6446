#include "pwc/smooth_case.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "arc_reduction.hpp"
#include "pwc/averaged_function.hpp"
#include "pwc/errors.hpp"
#include "pwc/exact.hpp"
#include "pwc/kernel_integrals.hpp"

namespace pwc {
namespace {

void check_smooth_radius(double r, double a, const char* who) {
  if (!(r >= 0.0) || !(r < std::abs(a))) {
    std::ostringstream msg;
    msg << who << ": r = " << r << " outside [0, |a| = " << std::abs(a) << ")";
    throw DomainError(msg.str());
  }
}

}  // namespace

SmoothPerturbationSpec::SmoothPerturbationSpec(int n) : f(n), g(n) {
  if (n < 1) throw std::invalid_argument("SmoothPerturbationSpec: degree must be >= 1");
}

void SmoothPerturbationSpec::validate() const {
  if (f.degree() < 1 || g.degree() != f.degree()) {
    throw std::invalid_argument("SmoothPerturbationSpec: bad degree");
  }
  for (const auto* t : {&f, &g}) {
    t->for_each([](int, int, double v) {
      if (!std::isfinite(v)) throw std::invalid_argument("SmoothPerturbationSpec: non-finite entry");
    });
  }
}

SmoothExpansion SmoothExpansion::zero(int n) {
  if (n < 1) throw std::invalid_argument("SmoothExpansion: degree must be >= 1");
  SmoothExpansion e;
  e.degree = n;
  e.alpha.assign(static_cast<std::size_t>((n + 1) / 2 + 2), 0.0);
  e.beta.assign(static_cast<std::size_t>((n - 1) / 2 + 1), 0.0);
  return e;
}

double eval_V_family(int i, int j, double r, double a) { return kernel_sq(Arc::full, i, j, r, a); }

double eval_V00(double r, double a) { return kernel_sq(Arc::full, 0, 0, r, a); }

TriangularTable<double> smooth_lambda(const SmoothPerturbationSpec& pert) {
  const TriangularTable<double> zero(pert.degree());
  return sigma_tau_from(pert.f, pert.g, zero, zero).sigma;
}

TriangularTable<double> smooth_q(const TriangularTable<double>& lambda) {
  return st_transform(lambda);
}

SmoothExpansion assemble_smooth(double a, const SmoothPerturbationSpec& pert) {
  if (!(a != 0.0) || !std::isfinite(a)) throw std::invalid_argument("assemble_smooth: a must be nonzero");
  pert.validate();
  const int n = pert.degree();

  auto exact = [](const TriangularTable<double>& t) {
    return t.map<PiRational>([](double v) { return PiRational::from_double(v); });
  };
  const TriangularTable<PiRational> zero(n);
  const auto lambda = sigma_tau_from(exact(pert.f), exact(pert.g), zero, zero).sigma;
  const auto q = st_transform(lambda);
  const PiRational shift = PiRational::from_double(a);
  const auto red = detail::reduce_arc(q, shift, PiRational(0),
                                      [](int k) { return wallis_full_exact(k); });

  SmoothExpansion e = SmoothExpansion::zero(n);
  auto place = [](const std::vector<PiRational>& by_power, std::vector<double>& out,
                  const char* label) {
    for (std::size_t k = 0; k < by_power.size(); ++k) {
      if (by_power[k].is_zero()) continue;
      if (k % 2 == 1 || k / 2 >= out.size()) {
        std::ostringstream msg;
        msg << "smooth assembly produced a " << label << " term at power " << k;
        throw std::logic_error(msg.str());
      }
      out[k / 2] = by_power[k].to_double();
    }
  };
  place(red.kernel, e.alpha, "V00");
  place(red.mono, e.beta, "monomial");

  // F(0) = 0:  alpha_0 V00(0) + beta_0 = alpha_0 2 pi / a^2 + beta_0
  const PiRational alpha0 = red.kernel.empty() ? PiRational(0) : red.kernel[0];
  const PiRational beta0 = red.mono.empty() ? PiRational(0) : red.mono[0];
  if (!(alpha0 * PiRational(0, 2) + shift * shift * beta0).is_zero()) {
    throw std::logic_error("smooth assembly violates F(0) = 0");
  }
  return e;
}

double eval_smooth(double a, const SmoothExpansion& e, double r) {
  check_smooth_radius(r, a, "eval_smooth");
  if (r == 0.0) return 0.0;
  const double r2 = r * r;
  double kernel = 0.0;
  for (std::size_t i = e.alpha.size(); i-- > 0;) kernel = kernel * r2 + e.alpha[i];
  double poly = 0.0;
  for (std::size_t i = e.beta.size(); i-- > 0;) poly = poly * r2 + e.beta[i];
  return kernel * eval_V00(r, a) + poly;
}

double oracle_smooth(double a, const SmoothPerturbationSpec& pert, double r,
                     const QuadratureSpec& spec) {
  check_smooth_radius(r, a, "oracle_smooth");
  auto integrand = [&](double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double x = r * c;
    const double y = r * s;
    return (evaluate(pert.f, x, y) * c + evaluate(pert.g, x, y) * s) / ((x + a) * (x + a));
  };
  return r * integrate(integrand, arc_interval(Arc::full), spec).value;
}

}  // namespace pwc
