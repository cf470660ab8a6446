#include "pwc/averaged_function.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "arc_reduction.hpp"
#include "pwc/errors.hpp"
#include "pwc/kernel_integrals.hpp"

namespace pwc {
namespace {

template <class S>
struct SideReduction {
  std::vector<S> kernel;  // by power of r (only even powers populated)
  std::vector<S> mono;
};

template <class S, class FromDouble, class Moment>
std::pair<SideReduction<S>, SideReduction<S>> reduce_both(const SystemParams& params,
                                                          const PerturbationSpec& pert,
                                                          FromDouble&& from_double,
                                                          Moment&& half_moment) {
  auto convert = [&](const TriangularTable<double>& t) {
    return t.map<S>([&](double v) { return from_double(v); });
  };
  const SigmaTauTable<S> st =
      sigma_tau_from(convert(pert.plus_f), convert(pert.plus_g), convert(pert.minus_f),
                     convert(pert.minus_g));
  const STTable<S> coeffs = st_coeffs(st);

  const S a = from_double(params.a());
  const S b = from_double(params.b());
  const S two(2);
  auto right_moment = [&](int k) { return half_moment(k); };
  auto left_moment = [&](int k) { return (k % 2 == 0) ? half_moment(k) : S(0) - half_moment(k); };

  auto right = detail::reduce_arc(coeffs.S, a, two / (a * a), right_moment);
  auto left = detail::reduce_arc(coeffs.T_, b, S(0) - two / (b * b), left_moment);
  return {{right.kernel, right.mono}, {left.kernel, left.mono}};
}

std::vector<PiRational> even_part(const std::vector<PiRational>& by_power, int expected,
                                  const char* label) {
  std::vector<PiRational> out(static_cast<std::size_t>(expected), PiRational(0));
  for (std::size_t k = 0; k < by_power.size(); ++k) {
    if (by_power[k].is_zero()) continue;
    if (k % 2 == 1 || k / 2 >= out.size()) {
      std::ostringstream msg;
      msg << "assembly produced an unexpected " << label << " term at power " << k;
      throw std::logic_error(msg.str());
    }
    out[k / 2] = by_power[k];
  }
  return out;
}

std::vector<PiRational> padded(const std::vector<PiRational>& values, int expected,
                               const char* label) {
  std::vector<PiRational> out(static_cast<std::size_t>(expected), PiRational(0));
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k].is_zero()) continue;
    if (k >= out.size()) {
      std::ostringstream msg;
      msg << "assembly produced a " << label << " monomial of degree " << k;
      throw std::logic_error(msg.str());
    }
    out[k] = values[k];
  }
  return out;
}

std::vector<double> to_doubles(const std::vector<PiRational>& values) {
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& v : values) out.push_back(v.to_double());
  return out;
}

}  // namespace

PerturbationSpec::PerturbationSpec(int n) : plus_f(n), plus_g(n), minus_f(n), minus_g(n) {
  if (n < 1) throw std::invalid_argument("PerturbationSpec: degree must be >= 1");
}

void PerturbationSpec::validate() const {
  const int n = plus_f.degree();
  if (n < 1) throw std::invalid_argument("PerturbationSpec: degree must be >= 1");
  if (plus_g.degree() != n || minus_f.degree() != n || minus_g.degree() != n) {
    throw std::invalid_argument("PerturbationSpec: tables disagree on degree");
  }
  for (const auto* table : {&plus_f, &plus_g, &minus_f, &minus_g}) {
    table->for_each([](int, int, double v) {
      if (!std::isfinite(v)) throw std::invalid_argument("PerturbationSpec: non-finite entry");
    });
  }
}

std::vector<double> PerturbationSpec::flatten() const {
  std::vector<double> out;
  out.reserve(4 * plus_f.size());
  for (const auto* table : {&plus_f, &plus_g, &minus_f, &minus_g}) {
    table->for_each([&](int, int, double v) { out.push_back(v); });
  }
  return out;
}

PerturbationSpec PerturbationSpec::unflatten(int n, const std::vector<double>& values) {
  PerturbationSpec out(n);
  if (values.size() != 4 * out.plus_f.size()) {
    throw std::invalid_argument("PerturbationSpec::unflatten: wrong length");
  }
  std::size_t pos = 0;
  for (auto* table : {&out.plus_f, &out.plus_g, &out.minus_f, &out.minus_g}) {
    for (int total = 0; total <= n; ++total) {
      for (int i = total; i >= 0; --i) table->at(i, total - i) = values[pos++];
    }
  }
  return out;
}

PerturbationSpec& PerturbationSpec::operator+=(const PerturbationSpec& rhs) {
  if (rhs.degree() != degree()) throw std::invalid_argument("PerturbationSpec: degree mismatch");
  auto add = [](TriangularTable<double>& dst, const TriangularTable<double>& src) {
    src.for_each([&](int i, int j, double v) { dst.at(i, j) += v; });
  };
  add(plus_f, rhs.plus_f);
  add(plus_g, rhs.plus_g);
  add(minus_f, rhs.minus_f);
  add(minus_g, rhs.minus_g);
  return *this;
}

PerturbationSpec& PerturbationSpec::operator*=(double factor) {
  for (auto* table : {&plus_f, &plus_g, &minus_f, &minus_g}) {
    *table = table->map<double>([&](double v) { return factor * v; });
  }
  return *this;
}

SigmaTauTable<double> sigma_tau(const PerturbationSpec& pert) {
  return sigma_tau_from(pert.plus_f, pert.plus_g, pert.minus_f, pert.minus_g);
}

BasisExpansion BasisExpansion::zero(int n) {
  if (n < 1) throw std::invalid_argument("BasisExpansion: degree must be >= 1");
  const int half = (n + 1) / 2;
  BasisExpansion e;
  e.degree = n;
  e.coeff_A.assign(static_cast<std::size_t>(half + 2), 0.0);
  e.coeff_B.assign(static_cast<std::size_t>(half + 2), 0.0);
  e.coeff_poly.assign(static_cast<std::size_t>(2 * half + 2), 0.0);
  return e;
}

BasisExpansion& BasisExpansion::operator+=(const BasisExpansion& rhs) {
  if (rhs.degree != degree) throw std::invalid_argument("BasisExpansion: degree mismatch");
  for (std::size_t k = 0; k < coeff_A.size(); ++k) coeff_A[k] += rhs.coeff_A[k];
  for (std::size_t k = 0; k < coeff_B.size(); ++k) coeff_B[k] += rhs.coeff_B[k];
  for (std::size_t k = 0; k < coeff_poly.size(); ++k) coeff_poly[k] += rhs.coeff_poly[k];
  return *this;
}

BasisExpansion& BasisExpansion::operator*=(double factor) {
  for (auto* v : {&coeff_A, &coeff_B, &coeff_poly}) {
    for (double& c : *v) c *= factor;
  }
  return *this;
}

double AveragedFunction::operator()(double r) const { return eval_F(*this, r); }

ExactAssembly assemble_exact(const SystemParams& params, const PerturbationSpec& pert) {
  pert.validate();
  const int n = pert.degree();
  const int half = (n + 1) / 2;

  auto [right, left] = reduce_both<PiRational>(
      params, pert, [](double v) { return PiRational::from_double(v); },
      [](int k) { return wallis_half_exact(k); });

  ExactAssembly out;
  out.a = even_part(right.kernel, half + 2, "A00");
  out.c = even_part(left.kernel, half + 2, "B00");
  out.b = padded(right.mono, 2 * half + 2, "right");
  out.d = padded(left.mono, 2 * half + 2, "left");
  return out;
}

AveragedFunction assemble(const SystemParams& params, const PerturbationSpec& pert,
                          Arithmetic arithmetic) {
  pert.validate();
  const int n = pert.degree();
  const int half = (n + 1) / 2;
  BasisExpansion e = BasisExpansion::zero(n);

  if (arithmetic == Arithmetic::exact) {
    const ExactAssembly ex = assemble_exact(params, pert);
    const PiRational a = PiRational::from_double(params.a());
    const PiRational b = PiRational::from_double(params.b());
    if (!(ex.a[0] * PiRational::pi() + a * a * ex.b[0]).is_zero() ||
        !(ex.c[0] * PiRational::pi() + b * b * ex.d[0]).is_zero()) {
      throw std::logic_error("assembly violates a0 = -(a^2/pi) b0 or c0 = -(b^2/pi) d0");
    }
    const auto top = static_cast<std::size_t>(2 * half);
    if (!ex.b[top].is_zero() || !ex.d[top].is_zero()) {
      throw std::logic_error("assembly produced a nonzero r^{2[(n+1)/2]} monomial");
    }
    e.coeff_A = to_doubles(ex.a);
    e.coeff_B = to_doubles(ex.c);
    std::vector<PiRational> merged(ex.b.size());
    for (std::size_t k = 0; k < merged.size(); ++k) merged[k] = ex.b[k] + ex.d[k];
    e.coeff_poly = to_doubles(merged);
    return AveragedFunction{params, e, Provenance::assembled};
  }

  auto [right, left] = reduce_both<double>(
      params, pert, [](double v) { return v; }, [](int k) { return wallis_half(k); });
  for (std::size_t k = 0; k < right.kernel.size(); k += 2) e.coeff_A.at(k / 2) = right.kernel[k];
  for (std::size_t k = 0; k < left.kernel.size(); k += 2) e.coeff_B.at(k / 2) = left.kernel[k];
  for (std::size_t k = 0; k < right.mono.size(); ++k) e.coeff_poly.at(k) += right.mono[k];
  for (std::size_t k = 0; k < left.mono.size(); ++k) e.coeff_poly.at(k) += left.mono[k];
  return AveragedFunction{params, e, Provenance::assembled};
}

double combine(const BasisExpansion& e, double r, double A00, double B00) {
  const double r2 = r * r;
  double kernel_a = 0.0;
  double kernel_b = 0.0;
  for (std::size_t i = e.coeff_A.size(); i-- > 0;) kernel_a = kernel_a * r2 + e.coeff_A[i];
  for (std::size_t i = e.coeff_B.size(); i-- > 0;) kernel_b = kernel_b * r2 + e.coeff_B[i];
  double poly = 0.0;
  for (std::size_t i = e.coeff_poly.size(); i-- > 0;) poly = poly * r + e.coeff_poly[i];
  return kernel_a * A00 + kernel_b * B00 + poly;
}

double eval_F(const AveragedFunction& fn, double r) {
  if (!(r >= 0.0) || r >= fn.params.r0()) {
    std::ostringstream msg;
    msg << "eval_F: r = " << r << " outside [0, r0 = " << fn.params.r0() << ")";
    throw DomainError(msg.str());
  }
  if (r == 0.0) return 0.0;
  return combine(fn.expansion, r, eval_A00(r, fn.params), eval_B00(r, fn.params));
}

double oracle_F(const SystemParams& params, const PerturbationSpec& pert, double r,
                const QuadratureSpec& spec) {
  if (!(r > 0.0) || r >= params.r0()) {
    std::ostringstream msg;
    msg << "oracle_F: r = " << r << " outside (0, r0 = " << params.r0() << ")";
    throw DomainError(msg.str());
  }
  const double a = params.a();
  const double b = params.b();
  auto side = [&](const TriangularTable<double>& f, const TriangularTable<double>& g,
                  double shift) {
    return [&f, &g, r, shift](double theta) {
      const double c = std::cos(theta);
      const double s = std::sin(theta);
      const double x = r * c;
      const double y = r * s;
      const double h = (x + shift) * (x + shift);
      return (evaluate(f, x, y) * c + evaluate(g, x, y) * s) / h;
    };
  };
  const double plus = integrate(side(pert.plus_f, pert.plus_g, a), arc_interval(Arc::right), spec).value;
  const double minus = integrate(side(pert.minus_f, pert.minus_g, b), arc_interval(Arc::left), spec).value;
  return r * (plus + minus);
}

}  // namespace pwc
