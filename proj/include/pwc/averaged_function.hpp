#pragma once

#include <vector>

#include "pwc/exact.hpp"
#include "pwc/quadrature.hpp"
#include "pwc/system_params.hpp"
#include "pwc/tables.hpp"

namespace pwc {

/// Degree-n perturbation f^+, g^+ (x >= 0) and f^-, g^- (x < 0):
///   f(x, y) = sum a_{i,j} x^i y^j,  g(x, y) = sum b_{i,j} x^i y^j.
struct PerturbationSpec {
  explicit PerturbationSpec(int n);

  int degree() const { return plus_f.degree(); }

  /// Throws std::invalid_argument if the four tables disagree on degree,
  /// the degree is < 1, or an entry is not finite.
  void validate() const;

  /// Concatenation plus_f, plus_g, minus_f, minus_g in TriangularTable::for_each order.
  std::vector<double> flatten() const;
  static PerturbationSpec unflatten(int n, const std::vector<double>& values);

  PerturbationSpec& operator+=(const PerturbationSpec& rhs);
  PerturbationSpec& operator*=(double factor);
  friend PerturbationSpec operator+(PerturbationSpec lhs, const PerturbationSpec& rhs) {
    return lhs += rhs;
  }
  friend PerturbationSpec operator*(double factor, PerturbationSpec p) { return p *= factor; }

  TriangularTable<double> plus_f;
  TriangularTable<double> plus_g;
  TriangularTable<double> minus_f;
  TriangularTable<double> minus_g;
};

/// sigma_{i,j} = a+_{i-1,j} + b+_{i,j-1}, tau likewise from the minus tables;
/// defined for 1 <= i + j <= n + 1 (the (0,0) slot stays zero).
template <class T>
struct SigmaTauTable {
  TriangularTable<T> sigma;
  TriangularTable<T> tau;
};

/// S_{i,j} = sum_{k=0}^{[i/2]} (-1)^k C(j+k, k) sigma_{i-2k, 2j+2k}, T from tau;
/// populated for i + 2j <= n + 1 (stored in a degree n+1 triangle).
/// S_{i,j} is the coefficient of r^{i+2j} A_{i,0}(r) in the averaged function.
template <class T>
struct STTable {
  TriangularTable<T> S;
  TriangularTable<T> T_;
};

template <class T>
SigmaTauTable<T> sigma_tau_from(const TriangularTable<T>& pf, const TriangularTable<T>& pg,
                                const TriangularTable<T>& mf, const TriangularTable<T>& mg) {
  const int top = pf.degree() + 1;
  SigmaTauTable<T> out{TriangularTable<T>(top), TriangularTable<T>(top)};
  for (int total = 1; total <= top; ++total) {
    for (int i = 0; i <= total; ++i) {
      const int j = total - i;
      out.sigma.at(i, j) = pf.get(i - 1, j) + pg.get(i, j - 1);
      out.tau.at(i, j) = mf.get(i - 1, j) + mg.get(i, j - 1);
    }
  }
  return out;
}

SigmaTauTable<double> sigma_tau(const PerturbationSpec& pert);

template <class T>
TriangularTable<T> st_transform(const TriangularTable<T>& sigma) {
  const int top = sigma.degree();
  TriangularTable<T> out(top);
  for (int i = 0; i <= top; ++i) {
    for (int j = 0; i + 2 * j <= top; ++j) {
      T sum(0);
      T binom(1);  // C(j+k, k)
      for (int k = 0; k <= i / 2; ++k) {
        if (k > 0) binom = binom * T(j + k) / T(k);
        const T term = binom * sigma.get(i - 2 * k, 2 * j + 2 * k);
        if (k % 2 == 0) {
          sum += term;
        } else {
          sum -= term;
        }
      }
      out.at(i, j) = sum;
    }
  }
  return out;
}

template <class T>
STTable<T> st_coeffs(const SigmaTauTable<T>& st) {
  return STTable<T>{st_transform(st.sigma), st_transform(st.tau)};
}

/// F(r) = sum coeff_A[i] r^{2i} A00(r) + sum coeff_B[i] r^{2i} B00(r) + sum coeff_poly[i] r^i,
/// with coeff_A, coeff_B of length [(n+1)/2] + 2 and coeff_poly of length 2 [(n+1)/2] + 2.
/// coeff_poly is the merged monomial part (b_i + d_i).
struct BasisExpansion {
  static BasisExpansion zero(int n);

  int degree = 1;
  std::vector<double> coeff_A;
  std::vector<double> coeff_B;
  std::vector<double> coeff_poly;

  /// [(n+1)/2]
  int half_degree() const { return (degree + 1) / 2; }

  BasisExpansion& operator+=(const BasisExpansion& rhs);
  BasisExpansion& operator*=(double factor);
  friend BasisExpansion operator+(BasisExpansion lhs, const BasisExpansion& rhs) {
    return lhs += rhs;
  }
  friend BasisExpansion operator*(double factor, BasisExpansion e) { return e *= factor; }
};

enum class Provenance { assembled, placed, fitted };

/// Immutable once built; safe to share across threads.
struct AveragedFunction {
  SystemParams params;
  BasisExpansion expansion;
  Provenance provenance = Provenance::assembled;

  double operator()(double r) const;
};

enum class Arithmetic { exact, floating };

/// Pre-merge coefficients of the expansion in exact arithmetic:
///   F = sum a_i r^{2i} A00 + sum b_i r^i + sum c_i r^{2i} B00 + sum d_i r^i.
struct ExactAssembly {
  std::vector<PiRational> a;
  std::vector<PiRational> b;
  std::vector<PiRational> c;
  std::vector<PiRational> d;
};

/// Exact reduction of the averaged function onto {r^i, r^{2i} A00, r^{2i} B00}.
/// a and b of `params` and all perturbation entries are converted exactly.
ExactAssembly assemble_exact(const SystemParams& params, const PerturbationSpec& pert);

/// Averaged function of the perturbation, reduced onto the basis by
/// expanding over the A/B families, dropping odd sin powers, lowering even
/// sin powers to j = 0, collapsing the i-ladders, and eliminating I00/J00.
///
/// In exact mode the structural identities are asserted before merging
///   a_0 = -(a^2/pi) b_0,  c_0 = -(b^2/pi) d_0,  b_{2[(n+1)/2]} = d_{2[(n+1)/2]} = 0
/// and a std::logic_error is thrown if any of them fails.
AveragedFunction assemble(const SystemParams& params, const PerturbationSpec& pert,
                          Arithmetic arithmetic = Arithmetic::exact);

/// Evaluates the expansion; r must lie in [0, r0). F(0) = 0 exactly.
double eval_F(const AveragedFunction& fn, double r);

/// Expansion value given precomputed kernel values at r.
double combine(const BasisExpansion& expansion, double r, double A00, double B00);

/// r f0(r) by direct adaptive quadrature of X+ over (-pi/2, pi/2) and X- over
/// (pi/2, 3 pi/2), independent of the basis expansion. Requires 0 < r < r0.
double oracle_F(const SystemParams& params, const PerturbationSpec& pert, double r,
                const QuadratureSpec& spec = {});

}  // namespace pwc
