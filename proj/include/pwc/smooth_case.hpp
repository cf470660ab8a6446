#pragma once

#include <vector>

#include "pwc/quadrature.hpp"
#include "pwc/tables.hpp"

namespace pwc {

/// Polynomial perturbation of the smooth system
///   x' = -y (x + a)^2 + eps f(x, y),   y' = x (x + a)^2 + eps g(x, y).
struct SmoothPerturbationSpec {
  explicit SmoothPerturbationSpec(int n);
  int degree() const { return f.degree(); }
  void validate() const;

  TriangularTable<double> f;
  TriangularTable<double> g;
};

/// F(r) = sum alpha_i r^{2i} V00(r) + sum beta[i] r^{2i}.
///
/// alpha has [(n+1)/2] + 2 entries and beta has [(n-1)/2] + 1: for even n the
/// monomial part stops at r^{n-2}, one power below the odd case.
struct SmoothExpansion {
  static SmoothExpansion zero(int n);
  int degree = 1;
  std::vector<double> alpha;
  std::vector<double> beta;
};

/// V_{i,j}(r) = integral over (0, 2 pi) of cos^i sin^j / (r cos + a)^2, |r| < |a|.
double eval_V_family(int i, int j, double r, double a);

/// V00(r) = A00(r; a) + A00(-r; a).
double eval_V00(double r, double a);

/// lambda_{i,j} = a_{i-1,j} + b_{i,j-1}, degree n + 1.
TriangularTable<double> smooth_lambda(const SmoothPerturbationSpec& pert);

/// Q_{i,j} = sum_k (-1)^k C(j+k, k) lambda_{i-2k, 2j+2k}.
TriangularTable<double> smooth_q(const TriangularTable<double>& lambda);

/// Exact reduction onto {r^{2i}, r^{2i} V00}. Throws std::logic_error if an
/// odd power, a monomial beyond the beta range, or F(0) != 0 shows up.
SmoothExpansion assemble_smooth(double a, const SmoothPerturbationSpec& pert);

/// Requires 0 <= r < |a|.
double eval_smooth(double a, const SmoothExpansion& e, double r);

/// r times the integral over (0, 2 pi) of (f cos + g sin) / (r cos + a)^2.
double oracle_smooth(double a, const SmoothPerturbationSpec& pert, double r,
                     const QuadratureSpec& spec = {});

}  // namespace pwc
