#pragma once

// Symbolic reduction of  sum_{i,j} S_{i,j} r^{2j} r^i K_{i,0}(r)  onto
// polynomials times the seed kernel K_{0,0} plus a polynomial, for one arc.
//
// Ladder elements are tracked as  k00 * K00 + i00 * L00 + mono(r)  where L00 is
// the linear-denominator seed. The recursions
//   r^p L_{p,0}     = moment(p-1) r^{p-1} - shift r^{p-1} L_{p-1,0}
//   r^{p+1} K_{p+1,0} = r^p L_{p,0} - shift r^p K_{p,0}
// keep k00 and i00 constant, and L00 = kappa r + shift K00 - (r^2/shift) K00
// removes the linear seed at the end.

#include <algorithm>
#include <cstddef>
#include <vector>

#include "pwc/tables.hpp"

namespace pwc::detail {

template <class S>
struct LadderTerm {
  S k00{0};
  S i00{0};
  std::vector<S> mono;
};

template <class S>
void add_scaled(std::vector<S>& dst, const std::vector<S>& src, const S& factor, std::size_t shift) {
  if (dst.size() < src.size() + shift) dst.resize(src.size() + shift, S(0));
  for (std::size_t k = 0; k < src.size(); ++k) dst[k + shift] += factor * src[k];
}

template <class S>
struct ArcReduction {
  std::vector<S> kernel;  // kernel[k] multiplies r^k K00
  std::vector<S> mono;    // mono[k] multiplies r^k
};

template <class S, class Moment>
ArcReduction<S> reduce_arc(const TriangularTable<S>& st, const S& shift, const S& kappa,
                           Moment&& moment) {
  const int top = st.degree();

  // R[p] = r^p K_{p,0},  Q[p] = r^p L_{p,0}
  std::vector<LadderTerm<S>> R(top + 1);
  std::vector<LadderTerm<S>> Q(top + 1);
  R[0].k00 = S(1);
  Q[0].i00 = S(1);
  for (int p = 1; p <= top; ++p) {
    // Q[p] = moment(p-1) r^{p-1} - shift Q[p-1]
    Q[p].i00 = -shift * Q[p - 1].i00;
    Q[p].k00 = -shift * Q[p - 1].k00;
    Q[p].mono.assign(static_cast<std::size_t>(p), S(0));
    add_scaled(Q[p].mono, Q[p - 1].mono, -shift, 0);
    Q[p].mono[static_cast<std::size_t>(p - 1)] += moment(p - 1);
    // R[p] = Q[p-1] - shift R[p-1]
    R[p].k00 = Q[p - 1].k00 - shift * R[p - 1].k00;
    R[p].i00 = Q[p - 1].i00 - shift * R[p - 1].i00;
    R[p].mono = Q[p - 1].mono;
    add_scaled(R[p].mono, R[p - 1].mono, -shift, 0);
  }

  std::vector<S> kernel;
  std::vector<S> linear;
  std::vector<S> mono;
  for (int i = 0; i <= top; ++i) {
    for (int j = 0; i + 2 * j <= top; ++j) {
      const S& coeff = st.get(i, j);
      if (coeff == S(0)) continue;
      const auto offset = static_cast<std::size_t>(2 * j);
      add_scaled(kernel, std::vector<S>{R[i].k00}, coeff, offset);
      add_scaled(linear, std::vector<S>{R[i].i00}, coeff, offset);
      add_scaled(mono, R[i].mono, coeff, offset);
    }
  }

  // L00 r^k = kappa r^{k+1} + shift K00 r^k - (1/shift) K00 r^{k+2}
  for (std::size_t k = 0; k < linear.size(); ++k) {
    if (linear[k] == S(0)) continue;
    add_scaled(kernel, std::vector<S>{shift, S(0), S(0) - S(1) / shift}, linear[k], k);
    add_scaled(mono, std::vector<S>{kappa}, linear[k], k + 1);
  }
  return {kernel, mono};
}

}  // namespace pwc::detail
