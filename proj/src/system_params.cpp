#include "pwc/system_params.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pwc {

SystemParams::SystemParams(double a, double b) : a_(a), b_(b) {
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw std::invalid_argument("SystemParams: a and b must be finite");
  }
  if (a == 0.0 || b == 0.0) {
    throw std::invalid_argument("SystemParams: requires a*b != 0");
  }
}

double SystemParams::r0() const { return std::min(r1(), r2()); }

double SystemParams::default_search_bound() const {
  if (annulus_bounded()) return (1.0 - 1e-3) * r0();
  return 10.0 * std::max(std::abs(a_), std::abs(b_));
}

}  // namespace pwc
