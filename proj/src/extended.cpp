#include "pwc/extended.hpp"

#include <sstream>

#include "pwc/errors.hpp"
#include "seed_forms.hpp"

namespace pwc {
namespace {

// truncation 1e-3^20, cancellation ~1e-50 / 1e-3
constexpr detail::SeamRule kExtendedSeam{1e-3, 20};

}  // namespace

Extended eval_A00_extended(const Extended& r, const Extended& a) {
  if (a == 0) throw std::invalid_argument("eval_A00_extended: a must be nonzero");
  const Extended x = r / a;
  if (x == -1) throw SingularityError("eval_A00_extended: pole at the arc endpoint");
  if (x < -1) {
    std::ostringstream msg;
    msg << "eval_A00_extended: r = " << r << " outside the analyticity domain for a = " << a;
    throw DomainError(msg.str());
  }
  return 2 * detail::h_closed(x, kExtendedSeam) / (a * a);
}

Extended eval_B00_extended(const Extended& r, const Extended& b) { return eval_A00_extended(-r, b); }

}  // namespace pwc
