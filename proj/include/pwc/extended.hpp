#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "pwc/system_params.hpp"

namespace pwc {

/// 50 significant decimal digits.
using Extended = boost::multiprecision::cpp_bin_float_50;

/// A00(r; a) in extended precision; same domain rules as eval_A00.
Extended eval_A00_extended(const Extended& r, const Extended& a);

/// B00(r; b) = A00(-r; b).
Extended eval_B00_extended(const Extended& r, const Extended& b);

}  // namespace pwc
