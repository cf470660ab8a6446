#pragma once

#include <string>

#include "pwc/harness.hpp"

namespace pwc {

/// r_max with the default applied.
double effective_r_max(const ExperimentManifest& manifest);

std::string inputs_digest(const ExperimentManifest& manifest);

}  // namespace pwc
