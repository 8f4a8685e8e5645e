#pragma once

#include "nctf/config.hpp"
#include "nctf/integrated.hpp"

namespace nctf::detail {

// Production-mode steps after an integrated or stacked sweep.
void integrated_post_steps(IntegratedState& state, const EngineConfig& config);

}  // namespace nctf::detail
