#pragma once

#include "igc/baselines.hpp"
#include "igc/io.hpp"
#include "igc/losses.hpp"
#include "igc/metrics.hpp"
#include "igc/mlp.hpp"
#include "igc/model.hpp"
#include "igc/random.hpp"
#include "igc/special.hpp"
#include "igc/synth.hpp"
#include "igc/transforms.hpp"
#include "igc/types.hpp"

namespace igc {
inline constexpr const char* kVersion = "0.1.0";
}
