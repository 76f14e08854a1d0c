#pragma once

// Umbrella header: capacity-region bounds of the optical intensity multiple
// access channel under average- or peak-power constraints.

#include "oimac/common.hpp"
#include "oimac/numerics.hpp"
#include "oimac/distribution.hpp"
#include "oimac/mutual_information.hpp"
#include "oimac/region.hpp"
#include "oimac/capacity_solver.hpp"
#include "oimac/avg_power.hpp"
#include "oimac/peak_power.hpp"

