#pragma once

// Umbrella header: the exact ball-model types and maps, the renorming
// module, the homogeneous-set analyzer, and the CLI drivers.

#include "polyball/cli.hpp"
#include "polyball/dyadic.hpp"
#include "polyball/json_io.hpp"
#include "polyball/maps.hpp"
#include "polyball/model.hpp"
#include "polyball/norms.hpp"
#include "polyball/ramsey.hpp"
#include "polyball/rng.hpp"
#include "polyball/sampling.hpp"
