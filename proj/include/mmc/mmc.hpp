#pragma once

#include "mmc/barycenter.hpp"
#include "mmc/errors.hpp"
#include "mmc/generators.hpp"
#include "mmc/hyperbolic.hpp"
#include "mmc/io.hpp"
#include "mmc/maps.hpp"
#include "mmc/observables.hpp"
#include "mmc/report.hpp"
#include "mmc/rng.hpp"
#include "mmc/screens.hpp"
#include "mmc/space.hpp"
#include "mmc/sweep.hpp"
#include "mmc/tree.hpp"
#include "mmc/vec.hpp"
#include "mmc/verify.hpp"
