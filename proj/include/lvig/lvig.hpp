#pragma once

/// @file lvig.hpp
/// @brief Umbrella header for the lvig library.

#include "lvig/analysis.hpp"
#include "lvig/attractor_graphs.hpp"
#include "lvig/community.hpp"
#include "lvig/equilibria.hpp"
#include "lvig/errors.hpp"
#include "lvig/lcp.hpp"
#include "lvig/matrix_analysis.hpp"
#include "lvig/ode_oracle.hpp"
#include "lvig/parallel.hpp"
#include "lvig/rng.hpp"
#include "lvig/structural_stability.hpp"
#include "lvig/system_io.hpp"
#include "lvig/types.hpp"
