#pragma once

// Umbrella header for the unified search-and-track library.

#include "unisat/assignment.hpp"
#include "unisat/config.hpp"
#include "unisat/entropy.hpp"
#include "unisat/episode.hpp"
#include "unisat/filter.hpp"
#include "unisat/glmb.hpp"
#include "unisat/metrics.hpp"
#include "unisat/models.hpp"
#include "unisat/monte_carlo.hpp"
#include "unisat/planner.hpp"
#include "unisat/prior.hpp"
#include "unisat/rng.hpp"
#include "unisat/sim.hpp"
#include "unisat/track_state.hpp"
#include "unisat/types.hpp"
