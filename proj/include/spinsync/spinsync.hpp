#pragma once

// Umbrella header for the spinsync library: exact steady states of driven
// dissipative spin-1 oscillator chains, their spin-coherent-state
// synchronization measures, perturbative expansions, correlation and
// entanglement diagnostics, closed-form references, and the sweep runner.

#include "spinsync/types.hpp"
#include "spinsync/spin_algebra.hpp"
#include "spinsync/liouvillian.hpp"
#include "spinsync/sync_measures.hpp"
#include "spinsync/husimi.hpp"
#include "spinsync/perturbation.hpp"
#include "spinsync/correlations.hpp"
#include "spinsync/analytics.hpp"
#include "spinsync/config.hpp"
#include "spinsync/sweep.hpp"
