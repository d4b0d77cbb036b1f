#pragma once

// Umbrella header: spectral analysis of equity cross-correlation matrices
// against random-matrix predictions, plus the graph and time-evolution
// diagnostics built on top of it.

#include "corrspec/common.hpp"
#include "corrspec/correlation.hpp"
#include "corrspec/csv.hpp"
#include "corrspec/decomposition.hpp"
#include "corrspec/jacobi.hpp"
#include "corrspec/market_data.hpp"
#include "corrspec/network.hpp"
#include "corrspec/returns.hpp"
#include "corrspec/rng.hpp"
#include "corrspec/spectral.hpp"
#include "corrspec/stats.hpp"
#include "corrspec/synth.hpp"
#include "corrspec/temporal.hpp"
