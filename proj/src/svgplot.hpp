#pragma once

#include <string>

#include "analysis.hpp"
#include "engine.hpp"

// Minimal deterministic SVG emitter: fixed canvas, data-driven geometry, no
// timestamps. Enough for step plots of W/Q over time and queue-depth bars.

namespace bufsim::svgplot {

// Aggregate window and queue depth over time as step lines, with the loss
// threshold bdp + B drawn as a reference.
std::string timeseries(const sim::Trace& trace);

// Queue-occupancy histogram bars; the predicted-min-buffer cutoff is drawn
// as a vertical line when present.
std::string histogram(const analysis::Histogram& hist);

}  // namespace bufsim::svgplot
