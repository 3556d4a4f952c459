#pragma once

#include "forager/harness/metrics.hpp"

namespace forager::harness {

// Writes reward_curve.csv/.svg and, when the log carries selection
// telemetry, selection_shares.csv plus one SVG per share series.
// Returns the list of file paths written.
std::vector<std::string> emit_plots(const MetricsLog& log, const std::string& out_dir,
                                    int window = 50);

// Minimal static line chart; one polyline over an axis frame.
std::string svg_line_chart(const std::vector<double>& ys, const std::string& title);

} // namespace forager::harness
