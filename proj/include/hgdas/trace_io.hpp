#pragma once

#include <string>
#include <vector>

#include "hgdas/hgd.hpp"

namespace hgdas {

// Shortest round-trip decimal form of a double.
std::string format_double(double v);

// CSV schema: t,mse,objective,surrogate,gamma,w_r1,w_x1,w_z1,beta_r1,beta_x1,beta_z1
// The w_* columns hold the rounded (architecture) weights; the z columns
// are present but empty for ISTA traces.
std::string trace_to_csv(const RunTrace& trace);
void export_trace_csv(const RunTrace& trace, const std::string& path);
RunTrace read_trace_csv(const std::string& path);

// One row per forward slot in order (r^0, x^0[, z^0], r^1, ...), one column
// per trace, entries are the rounded w_{.,1} in {0,1}.
std::string heatmap_to_csv(const std::vector<RunTrace>& traces);
void export_heatmap(const std::vector<RunTrace>& traces, const std::string& path);

}  // namespace hgdas
