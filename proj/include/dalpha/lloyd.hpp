#pragma once

#include "dalpha/geometry.hpp"

#include <vector>

namespace dalpha {

struct LloydOptions {
  Index max_iters = 300;
  /// Stop once (previous - current) <= tol * previous.
  double tol = 1e-9;
};

struct LloydResult {
  PointMatrix centers;
  /// Index of the nearest final center for each point (ties to the lower index).
  std::vector<Index> assignment;
  Index iterations = 0;
  double final_cost2 = 0.0;
  bool converged = false;
  /// cost^(2) after the initial assignment and after every iteration.
  std::vector<double> cost_history;
};

/// Assigns every point to its nearest center and returns the resulting cost^(2).
double assign_points(const Dataset& ds, const PointMatrix& centers, std::vector<Index>& assignment,
                     std::vector<double>& nearest_sq);

/// Lloyd iterations from arbitrary starting centers. One iteration is a centroid update
/// followed by a reassignment; a center left without points moves to the point currently
/// farthest from its own center.
LloydResult lloyd_run(const Dataset& ds, const PointMatrix& initial, const LloydOptions& options = {});

/// Starts from the dataset points selected in `initial`.
LloydResult lloyd_run(const Dataset& ds, const CenterSet& initial, const LloydOptions& options = {});

}  // namespace dalpha
