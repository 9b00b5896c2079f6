#include "dalpha/lloyd.hpp"

#include "dalpha/error.hpp"

#include <algorithm>
#include <cmath>

namespace dalpha {

double assign_points(const Dataset& ds, const PointMatrix& centers, std::vector<Index>& assignment,
                     std::vector<double>& nearest_sq) {
  if (centers.rows() < 1) throw UsageError("Lloyd needs at least one center");
  if (centers.cols() != ds.dim()) throw UsageError("center dimension does not match the dataset");
  const Index n = ds.size();
  const Index d = ds.dim();
  assignment.assign(static_cast<std::size_t>(n), 0);
  nearest_sq.assign(static_cast<std::size_t>(n), 0.0);
  double cost = 0.0;
  for (Index x = 0; x < n; ++x) {
    const double* xp = ds.row_ptr(x);
    Index best = 0;
    double best_sq = detail::sq_dist(xp, centers.data(), d);
    for (Index c = 1; c < centers.rows(); ++c) {
      const double v = detail::sq_dist(xp, centers.data() + c * d, d);
      if (v < best_sq) {
        best_sq = v;
        best = c;
      }
    }
    assignment[static_cast<std::size_t>(x)] = best;
    nearest_sq[static_cast<std::size_t>(x)] = best_sq;
    cost += best_sq;
  }
  return cost;
}

namespace {

void update_centroids(const Dataset& ds, PointMatrix& centers, const std::vector<Index>& assignment,
                      std::vector<double>& nearest_sq) {
  const Index k = centers.rows();
  std::vector<Index> counts(static_cast<std::size_t>(k), 0);
  PointMatrix sums = PointMatrix::Zero(k, ds.dim());
  for (Index x = 0; x < ds.size(); ++x) {
    const Index c = assignment[static_cast<std::size_t>(x)];
    sums.row(c) += ds.point(x);
    ++counts[static_cast<std::size_t>(c)];
  }
  for (Index c = 0; c < k; ++c) {
    const Index count = counts[static_cast<std::size_t>(c)];
    if (count > 0) {
      centers.row(c) = sums.row(c) / static_cast<double>(count);
      continue;
    }
    const auto far = std::max_element(nearest_sq.begin(), nearest_sq.end());
    centers.row(c) = ds.point(far - nearest_sq.begin());
    // The chosen point now sits on a center; do not hand it to another empty cluster.
    *far = 0.0;
  }
}

}  // namespace

LloydResult lloyd_run(const Dataset& ds, const PointMatrix& initial, const LloydOptions& options) {
  if (options.max_iters < 0) throw UsageError("max_iters must be non-negative");
  if (!(options.tol >= 0.0)) throw UsageError("tol must be non-negative");
  LloydResult r;
  r.centers = initial;
  std::vector<double> nearest_sq;
  double cost = assign_points(ds, r.centers, r.assignment, nearest_sq);
  r.cost_history.push_back(cost);

  for (Index it = 1; it <= options.max_iters; ++it) {
    update_centroids(ds, r.centers, r.assignment, nearest_sq);
    const double prev = cost;
    cost = assign_points(ds, r.centers, r.assignment, nearest_sq);
    r.cost_history.push_back(cost);
    r.iterations = it;
    if (prev == 0.0 || prev - cost <= options.tol * prev) {
      r.converged = true;
      break;
    }
  }
  r.final_cost2 = cost;
  return r;
}

LloydResult lloyd_run(const Dataset& ds, const CenterSet& initial, const LloydOptions& options) {
  if (initial.empty()) throw UsageError("Lloyd needs at least one center");
  if (initial.num_points() != ds.size()) throw UsageError("CenterSet/dataset size mismatch");
  PointMatrix start(initial.size(), ds.dim());
  for (Index c = 0; c < initial.size(); ++c) start.row(c) = ds.point(initial.centers()[static_cast<std::size_t>(c)]);
  return lloyd_run(ds, start, options);
}

}  // namespace dalpha
