#pragma once

#include "dalpha/dataset.hpp"
#include "dalpha/error.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace dalpha {

namespace detail {

// Single summation order shared by every distance path in the library.
inline double sq_dist(const double* a, const double* b, Index d) noexcept {
  double s = 0.0;
  for (Index j = 0; j < d; ++j) {
    const double diff = a[j] - b[j];
    s += diff * diff;
  }
  return s;
}

}  // namespace detail

/// Squared Euclidean distance between two points of equal dimension.
template <typename A, typename B>
double squared_distance(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  if (a.size() != b.size()) {
    throw UsageError("squared_distance: dimension mismatch (" + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()) + ")");
  }
  double s = 0.0;
  for (Index j = 0; j < a.size(); ++j) {
    const double diff = static_cast<double>(a(j)) - static_cast<double>(b(j));
    s += diff * diff;
  }
  return s;
}

/// `sq^(power/2)`: the power-th power of a distance given its square.
inline double pow_from_sq(double sq, double power) {
  if (power == 2.0) return sq;
  return std::pow(sq, power / 2.0);
}

/// Ordered set of centers (indices into a dataset) plus the per-point distance to the
/// nearest center.
///
/// `nearest_sq()[x]` always equals the minimum over centers of `||x - c||^2`, bit for bit
/// the same as a from-scratch recomputation. Ties keep the center inserted first.
class CenterSet {
 public:
  explicit CenterSet(Index num_points);

  /// Adds point `z` as a center. O(n d). Throws UsageError on duplicates or bad index.
  void add(const Dataset& ds, Index z);

  Index num_points() const noexcept { return static_cast<Index>(nearest_sq_.size()); }
  Index size() const noexcept { return static_cast<Index>(centers_.size()); }
  bool empty() const noexcept { return centers_.empty(); }
  bool is_center(Index x) const { return is_center_[static_cast<std::size_t>(x)] != 0; }

  const std::vector<Index>& centers() const noexcept { return centers_; }
  std::span<const double> nearest_sq() const noexcept { return nearest_sq_; }
  /// Insertion slot of the nearest center for each point; -1 before the first center.
  std::span<const Index> nearest_center() const noexcept { return nearest_center_; }

 private:
  std::vector<Index> centers_;
  std::vector<double> nearest_sq_;
  std::vector<Index> nearest_center_;
  std::vector<char> is_center_;
};

/// Functional form of CenterSet::add.
CenterSet add_center(const Dataset& ds, CenterSet cs, Index z);

/// Builds a CenterSet by adding `centers` in order.
CenterSet make_center_set(const Dataset& ds, std::span<const Index> centers);

/// cost^(power)(X, Z) = sum_x nearest_sq[x]^(power/2), for power >= 2.
///
/// Throws RangeError when the value exceeds the double range; `log_total_cost` stays
/// finite in that case.
double total_cost(const CenterSet& cs, double power);

/// Natural logarithm of total_cost, evaluated after rescaling by the largest distance.
/// Returns -infinity when the cost is zero.
double log_total_cost(const CenterSet& cs, double power);

/// Per reference cluster costs under the current centers.
struct ClusterCosts {
  double alpha = 2.0;
  std::vector<double> cost2;       ///< sum_{x in C} nearest_sq[x]
  std::vector<double> cost_alpha;  ///< sum_{x in C} nearest_sq[x]^(alpha/2)
  /// (cost_alpha)^(2/alpha), evaluated with rescaling so it is finite even when
  /// cost_alpha is not.
  std::vector<double> cost_alpha_root;
};

/// Throws UsageError for unlabeled datasets or mismatched sizes, and RangeError when a
/// cluster's cost_alpha overflows.
ClusterCosts cluster_costs(const CenterSet& cs, const Dataset& ds, double alpha);

/// (sum_i v_i^(power/2))^(2/power) over squared distances, without overflow.
double power_mean_root(std::span<const double> sq, double power);

}  // namespace dalpha
