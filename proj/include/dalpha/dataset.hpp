#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace dalpha {

using Index = Eigen::Index;

/// Points are stored one per row, contiguously, so every kernel walks memory linearly.
using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Point = Eigen::VectorXd;

/// n points in d dimensions, optionally partitioned into k reference clusters.
///
/// Invariants (checked on construction): n >= 1, d >= 1, all coordinates finite;
/// when labels are present every id in [0, k) occurs at least once.
class Dataset {
 public:
  explicit Dataset(PointMatrix points);
  Dataset(PointMatrix points, std::vector<int> labels);

  Index size() const noexcept { return points_.rows(); }
  Index dim() const noexcept { return points_.cols(); }

  const PointMatrix& points() const noexcept { return points_; }
  auto point(Index i) const { return points_.row(i); }
  const double* row_ptr(Index i) const noexcept { return points_.data() + i * points_.cols(); }

  bool labeled() const noexcept { return labels_.has_value(); }
  /// Number of reference clusters; 0 when unlabeled.
  int num_clusters() const noexcept { return k_; }
  /// Throws UsageError when the dataset carries no labels.
  const std::vector<int>& labels() const;
  int label(Index i) const { return labels()[static_cast<std::size_t>(i)]; }
  /// Point indices of each reference cluster, in ascending order.
  const std::vector<std::vector<Index>>& members() const;
  std::vector<Index> cluster_sizes() const;

 private:
  PointMatrix points_;
  std::optional<std::vector<int>> labels_;
  int k_ = 0;
  std::vector<std::vector<Index>> members_;
};

/// Throws UsageError unless the dataset has labels.
void require_labels(const Dataset& ds, const char* who);

}  // namespace dalpha
