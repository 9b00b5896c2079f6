#include "dalpha/dataset.hpp"

#include "dalpha/error.hpp"

#include <algorithm>
#include <string>

namespace dalpha {

namespace {

void check_points(const PointMatrix& points) {
  if (points.rows() < 1) throw UsageError("dataset must contain at least one point");
  if (points.cols() < 1) throw UsageError("dataset points must have dimension >= 1");
  if (!points.allFinite()) throw UsageError("dataset coordinates must be finite");
}

}  // namespace

Dataset::Dataset(PointMatrix points) : points_(std::move(points)) { check_points(points_); }

Dataset::Dataset(PointMatrix points, std::vector<int> labels) : points_(std::move(points)) {
  check_points(points_);
  if (static_cast<Index>(labels.size()) != points_.rows()) {
    throw UsageError("label count " + std::to_string(labels.size()) + " does not match point count " +
                     std::to_string(points_.rows()));
  }
  const int max_label = *std::max_element(labels.begin(), labels.end());
  if (*std::min_element(labels.begin(), labels.end()) < 0) throw UsageError("labels must be non-negative");
  k_ = max_label + 1;
  members_.assign(static_cast<std::size_t>(k_), {});
  for (std::size_t i = 0; i < labels.size(); ++i) members_[static_cast<std::size_t>(labels[i])].push_back(static_cast<Index>(i));
  for (int c = 0; c < k_; ++c) {
    if (members_[static_cast<std::size_t>(c)].empty()) {
      throw UsageError("cluster id " + std::to_string(c) + " has no points (ids must cover [0, k))");
    }
  }
  labels_ = std::move(labels);
}

const std::vector<int>& Dataset::labels() const {
  if (!labels_) throw UsageError("dataset has no reference labels");
  return *labels_;
}

const std::vector<std::vector<Index>>& Dataset::members() const {
  if (!labels_) throw UsageError("dataset has no reference labels");
  return members_;
}

std::vector<Index> Dataset::cluster_sizes() const {
  std::vector<Index> sizes;
  sizes.reserve(members().size());
  for (const auto& m : members_) sizes.push_back(static_cast<Index>(m.size()));
  return sizes;
}

void require_labels(const Dataset& ds, const char* who) {
  if (!ds.labeled()) throw UsageError(std::string(who) + " requires a labeled dataset");
}

}  // namespace dalpha
