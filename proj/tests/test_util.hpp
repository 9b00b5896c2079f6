#pragma once

#include "dalpha/dataset.hpp"
#include "dalpha/rng.hpp"

#include <random>
#include <vector>

namespace dalpha::testing {

// Random labeled points: k clusters with at least `min_size` members each, centres spread
// over a box of side `spread`.
inline Dataset random_labeled(std::uint64_t seed, int k, Index n, Index d, double spread = 20.0,
                              Index min_size = 2) {
  Philox rng(seed);
  std::normal_distribution<double> normal;
  PointMatrix centres(k, d);
  for (Index c = 0; c < k; ++c)
    for (Index j = 0; j < d; ++j) centres(c, j) = (rng.uniform01() - 0.5) * spread;
  PointMatrix pts(n, d);
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const int c = i < k * min_size ? static_cast<int>(i % k) : static_cast<int>(rng.uniform_index(k));
    labels[static_cast<std::size_t>(i)] = c;
    for (Index j = 0; j < d; ++j) pts(i, j) = centres(c, j) + normal(rng);
  }
  return Dataset(std::move(pts), std::move(labels));
}

inline Dataset line(std::initializer_list<double> xs, std::vector<int> labels = {}) {
  PointMatrix pts(static_cast<Index>(xs.size()), 1);
  Index i = 0;
  for (double x : xs) pts(i++, 0) = x;
  if (labels.empty()) return Dataset(std::move(pts));
  return Dataset(std::move(pts), std::move(labels));
}

}  // namespace dalpha::testing
