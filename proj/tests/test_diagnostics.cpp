#include "dalpha/diagnostics.hpp"
#include "dalpha/instances.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>

using namespace dalpha;
using dalpha::testing::line;
using dalpha::testing::random_labeled;

namespace {

// Two-pass brute force, written independently of the library kernels.
struct Brute {
  double sigma;
  double g;
};

Brute brute_cluster(const Dataset& ds, const std::vector<Index>& m, double alpha) {
  const double n = static_cast<double>(m.size());
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(ds.dim());
  for (Index i : m) mu += ds.point(i).transpose();
  mu /= n;
  double var = 0.0;
  for (Index i : m) var += (ds.point(i).transpose() - mu).squaredNorm();
  var /= n;
  double num = 0.0;
  for (Index z : m)
    for (Index x : m) num += std::pow((ds.point(x) - ds.point(z)).norm(), alpha);
  return {std::sqrt(var), num / (n * n) / std::pow(var, alpha / 2)};
}

}  // namespace

TEST(Sigma, Examples) {
  const Dataset pair = line({-1, 1}, {0, 0});
  EXPECT_EQ(sigma_stats(pair).sigma[0], 1.0);
  const Dataset same = line({3, 3, 3, 0, 2}, {0, 0, 0, 1, 1});
  const SigmaStats s = sigma_stats(same);
  EXPECT_EQ(s.sigma[0], 0.0);
  EXPECT_EQ(s.sigma[1], 1.0);
  EXPECT_TRUE(s.ratio_infinite);
  EXPECT_TRUE(std::isinf(s.ratio));
  EXPECT_EQ(s.opt_cost, 2.0);
}

TEST(Sigma, MatchesBruteForce) {
  const Dataset ds = random_labeled(31, 6, 400, 4);
  const SigmaStats s = sigma_stats(ds);
  double opt = 0.0;
  for (int c = 0; c < 6; ++c) {
    const auto& m = ds.members()[static_cast<std::size_t>(c)];
    const double b = brute_cluster(ds, m, 2.0).sigma;
    EXPECT_NEAR(s.sigma[static_cast<std::size_t>(c)], b, 1e-12 * b);
    EXPECT_LE(s.sigma_min, s.sigma[static_cast<std::size_t>(c)]);
    EXPECT_GE(s.sigma_max, s.sigma[static_cast<std::size_t>(c)]);
    opt += static_cast<double>(m.size()) * b * b;
  }
  EXPECT_NEAR(s.opt_cost, opt, 1e-12 * opt);
  EXPECT_DOUBLE_EQ(s.ratio, s.sigma_max / s.sigma_min);
}

TEST(Galpha, TwoIsExactlyTwo) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Dataset ds = random_labeled(seed, 2 + static_cast<int>(seed % 8), 20 + static_cast<Index>(seed * 13),
                                      1 + static_cast<Index>(seed % 5));
    const GalphaResult g = g_alpha(ds, 2.0);
    for (double v : g.per_cluster) EXPECT_NEAR(v, 2.0, 2e-9);
    EXPECT_NEAR(g.g_alpha, 2.0, 2e-9);
  }
}

TEST(Galpha, HandExample) {
  const Dataset pair = line({-1, 1}, {0, 0});
  EXPECT_DOUBLE_EQ(g_alpha(pair, 4.0).g_alpha, 8.0);
}

TEST(Galpha, MatchesBruteForce) {
  const Dataset ds = random_labeled(2, 3, 150, 3);
  for (double alpha : {3.0, 4.0, 9.5}) {
    const GalphaResult g = g_alpha(ds, alpha);
    double mx = 0.0;
    for (int c = 0; c < 3; ++c) {
      const double b = brute_cluster(ds, ds.members()[static_cast<std::size_t>(c)], alpha).g;
      EXPECT_NEAR(g.per_cluster[static_cast<std::size_t>(c)], b, 1e-10 * b);
      mx = std::max(mx, b);
    }
    EXPECT_NEAR(g.g_alpha, mx, 1e-10 * mx);
  }
}

TEST(Galpha, ScaleInvariant) {
  const Dataset ds = random_labeled(5, 4, 200, 2);
  const Dataset big(PointMatrix(ds.points() * 3.7e5), ds.labels());
  for (double alpha : {4.0, 20.0}) {
    const double a = g_alpha(ds, alpha).g_alpha, b = g_alpha(big, alpha).g_alpha;
    EXPECT_NEAR(a, b, 1e-9 * a);
  }
}

TEST(Galpha, SimplexClustersAreConcentrated) {
  for (Index n : {10, 40}) {
    const PointMatrix p = gen_regular_simplex(n, 1.0, Point::Zero(n), 0);
    const Dataset ds(p, std::vector<int>(static_cast<std::size_t>(n), 0));
    for (double alpha : {4.0, 8.0}) EXPECT_LE(std::pow(g_alpha(ds, alpha).g_alpha, 2.0 / alpha), 4.0);
  }
}

TEST(Galpha, ExclusionsAndWarnings) {
  const Dataset ds = line({5, 5, 0, 1, 9}, {0, 0, 1, 1, 2});
  const GalphaResult g = g_alpha(ds, 4.0);
  EXPECT_EQ(g.excluded, (std::vector<int>{0, 2}));
  EXPECT_TRUE(std::isnan(g.per_cluster[0]));
  EXPECT_EQ(g.warnings.size(), 2u);
  EXPECT_DOUBLE_EQ(g.g_alpha, 8.0);
  EXPECT_THROW(g_alpha(ds, 1.5), UsageError);
  EXPECT_THROW(g_alpha(line({0, 1}), 4.0), UsageError);
}

TEST(Galpha, SubsamplingIsFlaggedAndClose) {
  const Dataset ds = random_labeled(7, 2, 1200, 2, 50.0);
  GalphaOptions opt;
  opt.subsample_threshold = 300;
  opt.sample_size = 250;
  const GalphaResult approx = g_alpha(ds, 4.0, opt);
  EXPECT_TRUE(approx.approximate);
  EXPECT_EQ(approx.subsampled, (std::vector<int>{0, 1}));
  opt.exact = true;
  const GalphaResult exact = g_alpha(ds, 4.0, opt);
  EXPECT_FALSE(exact.approximate);
  EXPECT_NEAR(approx.g_alpha, exact.g_alpha, 0.1 * exact.g_alpha);
  opt.exact = false;
  EXPECT_EQ(g_alpha(ds, 4.0, opt).g_alpha, approx.g_alpha);
}

TEST(Galpha, CentroidAlphaCostBoundedByMoment) {
  const Dataset ds = random_labeled(9, 5, 300, 3);
  const SigmaStats s = sigma_stats(ds);
  for (double alpha : {3.0, 4.0, 8.0}) {
    const GalphaResult g = g_alpha(ds, alpha);
    for (int c = 0; c < 5; ++c) {
      const auto& m = ds.members()[static_cast<std::size_t>(c)];
      const double lhs = cost_alpha_about_centroid(ds, m, alpha);
      const double rhs = g.per_cluster[static_cast<std::size_t>(c)] * static_cast<double>(m.size()) *
                         std::pow(s.sigma[static_cast<std::size_t>(c)], alpha);
      EXPECT_LE(lhs, rhs * (1 + 1e-9));
    }
  }
}

TEST(WeightClasses, Examples) {
  const std::vector<Index> a{3, 5, 9};
  const WeightClasses wa = weight_classes(a);
  EXPECT_EQ(wa.histogram, (std::map<int, Index>{{1, 1}, {2, 1}, {3, 1}}));
  EXPECT_EQ(wa.ell, 3);
  EXPECT_EQ(weight_classes(std::vector<Index>{7, 7, 7}).ell, 1);
  const WeightClasses wb = weight_classes(std::vector<Index>{2, 3});
  EXPECT_EQ(wb.ell, 1);
  EXPECT_EQ(wb.histogram.at(1), 2);
  EXPECT_EQ(weight_class_of(1), 0);
  EXPECT_EQ(weight_class_of(1024), 10);
  EXPECT_EQ(weight_class_of(1023), 9);
}

TEST(WeightClasses, Invariants) {
  Philox rng(4);
  for (int rep = 0; rep < 200; ++rep) {
    const auto k = static_cast<std::size_t>(1 + rng.uniform_index(20));
    std::vector<Index> sizes(k);
    for (auto& s : sizes) s = static_cast<Index>(1 + rng.uniform_index(5000));
    const WeightClasses w = weight_classes(sizes);
    Index total = 0;
    for (const auto& [i, c] : w.histogram) total += c;
    EXPECT_EQ(total, static_cast<Index>(k));
    const Index nmax = *std::max_element(sizes.begin(), sizes.end());
    EXPECT_LE(w.ell, std::min<Index>(static_cast<Index>(k), 1 + static_cast<Index>(std::floor(std::log2(nmax)))));
    for (std::size_t c = 0; c < k; ++c) {
      const int i = w.cluster_class[c];
      EXPECT_GE(sizes[c], Index{1} << i);
      EXPECT_LT(sizes[c], Index{1} << (i + 1));
    }
  }
}

TEST(Bound, Constants) {
  EXPECT_DOUBLE_EQ(f_alpha(4.0), 16.0);
  EXPECT_DOUBLE_EQ(h_alpha(4.0), 0.5);
  for (double a : {3.0, 4.0, 6.0, 38.0}) {
    EXPECT_DOUBLE_EQ(theorem_bound(a, 1.0, 1.0, 1, 16), f_alpha(a));
    const double u = a / 2 - 1;
    const double q = std::pow(2.0, 2 / a - 1);
    EXPECT_NEAR(potential_global_constant(a), 16 * std::pow(u, 1 - 2 / a) / u * (2 - q) / (1 - q),
                1e-12 * potential_global_constant(a));
    EXPECT_NEAR(hit_cost_factor(a, 5.0), 4 * std::exp(1.0) + (a + 1) * (a + 1) * std::pow(5.0, 2 / a), 1e-12 * a * a);
  }
  EXPECT_THROW(theorem_bound(2.0, 1, 1, 1, 4), UsageError);
  EXPECT_THROW(theorem_bound(4.0, 1, 0.5, 1, 4), UsageError);
  EXPECT_THROW(theorem_bound(std::numeric_limits<double>::infinity(), 1, 1, 1, 4), UsageError);
}

TEST(Bound, Terms) {
  const BoundTerms b = theorem_bound_terms(4.0, 9.0, 2.0, 3, 4);
  EXPECT_EQ(b.ell_term, 2.0);
  const double shape = std::pow(9.0, 0.5) * std::pow(2.0, 1.0) * std::pow(2.0, 0.5);
  EXPECT_NEAR(b.clean_bound, 16.0 * shape, 1e-12 * b.clean_bound);
  EXPECT_NEAR(b.explicit_f, (4 * std::exp(1.0) + 25) * b.global_constant, 1e-12 * b.explicit_f);
  EXPECT_NEAR(b.explicit_bound, b.explicit_f * shape, 1e-12 * b.explicit_bound);
  EXPECT_NEAR(b.additive_bound, b.hit_factor + 2 * b.global_constant * shape, 1e-12 * b.additive_bound);
  EXPECT_EQ(theorem_bound_terms(4.0, 1, 1, 5, 1024).ell_term, 5.0);
}

TEST(CostRatio, CentroidsGiveOne) {
  const Dataset ds = random_labeled(3, 4, 400, 2, 1000.0);
  LloydOptions none;
  none.max_iters = 0;
  const LloydResult at_centroids = lloyd_run(ds, cluster_centroids(ds), none);
  EXPECT_NEAR(*cost_ratio(ds, at_centroids), 1.0, 1e-12);
  const CenterSet cs = make_center_set(ds, std::vector<Index>{0, 1});
  EXPECT_NEAR(*cost_ratio(ds, cs), total_cost(cs, 2.0) / sigma_stats(ds).opt_cost, 1e-15);
  const Dataset zero = line({1, 1, 2}, {0, 0, 1});
  EXPECT_FALSE(cost_ratio(zero, 3.0).has_value());
}

TEST(ParamReport, JsonShape) {
  const Dataset ds = line({0, 2, 5, 5, 9, 11}, {0, 0, 1, 1, 2, 2});
  const auto j = to_json(param_report(ds, 4.0));
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"alpha", "n", "d", "k", "cluster_sizes", "sigma", "sigma_max",
                                            "sigma_min", "sigma_ratio", "opt_cost", "g_alpha", "g_per_cluster",
                                            "g_excluded", "g_approximate", "g_subsampled", "weight_histogram", "ell",
                                            "bound", "warnings"}));
  EXPECT_EQ(j["sigma_ratio"], "inf");
  EXPECT_EQ(j["g_per_cluster"][1], "nan");
  EXPECT_TRUE(j["bound"].is_null());
  const auto ok = to_json(param_report(line({0, 2, 5, 6, 9, 11}, {0, 0, 1, 1, 2, 2}), 4.0));
  EXPECT_TRUE(ok["bound"].is_object());
  EXPECT_EQ(ok["bound"]["f"], 16.0);
}
