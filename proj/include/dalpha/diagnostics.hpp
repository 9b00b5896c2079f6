#pragma once

#include "dalpha/geometry.hpp"
#include "dalpha/lloyd.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dalpha {

/// Centroid of each reference cluster, one per row.
PointMatrix cluster_centroids(const Dataset& ds);

struct SigmaStats {
  std::vector<double> sigma;    ///< per cluster, sqrt(cost^(2)(C, mu_C) / |C|)
  std::vector<double> cost2_mu; ///< per cluster cost^(2)(C, mu_C)
  double sigma_max = 0.0;
  double sigma_min = 0.0;
  /// sigma_max / sigma_min; +infinity when sigma_min = 0.
  double ratio = 1.0;
  bool ratio_infinite = false;
  /// sum_C |C| sigma_C^2, the reference clustering cost.
  double opt_cost = 0.0;
};

SigmaStats sigma_stats(const Dataset& ds);

struct GalphaOptions {
  /// Clusters larger than this are estimated from `sample_size` outer points.
  Index subsample_threshold = 4000;
  Index sample_size = 2000;
  bool exact = false;
  std::uint64_t seed = 0;
};

struct GalphaResult {
  double alpha = 2.0;
  /// Max over included clusters; NaN when no cluster qualifies.
  double g_alpha = 0.0;
  /// Per cluster contribution; NaN for excluded clusters.
  std::vector<double> per_cluster;
  std::vector<int> excluded;
  std::vector<int> subsampled;
  bool approximate = false;
  std::vector<std::string> warnings;
};

/// Concentration moment of one point set:
/// (1/|C|^2) sum_{z,x} ||x - z||^alpha / (cost^(2)(C, mu_C) / |C|)^(alpha/2).
/// Returns NaN for fewer than two points or zero variance. May return +infinity when the
/// value exceeds the double range.
double cluster_g_alpha(const Dataset& ds, std::span<const Index> members, double alpha);

/// Unbiased estimate of cluster_g_alpha using only the outer points in `outer`.
double cluster_g_alpha_sampled(const Dataset& ds, std::span<const Index> members, std::span<const Index> outer,
                               double alpha);

GalphaResult g_alpha(const Dataset& ds, double alpha, const GalphaOptions& options = {});

/// sum_{x in C} ||x - mu_C||^alpha.
double cost_alpha_about_centroid(const Dataset& ds, std::span<const Index> members, double alpha);

struct WeightClasses {
  std::map<int, Index> histogram;  ///< i -> k_i, clusters with |C| in [2^i, 2^(i+1))
  std::vector<int> cluster_class;  ///< class of each cluster
  int ell = 0;
};

int weight_class_of(Index size);
WeightClasses weight_classes(std::span<const Index> cluster_sizes);
WeightClasses weight_classes(const Dataset& ds);

/// alpha^2 / (alpha/2 - 1)^(2/alpha + 1).
double f_alpha(double alpha);
/// (alpha/2 - 1)^(1 - 2/alpha) / (alpha/2).
double h_alpha(double alpha);
/// 16 (alpha/2 - 1)^(1 - 2/alpha) / (alpha/2 - 1) * (2 - 2^(2/alpha - 1)) / (1 - 2^(2/alpha - 1)).
double potential_global_constant(double alpha);
/// 4e + (alpha + 1)^2 g^(2/alpha).
double hit_cost_factor(double alpha, double g);

struct BoundTerms {
  double alpha = 0.0;
  double f = 0.0;
  double h = 0.0;
  double global_constant = 0.0;
  double hit_factor = 0.0;
  /// (4e + (alpha + 1)^2) * global_constant.
  double explicit_f = 0.0;
  double log2_k = 0.0;
  double ell_term = 0.0;  ///< min(ell, log2 k)
  /// f(alpha) g^(2/alpha) ratio^(2 - 4/alpha) ell_term^(2/alpha), no hidden constant.
  double clean_bound = 0.0;
  /// explicit_f g^(2/alpha) ratio^(2 - 4/alpha) ell_term^(2/alpha).
  double explicit_bound = 0.0;
  /// hit_factor + 2 global_constant g^(2/alpha) ratio^(2 - 4/alpha) ell_term^(2/alpha).
  double additive_bound = 0.0;
};

/// Requires alpha > 2 finite, g >= 0, sigma_ratio >= 1, ell >= 1, k >= 1.
BoundTerms theorem_bound_terms(double alpha, double g, double sigma_ratio, int ell, Index k);
double theorem_bound(double alpha, double g, double sigma_ratio, int ell, Index k);

/// cost^(2) of the solution over the reference clustering cost; nullopt when the
/// reference cost is zero.
std::optional<double> cost_ratio(const Dataset& ds, double cost2);
std::optional<double> cost_ratio(const Dataset& ds, const CenterSet& cs);
std::optional<double> cost_ratio(const Dataset& ds, const LloydResult& result);

struct ParamReport {
  double alpha = 2.0;
  Index n = 0;
  Index d = 0;
  int k = 0;
  std::vector<Index> cluster_sizes;
  SigmaStats sigma;
  GalphaResult g;
  WeightClasses classes;
  std::optional<BoundTerms> bound;
  std::vector<std::string> warnings;
};

ParamReport param_report(const Dataset& ds, double alpha, const GalphaOptions& options = {});

/// Stable key order; non-finite numbers are written as the strings "inf" / "nan".
nlohmann::ordered_json to_json(const ParamReport& report);

}  // namespace dalpha
