#pragma once

#include "dalpha/geometry.hpp"
#include "dalpha/rng.hpp"

#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace dalpha {

/// Sampling exponent selecting the farthest-point rule.
inline constexpr double kFarthestPoint = std::numeric_limits<double>::infinity();

enum class Method { dalpha, greedy, uniform };

std::string_view to_string(Method m);
Method parse_method(std::string_view name);

/// Accepts a decimal number or "inf".
double parse_alpha(std::string_view text);
std::string format_alpha(double alpha);

/// ceil(2 + ln k).
Index default_candidates(Index k);

struct SeedingConfig {
  double alpha = 2.0;
  Index k = 1;
  Method method = Method::dalpha;
  /// Greedy only; 0 selects default_candidates(k).
  Index m_candidates = 0;
  std::uint64_t rng_seed = 0;
};

void validate(const SeedingConfig& config);

struct StepRecord {
  Index point = -1;
  /// Reference cluster of `point`, or -1 for unlabeled data.
  int cluster = -1;
  /// True when no earlier center lies in `cluster`.
  bool new_cluster = false;
};

struct SeedingTrace {
  Method method = Method::dalpha;
  double alpha = 2.0;
  std::vector<StepRecord> steps;

  std::vector<Index> points() const;
};

struct SeedingResult {
  CenterSet centers;
  SeedingTrace trace;
};

/// Called after every center is added, with the updated set and the step just taken.
using StepObserver = std::function<void(const CenterSet&, const StepRecord&)>;

/// The D^alpha distribution over points given the current centers:
/// p(x) = nearest_sq[x]^(alpha/2) / sum_y nearest_sq[y]^(alpha/2).
///
/// Weights are formed as (nearest_sq / max nearest_sq)^(alpha/2), so the largest is 1 and
/// nothing overflows for large alpha. Points at distance zero get probability zero unless
/// every point is at distance zero, in which case the distribution is uniform over
/// non-centers. For alpha = infinity all mass goes to the lowest-index farthest point.
std::vector<double> dalpha_probabilities(const CenterSet& cs, double alpha);

/// Draws one point from the D^alpha distribution. Consumes one uniform variate, except
/// in farthest-point mode, which is deterministic. Throws ExhaustedError when every point
/// is already a center.
Index dalpha_step(const Dataset& ds, const CenterSet& cs, double alpha, Philox& rng);

/// cost^(2)(X, Z + {z}) computed without modifying `cs`.
double cost2_with_candidate(const Dataset& ds, const CenterSet& cs, Index z);

/// Dispatches on config.method using Philox(config.rng_seed).
SeedingResult seed(const Dataset& ds, const SeedingConfig& config, const StepObserver& observer = {});

/// First center uniform, then k - 1 D^alpha steps.
SeedingResult dalpha_seed(const Dataset& ds, Index k, double alpha, Philox& rng, const StepObserver& observer = {});

/// First center uniform; then each step draws m candidates i.i.d. from D^2 (with
/// replacement) and keeps the one with the smallest resulting cost^(2), ties to the lower
/// point index. With m = 1 the random stream and the output equal dalpha_seed(alpha = 2).
SeedingResult greedy_seed(const Dataset& ds, Index k, Index m_candidates, Philox& rng,
                          const StepObserver& observer = {});

/// k distinct points uniformly without replacement (partial Fisher-Yates).
SeedingResult uniform_seed(const Dataset& ds, Index k, Philox& rng, const StepObserver& observer = {});

}  // namespace dalpha
