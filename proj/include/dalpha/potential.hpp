#pragma once

#include "dalpha/seeding.hpp"

#include <json.hpp>

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace dalpha {

/// Counters of one weight class S_i.
struct ClassState {
  int i = 0;          ///< clusters with |C| in [2^i, 2^(i+1))
  Index k_i = 0;
  Index tau = 0;
  Index w = 0;
  std::vector<int> undiscovered;  ///< U_t^(i), ascending cluster ids
  double phi = 0.0;
};

/// Bookkeeping of the potential argument, observed along one seeding run.
struct PotentialState {
  double alpha = 4.0;
  Index t = 0;
  std::vector<ClassState> classes;  ///< ascending i; only nonempty classes
  std::vector<int> cluster_class;   ///< position in `classes` of each cluster
  std::vector<char> hit;            ///< H_t membership per cluster
  double phi_total = 0.0;

  const ClassState& class_of(int cluster) const {
    return classes[static_cast<std::size_t>(cluster_class[static_cast<std::size_t>(cluster)])];
  }
};

/// All counters zero, every cluster undiscovered, phi = 0. Needs labels and finite alpha >= 2.
PotentialState init_state(const Dataset& ds, double alpha);

/// (cost^(alpha)_t(C))^(2/alpha) for every cluster, from the current nearest distances.
std::vector<double> cluster_cost_roots(const Dataset& ds, const CenterSet& cs, double alpha);

/// Applies the update rules for a center drawn from `chosen_cluster`, then recomputes phi
/// from `roots` (as returned by cluster_cost_roots after the center was added).
///
/// New cluster: tau_i += 1 for its class if tau_i < k_i, w unchanged.
/// Hit cluster: for every class j with tau_j < k_j, tau_j += 1 and w_j += 1.
void advance(PotentialState& state, int chosen_cluster, const std::vector<double>& roots);

/// phi_i = (w_i / |U_i|) (2^i)^(1 - 2/alpha) sum_{C in U_i} roots[C], or 0 when U_i is empty.
void recompute_phi(PotentialState& state, const std::vector<double>& roots);

/// Throws InvariantError unless 0 <= w_i <= tau_i <= k_i and |U_i| >= k_i - tau_i.
void check_counters(const PotentialState& state);

/// Potential states after each step of `trace`, replayed on `ds`.
std::vector<PotentialState> replay(const Dataset& ds, const SeedingTrace& trace, double alpha);

/// Names used in LemmaReport.
namespace lemma {
inline constexpr const char* kTries = "tries_cover_undiscovered";           // w_i(k) >= |U_k^(i)|
inline constexpr const char* kPotential = "potential_covers_undiscovered";  // phi(k) >= cost^(2)_k(U_k) / 2
inline constexpr const char* kCounters = "counter_bounds";
inline constexpr const char* kNewCluster = "new_cluster_potential_drop";
inline constexpr const char* kHitCost = "hit_cost_dalpha";
inline constexpr const char* kHitAlphaDalpha = "hit_alpha_cost_dalpha";
inline constexpr const char* kHitAlphaUniform = "hit_alpha_cost_uniform";
inline constexpr const char* kCentroidAlpha = "centroid_alpha_cost";
}  // namespace lemma

struct LemmaStat {
  std::string name;
  Index checked = 0;
  Index violations = 0;
  /// Largest relative excess (lhs - rhs) / scale over all checks of an inequality
  /// lhs <= rhs; negative when every check held with margin.
  double max_slack = -std::numeric_limits<double>::infinity();

  /// Records lhs <= rhs. A check fails when lhs - rhs > rel_tol * scale; the default scale
  /// is max(|lhs|, |rhs|).
  void record(double lhs, double rhs, double rel_tol = 1e-9);
  void record_scaled(double lhs, double rhs, double scale, double rel_tol = 1e-9);
};

struct LemmaReport {
  std::vector<LemmaStat> lemmas;

  LemmaStat& get(const std::string& name);
  Index violations() const;
  void merge(const LemmaReport& other);
};

nlohmann::ordered_json to_json(const LemmaReport& report);

/// Replays a complete D^alpha run (trace length = number of clusters) and checks
/// w_i(k) >= |U_k^(i)| per class, phi(k) >= cost^(2)_k(U_k) / 2, and the counter bounds at
/// every step.
LemmaReport verify_run(const Dataset& ds, const SeedingTrace& trace, double alpha);

struct ExpectedChange {
  /// E[phi_j(t) - phi_j(t-1)] per entry of state.classes, conditioned on the next center
  /// falling in an undiscovered cluster of the requested class.
  std::vector<double> per_class;
  double max_change = 0.0;
  double phi_before = 0.0;
};

/// Exact conditional expectation, enumerating every point of every cluster in U^(i) with
/// its D^alpha weight. `state` must describe `cs`. Throws UsageError if the class has no
/// undiscovered cluster with positive cost.
ExpectedChange expected_decrease_check(const Dataset& ds, const CenterSet& cs, const PotentialState& state,
                                       int class_i);

struct HitCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  /// No point of the cluster can be drawn (all at distance zero); lhs = rhs = 0.
  bool degenerate = false;
  bool holds(double rel_tol = 1e-9) const;
};

/// lhs = E[cost^(2)(C, T + {z}) | z in C] under D^alpha weights,
/// rhs = (4e + (alpha + 1)^2 g_C^(2/alpha)) cost^(2)(C, mu_C).
HitCheck hit_cost_check(const Dataset& ds, const CenterSet& cs, int cluster, double alpha);

/// First: E[cost^(alpha)(C, T + {z}) | z in C] under D^alpha vs 2^(2 alpha) cost^(alpha)(C, mu_C).
/// Second: E[cost^(alpha)(C, z)] for uniform z in C vs 2^alpha cost^(alpha)(C, mu_C).
/// Both sides are reported in units of the largest squared distance inside C, raised to
/// alpha/2, so large alpha cannot overflow.
std::pair<HitCheck, HitCheck> alpha_hit_cost_checks(const Dataset& ds, const CenterSet& cs, int cluster,
                                                    double alpha);

/// cost^(alpha)(C, mu_C) <= g_C |C| sigma_C^alpha for every cluster with positive variance.
LemmaReport cost_alpha_cluster_checks(const Dataset& ds, double alpha);

struct LemmaSuiteOptions {
  Index runs = 50;
  std::uint64_t seed = 0;
  /// Mid-run states sampled per run for the exact-expectation lemmas; 0 disables them.
  Index states_per_run = 1;
};

/// `runs` D^alpha seedings with k = number of clusters, each verified with verify_run, plus
/// the exact-expectation lemmas on randomly chosen intermediate states.
LemmaReport run_lemma_suite(const Dataset& ds, double alpha, const LemmaSuiteOptions& options = {});

}  // namespace dalpha
