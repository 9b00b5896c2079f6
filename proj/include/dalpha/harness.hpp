#pragma once

#include "dalpha/instances.hpp"
#include "dalpha/lloyd.hpp"
#include "dalpha/potential.hpp"
#include "dalpha/seeding.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace dalpha {

struct ExperimentConfig {
  InstanceSpec instance;
  std::vector<double> alphas;
  std::vector<Method> methods{Method::dalpha};
  /// Centers per run; 0 means the number of reference clusters.
  Index k = 0;
  /// Greedy candidates; 0 means ceil(2 + ln k).
  Index m_candidates = 0;
  Index trials = 1;
  bool run_lloyd = false;
  LloydOptions lloyd;
  std::uint64_t base_seed = 0;
  /// Draw a fresh instance for every trial (stochastic families only).
  bool resample_per_trial = false;
  /// Replay every D^alpha run (alpha >= 2, k = number of clusters) through verify_run.
  bool check_lemmas = false;
  int workers = 1;
  std::string out_csv;
  std::string out_svg;
};

/// Seed of trial t: base_seed XOR t. It keys the seeding generator, and the instance
/// generator too when instances are resampled.
std::uint64_t trial_seed(std::uint64_t base_seed, Index trial) noexcept;

void validate(const ExperimentConfig& config);

/// Strict: unknown fields are rejected with UsageError.
ExperimentConfig experiment_from_json(const nlohmann::json& j);
ExperimentConfig load_experiment(const std::filesystem::path& path);
nlohmann::ordered_json to_json(const ExperimentConfig& config);

struct TrialResult {
  double alpha = 0.0;
  Method method = Method::dalpha;
  Index trial = 0;
  double seed_cost2 = 0.0;
  double seed_ratio = 0.0;   ///< NaN when the reference cost is zero
  double lloyd_cost2 = 0.0;  ///< NaN without Lloyd
  double lloyd_ratio = 0.0;
  Index lloyd_iters = 0;
  Index undiscovered = 0;    ///< reference clusters without a center after seeding
  Index lemma_violations = 0;

  bool operator==(const TrialResult& other) const;
};

struct SummaryRow {
  double alpha = 0.0;
  Method method = Method::dalpha;
  Index trials = 0;
  double seed_mean = 0.0;
  double seed_sd = 0.0;
  double seed_se = 0.0;
  double lloyd_mean = 0.0;
  double lloyd_sd = 0.0;
  double lloyd_se = 0.0;
  double undiscovered_mean = 0.0;
  double iters_mean = 0.0;
};

struct ExperimentResult {
  /// Ordered by (alpha index, method index, trial).
  std::vector<TrialResult> trials;
  std::vector<SummaryRow> summary;
  LemmaReport lemmas;
};

/// Runs every (alpha, method, trial). Trials run on `config.workers` threads; the output
/// does not depend on the worker count. Throws LemmaViolation if lemma checking is on and a
/// run fails.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Mean, sample standard deviation and standard error per (alpha, method), skipping NaN.
std::vector<SummaryRow> summarize(const std::vector<TrialResult>& results, const std::vector<double>& alphas,
                                  const std::vector<Method>& methods);

inline constexpr const char* kResultsHeader =
    "alpha,method,trial,seed_cost2,seed_ratio,lloyd_cost2,lloyd_ratio,lloyd_iters,undiscovered";

std::string format_results_csv(const std::vector<TrialResult>& results);
std::vector<TrialResult> parse_results_csv(std::string_view text);
void emit_csv(const std::vector<TrialResult>& results, const std::filesystem::path& path);

std::string format_summary_csv(const std::vector<SummaryRow>& summary);

/// Mean seed ratio (and mean Lloyd ratio when present) against alpha, one series per method.
std::string render_summary_svg(const std::vector<SummaryRow>& summary, const std::string& title = {});
void emit_svg(const std::vector<SummaryRow>& summary, const std::filesystem::path& path,
              const std::string& title = {});

}  // namespace dalpha
