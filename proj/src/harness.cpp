#include "dalpha/harness.hpp"

#include "dalpha/diagnostics.hpp"
#include "dalpha/error.hpp"
#include "dalpha/svg.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <set>
#include <thread>

namespace dalpha {

std::uint64_t trial_seed(std::uint64_t base_seed, Index trial) noexcept {
  return base_seed ^ static_cast<std::uint64_t>(trial);
}

void validate(const ExperimentConfig& c) {
  validate(c.instance);
  if (c.alphas.empty()) throw UsageError("alphas must not be empty");
  for (double a : c.alphas) {
    if (!(a >= 0.0)) throw UsageError("alphas must be non-negative");
  }
  if (c.methods.empty()) throw UsageError("methods must not be empty");
  if (c.k < 0) throw UsageError("k must be non-negative (0 selects the cluster count)");
  if (c.m_candidates < 0) throw UsageError("m_candidates must be non-negative");
  if (c.trials < 1) throw UsageError("trials must be at least 1");
  if (c.lloyd.max_iters < 0) throw UsageError("lloyd.max_iters must be non-negative");
  if (!(c.lloyd.tol >= 0.0)) throw UsageError("lloyd.tol must be non-negative");
  if (c.workers < 1) throw UsageError("workers must be at least 1");
}

namespace {

using nlohmann::json;

void reject_unknown(const json& j, std::initializer_list<std::string_view> allowed, const std::string& where) {
  if (!j.is_object()) throw UsageError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw UsageError(where + ": unknown field '" + key + "'");
  }
}

template <typename T>
T field(const json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw UsageError(where + ": field '" + key + "': " + e.what());
  }
}

double alpha_from_json(const json& j) {
  if (j.is_number()) return parse_alpha(format_double(j.get<double>()));
  if (j.is_string()) return parse_alpha(j.get<std::string>());
  throw UsageError("alphas entries must be numbers or \"inf\"");
}

}  // namespace

ExperimentConfig experiment_from_json(const json& j) {
  const std::string where = "config";
  reject_unknown(j,
                 {"instance", "alphas", "methods", "k", "m_candidates", "trials", "run_lloyd", "lloyd", "base_seed",
                  "resample_per_trial", "check_lemmas", "workers", "outputs"},
                 where);
  ExperimentConfig c;
  if (!j.contains("instance")) throw UsageError("config: missing 'instance'");
  c.instance = instance_from_json(j["instance"]);
  if (!j.contains("alphas") || !j["alphas"].is_array()) throw UsageError("config: 'alphas' must be an array");
  for (const auto& a : j["alphas"]) c.alphas.push_back(alpha_from_json(a));
  if (j.contains("methods")) {
    if (!j["methods"].is_array()) throw UsageError("config: 'methods' must be an array");
    c.methods.clear();
    for (const auto& m : j["methods"]) {
      if (!m.is_string()) throw UsageError("config: methods entries must be strings");
      c.methods.push_back(parse_method(m.get<std::string>()));
    }
  }
  if (j.contains("k")) c.k = field<Index>(j, "k", where);
  if (j.contains("m_candidates")) c.m_candidates = field<Index>(j, "m_candidates", where);
  if (j.contains("trials")) c.trials = field<Index>(j, "trials", where);
  if (j.contains("run_lloyd")) c.run_lloyd = field<bool>(j, "run_lloyd", where);
  if (j.contains("lloyd")) {
    const json& l = j["lloyd"];
    reject_unknown(l, {"max_iters", "tol"}, "config.lloyd");
    if (l.contains("max_iters")) c.lloyd.max_iters = field<Index>(l, "max_iters", "config.lloyd");
    if (l.contains("tol")) c.lloyd.tol = field<double>(l, "tol", "config.lloyd");
  }
  if (j.contains("base_seed")) c.base_seed = field<std::uint64_t>(j, "base_seed", where);
  if (j.contains("resample_per_trial")) c.resample_per_trial = field<bool>(j, "resample_per_trial", where);
  if (j.contains("check_lemmas")) c.check_lemmas = field<bool>(j, "check_lemmas", where);
  if (j.contains("workers")) c.workers = field<int>(j, "workers", where);
  if (j.contains("outputs")) {
    const json& o = j["outputs"];
    reject_unknown(o, {"csv", "svg"}, "config.outputs");
    if (o.contains("csv")) c.out_csv = field<std::string>(o, "csv", "config.outputs");
    if (o.contains("svg")) c.out_svg = field<std::string>(o, "svg", "config.outputs");
  }
  validate(c);
  return c;
}

ExperimentConfig load_experiment(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw UsageError(path.string() + ": invalid JSON: " + e.what());
  }
  return experiment_from_json(j);
}

nlohmann::ordered_json to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["instance"] = to_json(c.instance);
  auto alphas = nlohmann::ordered_json::array();
  for (double a : c.alphas) {
    if (std::isinf(a)) {
      alphas.push_back("inf");
    } else {
      alphas.push_back(a);
    }
  }
  j["alphas"] = alphas;
  auto methods = nlohmann::ordered_json::array();
  for (Method m : c.methods) methods.push_back(std::string(to_string(m)));
  j["methods"] = methods;
  j["k"] = c.k;
  j["m_candidates"] = c.m_candidates;
  j["trials"] = c.trials;
  j["run_lloyd"] = c.run_lloyd;
  j["lloyd"] = {{"max_iters", c.lloyd.max_iters}, {"tol", c.lloyd.tol}};
  j["base_seed"] = c.base_seed;
  j["resample_per_trial"] = c.resample_per_trial;
  j["check_lemmas"] = c.check_lemmas;
  j["workers"] = c.workers;
  j["outputs"] = {{"csv", c.out_csv}, {"svg", c.out_svg}};
  return j;
}

bool TrialResult::operator==(const TrialResult& o) const {
  auto same = [](double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; };
  return same(alpha, o.alpha) && method == o.method && trial == o.trial && same(seed_cost2, o.seed_cost2) &&
         same(seed_ratio, o.seed_ratio) && same(lloyd_cost2, o.lloyd_cost2) && same(lloyd_ratio, o.lloyd_ratio) &&
         lloyd_iters == o.lloyd_iters && undiscovered == o.undiscovered;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

SeedingResult run_method(const Dataset& ds, Method method, double alpha, Index k, Index m, Philox& rng) {
  switch (method) {
    case Method::dalpha: return dalpha_seed(ds, k, alpha, rng);
    case Method::greedy: return greedy_seed(ds, k, m > 0 ? m : default_candidates(k), rng);
    case Method::uniform: return uniform_seed(ds, k, rng);
  }
  throw UsageError("unhandled seeding method");
}

Index count_undiscovered(const Dataset& ds, const SeedingTrace& trace) {
  std::set<int> seen;
  for (const auto& s : trace.steps) seen.insert(ds.label(s.point));
  return ds.num_clusters() - static_cast<Index>(seen.size());
}

struct TrialOutput {
  std::vector<TrialResult> rows;  // alpha-major, then method
  LemmaReport lemmas;
};

TrialOutput run_trial(const ExperimentConfig& config, const Dataset* fixed, Index trial) {
  const std::uint64_t seed = trial_seed(config.base_seed, trial);
  std::optional<Dataset> local;
  if (!fixed) local.emplace(generate(config.instance, seed));
  const Dataset& ds = fixed ? *fixed : *local;
  require_labels(ds, "experiment");
  const Index k = config.k > 0 ? config.k : ds.num_clusters();
  const double opt = sigma_stats(ds).opt_cost;
  auto ratio = [opt](double cost) { return opt == 0.0 ? kNaN : cost / opt; };

  TrialOutput out;
  for (double alpha : config.alphas) {
    for (Method method : config.methods) {
      Philox rng(seed);
      const SeedingResult run = run_method(ds, method, alpha, k, config.m_candidates, rng);
      TrialResult r;
      r.alpha = alpha;
      r.method = method;
      r.trial = trial;
      r.seed_cost2 = total_cost(run.centers, 2.0);
      r.seed_ratio = ratio(r.seed_cost2);
      r.undiscovered = count_undiscovered(ds, run.trace);
      if (config.run_lloyd) {
        const LloydResult lr = lloyd_run(ds, run.centers, config.lloyd);
        r.lloyd_cost2 = lr.final_cost2;
        r.lloyd_ratio = ratio(lr.final_cost2);
        r.lloyd_iters = lr.iterations;
      } else {
        r.lloyd_cost2 = kNaN;
        r.lloyd_ratio = kNaN;
      }
      if (config.check_lemmas && method == Method::dalpha && std::isfinite(alpha) && alpha >= 2.0 &&
          k == ds.num_clusters()) {
        const LemmaReport rep = verify_run(ds, run.trace, alpha);
        r.lemma_violations = rep.violations();
        if (r.lemma_violations > 0) {
          nlohmann::ordered_json dump;
          dump["alpha"] = alpha;
          dump["trial"] = trial;
          dump["seed"] = seed;
          dump["centers"] = run.trace.points();
          dump["report"] = to_json(rep);
          throw LemmaViolation("lemma check failed: " + dump.dump());
        }
        out.lemmas.merge(rep);
      }
      out.rows.push_back(r);
    }
  }
  return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  validate(config);
  const bool resample = config.resample_per_trial && config.instance.stochastic();
  std::optional<Dataset> fixed;
  if (!resample) fixed.emplace(generate(config.instance));
  if (fixed) {
    require_labels(*fixed, "experiment");
    const Index k = config.k > 0 ? config.k : fixed->num_clusters();
    if (k > fixed->size()) throw UsageError("k exceeds the number of points");
  }

  const auto trials = static_cast<std::size_t>(config.trials);
  std::vector<TrialOutput> outputs(trials);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::atomic<bool> stop{false};

  auto worker = [&] {
    while (!stop.load()) {
      const std::size_t t = next.fetch_add(1);
      if (t >= trials) return;
      try {
        outputs[t] = run_trial(config, fixed ? &*fixed : nullptr, static_cast<Index>(t));
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        stop.store(true);
        return;
      }
    }
  };

  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(config.workers), trials);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  ExperimentResult result;
  const std::size_t per_trial = config.alphas.size() * config.methods.size();
  result.trials.resize(per_trial * trials);
  for (std::size_t t = 0; t < trials; ++t) {
    for (std::size_t c = 0; c < per_trial; ++c) result.trials[c * trials + t] = outputs[t].rows[c];
    result.lemmas.merge(outputs[t].lemmas);
  }
  result.summary = summarize(result.trials, config.alphas, config.methods);
  return result;
}

std::vector<SummaryRow> summarize(const std::vector<TrialResult>& results, const std::vector<double>& alphas,
                                  const std::vector<Method>& methods) {
  struct Acc {
    Index n = 0;
    double sum = 0.0, sum_sq = 0.0;
    void add(double v) {
      if (std::isnan(v)) return;
      ++n;
      sum += v;
      sum_sq += v * v;
    }
    double mean() const { return n ? sum / static_cast<double>(n) : kNaN; }
    double sd() const {
      if (n < 2) return n ? 0.0 : kNaN;
      const double m = mean();
      return std::sqrt(std::max(0.0, (sum_sq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1)));
    }
    double se() const { return n ? sd() / std::sqrt(static_cast<double>(n)) : kNaN; }
  };

  std::vector<SummaryRow> out;
  for (double alpha : alphas) {
    for (Method method : methods) {
      Acc seed, lloyd, undiscovered, iters;
      Index count = 0;
      for (const auto& r : results) {
        const bool same_alpha = r.alpha == alpha || (std::isinf(r.alpha) && std::isinf(alpha));
        if (!same_alpha || r.method != method) continue;
        ++count;
        seed.add(r.seed_ratio);
        lloyd.add(r.lloyd_ratio);
        undiscovered.add(static_cast<double>(r.undiscovered));
        iters.add(static_cast<double>(r.lloyd_iters));
      }
      if (count == 0) continue;
      SummaryRow row;
      row.alpha = alpha;
      row.method = method;
      row.trials = count;
      row.seed_mean = seed.mean();
      row.seed_sd = seed.sd();
      row.seed_se = seed.se();
      row.lloyd_mean = lloyd.mean();
      row.lloyd_sd = lloyd.sd();
      row.lloyd_se = lloyd.se();
      row.undiscovered_mean = undiscovered.mean();
      row.iters_mean = iters.mean();
      out.push_back(row);
    }
  }
  return out;
}

std::string format_results_csv(const std::vector<TrialResult>& results) {
  std::string out = std::string(kResultsHeader) + "\n";
  for (const auto& r : results) {
    out += format_alpha(r.alpha) + "," + std::string(to_string(r.method)) + "," + std::to_string(r.trial) + "," +
           format_double(r.seed_cost2) + "," + format_double(r.seed_ratio) + "," + format_double(r.lloyd_cost2) + "," +
           format_double(r.lloyd_ratio) + "," + std::to_string(r.lloyd_iters) + "," + std::to_string(r.undiscovered) +
           "\n";
  }
  return out;
}

namespace {

double parse_number(std::string_view s, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ParseError("'" + std::string(s) + "' is not a number", line);
  }
  return v;
}

Index parse_count(std::string_view s, std::size_t line) {
  Index v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size() || v < 0) {
    throw ParseError("'" + std::string(s) + "' is not a count", line);
  }
  return v;
}

}  // namespace

std::vector<TrialResult> parse_results_csv(std::string_view text) {
  std::vector<TrialResult> out;
  std::size_t pos = 0;
  std::size_t line = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view row = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line;
    if (!row.empty() && row.back() == '\r') row.remove_suffix(1);
    if (line == 1) {
      if (row != kResultsHeader) throw ParseError("unexpected results header", line);
      continue;
    }
    if (row.empty()) throw ParseError("empty row", line);
    std::vector<std::string_view> f;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = row.find(',', start);
      f.push_back(row.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (f.size() != 9) throw ParseError("expected 9 fields, got " + std::to_string(f.size()), line);
    TrialResult r;
    try {
      r.alpha = parse_alpha(f[0]);
      r.method = parse_method(f[1]);
    } catch (const UsageError& e) {
      throw ParseError(e.what(), line);
    }
    r.trial = parse_count(f[2], line);
    r.seed_cost2 = parse_number(f[3], line);
    r.seed_ratio = parse_number(f[4], line);
    r.lloyd_cost2 = parse_number(f[5], line);
    r.lloyd_ratio = parse_number(f[6], line);
    r.lloyd_iters = parse_count(f[7], line);
    r.undiscovered = parse_count(f[8], line);
    out.push_back(r);
  }
  if (line == 0) throw ParseError("empty file, expected a header", 1);
  return out;
}

void emit_csv(const std::vector<TrialResult>& results, const std::filesystem::path& path) {
  if (results.empty()) throw UsageError("refusing to write an empty results file");
  write_text_file(path, format_results_csv(results));
}

std::string format_summary_csv(const std::vector<SummaryRow>& summary) {
  std::string out =
      "alpha,method,trials,seed_mean,seed_sd,seed_se,lloyd_mean,lloyd_sd,lloyd_se,undiscovered_mean,iters_mean\n";
  for (const auto& s : summary) {
    out += format_alpha(s.alpha) + "," + std::string(to_string(s.method)) + "," + std::to_string(s.trials) + "," +
           format_double(s.seed_mean) + "," + format_double(s.seed_sd) + "," + format_double(s.seed_se) + "," +
           format_double(s.lloyd_mean) + "," + format_double(s.lloyd_sd) + "," + format_double(s.lloyd_se) + "," +
           format_double(s.undiscovered_mean) + "," + format_double(s.iters_mean) + "\n";
  }
  return out;
}

std::string render_summary_svg(const std::vector<SummaryRow>& summary, const std::string& title) {
  if (summary.empty()) throw UsageError("refusing to plot an empty summary");
  std::vector<Method> order;
  for (const auto& s : summary) {
    if (std::find(order.begin(), order.end(), s.method) == order.end()) order.push_back(s.method);
  }
  std::vector<ChartSeries> series;
  for (Method m : order) {
    ChartSeries seed{std::string(to_string(m)), {}, {}, {}};
    ChartSeries lloyd{std::string(to_string(m)) + " + lloyd", {}, {}, {}};
    bool has_lloyd = false;
    for (const auto& s : summary) {
      if (s.method != m) continue;
      seed.x.push_back(s.alpha);
      seed.y.push_back(s.seed_mean);
      seed.err.push_back(s.seed_se);
      lloyd.x.push_back(s.alpha);
      lloyd.y.push_back(s.lloyd_mean);
      lloyd.err.push_back(s.lloyd_se);
      has_lloyd = has_lloyd || std::isfinite(s.lloyd_mean);
    }
    series.push_back(std::move(seed));
    if (has_lloyd) series.push_back(std::move(lloyd));
  }
  ChartOptions opt;
  opt.title = title;
  opt.y_label = "mean cost ratio (+/- s.e.)";
  return render_line_chart(series, opt);
}

void emit_svg(const std::vector<SummaryRow>& summary, const std::filesystem::path& path, const std::string& title) {
  write_text_file(path, render_summary_svg(summary, title));
}

}  // namespace dalpha
