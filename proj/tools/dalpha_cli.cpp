// Command-line front end: instance generation, seeding, Lloyd, parameter reports,
// lemma verification, experiment sweeps and the bound evaluator.

#include "dalpha/diagnostics.hpp"
#include "dalpha/error.hpp"
#include "dalpha/harness.hpp"
#include "dalpha/instances.hpp"
#include "dalpha/lloyd.hpp"
#include "dalpha/potential.hpp"
#include "dalpha/seeding.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace dalpha;
using nlohmann::ordered_json;

enum Exit { kOk = 0, kUsage = 1, kIo = 2, kLemma = 3 };

nlohmann::ordered_json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

struct GenerateArgs {
  std::string spec_path, family, preset, out;
  double edge = 100.0;
  Index n = 0, n_per_cluster = 500, m_samples = 0;
  int k = 0;
  double alpha = 4.0;
  std::uint64_t seed = 0;
};

int cmd_generate(const GenerateArgs& a) {
  InstanceSpec spec;
  if (!a.spec_path.empty()) {
    if (!a.family.empty() || !a.preset.empty()) throw UsageError("--spec excludes --family and --preset");
    spec = instance_from_json(nlohmann::json::parse(read_text_file(a.spec_path)));
  } else {
    if (a.family.empty()) throw UsageError("--family or --spec is required");
    spec.family = parse_family(a.family);
    if (!a.preset.empty()) {
      spec.preset = a.preset;
      spec.components = preset_components(a.preset, a.edge);
    }
    spec.n = a.n;
    spec.k = a.k;
    spec.n_per_cluster = a.n_per_cluster;
    spec.alpha = a.alpha;
    spec.m_samples = a.m_samples;
    spec.rng_seed = a.seed;
  }
  const Dataset ds = generate(spec);
  save_csv(ds, a.out);
  ordered_json j;
  j["out"] = a.out;
  j["n"] = ds.size();
  j["d"] = ds.dim();
  j["k"] = ds.num_clusters();
  std::cout << j.dump() << "\n";
  return kOk;
}

struct SeedArgs {
  std::string data, alpha = "2", method = "dalpha", trace, centers_out;
  Index k = 0, m = 0;
  std::uint64_t seed = 0;
};

ordered_json trace_json(const Dataset& ds, const SeedingResult& r) {
  ordered_json j;
  j["method"] = std::string(to_string(r.trace.method));
  j["alpha"] = number(r.trace.alpha);
  const bool traced = ds.labeled() && r.trace.method == Method::dalpha && std::isfinite(r.trace.alpha) &&
                      r.trace.alpha >= 2.0;
  std::vector<PotentialState> states;
  if (traced) states = replay(ds, r.trace, r.trace.alpha);
  auto steps = ordered_json::array();
  for (std::size_t t = 0; t < r.trace.steps.size(); ++t) {
    const auto& s = r.trace.steps[t];
    ordered_json step;
    step["t"] = t + 1;
    step["point"] = s.point;
    if (ds.labeled()) {
      step["cluster"] = s.cluster;
      step["event"] = s.new_cluster ? "new" : "hit";
    }
    if (traced) {
      auto classes = ordered_json::array();
      for (const auto& c : states[t].classes) {
        classes.push_back({{"i", c.i}, {"k_i", c.k_i}, {"tau", c.tau}, {"w", c.w},
                           {"undiscovered", c.undiscovered.size()}, {"phi", number(c.phi)}});
      }
      step["classes"] = classes;
      step["phi"] = number(states[t].phi_total);
    }
    steps.push_back(step);
  }
  j["steps"] = steps;
  return j;
}

int cmd_seed(const SeedArgs& a) {
  const Dataset ds = load_csv(a.data);
  SeedingConfig cfg;
  cfg.alpha = parse_alpha(a.alpha);
  cfg.k = a.k > 0 ? a.k : ds.num_clusters();
  if (cfg.k < 1) throw UsageError("--k is required for unlabeled data");
  cfg.method = parse_method(a.method);
  cfg.m_candidates = a.m;
  cfg.rng_seed = a.seed;
  const SeedingResult r = seed(ds, cfg);

  ordered_json j;
  j["centers"] = r.centers.centers();
  j["cost2"] = total_cost(r.centers, 2.0);
  if (ds.labeled()) {
    const auto ratio = cost_ratio(ds, r.centers);
    j["ratio"] = ratio ? number(*ratio) : ordered_json("undefined");
  }
  if (!a.trace.empty()) write_text_file(a.trace, trace_json(ds, r).dump(2) + "\n");
  if (!a.centers_out.empty()) {
    PointMatrix c(r.centers.size(), ds.dim());
    for (Index i = 0; i < r.centers.size(); ++i) c.row(i) = ds.point(r.centers.centers()[static_cast<std::size_t>(i)]);
    save_points_csv(c, a.centers_out);
  }
  std::cout << j.dump() << "\n";
  return kOk;
}

struct LloydArgs {
  std::string data, centers, out;
  Index max_iters = 300;
  double tol = 1e-9;
};

int cmd_lloyd(const LloydArgs& a) {
  const Dataset ds = load_csv(a.data);
  const PointMatrix start = load_points_csv(a.centers);
  const LloydResult r = lloyd_run(ds, start, LloydOptions{a.max_iters, a.tol});
  ordered_json j;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["cost2"] = r.final_cost2;
  if (ds.labeled()) {
    const auto ratio = cost_ratio(ds, r);
    j["ratio"] = ratio ? number(*ratio) : ordered_json("undefined");
  }
  if (!a.out.empty()) save_points_csv(r.centers, a.out);
  std::cout << j.dump() << "\n";
  return kOk;
}

struct ParamsArgs {
  std::string data;
  double alpha = 4.0;
  bool exact = false;
};

int cmd_params(const ParamsArgs& a) {
  const Dataset ds = load_csv(a.data);
  GalphaOptions opt;
  opt.exact = a.exact;
  std::cout << to_json(param_report(ds, a.alpha, opt)).dump(2) << "\n";
  return kOk;
}

struct VerifyArgs {
  std::string data;
  double alpha = 4.0;
  Index runs = 50, states = 1;
  std::uint64_t seed = 0;
};

int cmd_verify(const VerifyArgs& a) {
  const Dataset ds = load_csv(a.data);
  LemmaSuiteOptions opt;
  opt.runs = a.runs;
  opt.seed = a.seed;
  opt.states_per_run = a.states;
  const LemmaReport report = run_lemma_suite(ds, a.alpha, opt);
  std::cout << to_json(report).dump(2) << "\n";
  return report.violations() == 0 ? kOk : kLemma;
}

struct SweepArgs {
  std::string config, out, svg, summary;
  int workers = 0;
};

int cmd_sweep(const SweepArgs& a) {
  ExperimentConfig cfg = load_experiment(a.config);
  if (!a.out.empty()) cfg.out_csv = a.out;
  if (!a.svg.empty()) cfg.out_svg = a.svg;
  if (a.workers > 0) cfg.workers = a.workers;
  if (cfg.out_csv.empty()) throw UsageError("no CSV output path (use --out or outputs.csv)");
  const ExperimentResult r = run_experiment(cfg);
  emit_csv(r.trials, cfg.out_csv);
  if (!cfg.out_svg.empty()) emit_svg(r.summary, cfg.out_svg, std::string(to_string(cfg.instance.family)));
  if (!a.summary.empty()) write_text_file(a.summary, format_summary_csv(r.summary));
  std::cout << format_summary_csv(r.summary);
  if (cfg.check_lemmas) std::cerr << to_json(r.lemmas).dump() << "\n";
  return kOk;
}

struct BoundArgs {
  double alpha = 0.0, g = 0.0, ratio = 1.0;
  int ell = 1;
  Index k = 1;
  bool all = false;
};

int cmd_bound(const BoundArgs& a) {
  const BoundTerms b = theorem_bound_terms(a.alpha, a.g, a.ratio, a.ell, a.k);
  if (!a.all) {
    std::cout << format_double(b.clean_bound) << "\n";
    return kOk;
  }
  ordered_json j;
  j["f"] = b.f;
  j["h"] = b.h;
  j["global_constant"] = b.global_constant;
  j["hit_factor"] = b.hit_factor;
  j["explicit_f"] = b.explicit_f;
  j["ell_term"] = b.ell_term;
  j["clean"] = b.clean_bound;
  j["explicit"] = b.explicit_bound;
  j["additive"] = b.additive_bound;
  std::cout << j.dump(2) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"D^alpha seeding toolkit"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Generate an instance and write it as CSV");
  g->add_option("--spec", gen.spec_path, "Instance spec JSON (alternative to the flags below)");
  g->add_option("--family", gen.family, "gaussian_mixture, student_t_mixture, simplex_lb, galpha_lb, greedy_lb");
  g->add_option("--preset", gen.preset, "Mixture preset D1..D5");
  g->add_option("--edge", gen.edge, "Preset square/cube edge length");
  g->add_option("--n", gen.n, "Number of points (mixtures, galpha_lb)");
  g->add_option("--k", gen.k, "Number of clusters (simplex_lb, greedy_lb)");
  g->add_option("--n-per-cluster", gen.n_per_cluster, "Points per cluster (simplex_lb, greedy_lb)");
  g->add_option("--alpha", gen.alpha, "Target alpha (simplex_lb, galpha_lb)");
  g->add_option("--m-samples", gen.m_samples, "Greedy candidates the instance is built against (greedy_lb)");
  g->add_option("--seed", gen.seed, "RNG seed");
  g->add_option("--out", gen.out, "Output CSV")->required();

  SeedArgs sd;
  auto* s = app.add_subcommand("seed", "Run one seeding");
  s->add_option("--data", sd.data, "Dataset CSV")->required();
  s->add_option("--alpha", sd.alpha, "Sampling exponent, or inf");
  s->add_option("--k", sd.k, "Number of centers (default: cluster count)");
  s->add_option("--method", sd.method, "dalpha, greedy or uniform");
  s->add_option("--m", sd.m, "Greedy candidates (default ceil(2 + ln k))");
  s->add_option("--seed", sd.seed, "RNG seed");
  s->add_option("--trace", sd.trace, "Write the step trace as JSON");
  s->add_option("--centers-out", sd.centers_out, "Write the chosen centers as CSV");

  LloydArgs ll;
  auto* l = app.add_subcommand("lloyd", "Run Lloyd iterations from given centers");
  l->add_option("--data", ll.data, "Dataset CSV")->required();
  l->add_option("--centers", ll.centers, "Initial centers CSV")->required();
  l->add_option("--max-iters", ll.max_iters, "Iteration cap");
  l->add_option("--tol", ll.tol, "Relative cost decrease threshold");
  l->add_option("--out", ll.out, "Write the final centers as CSV");

  ParamsArgs pa;
  auto* p = app.add_subcommand("params", "Instance parameter report (JSON)");
  p->add_option("--data", pa.data, "Labeled dataset CSV")->required();
  p->add_option("--alpha", pa.alpha, "Exponent for g_alpha and the bound");
  p->add_flag("--exact", pa.exact, "Never subsample large clusters");

  VerifyArgs va;
  auto* v = app.add_subcommand("verify", "Run the lemma checks on seeded runs");
  v->add_option("--data", va.data, "Labeled dataset CSV")->required();
  v->add_option("--alpha", va.alpha, "Sampling exponent (>= 2)");
  v->add_option("--runs", va.runs, "Number of seeding runs");
  v->add_option("--seed", va.seed, "RNG seed");
  v->add_option("--states-per-run", va.states, "Mid-run states checked exactly per run (0 disables)");

  SweepArgs sw;
  auto* w = app.add_subcommand("sweep", "Run an experiment config");
  w->add_option("--config", sw.config, "Experiment JSON")->required();
  w->add_option("--out", sw.out, "Per-trial results CSV");
  w->add_option("--svg", sw.svg, "Summary chart");
  w->add_option("--summary", sw.summary, "Summary CSV");
  w->add_option("--workers", sw.workers, "Worker threads (overrides the config)");

  BoundArgs ba;
  auto* b = app.add_subcommand("bound", "Evaluate the approximation bound");
  b->add_option("--alpha", ba.alpha, "alpha > 2")->required();
  b->add_option("--g", ba.g, "g_alpha")->required();
  b->add_option("--sigma-ratio", ba.ratio, "sigma_max / sigma_min")->required();
  b->add_option("--ell", ba.ell, "Number of weight classes")->required();
  b->add_option("--k", ba.k, "Number of clusters")->required();
  b->add_flag("--all", ba.all, "Print every constant as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*g) return cmd_generate(gen);
    if (*s) return cmd_seed(sd);
    if (*l) return cmd_lloyd(ll);
    if (*p) return cmd_params(pa);
    if (*v) return cmd_verify(va);
    if (*w) return cmd_sweep(sw);
    if (*b) return cmd_bound(ba);
  } catch (const LemmaViolation& e) {
    std::cerr << "lemma violation: " << e.what() << "\n";
    return kLemma;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kIo;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "invalid JSON: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
