#include "dalpha/potential.hpp"

#include "dalpha/diagnostics.hpp"
#include "dalpha/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dalpha {

namespace {

void check_alpha(double alpha) {
  if (!(alpha >= 2.0) || !std::isfinite(alpha)) throw UsageError("potential needs finite alpha >= 2");
}

bool counters_ok(const PotentialState& s) {
  for (const auto& c : s.classes) {
    if (c.w < 0 || c.w > c.tau || c.tau > c.k_i) return false;
    if (static_cast<Index>(c.undiscovered.size()) < c.k_i - c.tau) return false;
  }
  return true;
}

const std::vector<Index>& members_of(const Dataset& ds, int cluster) {
  if (cluster < 0 || cluster >= ds.num_clusters()) {
    throw UsageError("cluster " + std::to_string(cluster) + " out of range");
  }
  return ds.members()[static_cast<std::size_t>(cluster)];
}

// D^alpha weights of the members of one cluster, scaled so the largest is 1.
// Returns an empty vector when every member is at distance zero.
std::vector<double> member_weights(const std::vector<Index>& members, std::span<const double> sq, double alpha) {
  double max_sq = 0.0;
  for (Index x : members) max_sq = std::max(max_sq, sq[static_cast<std::size_t>(x)]);
  if (max_sq == 0.0) return {};
  std::vector<double> w;
  w.reserve(members.size());
  for (Index x : members) {
    const double v = sq[static_cast<std::size_t>(x)];
    w.push_back(v == 0.0 ? 0.0 : pow_from_sq(v / max_sq, alpha));
  }
  return w;
}

Point centroid_of(const Dataset& ds, const std::vector<Index>& members) {
  Point mu = Point::Zero(ds.dim());
  for (Index x : members) mu += ds.point(x).transpose();
  return mu / static_cast<double>(members.size());
}

}  // namespace

PotentialState init_state(const Dataset& ds, double alpha) {
  require_labels(ds, "init_state");
  check_alpha(alpha);
  PotentialState s;
  s.alpha = alpha;
  const auto classes = weight_classes(ds);
  for (const auto& [i, count] : classes.histogram) {
    ClassState c;
    c.i = i;
    c.k_i = count;
    s.classes.push_back(std::move(c));
  }
  s.cluster_class.resize(classes.cluster_class.size());
  for (std::size_t c = 0; c < classes.cluster_class.size(); ++c) {
    const int i = classes.cluster_class[c];
    const auto pos = std::find_if(s.classes.begin(), s.classes.end(), [i](const ClassState& cs) { return cs.i == i; });
    s.cluster_class[c] = static_cast<int>(pos - s.classes.begin());
    pos->undiscovered.push_back(static_cast<int>(c));
  }
  s.hit.assign(classes.cluster_class.size(), 0);
  return s;
}

std::vector<double> cluster_cost_roots(const Dataset& ds, const CenterSet& cs, double alpha) {
  require_labels(ds, "cluster_cost_roots");
  if (cs.num_points() != ds.size()) throw UsageError("CenterSet/dataset size mismatch");
  const auto sq = cs.nearest_sq();
  std::vector<double> roots;
  std::vector<double> buf;
  for (const auto& m : ds.members()) {
    buf.clear();
    for (Index x : m) buf.push_back(sq[static_cast<std::size_t>(x)]);
    roots.push_back(power_mean_root(buf, alpha));
  }
  return roots;
}

void recompute_phi(PotentialState& state, const std::vector<double>& roots) {
  if (roots.size() != state.hit.size()) throw UsageError("cost roots do not match the cluster count");
  state.phi_total = 0.0;
  for (auto& c : state.classes) {
    if (c.undiscovered.empty()) {
      c.phi = 0.0;
      continue;
    }
    double sum = 0.0;
    for (int id : c.undiscovered) sum += roots[static_cast<std::size_t>(id)];
    const double weight = std::pow(2.0, static_cast<double>(c.i) * (1.0 - 2.0 / state.alpha));
    c.phi = static_cast<double>(c.w) / static_cast<double>(c.undiscovered.size()) * weight * sum;
    state.phi_total += c.phi;
  }
}

void check_counters(const PotentialState& state) {
  if (!counters_ok(state)) throw InvariantError("potential counters out of bounds at t = " + std::to_string(state.t));
}

void advance(PotentialState& state, int chosen_cluster, const std::vector<double>& roots) {
  if (chosen_cluster < 0 || static_cast<std::size_t>(chosen_cluster) >= state.hit.size()) {
    throw UsageError("chosen cluster " + std::to_string(chosen_cluster) + " out of range");
  }
  auto& cls = state.classes[static_cast<std::size_t>(state.cluster_class[static_cast<std::size_t>(chosen_cluster)])];
  const auto pos = std::find(cls.undiscovered.begin(), cls.undiscovered.end(), chosen_cluster);
  const bool in_u = pos != cls.undiscovered.end();
  const bool in_h = state.hit[static_cast<std::size_t>(chosen_cluster)] != 0;
  if (in_u == in_h) {
    throw InvariantError("cluster " + std::to_string(chosen_cluster) +
                         (in_u ? " is both undiscovered and hit" : " is neither undiscovered nor hit"));
  }

  if (in_u) {
    if (cls.tau < cls.k_i) ++cls.tau;
    cls.undiscovered.erase(pos);
    state.hit[static_cast<std::size_t>(chosen_cluster)] = 1;
  } else {
    for (auto& c : state.classes) {
      if (c.tau < c.k_i) {
        ++c.tau;
        ++c.w;
      }
    }
  }
  ++state.t;
  recompute_phi(state, roots);
}

std::vector<PotentialState> replay(const Dataset& ds, const SeedingTrace& trace, double alpha) {
  PotentialState state = init_state(ds, alpha);
  CenterSet cs(ds.size());
  std::vector<PotentialState> out;
  out.reserve(trace.steps.size());
  for (const auto& step : trace.steps) {
    if (step.point < 0 || step.point >= ds.size()) throw UsageError("trace point out of range");
    if (step.cluster >= 0 && step.cluster != ds.label(step.point)) {
      throw UsageError("trace cluster does not match the dataset label of point " + std::to_string(step.point));
    }
    cs.add(ds, step.point);
    advance(state, ds.label(step.point), cluster_cost_roots(ds, cs, alpha));
    out.push_back(state);
  }
  return out;
}

void LemmaStat::record(double lhs, double rhs, double rel_tol) {
  record_scaled(lhs, rhs, std::max(std::abs(lhs), std::abs(rhs)), rel_tol);
}

void LemmaStat::record_scaled(double lhs, double rhs, double scale, double rel_tol) {
  ++checked;
  const double excess = lhs - rhs;
  double rel = 0.0;
  if (scale > 0.0) {
    rel = excess / scale;
  } else if (excess > 0.0) {
    rel = std::numeric_limits<double>::infinity();
  }
  if (std::isnan(excess) || excess > rel_tol * scale) ++violations;
  if (std::isnan(rel)) rel = std::numeric_limits<double>::infinity();
  max_slack = std::max(max_slack, rel);
}

LemmaStat& LemmaReport::get(const std::string& name) {
  for (auto& l : lemmas) {
    if (l.name == name) return l;
  }
  lemmas.push_back(LemmaStat{name});
  return lemmas.back();
}

Index LemmaReport::violations() const {
  Index v = 0;
  for (const auto& l : lemmas) v += l.violations;
  return v;
}

void LemmaReport::merge(const LemmaReport& other) {
  for (const auto& o : other.lemmas) {
    auto& mine = get(o.name);
    mine.checked += o.checked;
    mine.violations += o.violations;
    mine.max_slack = std::max(mine.max_slack, o.max_slack);
  }
}

nlohmann::ordered_json to_json(const LemmaReport& report) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& l : report.lemmas) {
    nlohmann::ordered_json j;
    j["name"] = l.name;
    j["checked"] = l.checked;
    j["violations"] = l.violations;
    if (std::isfinite(l.max_slack)) {
      j["max_slack"] = l.max_slack;
    } else {
      j["max_slack"] = l.max_slack > 0 ? "inf" : "-inf";
    }
    arr.push_back(j);
  }
  nlohmann::ordered_json out;
  out["lemmas"] = arr;
  out["violations"] = report.violations();
  return out;
}

LemmaReport verify_run(const Dataset& ds, const SeedingTrace& trace, double alpha) {
  require_labels(ds, "verify_run");
  check_alpha(alpha);
  if (static_cast<Index>(trace.steps.size()) != ds.num_clusters()) {
    throw UsageError("verify_run needs a trace of k = " + std::to_string(ds.num_clusters()) + " steps, got " +
                     std::to_string(trace.steps.size()));
  }

  LemmaReport report;
  report.lemmas.reserve(3);
  auto& tries = report.get(lemma::kTries);
  auto& potential = report.get(lemma::kPotential);
  auto& counters = report.get(lemma::kCounters);

  PotentialState state = init_state(ds, alpha);
  CenterSet cs(ds.size());
  for (const auto& step : trace.steps) {
    if (step.point < 0 || step.point >= ds.size()) throw UsageError("trace point out of range");
    if (step.cluster >= 0 && step.cluster != ds.label(step.point)) {
      throw UsageError("trace cluster does not match the dataset label of point " + std::to_string(step.point));
    }
    cs.add(ds, step.point);
    advance(state, ds.label(step.point), cluster_cost_roots(ds, cs, alpha));
    counters.record(counters_ok(state) ? 0.0 : 1.0, 0.0);
  }

  for (const auto& c : state.classes) {
    tries.record(static_cast<double>(c.undiscovered.size()), static_cast<double>(c.w));
  }
  const auto sq = cs.nearest_sq();
  double undiscovered_cost = 0.0;
  for (std::size_t c = 0; c < state.hit.size(); ++c) {
    if (state.hit[c]) continue;
    for (Index x : ds.members()[c]) undiscovered_cost += sq[static_cast<std::size_t>(x)];
  }
  potential.record(undiscovered_cost / 2.0, state.phi_total);
  return report;
}

ExpectedChange expected_decrease_check(const Dataset& ds, const CenterSet& cs, const PotentialState& state,
                                       int class_i) {
  require_labels(ds, "expected_decrease_check");
  if (cs.empty()) throw UsageError("expected_decrease_check needs at least one center");
  const auto pos = std::find_if(state.classes.begin(), state.classes.end(),
                                [class_i](const ClassState& c) { return c.i == class_i; });
  if (pos == state.classes.end()) throw UsageError("weight class " + std::to_string(class_i) + " is empty");

  PotentialState base = state;
  recompute_phi(base, cluster_cost_roots(ds, cs, state.alpha));

  const auto sq = cs.nearest_sq();
  std::vector<Index> points;
  for (int id : pos->undiscovered) {
    for (Index x : members_of(ds, id)) {
      if (sq[static_cast<std::size_t>(x)] > 0.0) points.push_back(x);
    }
  }
  if (points.empty()) {
    throw UsageError("weight class " + std::to_string(class_i) + " has no undiscovered cluster with positive cost");
  }
  const auto weights = member_weights(points, sq, state.alpha);
  double total = 0.0;
  for (double w : weights) total += w;

  ExpectedChange out;
  out.per_class.assign(base.classes.size(), 0.0);
  out.phi_before = base.phi_total;
  for (std::size_t p = 0; p < points.size(); ++p) {
    if (weights[p] == 0.0) continue;
    const double prob = weights[p] / total;
    CenterSet next = cs;
    next.add(ds, points[p]);
    PotentialState after = base;
    advance(after, ds.label(points[p]), cluster_cost_roots(ds, next, state.alpha));
    for (std::size_t j = 0; j < base.classes.size(); ++j) {
      out.per_class[j] += prob * (after.classes[j].phi - base.classes[j].phi);
    }
  }
  out.max_change = *std::max_element(out.per_class.begin(), out.per_class.end());
  return out;
}

bool HitCheck::holds(double rel_tol) const {
  return lhs - rhs <= rel_tol * std::max(std::abs(lhs), std::abs(rhs));
}

HitCheck hit_cost_check(const Dataset& ds, const CenterSet& cs, int cluster, double alpha) {
  require_labels(ds, "hit_cost_check");
  check_alpha(alpha);
  if (cs.empty()) throw UsageError("hit_cost_check needs at least one center");
  const auto& members = members_of(ds, cluster);
  const auto sq = cs.nearest_sq();
  HitCheck h;
  const auto weights = member_weights(members, sq, alpha);
  if (weights.empty()) {
    h.degenerate = true;
    return h;
  }
  double total = 0.0;
  for (double w : weights) total += w;

  const Index d = ds.dim();
  for (std::size_t zi = 0; zi < members.size(); ++zi) {
    if (weights[zi] == 0.0) continue;
    const double* zp = ds.row_ptr(members[zi]);
    double cost = 0.0;
    for (Index x : members) cost += std::min(sq[static_cast<std::size_t>(x)], detail::sq_dist(ds.row_ptr(x), zp, d));
    h.lhs += weights[zi] / total * cost;
  }

  const Point mu = centroid_of(ds, members);
  double cost_mu = 0.0;
  for (Index x : members) cost_mu += detail::sq_dist(ds.row_ptr(x), mu.data(), d);
  if (cost_mu > 0.0) h.rhs = hit_cost_factor(alpha, cluster_g_alpha(ds, members, alpha)) * cost_mu;
  return h;
}

std::pair<HitCheck, HitCheck> alpha_hit_cost_checks(const Dataset& ds, const CenterSet& cs, int cluster,
                                                    double alpha) {
  require_labels(ds, "alpha_hit_cost_checks");
  check_alpha(alpha);
  if (cs.empty()) throw UsageError("alpha_hit_cost_checks needs at least one center");
  const auto& members = members_of(ds, cluster);
  const auto sq = cs.nearest_sq();
  const Index d = ds.dim();
  const std::size_t m = members.size();

  std::vector<double> pair_sq(m * m);
  double scale = 0.0;
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      const double v = detail::sq_dist(ds.row_ptr(members[a]), ds.row_ptr(members[b]), d);
      pair_sq[a * m + b] = v;
      scale = std::max(scale, v);
    }
  }

  HitCheck sampled;
  HitCheck uniform;
  const auto weights = member_weights(members, sq, alpha);
  sampled.degenerate = weights.empty();
  if (scale == 0.0) return {sampled, uniform};

  const Point mu = centroid_of(ds, members);
  double centroid_cost = 0.0;
  for (Index x : members) centroid_cost += pow_from_sq(detail::sq_dist(ds.row_ptr(x), mu.data(), d) / scale, alpha);
  sampled.rhs = std::pow(2.0, 2.0 * alpha) * centroid_cost;
  uniform.rhs = std::pow(2.0, alpha) * centroid_cost;

  double total = 0.0;
  for (double w : weights) total += w;
  for (std::size_t z = 0; z < m; ++z) {
    double with_prior = 0.0;
    double alone = 0.0;
    for (std::size_t x = 0; x < m; ++x) {
      const double v = pair_sq[z * m + x];
      alone += pow_from_sq(v / scale, alpha);
      if (!weights.empty()) with_prior += pow_from_sq(std::min(sq[static_cast<std::size_t>(members[x])], v) / scale, alpha);
    }
    uniform.lhs += alone / static_cast<double>(m);
    if (!weights.empty() && weights[z] > 0.0) sampled.lhs += weights[z] / total * with_prior;
  }
  if (sampled.degenerate) sampled.rhs = 0.0;
  return {sampled, uniform};
}

LemmaReport cost_alpha_cluster_checks(const Dataset& ds, double alpha) {
  require_labels(ds, "cost_alpha_cluster_checks");
  check_alpha(alpha);
  LemmaReport report;
  auto& stat = report.get(lemma::kCentroidAlpha);
  const Index d = ds.dim();
  for (const auto& members : ds.members()) {
    const double g = cluster_g_alpha(ds, members, alpha);
    if (std::isnan(g)) continue;
    // Divide both sides by sigma_C^alpha: sum_x (||x - mu||^2 / sigma^2)^(alpha/2) <= g |C|.
    const Point mu = centroid_of(ds, members);
    double c2 = 0.0;
    for (Index x : members) c2 += detail::sq_dist(ds.row_ptr(x), mu.data(), d);
    const double var = c2 / static_cast<double>(members.size());
    double lhs = 0.0;
    for (Index x : members) lhs += pow_from_sq(detail::sq_dist(ds.row_ptr(x), mu.data(), d) / var, alpha);
    stat.record(lhs, g * static_cast<double>(members.size()));
  }
  return report;
}

LemmaReport run_lemma_suite(const Dataset& ds, double alpha, const LemmaSuiteOptions& options) {
  require_labels(ds, "run_lemma_suite");
  check_alpha(alpha);
  if (options.runs < 1) throw UsageError("lemma suite needs at least one run");
  const Index k = ds.num_clusters();

  LemmaReport report;
  report.get(lemma::kTries);
  report.get(lemma::kPotential);
  report.get(lemma::kCounters);
  if (options.states_per_run > 0) {
    report.get(lemma::kNewCluster);
    report.get(lemma::kHitCost);
    report.get(lemma::kHitAlphaDalpha);
    report.get(lemma::kHitAlphaUniform);
  }
  report.merge(cost_alpha_cluster_checks(ds, alpha));

  const Philox root(options.seed);
  for (Index r = 0; r < options.runs; ++r) {
    Philox rng = root.child(static_cast<std::uint64_t>(r));
    const SeedingResult run = dalpha_seed(ds, k, alpha, rng);
    report.merge(verify_run(ds, run.trace, alpha));
    if (options.states_per_run == 0 || k < 2) continue;

    const auto states = replay(ds, run.trace, alpha);
    for (Index s = 0; s < options.states_per_run; ++s) {
      // State after t centers, 1 <= t <= k - 1, so a next center exists.
      const auto t = static_cast<std::size_t>(1 + rng.uniform_index(static_cast<std::uint64_t>(k - 1)));
      const auto points = run.trace.points();
      const CenterSet cs = make_center_set(ds, std::span<const Index>(points.data(), t));
      const PotentialState& state = states[t - 1];

      std::vector<int> candidates;
      const auto sq = cs.nearest_sq();
      for (const auto& c : state.classes) {
        const bool positive = std::any_of(c.undiscovered.begin(), c.undiscovered.end(), [&](int id) {
          const auto& m = ds.members()[static_cast<std::size_t>(id)];
          return std::any_of(m.begin(), m.end(), [&](Index x) { return sq[static_cast<std::size_t>(x)] > 0.0; });
        });
        if (positive) candidates.push_back(c.i);
      }
      if (!candidates.empty()) {
        const int i = candidates[static_cast<std::size_t>(rng.uniform_index(candidates.size()))];
        const ExpectedChange e = expected_decrease_check(ds, cs, state, i);
        report.get(lemma::kNewCluster).record_scaled(e.max_change, 0.0, std::abs(e.phi_before));
      }

      const int cluster = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(k)));
      const HitCheck hit = hit_cost_check(ds, cs, cluster, alpha);
      report.get(lemma::kHitCost).record(hit.lhs, hit.rhs);
      const auto [sampled, uniform] = alpha_hit_cost_checks(ds, cs, cluster, alpha);
      report.get(lemma::kHitAlphaDalpha).record(sampled.lhs, sampled.rhs);
      report.get(lemma::kHitAlphaUniform).record(uniform.lhs, uniform.rhs);
    }
  }
  return report;
}

}  // namespace dalpha
