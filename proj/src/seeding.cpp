#include "dalpha/seeding.hpp"

#include "dalpha/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

namespace dalpha {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::dalpha: return "dalpha";
    case Method::greedy: return "greedy";
    case Method::uniform: return "uniform";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::dalpha, Method::greedy, Method::uniform}) {
    if (to_string(m) == name) return m;
  }
  throw UsageError("unknown seeding method '" + std::string(name) + "' (expected dalpha, greedy or uniform)");
}

double parse_alpha(std::string_view text) {
  if (text == "inf" || text == "infinity") return kFarthestPoint;
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw UsageError("alpha must be a number or 'inf', got '" + std::string(text) + "'");
  }
  if (v < 0.0) throw UsageError("alpha must be non-negative");
  return v;
}

std::string format_alpha(double alpha) {
  if (std::isinf(alpha)) return "inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, alpha);
  return std::string(buf, res.ptr);
}

Index default_candidates(Index k) {
  return static_cast<Index>(std::ceil(2.0 + std::log(static_cast<double>(std::max<Index>(k, 1)))));
}

void validate(const SeedingConfig& config) {
  if (!(config.alpha >= 0.0)) throw UsageError("alpha must be non-negative");
  if (config.k < 1) throw UsageError("k must be at least 1");
  if (config.m_candidates < 0) throw UsageError("m_candidates must be positive");
}

std::vector<Index> SeedingTrace::points() const {
  std::vector<Index> out;
  out.reserve(steps.size());
  for (const auto& s : steps) out.push_back(s.point);
  return out;
}

namespace {

void require_centers(const CenterSet& cs) {
  if (cs.empty()) throw UsageError("D^alpha sampling needs at least one center");
}

std::vector<Index> non_centers(const CenterSet& cs) {
  std::vector<Index> out;
  for (Index x = 0; x < cs.num_points(); ++x) {
    if (!cs.is_center(x)) out.push_back(x);
  }
  if (out.empty()) throw ExhaustedError("every point is already a center");
  return out;
}

Index farthest(std::span<const double> sq) {
  // max_element returns the first maximum, which is the lowest index.
  return static_cast<Index>(std::max_element(sq.begin(), sq.end()) - sq.begin());
}

// Unnormalized weights, largest exactly 1. Requires max_sq > 0.
void fill_weights(std::span<const double> sq, double max_sq, double alpha, std::vector<double>& w) {
  w.resize(sq.size());
  for (std::size_t x = 0; x < sq.size(); ++x) {
    const double v = sq[x];
    if (v == 0.0) {
      w[x] = 0.0;
    } else if (v == max_sq) {
      w[x] = 1.0;
    } else {
      w[x] = pow_from_sq(v / max_sq, alpha);
    }
  }
}

class Seeder {
 public:
  Seeder(const Dataset& ds, Index k, Method method, double alpha, const StepObserver& observer)
      : ds_(ds), cs_(ds.size()), observer_(observer), hit_(static_cast<std::size_t>(ds.num_clusters()), 0) {
    if (k < 1) throw UsageError("k must be at least 1");
    if (k > ds.size()) {
      throw UsageError("k = " + std::to_string(k) + " exceeds the number of points n = " + std::to_string(ds.size()));
    }
    trace_.method = method;
    trace_.alpha = alpha;
    trace_.steps.reserve(static_cast<std::size_t>(k));
  }

  void add(Index z) {
    StepRecord rec;
    rec.point = z;
    if (ds_.labeled()) {
      rec.cluster = ds_.label(z);
      auto& h = hit_[static_cast<std::size_t>(rec.cluster)];
      rec.new_cluster = h == 0;
      h = 1;
    }
    cs_.add(ds_, z);
    trace_.steps.push_back(rec);
    if (observer_) observer_(cs_, rec);
  }

  const CenterSet& centers() const { return cs_; }
  SeedingResult finish() { return {std::move(cs_), std::move(trace_)}; }

 private:
  const Dataset& ds_;
  CenterSet cs_;
  SeedingTrace trace_;
  const StepObserver& observer_;
  std::vector<char> hit_;
};

}  // namespace

std::vector<double> dalpha_probabilities(const CenterSet& cs, double alpha) {
  require_centers(cs);
  if (!(alpha >= 0.0)) throw UsageError("alpha must be non-negative");
  const auto sq = cs.nearest_sq();
  std::vector<double> p(sq.size(), 0.0);
  const double max_sq = *std::max_element(sq.begin(), sq.end());
  if (max_sq == 0.0) {
    const auto free = non_centers(cs);
    for (Index x : free) p[static_cast<std::size_t>(x)] = 1.0 / static_cast<double>(free.size());
    return p;
  }
  if (std::isinf(alpha)) {
    p[static_cast<std::size_t>(farthest(sq))] = 1.0;
    return p;
  }
  fill_weights(sq, max_sq, alpha, p);
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& v : p) v /= total;
  return p;
}

Index dalpha_step(const Dataset& ds, const CenterSet& cs, double alpha, Philox& rng) {
  require_centers(cs);
  if (ds.size() != cs.num_points()) throw UsageError("dalpha_step: CenterSet/dataset size mismatch");
  if (!(alpha >= 0.0)) throw UsageError("alpha must be non-negative");
  const auto sq = cs.nearest_sq();
  const double max_sq = *std::max_element(sq.begin(), sq.end());
  if (max_sq == 0.0) {
    const auto free = non_centers(cs);
    return free[static_cast<std::size_t>(rng.uniform_index(free.size()))];
  }
  if (std::isinf(alpha)) return farthest(sq);

  thread_local std::vector<double> w;
  fill_weights(sq, max_sq, alpha, w);
  double total = 0.0;
  for (double v : w) total += v;
  const double target = rng.uniform01() * total;
  double acc = 0.0;
  Index last_positive = -1;
  for (std::size_t x = 0; x < w.size(); ++x) {
    if (w[x] == 0.0) continue;
    acc += w[x];
    last_positive = static_cast<Index>(x);
    if (target < acc) return last_positive;
  }
  // Rounding can leave target == acc at the very end.
  return last_positive;
}

double cost2_with_candidate(const Dataset& ds, const CenterSet& cs, Index z) {
  if (z < 0 || z >= ds.size()) throw UsageError("candidate index out of range");
  const auto sq = cs.nearest_sq();
  const double* zp = ds.row_ptr(z);
  const Index d = ds.dim();
  double cost = 0.0;
  for (Index x = 0; x < ds.size(); ++x) {
    cost += std::min(sq[static_cast<std::size_t>(x)], detail::sq_dist(ds.row_ptr(x), zp, d));
  }
  return cost;
}

SeedingResult seed(const Dataset& ds, const SeedingConfig& config, const StepObserver& observer) {
  validate(config);
  Philox rng(config.rng_seed);
  switch (config.method) {
    case Method::dalpha: return dalpha_seed(ds, config.k, config.alpha, rng, observer);
    case Method::greedy: {
      const Index m = config.m_candidates > 0 ? config.m_candidates : default_candidates(config.k);
      return greedy_seed(ds, config.k, m, rng, observer);
    }
    case Method::uniform: return uniform_seed(ds, config.k, rng, observer);
  }
  throw UsageError("unhandled seeding method");
}

SeedingResult dalpha_seed(const Dataset& ds, Index k, double alpha, Philox& rng, const StepObserver& observer) {
  if (!(alpha >= 0.0)) throw UsageError("alpha must be non-negative");
  Seeder s(ds, k, Method::dalpha, alpha, observer);
  s.add(static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(ds.size()))));
  for (Index t = 1; t < k; ++t) s.add(dalpha_step(ds, s.centers(), alpha, rng));
  return s.finish();
}

SeedingResult greedy_seed(const Dataset& ds, Index k, Index m_candidates, Philox& rng, const StepObserver& observer) {
  if (m_candidates < 1) throw UsageError("greedy seeding needs m_candidates >= 1");
  Seeder s(ds, k, Method::greedy, 2.0, observer);
  s.add(static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(ds.size()))));
  std::vector<Index> candidates;
  for (Index t = 1; t < k; ++t) {
    candidates.clear();
    for (Index c = 0; c < m_candidates; ++c) candidates.push_back(dalpha_step(ds, s.centers(), 2.0, rng));
    if (m_candidates == 1) {
      s.add(candidates.front());
      continue;
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    Index best = candidates.front();
    double best_cost = cost2_with_candidate(ds, s.centers(), best);
    for (std::size_t c = 1; c < candidates.size(); ++c) {
      const double cost = cost2_with_candidate(ds, s.centers(), candidates[c]);
      if (cost < best_cost) {
        best_cost = cost;
        best = candidates[c];
      }
    }
    s.add(best);
  }
  return s.finish();
}

SeedingResult uniform_seed(const Dataset& ds, Index k, Philox& rng, const StepObserver& observer) {
  Seeder s(ds, k, Method::uniform, 0.0, observer);
  std::vector<Index> perm(static_cast<std::size_t>(ds.size()));
  std::iota(perm.begin(), perm.end(), Index{0});
  const auto n = static_cast<std::uint64_t>(ds.size());
  for (Index t = 0; t < k; ++t) {
    const auto j = static_cast<std::size_t>(t) + rng.uniform_index(n - static_cast<std::uint64_t>(t));
    std::swap(perm[static_cast<std::size_t>(t)], perm[j]);
    s.add(perm[static_cast<std::size_t>(t)]);
  }
  return s.finish();
}

}  // namespace dalpha
