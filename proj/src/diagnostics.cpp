#include "dalpha/diagnostics.hpp"

#include "dalpha/error.hpp"
#include "dalpha/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace dalpha {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

Point centroid_of(const Dataset& ds, std::span<const Index> members) {
  Point mu = Point::Zero(ds.dim());
  for (Index x : members) mu += ds.point(x).transpose();
  return mu / static_cast<double>(members.size());
}

double cost2_about(const Dataset& ds, std::span<const Index> members, const Point& mu) {
  double c = 0.0;
  for (Index x : members) c += detail::sq_dist(ds.row_ptr(x), mu.data(), ds.dim());
  return c;
}

// Sum of q^p over a stream of non-negative q, kept as s * m^p with m the running maximum
// so that no intermediate overflows.
class ScaledPowerSum {
 public:
  explicit ScaledPowerSum(double p) : p_(p) {}

  void add(double q) {
    if (q == 0.0) return;
    if (q <= m_) {
      s_ += p_ == 1.0 ? q / m_ : std::pow(q / m_, p_);
    } else {
      s_ = (m_ == 0.0 ? 0.0 : s_ * (p_ == 1.0 ? m_ / q : std::pow(m_ / q, p_))) + 1.0;
      m_ = q;
    }
  }

  /// (sum) * factor, evaluated without overflow when the product is representable.
  double times(double factor) const {
    if (m_ == 0.0) return 0.0;
    const double direct = s_ * std::pow(m_, p_) * factor;
    if (std::isfinite(direct) && direct > 0.0) return direct;
    return std::exp(std::log(s_) + p_ * std::log(m_) + std::log(factor));
  }

 private:
  double p_;
  double m_ = 0.0;
  double s_ = 0.0;
};

void check_alpha(double alpha, const char* who) {
  if (!(alpha >= 2.0) || !std::isfinite(alpha)) {
    throw UsageError(std::string(who) + ": alpha must be finite and >= 2");
  }
}

}  // namespace

PointMatrix cluster_centroids(const Dataset& ds) {
  require_labels(ds, "cluster_centroids");
  const auto& members = ds.members();
  PointMatrix out(static_cast<Index>(members.size()), ds.dim());
  for (std::size_t c = 0; c < members.size(); ++c) out.row(static_cast<Index>(c)) = centroid_of(ds, members[c]);
  return out;
}

SigmaStats sigma_stats(const Dataset& ds) {
  require_labels(ds, "sigma_stats");
  SigmaStats s;
  const auto& members = ds.members();
  s.sigma_max = 0.0;
  s.sigma_min = kInf;
  for (const auto& m : members) {
    const double c2 = cost2_about(ds, m, centroid_of(ds, m));
    const double sigma = std::sqrt(c2 / static_cast<double>(m.size()));
    s.cost2_mu.push_back(c2);
    s.sigma.push_back(sigma);
    s.sigma_max = std::max(s.sigma_max, sigma);
    s.sigma_min = std::min(s.sigma_min, sigma);
    s.opt_cost += c2;
  }
  if (s.sigma_min == 0.0) {
    s.ratio = kInf;
    s.ratio_infinite = true;
  } else {
    s.ratio = s.sigma_max / s.sigma_min;
  }
  return s;
}

double cluster_g_alpha(const Dataset& ds, std::span<const Index> members, double alpha) {
  check_alpha(alpha, "g_alpha");
  const auto size = static_cast<double>(members.size());
  if (members.size() < 2) return kNaN;
  const double v = cost2_about(ds, members, centroid_of(ds, members)) / size;
  if (v == 0.0) return kNaN;

  ScaledPowerSum sum(alpha / 2.0);
  const Index d = ds.dim();
  for (std::size_t i = 0; i < members.size(); ++i) {
    const double* zp = ds.row_ptr(members[i]);
    for (std::size_t j = i + 1; j < members.size(); ++j) sum.add(detail::sq_dist(ds.row_ptr(members[j]), zp, d) / v);
  }
  // Each unordered pair appears twice in the double sum.
  return sum.times(2.0 / (size * size));
}

double cluster_g_alpha_sampled(const Dataset& ds, std::span<const Index> members, std::span<const Index> outer,
                               double alpha) {
  check_alpha(alpha, "g_alpha");
  const auto size = static_cast<double>(members.size());
  if (members.size() < 2 || outer.empty()) return kNaN;
  const double v = cost2_about(ds, members, centroid_of(ds, members)) / size;
  if (v == 0.0) return kNaN;

  ScaledPowerSum sum(alpha / 2.0);
  const Index d = ds.dim();
  for (Index z : outer) {
    const double* zp = ds.row_ptr(z);
    for (Index x : members) sum.add(detail::sq_dist(ds.row_ptr(x), zp, d) / v);
  }
  return sum.times(1.0 / (size * static_cast<double>(outer.size())));
}

GalphaResult g_alpha(const Dataset& ds, double alpha, const GalphaOptions& options) {
  require_labels(ds, "g_alpha");
  check_alpha(alpha, "g_alpha");
  if (options.sample_size < 1) throw UsageError("g_alpha: sample_size must be positive");
  GalphaResult r;
  r.alpha = alpha;
  r.g_alpha = kNaN;
  const auto& members = ds.members();
  for (std::size_t c = 0; c < members.size(); ++c) {
    const auto& m = members[c];
    const int id = static_cast<int>(c);
    double g = kNaN;
    if (!options.exact && static_cast<Index>(m.size()) > options.subsample_threshold) {
      std::vector<Index> pool = m;
      Philox rng = Philox(options.seed).child(c);
      const auto take = static_cast<std::size_t>(std::min<Index>(options.sample_size, static_cast<Index>(m.size())));
      for (std::size_t t = 0; t < take; ++t) {
        const std::size_t j = t + static_cast<std::size_t>(rng.uniform_index(pool.size() - t));
        std::swap(pool[t], pool[j]);
      }
      pool.resize(take);
      g = cluster_g_alpha_sampled(ds, m, pool, alpha);
      r.subsampled.push_back(id);
      r.approximate = true;
    } else {
      g = cluster_g_alpha(ds, m, alpha);
    }
    r.per_cluster.push_back(g);
    if (std::isnan(g)) {
      r.excluded.push_back(id);
      r.warnings.push_back("cluster " + std::to_string(c) +
                           (m.size() < 2 ? " is a singleton" : " has zero variance") + "; excluded from g_alpha");
      continue;
    }
    if (std::isnan(r.g_alpha) || g > r.g_alpha) r.g_alpha = g;
  }
  return r;
}

double cost_alpha_about_centroid(const Dataset& ds, std::span<const Index> members, double alpha) {
  if (members.empty()) throw UsageError("cost_alpha_about_centroid: empty cluster");
  const Point mu = centroid_of(ds, members);
  double c = 0.0;
  for (Index x : members) c += pow_from_sq(detail::sq_dist(ds.row_ptr(x), mu.data(), ds.dim()), alpha);
  return c;
}

int weight_class_of(Index size) {
  if (size < 1) throw UsageError("cluster size must be positive");
  return static_cast<int>(std::bit_width(static_cast<std::uint64_t>(size))) - 1;
}

WeightClasses weight_classes(std::span<const Index> cluster_sizes) {
  WeightClasses w;
  for (Index s : cluster_sizes) {
    const int i = weight_class_of(s);
    w.cluster_class.push_back(i);
    ++w.histogram[i];
  }
  w.ell = static_cast<int>(w.histogram.size());
  return w;
}

WeightClasses weight_classes(const Dataset& ds) {
  require_labels(ds, "weight_classes");
  const auto sizes = ds.cluster_sizes();
  return weight_classes(sizes);
}

namespace {

void check_bound_alpha(double alpha) {
  if (!(alpha > 2.0) || !std::isfinite(alpha)) throw UsageError("the bound needs finite alpha > 2");
}

}  // namespace

double f_alpha(double alpha) {
  check_bound_alpha(alpha);
  return alpha * alpha / std::pow(alpha / 2.0 - 1.0, 2.0 / alpha + 1.0);
}

double h_alpha(double alpha) {
  check_bound_alpha(alpha);
  return std::pow(alpha / 2.0 - 1.0, 1.0 - 2.0 / alpha) / (alpha / 2.0);
}

double potential_global_constant(double alpha) {
  check_bound_alpha(alpha);
  const double a = alpha / 2.0 - 1.0;
  const double t = std::pow(2.0, 2.0 / alpha - 1.0);
  return 16.0 * std::pow(a, 1.0 - 2.0 / alpha) / a * (2.0 - t) / (1.0 - t);
}

double hit_cost_factor(double alpha, double g) {
  return 4.0 * std::numbers::e + (alpha + 1.0) * (alpha + 1.0) * std::pow(g, 2.0 / alpha);
}

BoundTerms theorem_bound_terms(double alpha, double g, double sigma_ratio, int ell, Index k) {
  check_bound_alpha(alpha);
  if (!(g >= 0.0)) throw UsageError("g must be non-negative");
  if (!(sigma_ratio >= 1.0)) throw UsageError("sigma ratio must be at least 1");
  if (ell < 1) throw UsageError("ell must be at least 1");
  if (k < 1) throw UsageError("k must be at least 1");

  BoundTerms b;
  b.alpha = alpha;
  b.f = f_alpha(alpha);
  b.h = h_alpha(alpha);
  b.global_constant = potential_global_constant(alpha);
  b.hit_factor = hit_cost_factor(alpha, g);
  b.explicit_f = (4.0 * std::numbers::e + (alpha + 1.0) * (alpha + 1.0)) * b.global_constant;
  b.log2_k = std::log2(static_cast<double>(k));
  b.ell_term = std::min(static_cast<double>(ell), b.log2_k);

  const double shape = std::pow(g, 2.0 / alpha) * std::pow(sigma_ratio, 2.0 - 4.0 / alpha) *
                       std::pow(b.ell_term, 2.0 / alpha);
  b.clean_bound = b.f * shape;
  b.explicit_bound = b.explicit_f * shape;
  b.additive_bound = b.hit_factor + 2.0 * b.global_constant * shape;
  return b;
}

double theorem_bound(double alpha, double g, double sigma_ratio, int ell, Index k) {
  return theorem_bound_terms(alpha, g, sigma_ratio, ell, k).clean_bound;
}

std::optional<double> cost_ratio(const Dataset& ds, double cost2) {
  const double opt = sigma_stats(ds).opt_cost;
  if (opt == 0.0) return std::nullopt;
  return cost2 / opt;
}

std::optional<double> cost_ratio(const Dataset& ds, const CenterSet& cs) { return cost_ratio(ds, total_cost(cs, 2.0)); }

std::optional<double> cost_ratio(const Dataset& ds, const LloydResult& result) {
  return cost_ratio(ds, result.final_cost2);
}

ParamReport param_report(const Dataset& ds, double alpha, const GalphaOptions& options) {
  require_labels(ds, "param_report");
  ParamReport r;
  r.alpha = alpha;
  r.n = ds.size();
  r.d = ds.dim();
  r.k = ds.num_clusters();
  r.cluster_sizes = ds.cluster_sizes();
  r.sigma = sigma_stats(ds);
  r.g = g_alpha(ds, alpha, options);
  r.classes = weight_classes(r.cluster_sizes);
  r.warnings = r.g.warnings;
  if (r.sigma.ratio_infinite) r.warnings.push_back("sigma_min is zero; sigma ratio is infinite");
  if (!(alpha > 2.0)) {
    r.warnings.push_back("bound requires alpha > 2");
  } else if (std::isnan(r.g.g_alpha) || r.sigma.ratio_infinite) {
    r.warnings.push_back("bound undefined for this instance");
  } else {
    r.bound = theorem_bound_terms(alpha, r.g.g_alpha, r.sigma.ratio, r.classes.ell, r.k);
  }
  return r;
}

namespace {

nlohmann::ordered_json num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

nlohmann::ordered_json nums(const std::vector<double>& v) {
  auto out = nlohmann::ordered_json::array();
  for (double x : v) out.push_back(num(x));
  return out;
}

}  // namespace

nlohmann::ordered_json to_json(const ParamReport& r) {
  nlohmann::ordered_json j;
  j["alpha"] = num(r.alpha);
  j["n"] = r.n;
  j["d"] = r.d;
  j["k"] = r.k;
  j["cluster_sizes"] = r.cluster_sizes;
  j["sigma"] = nums(r.sigma.sigma);
  j["sigma_max"] = num(r.sigma.sigma_max);
  j["sigma_min"] = num(r.sigma.sigma_min);
  j["sigma_ratio"] = num(r.sigma.ratio);
  j["opt_cost"] = num(r.sigma.opt_cost);
  j["g_alpha"] = num(r.g.g_alpha);
  j["g_per_cluster"] = nums(r.g.per_cluster);
  j["g_excluded"] = r.g.excluded;
  j["g_approximate"] = r.g.approximate;
  j["g_subsampled"] = r.g.subsampled;
  auto hist = nlohmann::ordered_json::object();
  for (const auto& [i, count] : r.classes.histogram) hist[std::to_string(i)] = count;
  j["weight_histogram"] = hist;
  j["ell"] = r.classes.ell;
  if (r.bound) {
    const auto& b = *r.bound;
    nlohmann::ordered_json bj;
    bj["f"] = num(b.f);
    bj["h"] = num(b.h);
    bj["global_constant"] = num(b.global_constant);
    bj["hit_factor"] = num(b.hit_factor);
    bj["explicit_f"] = num(b.explicit_f);
    bj["ell_term"] = num(b.ell_term);
    bj["clean"] = num(b.clean_bound);
    bj["explicit"] = num(b.explicit_bound);
    bj["additive"] = num(b.additive_bound);
    j["bound"] = bj;
  } else {
    j["bound"] = nullptr;
  }
  j["warnings"] = r.warnings;
  return j;
}

}  // namespace dalpha
