#include "dalpha/geometry.hpp"

#include <algorithm>
#include <cfloat>
#include <limits>

namespace dalpha {

CenterSet::CenterSet(Index num_points)
    : nearest_sq_(static_cast<std::size_t>(num_points), std::numeric_limits<double>::infinity()),
      nearest_center_(static_cast<std::size_t>(num_points), -1),
      is_center_(static_cast<std::size_t>(num_points), 0) {
  if (num_points < 1) throw UsageError("CenterSet needs at least one point");
}

void CenterSet::add(const Dataset& ds, Index z) {
  if (ds.size() != num_points()) throw UsageError("CenterSet/dataset size mismatch");
  if (z < 0 || z >= num_points()) throw UsageError("center index " + std::to_string(z) + " out of range");
  if (is_center(z)) throw UsageError("point " + std::to_string(z) + " is already a center");

  const Index slot = size();
  const Index d = ds.dim();
  const double* zp = ds.row_ptr(z);
  for (Index x = 0; x < num_points(); ++x) {
    const double dist = detail::sq_dist(ds.row_ptr(x), zp, d);
    // Strict improvement only: on exact ties the earlier center keeps ownership.
    if (dist < nearest_sq_[static_cast<std::size_t>(x)]) {
      nearest_sq_[static_cast<std::size_t>(x)] = dist;
      nearest_center_[static_cast<std::size_t>(x)] = slot;
    }
  }
  centers_.push_back(z);
  is_center_[static_cast<std::size_t>(z)] = 1;
}

CenterSet add_center(const Dataset& ds, CenterSet cs, Index z) {
  cs.add(ds, z);
  return cs;
}

CenterSet make_center_set(const Dataset& ds, std::span<const Index> centers) {
  CenterSet cs(ds.size());
  for (Index z : centers) cs.add(ds, z);
  return cs;
}

namespace {

void check_power(double power) {
  if (!(power >= 2.0) || !std::isfinite(power)) {
    throw UsageError("cost power must be finite and >= 2, got " + std::to_string(power));
  }
}

void require_centers(const CenterSet& cs) {
  if (cs.empty()) throw UsageError("cost is undefined before the first center is chosen");
}

}  // namespace

double log_total_cost(const CenterSet& cs, double power) {
  check_power(power);
  require_centers(cs);
  const auto sq = cs.nearest_sq();
  const double m = *std::max_element(sq.begin(), sq.end());
  if (m == 0.0) return -std::numeric_limits<double>::infinity();
  double scaled = 0.0;
  for (double v : sq) scaled += pow_from_sq(v / m, power);
  return (power / 2.0) * std::log(m) + std::log(scaled);
}

double total_cost(const CenterSet& cs, double power) {
  check_power(power);
  require_centers(cs);
  double sum = 0.0;
  for (double v : cs.nearest_sq()) sum += pow_from_sq(v, power);
  if (std::isfinite(sum)) return sum;
  const double log_cost = log_total_cost(cs, power);
  if (log_cost > std::log(DBL_MAX)) {
    throw RangeError("cost^(" + std::to_string(power) + ") overflows double (log value " + std::to_string(log_cost) +
                     "); use log_total_cost");
  }
  return std::exp(log_cost);
}

double power_mean_root(std::span<const double> sq, double power) {
  double m = 0.0;
  for (double v : sq) m = std::max(m, v);
  if (m == 0.0) return 0.0;
  double scaled = 0.0;
  for (double v : sq) scaled += pow_from_sq(v / m, power);
  return m * std::pow(scaled, 2.0 / power);
}

ClusterCosts cluster_costs(const CenterSet& cs, const Dataset& ds, double alpha) {
  require_labels(ds, "cluster_costs");
  if (ds.size() != cs.num_points()) throw UsageError("cluster_costs: CenterSet/dataset size mismatch");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw UsageError("cluster_costs: alpha must be finite and positive");
  require_centers(cs);

  const auto& members = ds.members();
  const auto sq = cs.nearest_sq();
  ClusterCosts out;
  out.alpha = alpha;
  out.cost2.resize(members.size());
  out.cost_alpha.resize(members.size());
  out.cost_alpha_root.resize(members.size());

  std::vector<double> buf;
  for (std::size_t c = 0; c < members.size(); ++c) {
    double c2 = 0.0;
    double ca = 0.0;
    buf.clear();
    for (Index x : members[c]) {
      const double v = sq[static_cast<std::size_t>(x)];
      c2 += v;
      ca += pow_from_sq(v, alpha);
      buf.push_back(v);
    }
    if (!std::isfinite(ca)) {
      throw RangeError("cost^(alpha) of cluster " + std::to_string(c) + " overflows double");
    }
    out.cost2[c] = c2;
    out.cost_alpha[c] = ca;
    out.cost_alpha_root[c] = power_mean_root(buf, alpha);
  }
  return out;
}

}  // namespace dalpha
