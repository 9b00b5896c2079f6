#include "dalpha/instances.hpp"

#include "dalpha/error.hpp"
#include "dalpha/rng.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <random>
#include <set>
#include <string>

namespace dalpha {

namespace {

struct PreparedComponent {
  Point mean;
  Eigen::MatrixXd factor;  // lower Cholesky factor, or empty for scalar covariance
  double scale = 1.0;      // sqrt(sigma^2) for scalar covariance
  double nu = 0.0;
};

std::vector<PreparedComponent> prepare(std::span<const MixtureComponent> components, bool need_nu,
                                       std::vector<double>& cumulative) {
  if (components.empty()) throw UsageError("mixture needs at least one component");
  const Index d = components.front().mean.size();
  if (d < 1) throw UsageError("component mean must have dimension >= 1");

  std::vector<PreparedComponent> out;
  double total = 0.0;
  for (std::size_t c = 0; c < components.size(); ++c) {
    const auto& comp = components[c];
    const std::string tag = "component " + std::to_string(c);
    if (comp.mean.size() != d) throw UsageError(tag + ": mean dimension differs from component 0");
    if (!comp.mean.allFinite()) throw UsageError(tag + ": mean must be finite");
    if (!(comp.weight > 0.0) || !std::isfinite(comp.weight)) throw UsageError(tag + ": weight must be positive");
    if (need_nu && !(comp.nu > 1.0)) throw UsageError(tag + ": degrees of freedom must exceed 1");

    PreparedComponent p;
    p.mean = comp.mean;
    p.nu = comp.nu;
    if (const double* var = std::get_if<double>(&comp.covariance)) {
      if (!(*var > 0.0) || !std::isfinite(*var)) throw UsageError(tag + ": variance must be positive");
      p.scale = std::sqrt(*var);
    } else {
      const auto& cov = std::get<Eigen::MatrixXd>(comp.covariance);
      if (cov.rows() != d || cov.cols() != d) throw UsageError(tag + ": covariance must be d x d");
      if (!cov.allFinite() || !cov.isApprox(cov.transpose(), 1e-12)) {
        throw UsageError(tag + ": covariance must be symmetric");
      }
      Eigen::LLT<Eigen::MatrixXd> llt(cov);
      if (llt.info() != Eigen::Success) throw UsageError(tag + ": covariance is not positive definite");
      p.factor = llt.matrixL();
    }
    out.push_back(std::move(p));
    total += comp.weight;
  }

  cumulative.clear();
  double acc = 0.0;
  for (const auto& comp : components) {
    acc += comp.weight / total;
    cumulative.push_back(acc);
  }
  cumulative.back() = 1.0;
  return out;
}

std::vector<int> draw_labels(const std::vector<double>& cumulative, Index n, Philox rng) {
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (auto& label : labels) {
    const double u = rng.uniform01();
    int c = 0;
    while (u >= cumulative[static_cast<std::size_t>(c)]) ++c;
    label = c;
  }
  return labels;
}

template <typename Sampler>
Dataset sample_mixture(std::span<const MixtureComponent> components, Index n, std::uint64_t seed, bool need_nu,
                       Sampler&& sample_one) {
  if (n < 1) throw UsageError("mixture needs n >= 1");
  std::vector<double> cumulative;
  const auto prepared = prepare(components, need_nu, cumulative);
  const Philox root(seed);
  std::vector<int> labels = draw_labels(cumulative, n, root.child(0));

  const Index d = prepared.front().mean.size();
  PointMatrix points(n, d);
  for (std::size_t c = 0; c < prepared.size(); ++c) {
    Philox rng = root.child(c + 1);
    std::normal_distribution<double> normal;
    Point z(d);
    for (Index i = 0; i < n; ++i) {
      if (labels[static_cast<std::size_t>(i)] != static_cast<int>(c)) continue;
      for (Index j = 0; j < d; ++j) z(j) = normal(rng);
      const auto& p = prepared[c];
      Point x = p.factor.size() ? Point(p.factor * z) : Point(p.scale * z);
      points.row(i) = (p.mean + sample_one(p, x, rng)).transpose();
    }
  }
  return Dataset(std::move(points), std::move(labels));
}

void require(bool ok, const std::string& what) {
  if (!ok) throw UsageError(what);
}

// Like gen_regular_simplex but a single point sits at the center.
PointMatrix simplex_or_point(Index n_points, double circumradius, const Point& center, Index dim_offset) {
  if (n_points == 1) return center.transpose();
  return gen_regular_simplex(n_points, circumradius, center, dim_offset);
}

}  // namespace

Dataset gen_gaussian_mixture(std::span<const MixtureComponent> components, Index n, std::uint64_t seed) {
  return sample_mixture(components, n, seed, false,
                        [](const PreparedComponent&, const Point& x, Philox&) { return x; });
}

Dataset gen_student_t_mixture(std::span<const MixtureComponent> components, Index n, std::uint64_t seed) {
  return sample_mixture(components, n, seed, true, [](const PreparedComponent& p, const Point& x, Philox& rng) {
    std::chi_squared_distribution<double> chi2(p.nu);
    const double w = chi2(rng);
    return Point(x / std::sqrt(w / p.nu));
  });
}

PointMatrix gen_regular_simplex(Index n_points, double circumradius, const Point& center, Index dim_offset) {
  require(n_points >= 2, "simplex needs at least 2 points");
  require(dim_offset >= 0, "simplex dim_offset must be non-negative");
  require(circumradius > 0.0 && std::isfinite(circumradius), "simplex circumradius must be positive");
  require(center.size() >= dim_offset + n_points - 1,
          "ambient dimension " + std::to_string(center.size()) + " too small for a " + std::to_string(n_points) +
              "-point simplex at offset " + std::to_string(dim_offset));

  // Rows of the Helmert matrix (minus the constant row) give n unit-norm-projected points
  // that are pairwise equidistant with centroid zero and circumradius sqrt((n-1)/n).
  const double nn = static_cast<double>(n_points);
  const double scale = circumradius / std::sqrt((nn - 1.0) / nn);
  PointMatrix out = center.transpose().replicate(n_points, 1);
  for (Index j = 1; j < n_points; ++j) {
    const double jj = static_cast<double>(j);
    const double norm = std::sqrt(jj * (jj + 1.0));
    const Index col = dim_offset + j - 1;
    for (Index i = 0; i < j; ++i) out(i, col) += scale / norm;
    out(j, col) += scale * (-jj / norm);
  }
  return out;
}

double simplex_circumradius(Index n_points, double side) {
  require(n_points >= 2, "simplex needs at least 2 points");
  const double nn = static_cast<double>(n_points);
  return side * std::sqrt((nn - 1.0) / (2.0 * nn));
}

std::vector<MixtureComponent> preset_components(std::string_view name, double edge) {
  require(edge > 0.0 && std::isfinite(edge), "preset edge length must be positive");
  int d = 0;
  double big_var = 1.0;
  bool student = false;
  if (name == "D1") {
    d = 2;
  } else if (name == "D2") {
    d = 2;
    big_var = 400.0;
  } else if (name == "D3") {
    d = 3;
  } else if (name == "D4") {
    d = 3;
    big_var = 800.0;
  } else if (name == "D5") {
    d = 2;
    student = true;
  } else {
    throw UsageError("unknown preset '" + std::string(name) + "' (expected D1..D5)");
  }

  const double nus[] = {1.6, 2.0, 5.0, 10.0};
  std::vector<MixtureComponent> out;
  for (int corner = 0; corner < (1 << d); ++corner) {
    MixtureComponent c;
    c.mean = Point(d);
    for (int j = 0; j < d; ++j) c.mean(j) = ((corner >> j) & 1) ? edge / 2 : -edge / 2;
    c.covariance = corner == 0 ? big_var : 1.0;
    if (student) c.nu = nus[corner];
    out.push_back(std::move(c));
  }
  return out;
}

SimplexLbParams simplex_lb_params(int k, double alpha) {
  require(k >= 2, "simplex_lb needs k >= 2");
  require(alpha > 2.0 && std::isfinite(alpha), "simplex_lb needs finite alpha > 2");
  const double kk = static_cast<double>(k);
  const double r = std::sqrt(kk);
  return {r, r * std::pow(10.0 * kk, -1.0 / alpha), 1e6 * r * kk};
}

Dataset gen_simplex_lb(int k, Index n_per_cluster, double alpha, std::uint64_t) {
  const SimplexLbParams p = simplex_lb_params(k, alpha);
  require(n_per_cluster >= 1, "simplex_lb needs n_per_cluster >= 1");

  // Cluster shapes share the first n-1 coordinates; unit-cluster centroids use the next
  // k-2, and the big cluster is pushed along one extra axis.
  const Index shape_dims = std::max<Index>(n_per_cluster - 1, 0);
  const Index centroid_dims = std::max<Index>(k - 2, 0);
  const Index far_axis = shape_dims + centroid_dims;
  const Index d = far_axis + 1;
  const Index n = static_cast<Index>(k) * n_per_cluster;

  PointMatrix points(n, d);
  std::vector<int> labels(static_cast<std::size_t>(n));

  Point big_center = Point::Zero(d);
  big_center(far_axis) = p.far_distance;
  const double big_r = n_per_cluster >= 2 ? simplex_circumradius(n_per_cluster, p.big_side) : 0.0;
  points.topRows(n_per_cluster) = simplex_or_point(n_per_cluster, big_r, big_center, 0);

  const PointMatrix centroids = k - 1 >= 2
                                    ? gen_regular_simplex(k - 1, simplex_circumradius(k - 1, p.separation),
                                                          Point::Zero(d), shape_dims)
                                    : PointMatrix(Point::Zero(d).transpose());
  const double unit_r = n_per_cluster >= 2 ? simplex_circumradius(n_per_cluster, 1.0) : 0.0;
  for (int c = 1; c < k; ++c) {
    const Point center = centroids.row(c - 1).transpose();
    points.middleRows(c * n_per_cluster, n_per_cluster) = simplex_or_point(n_per_cluster, unit_r, center, 0);
  }
  for (Index i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = static_cast<int>(i / n_per_cluster);
  return Dataset(std::move(points), std::move(labels));
}

GalphaLbParams galpha_lb_params(Index n, double alpha) {
  require(n >= 4, "galpha_lb needs n >= 4");
  require(alpha > 2.0 && std::isfinite(alpha), "galpha_lb needs finite alpha > 2");
  const double nn = static_cast<double>(n);
  const double big = nn / std::sqrt(nn - 1.0);
  return {big, big / std::pow(nn, 1.0 / alpha)};
}

Dataset gen_galpha_lb(Index n, double alpha) {
  const GalphaLbParams p = galpha_lb_params(n, alpha);
  const Index d = n;
  PointMatrix points = PointMatrix::Zero(2 * n, d);
  Point c1 = Point::Zero(d);
  c1(0) = -p.centroid_offset;
  points.topRows(n) = gen_regular_simplex(n, 1.0, c1, 1);
  points(2 * n - 1, 0) = p.outlier_offset;

  std::vector<int> labels(static_cast<std::size_t>(2 * n), 1);
  std::fill(labels.begin(), labels.begin() + n, 0);
  return Dataset(std::move(points), std::move(labels));
}

GreedyLbParams greedy_lb_params(int k, Index m_samples) {
  require(k >= 8 && k % 4 == 0, "greedy_lb needs k >= 8 divisible by 4, got " + std::to_string(k));
  require(m_samples >= 3, "greedy_lb needs m_samples >= 3");
  const double m = static_cast<double>(m_samples);
  const double a = std::log(m);
  return {a, a / std::sqrt(2.0), 100.0 * m * m * m * static_cast<double>(k)};
}

double truncated_exponential_quantile(double u, double b) {
  // -expm1(-b) = 1 - e^{-b} without cancellation for small b.
  return -std::log1p(u * std::expm1(-b));
}

Dataset gen_greedy_lb(int k, Index m_samples, Index n_per_cluster, std::uint64_t seed) {
  const GreedyLbParams p = greedy_lb_params(k, m_samples);
  require(n_per_cluster >= 1, "greedy_lb needs n_per_cluster >= 1");
  const int groups = k / 4;
  const Index d = 2 + groups - 1;
  const Index n = static_cast<Index>(k) * n_per_cluster;

  const PointMatrix offsets =
      gen_regular_simplex(groups, simplex_circumradius(groups, p.group_side), Point::Zero(d), 2);
  const double half = p.square_side / 2.0;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const double corner_x[] = {-half, half, half, -half};
  const double corner_y[] = {-half, -half, half, half};

  const Philox root(seed);
  PointMatrix points(n, d);
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int cluster = 0; cluster < k; ++cluster) {
    const int g = cluster / 4;
    const int c = cluster % 4;
    Philox rng = root.child(static_cast<std::uint64_t>(cluster) + 1);
    // Unit direction from the corner towards the square centre.
    const double ux = corner_x[c] > 0 ? -inv_sqrt2 : inv_sqrt2;
    const double uy = corner_y[c] > 0 ? -inv_sqrt2 : inv_sqrt2;
    for (Index s = 0; s < n_per_cluster; ++s) {
      const Index row = cluster * n_per_cluster + s;
      const double x = std::min(truncated_exponential_quantile(rng.uniform01(), p.half_diagonal), p.half_diagonal);
      points.row(row) = offsets.row(g);
      points(row, 0) = corner_x[c] + x * ux;
      points(row, 1) = corner_y[c] + x * uy;
      labels[static_cast<std::size_t>(row)] = cluster;
    }
  }
  return Dataset(std::move(points), std::move(labels));
}

std::string_view to_string(Family f) {
  switch (f) {
    case Family::gaussian_mixture: return "gaussian_mixture";
    case Family::student_t_mixture: return "student_t_mixture";
    case Family::simplex_lb: return "simplex_lb";
    case Family::galpha_lb: return "galpha_lb";
    case Family::greedy_lb: return "greedy_lb";
    case Family::custom_csv: return "custom_csv";
  }
  return "?";
}

Family parse_family(std::string_view name) {
  for (Family f : {Family::gaussian_mixture, Family::student_t_mixture, Family::simplex_lb, Family::galpha_lb,
                   Family::greedy_lb, Family::custom_csv}) {
    if (to_string(f) == name) return f;
  }
  throw UsageError("unknown instance family '" + std::string(name) + "'");
}

bool InstanceSpec::stochastic() const noexcept {
  return family == Family::gaussian_mixture || family == Family::student_t_mixture || family == Family::greedy_lb;
}

void validate(const InstanceSpec& spec) {
  switch (spec.family) {
    case Family::gaussian_mixture:
    case Family::student_t_mixture: {
      require(spec.n >= 1, "mixture needs n >= 1");
      std::vector<double> cumulative;
      prepare(spec.components, spec.family == Family::student_t_mixture, cumulative);
      break;
    }
    case Family::simplex_lb:
      simplex_lb_params(spec.k, spec.alpha);
      require(spec.n_per_cluster >= 1, "simplex_lb needs n_per_cluster >= 1");
      break;
    case Family::galpha_lb:
      galpha_lb_params(spec.n, spec.alpha);
      break;
    case Family::greedy_lb:
      greedy_lb_params(spec.k, spec.m_samples);
      require(spec.n_per_cluster >= 1, "greedy_lb needs n_per_cluster >= 1");
      break;
    case Family::custom_csv:
      require(!spec.path.empty(), "custom_csv needs a path");
      break;
  }
}

Dataset generate(const InstanceSpec& spec) { return generate(spec, spec.rng_seed); }

Dataset generate(const InstanceSpec& spec, std::uint64_t seed) {
  validate(spec);
  switch (spec.family) {
    case Family::gaussian_mixture: return gen_gaussian_mixture(spec.components, spec.n, seed);
    case Family::student_t_mixture: return gen_student_t_mixture(spec.components, spec.n, seed);
    case Family::simplex_lb: return gen_simplex_lb(spec.k, spec.n_per_cluster, spec.alpha, seed);
    case Family::galpha_lb: return gen_galpha_lb(spec.n, spec.alpha);
    case Family::greedy_lb: return gen_greedy_lb(spec.k, spec.m_samples, spec.n_per_cluster, seed);
    case Family::custom_csv: return load_csv(spec.path);
  }
  throw UsageError("unhandled family");
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
T get_as(const json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw UsageError(where + ": field '" + key + "': " + e.what());
  }
}

Point point_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw UsageError(where + " must be a nonempty array of numbers");
  Point p(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw UsageError(where + " must contain only numbers");
    p(static_cast<Index>(i)) = j[i].get<double>();
  }
  return p;
}

MixtureComponent component_from_json(const json& j, const std::string& where) {
  reject_unknown(j, {"mean", "covariance", "weight", "nu"}, where);
  MixtureComponent c;
  if (!j.contains("mean")) throw UsageError(where + ": missing 'mean'");
  c.mean = point_from_json(j["mean"], where + ".mean");
  if (j.contains("covariance")) {
    const json& cov = j["covariance"];
    if (cov.is_number()) {
      c.covariance = cov.get<double>();
    } else if (cov.is_array()) {
      const auto d = static_cast<Index>(cov.size());
      Eigen::MatrixXd m(d, d);
      for (Index r = 0; r < d; ++r) {
        const Point row = point_from_json(cov[static_cast<std::size_t>(r)], where + ".covariance row");
        if (row.size() != d) throw UsageError(where + ".covariance must be square");
        m.row(r) = row.transpose();
      }
      c.covariance = m;
    } else {
      throw UsageError(where + ".covariance must be a number or a matrix");
    }
  }
  if (j.contains("weight")) c.weight = get_as<double>(j, "weight", where);
  if (j.contains("nu")) c.nu = get_as<double>(j, "nu", where);
  return c;
}

json component_to_json(const MixtureComponent& c) {
  json j;
  j["mean"] = std::vector<double>(c.mean.data(), c.mean.data() + c.mean.size());
  if (const double* v = std::get_if<double>(&c.covariance)) {
    j["covariance"] = *v;
  } else {
    const auto& m = std::get<Eigen::MatrixXd>(c.covariance);
    json rows = json::array();
    for (Index r = 0; r < m.rows(); ++r) {
      std::vector<double> row(static_cast<std::size_t>(m.cols()));
      for (Index col = 0; col < m.cols(); ++col) row[static_cast<std::size_t>(col)] = m(r, col);
      rows.push_back(row);
    }
    j["covariance"] = rows;
  }
  j["weight"] = c.weight;
  if (std::isfinite(c.nu)) j["nu"] = c.nu;
  return j;
}

}  // namespace

InstanceSpec instance_from_json(const json& j) {
  const std::string where = "instance";
  reject_unknown(j,
                 {"family", "components", "preset", "edge", "n", "k", "n_per_cluster", "alpha", "m_samples", "path",
                  "rng_seed"},
                 where);
  InstanceSpec spec;
  if (!j.contains("family")) throw UsageError("instance: missing 'family'");
  spec.family = parse_family(get_as<std::string>(j, "family", where));

  if (j.contains("preset")) {
    if (j.contains("components")) throw UsageError("instance: give either 'preset' or 'components', not both");
    spec.preset = get_as<std::string>(j, "preset", where);
    const double edge = j.contains("edge") ? get_as<double>(j, "edge", where) : 100.0;
    spec.components = preset_components(spec.preset, edge);
  } else if (j.contains("components")) {
    if (j.contains("edge")) throw UsageError("instance: 'edge' only applies to presets");
    const json& comps = j["components"];
    if (!comps.is_array()) throw UsageError("instance.components must be an array");
    for (std::size_t c = 0; c < comps.size(); ++c) {
      spec.components.push_back(component_from_json(comps[c], "instance.components[" + std::to_string(c) + "]"));
    }
  }
  if (j.contains("n")) spec.n = get_as<Index>(j, "n", where);
  if (j.contains("k")) spec.k = get_as<int>(j, "k", where);
  if (j.contains("n_per_cluster")) spec.n_per_cluster = get_as<Index>(j, "n_per_cluster", where);
  if (j.contains("alpha")) spec.alpha = get_as<double>(j, "alpha", where);
  if (j.contains("m_samples")) spec.m_samples = get_as<Index>(j, "m_samples", where);
  if (j.contains("path")) spec.path = get_as<std::string>(j, "path", where);
  if (j.contains("rng_seed")) spec.rng_seed = get_as<std::uint64_t>(j, "rng_seed", where);
  validate(spec);
  return spec;
}

json to_json(const InstanceSpec& spec) {
  json j;
  j["family"] = std::string(to_string(spec.family));
  switch (spec.family) {
    case Family::gaussian_mixture:
    case Family::student_t_mixture: {
      json comps = json::array();
      for (const auto& c : spec.components) comps.push_back(component_to_json(c));
      j["components"] = comps;
      j["n"] = spec.n;
      break;
    }
    case Family::simplex_lb:
      j["k"] = spec.k;
      j["n_per_cluster"] = spec.n_per_cluster;
      j["alpha"] = spec.alpha;
      break;
    case Family::galpha_lb:
      j["n"] = spec.n;
      j["alpha"] = spec.alpha;
      break;
    case Family::greedy_lb:
      j["k"] = spec.k;
      j["m_samples"] = spec.m_samples;
      j["n_per_cluster"] = spec.n_per_cluster;
      break;
    case Family::custom_csv:
      j["path"] = spec.path;
      break;
  }
  j["rng_seed"] = spec.rng_seed;
  return j;
}

}  // namespace dalpha
