#pragma once

#include "dalpha/dataset.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace dalpha {

/// One mixture component. `covariance` is either a scalar variance (sigma^2 I) or a
/// full d x d SPD matrix; for student-t components it is the scale matrix.
struct MixtureComponent {
  Point mean;
  std::variant<double, Eigen::MatrixXd> covariance = 1.0;
  double weight = 1.0;
  /// Degrees of freedom; only read by the student-t generator.
  double nu = std::numeric_limits<double>::infinity();
};

/// n i.i.d. draws from a Gaussian mixture; label = generating component.
Dataset gen_gaussian_mixture(std::span<const MixtureComponent> components, Index n, std::uint64_t seed);

/// n i.i.d. draws x = mu + L z / sqrt(w / nu), z ~ N(0, I), w ~ chi^2(nu). Requires nu > 1.
Dataset gen_student_t_mixture(std::span<const MixtureComponent> components, Index n, std::uint64_t seed);

/// Regular simplex of `n_points` vertices at distance `circumradius` from `center`,
/// spanning coordinates [dim_offset, dim_offset + n_points - 1). The ambient dimension
/// is center.size(). Rows are the vertices.
PointMatrix gen_regular_simplex(Index n_points, double circumradius, const Point& center, Index dim_offset);

/// Circumradius of a regular simplex with `n_points` vertices and the given side.
double simplex_circumradius(Index n_points, double side);

/// Corners of the 2^d hypercube of edge `edge` centred at the origin, used by the
/// D1..D5 presets.
std::vector<MixtureComponent> preset_components(std::string_view name, double edge = 100.0);

struct SimplexLbParams {
  double big_side;      ///< R = sqrt(k)
  double separation;    ///< delta, with R^alpha = 10 k delta^alpha
  double far_distance;  ///< 1e6 R k
};
SimplexLbParams simplex_lb_params(int k, double alpha);

/// One cluster of n points on a simplex of side sqrt(k), k - 1 clusters on unit-side
/// simplices whose centroids form a simplex of side delta, the big cluster far away.
/// Label 0 is the big cluster.
Dataset gen_simplex_lb(int k, Index n_per_cluster, double alpha, std::uint64_t seed = 0);

struct GalphaLbParams {
  double outlier_offset;   ///< Delta = n / sqrt(n - 1)
  double centroid_offset;  ///< delta = Delta / n^(1/alpha)
};
GalphaLbParams galpha_lb_params(Index n, double alpha);

/// Cluster 0: circumradius-1 simplex of n points centred at (-delta, 0, ...).
/// Cluster 1: n - 1 points at the origin plus one point at (Delta, 0, ...), which is
/// always the last row.
Dataset gen_galpha_lb(Index n, double alpha);

struct GreedyLbParams {
  double square_side;   ///< a = ln(m)
  double half_diagonal; ///< b = a / sqrt(2)
  double group_side;    ///< Delta = 100 m^3 k
};
GreedyLbParams greedy_lb_params(int k, Index m_samples);

/// k/4 squares of side ln(m); each cluster lies on the segment from a corner towards the
/// square centre with truncated-exponential offsets. Square centres form a regular
/// simplex of side 100 m^3 k. Label 4 g + c is corner c of group g.
Dataset gen_greedy_lb(int k, Index m_samples, Index n_per_cluster, std::uint64_t seed);

/// Inverse CDF of the density e^{-x} / (1 - e^{-b}) on [0, b].
double truncated_exponential_quantile(double u, double b);

enum class Family { gaussian_mixture, student_t_mixture, simplex_lb, galpha_lb, greedy_lb, custom_csv };

std::string_view to_string(Family f);
Family parse_family(std::string_view name);

struct InstanceSpec {
  Family family = Family::gaussian_mixture;
  std::vector<MixtureComponent> components;
  Index n = 0;
  int k = 0;
  Index n_per_cluster = 500;
  double alpha = 4.0;
  Index m_samples = 0;
  std::string path;
  std::string preset;  ///< informational; components already expanded
  std::uint64_t rng_seed = 0;

  /// Whether different seeds give different datasets.
  bool stochastic() const noexcept;
};

void validate(const InstanceSpec& spec);
Dataset generate(const InstanceSpec& spec);
Dataset generate(const InstanceSpec& spec, std::uint64_t seed);

/// Strict: unknown keys are rejected with UsageError.
InstanceSpec instance_from_json(const nlohmann::json& j);
nlohmann::json to_json(const InstanceSpec& spec);

/// CSV: header `x0,...,x{d-1}[,label]`, one row per point, shortest round-trip floats.
Dataset load_csv(const std::filesystem::path& path);
void save_csv(const Dataset& ds, const std::filesystem::path& path);
Dataset parse_csv(std::string_view text);
std::string format_csv(const Dataset& ds);
/// Coordinates-only matrix (no label column expected or allowed), used for center files.
PointMatrix load_points_csv(const std::filesystem::path& path);
void save_points_csv(const PointMatrix& points, const std::filesystem::path& path);

/// Whole-file helpers that throw IoError with the path on failure.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

/// Shortest representation that parses back to the same double.
std::string format_double(double v);

}  // namespace dalpha
