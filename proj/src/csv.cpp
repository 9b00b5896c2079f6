#include "dalpha/error.hpp"
#include "dalpha/instances.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace dalpha {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_double(std::string_view field, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw ParseError("'" + std::string(field) + "' is not a number", line);
  }
  if (!std::isfinite(v)) throw ParseError("non-finite coordinate '" + std::string(field) + "'", line);
  return v;
}

int parse_label(std::string_view field, std::size_t line) {
  int v = 0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw ParseError("'" + std::string(field) + "' is not an integer label", line);
  }
  if (v < 0) throw ParseError("negative label " + std::to_string(v), line);
  return v;
}

struct Table {
  std::vector<double> values;
  std::vector<int> labels;
  Index cols = 0;
  bool has_label = false;
};

Table parse_table(std::string_view text, bool allow_label) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = nl + 1;
  }
  if (lines.empty()) throw ParseError("empty file, expected a header", 1);

  Table t;
  const auto header = split(lines[0]);
  std::size_t coords = header.size();
  if (header.back() == "label") {
    if (!allow_label) throw ParseError("label column not allowed here", 1);
    t.has_label = true;
    --coords;
  }
  if (coords == 0) throw ParseError("header has no coordinate columns", 1);
  for (std::size_t j = 0; j < coords; ++j) {
    if (header[j] != "x" + std::to_string(j)) {
      throw ParseError("header column " + std::to_string(j) + " should be 'x" + std::to_string(j) + "', got '" +
                           std::string(header[j]) + "'",
                       1);
    }
  }
  t.cols = static_cast<Index>(coords);

  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    if (lines[i].empty()) {
      if (i + 1 == lines.size()) break;
      throw ParseError("empty row", lineno);
    }
    const auto fields = split(lines[i]);
    if (fields.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()),
                       lineno);
    }
    for (std::size_t j = 0; j < coords; ++j) t.values.push_back(parse_double(fields[j], lineno));
    if (t.has_label) t.labels.push_back(parse_label(fields.back(), lineno));
  }
  if (t.values.empty()) throw ParseError("no data rows", lines.size());
  return t;
}

PointMatrix to_matrix(const Table& t) {
  const Index rows = static_cast<Index>(t.values.size()) / t.cols;
  return Eigen::Map<const PointMatrix>(t.values.data(), rows, t.cols);
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

namespace {

std::string format_matrix(const PointMatrix& points, const std::vector<int>* labels) {
  std::string out;
  for (Index j = 0; j < points.cols(); ++j) {
    if (j) out += ',';
    out += "x" + std::to_string(j);
  }
  if (labels) out += ",label";
  out += '\n';
  for (Index i = 0; i < points.rows(); ++i) {
    for (Index j = 0; j < points.cols(); ++j) {
      if (j) out += ',';
      out += format_double(points(i, j));
    }
    if (labels) out += "," + std::to_string((*labels)[static_cast<std::size_t>(i)]);
    out += '\n';
  }
  return out;
}

}  // namespace

Dataset parse_csv(std::string_view text) {
  Table t = parse_table(text, true);
  PointMatrix m = to_matrix(t);
  try {
    if (t.has_label) return Dataset(std::move(m), std::move(t.labels));
    return Dataset(std::move(m));
  } catch (const UsageError& e) {
    throw ParseError(e.what(), 1);
  }
}

std::string format_csv(const Dataset& ds) {
  return format_matrix(ds.points(), ds.labeled() ? &ds.labels() : nullptr);
}

Dataset load_csv(const std::filesystem::path& path) {
  return parse_csv(read_text_file(path));
}

void save_csv(const Dataset& ds, const std::filesystem::path& path) { write_text_file(path, format_csv(ds)); }

PointMatrix load_points_csv(const std::filesystem::path& path) {
  return to_matrix(parse_table(read_text_file(path), false));
}

void save_points_csv(const PointMatrix& points, const std::filesystem::path& path) {
  write_text_file(path, format_matrix(points, nullptr));
}

}  // namespace dalpha
