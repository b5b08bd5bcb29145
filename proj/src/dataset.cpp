#include "reskern/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "reskern/rng.hpp"

namespace reskern {

int Dataset::num_classes() const {
  if (labels.empty()) return 0;
  return *std::max_element(labels.begin(), labels.end()) + 1;
}

void validate_dataset(const Dataset& ds) {
  if (ds.n() < 2) throw data_error("invalid dataset '" + ds.name + "': fewer than 2 points");
  if (ds.dim() < 1) throw data_error("invalid dataset '" + ds.name + "': zero feature columns");
  if (!ds.features.allFinite())
    throw data_error("invalid dataset '" + ds.name + "': non-finite feature value");
  if (!ds.labels.empty()) {
    if (static_cast<int>(ds.labels.size()) != ds.n())
      throw data_error("invalid dataset '" + ds.name + "': label count != point count");
    const int c = ds.num_classes();
    std::vector<char> seen(c, 0);
    for (int l : ds.labels) {
      if (l < 0 || l >= c)
        throw data_error("invalid dataset '" + ds.name + "': label out of range");
      seen[l] = 1;
    }
    for (int k = 0; k < c; ++k)
      if (!seen[k])
        throw data_error("invalid dataset '" + ds.name + "': class " + std::to_string(k) +
                         " is empty");
  }
}

namespace {

double parse_number(const std::string& cell, std::size_t line_no) {
  const char* b = cell.data();
  const char* e = b + cell.size();
  while (b < e && (*b == ' ' || *b == '\t')) ++b;
  while (e > b && (e[-1] == ' ' || e[-1] == '\t' || e[-1] == '\r')) --e;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(b, e, value);
  if (ec != std::errc() || ptr != e)
    throw data_error("parse error at line " + std::to_string(line_no) +
                     ": non-numeric cell '" + cell + "'");
  return value;
}

std::string basename_of(const std::string& path) {
  const auto slash = path.find_last_of('/');
  return slash == std::string::npos ? path : path.substr(slash + 1);
}

// Remaps label strings to contiguous ids in first-appearance order.
struct LabelMapper {
  std::map<std::string, int> ids;
  std::vector<int> out;
  void add(std::string key) {
    while (!key.empty() && (key.back() == '\r' || key.back() == ' ')) key.pop_back();
    auto [it, inserted] = ids.try_emplace(std::move(key), static_cast<int>(ids.size()));
    out.push_back(it->second);
  }
};

}  // namespace

Dataset load_csv(const std::string& path, const CsvOptions& opts) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open '" + path + "'");

  std::vector<std::vector<double>> rows;
  LabelMapper mapper;
  std::string line;
  std::size_t line_no = 0;
  std::size_t arity = 0;
  bool header_pending = opts.skip_header;

  while (std::getline(in, line)) {
    ++line_no;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    if (line.empty() || line == "\r") continue;

    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");

    if (arity == 0) {
      arity = cells.size();
      const std::size_t min_cols = opts.label_column == LabelColumn::none ? 1 : 2;
      if (arity < min_cols)
        throw data_error("parse error at line " + std::to_string(line_no) + ": too few columns");
    } else if (cells.size() != arity) {
      throw data_error("parse error at line " + std::to_string(line_no) + ": expected " +
                       std::to_string(arity) + " columns, got " + std::to_string(cells.size()));
    }

    std::size_t feat_begin = 0;
    std::size_t feat_end = cells.size();
    if (opts.label_column == LabelColumn::first) {
      mapper.add(cells.front());
      feat_begin = 1;
    } else if (opts.label_column == LabelColumn::last) {
      mapper.add(cells.back());
      feat_end -= 1;
    }

    std::vector<double> row;
    row.reserve(feat_end - feat_begin);
    for (std::size_t j = feat_begin; j < feat_end; ++j)
      row.push_back(parse_number(cells[j], line_no));
    rows.push_back(std::move(row));
  }

  if (rows.size() < 2)
    throw data_error("invalid dataset '" + path + "': fewer than 2 data rows");

  Dataset ds;
  ds.name = basename_of(path);
  ds.features.resize(static_cast<Eigen::Index>(rows.size()),
                     static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      ds.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  ds.labels = std::move(mapper.out);
  validate_dataset(ds);
  return ds;
}

Dataset load_libsvm(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open '" + path + "'");

  std::vector<std::vector<std::pair<int, double>>> rows;
  LabelMapper mapper;
  std::string line;
  std::size_t line_no = 0;
  int max_index = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::stringstream ss(line);
    std::string token;
    if (!(ss >> token))
      throw data_error("parse error at line " + std::to_string(line_no) + ": missing label");
    mapper.add(token);

    std::vector<std::pair<int, double>> entries;
    int prev_index = 0;
    while (ss >> token) {
      const auto colon = token.find(':');
      if (colon == std::string::npos)
        throw data_error("parse error at line " + std::to_string(line_no) +
                         ": expected idx:val, got '" + token + "'");
      int idx = 0;
      const std::string idx_str = token.substr(0, colon);
      auto [p, ec] = std::from_chars(idx_str.data(), idx_str.data() + idx_str.size(), idx);
      if (ec != std::errc() || p != idx_str.data() + idx_str.size() || idx < 1)
        throw data_error("parse error at line " + std::to_string(line_no) +
                         ": bad feature index '" + idx_str + "'");
      if (idx <= prev_index)
        throw data_error("parse error at line " + std::to_string(line_no) +
                         ": feature indices not ascending");
      prev_index = idx;
      entries.emplace_back(idx, parse_number(token.substr(colon + 1), line_no));
    }
    max_index = std::max(max_index, prev_index);
    rows.push_back(std::move(entries));
  }

  if (rows.empty()) throw data_error("invalid dataset '" + path + "': empty file");
  if (rows.size() < 2)
    throw data_error("invalid dataset '" + path + "': fewer than 2 data rows");
  if (max_index == 0) throw data_error("invalid dataset '" + path + "': no features");

  Dataset ds;
  ds.name = basename_of(path);
  ds.features = Matrix::Zero(static_cast<Eigen::Index>(rows.size()), max_index);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (const auto& [idx, val] : rows[i])
      ds.features(static_cast<Eigen::Index>(i), idx - 1) = val;
  ds.labels = std::move(mapper.out);
  validate_dataset(ds);
  return ds;
}

namespace {

// shortest round-tripping decimal form
std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

void write_csv(const Dataset& ds, const std::string& path, LabelColumn label_column) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write '" + path + "'");
  const bool with_labels = label_column != LabelColumn::none && ds.has_labels();
  for (int i = 0; i < ds.n(); ++i) {
    std::string line;
    if (with_labels && label_column == LabelColumn::first)
      line += std::to_string(ds.labels[i]) + ",";
    for (int j = 0; j < ds.dim(); ++j) {
      if (j) line += ",";
      line += format_double(ds.features(i, j));
    }
    if (with_labels && label_column == LabelColumn::last)
      line += "," + std::to_string(ds.labels[i]);
    out << line << "\n";
  }
  if (!out) throw data_error("write failed for '" + path + "'");
}

Dataset generate_blobs(int clusters, int per_cluster, int dim, double separation,
                       double noise_sd, std::uint64_t seed) {
  if (clusters < 2) throw config_error("generate_blobs: need at least 2 clusters");
  if (per_cluster < 1) throw config_error("generate_blobs: per_cluster must be >= 1");
  if (dim < 1) throw config_error("generate_blobs: dim must be >= 1");
  if (separation <= 0) throw config_error("generate_blobs: separation must be > 0");
  if (noise_sd < 0) throw config_error("generate_blobs: noise_sd must be >= 0");

  Dataset ds;
  ds.name = "blobs";
  ds.features.resize(static_cast<Eigen::Index>(clusters) * per_cluster, dim);
  ds.labels.resize(static_cast<std::size_t>(clusters) * per_cluster);
  auto eng = rng::make_engine(rng::child_seed(seed, rng::kSlotBlobs, 0));
  // centers along the all-ones diagonal: adjacent centers exactly `separation`
  // apart and every single feature separates the clusters
  const double step = separation / std::sqrt(static_cast<double>(dim));
  Eigen::Index row = 0;
  for (int c = 0; c < clusters; ++c) {
    for (int p = 0; p < per_cluster; ++p, ++row) {
      for (int j = 0; j < dim; ++j)
        ds.features(row, j) = step * c + (noise_sd > 0 ? noise_sd * rng::normal(eng) : 0.0);
      ds.labels[static_cast<std::size_t>(row)] = c;
    }
  }
  return ds;
}

Dataset standardize(const Dataset& ds) {
  if (ds.n() < 2) throw data_error("standardize: need at least 2 points");
  Dataset out = ds;
  const double n = static_cast<double>(ds.n());
  for (int j = 0; j < ds.dim(); ++j) {
    const double mean = ds.features.col(j).mean();
    out.features.col(j).array() -= mean;
    const double ss = out.features.col(j).squaredNorm();
    const double sd = std::sqrt(ss / (n - 1.0));
    if (sd > 0) out.features.col(j) /= sd;
  }
  return out;
}

}  // namespace reskern
