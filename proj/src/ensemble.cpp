#include "reskern/ensemble.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace reskern {

Matrix SparseCode::dense() const {
  Matrix out = Matrix::Zero(num_points(), total_dim);
  std::vector<int> offsets(block_sizes.size(), 0);
  for (std::size_t v = 1; v < block_sizes.size(); ++v)
    offsets[v] = offsets[v - 1] + block_sizes[v - 1];
  for (int i = 0; i < num_points(); ++i)
    for (int v = 0; v < num_units(); ++v)
      out(i, offsets[static_cast<std::size_t>(v)] + active(i, v)) = 1.0;
  return out;
}

int feature_subset_size(int d, double a) {
  const int dhat = static_cast<int>(std::floor(a * d + 0.5));
  return std::max(1, std::min(d, dhat));
}

std::vector<int> select_features(int d, double a, rng::Engine& eng) {
  if (d < 1) throw config_error("select_features: dimension must be >= 1");
  if (!(a > 0.0) || a > 1.0) throw config_error("select_features: need 0 < a <= 1");
  const int dhat = feature_subset_size(d, a);
  auto picked = rng::sample_without_replacement(eng, static_cast<std::size_t>(d),
                                                static_cast<std::size_t>(dhat));
  std::vector<int> out(picked.begin(), picked.end());
  std::sort(out.begin(), out.end());
  return out;
}

Matrix sample_centroids(const Matrix& subset, double delta, rng::Engine& eng) {
  const auto n = subset.rows();
  const int k = static_cast<int>(std::floor(delta * static_cast<double>(n)));
  if (k < 1)
    throw config_error("sample_centroids: floor(delta*n) = 0 for n = " + std::to_string(n) +
                       "; increase delta");
  auto rows = rng::sample_without_replacement(eng, static_cast<std::size_t>(n),
                                              static_cast<std::size_t>(k));
  Matrix centroids(k, subset.cols());
  for (int i = 0; i < k; ++i)
    centroids.row(i) = subset.row(static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)]));
  return centroids;
}

namespace {

// Shared by the parallel encoder and assign_one_hot so both produce the same
// IEEE operation sequence per (point, unit) — the serial reference in
// reference.cpp mirrors it expression for expression.
inline int nearest_centroid(const double* point, const Matrix& centroids,
                            AssignMetric metric) {
  const int k = static_cast<int>(centroids.rows());
  const int dhat = static_cast<int>(centroids.cols());
  int best = 0;
  if (metric == AssignMetric::squared_euclidean) {
    double best_dist = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      double dist = 0.0;
      for (int f = 0; f < dhat; ++f) {
        const double diff = centroids(c, f) - point[f];
        dist += diff * diff;
      }
      if (dist < best_dist) {
        best_dist = dist;
        best = c;
      }
    }
  } else {
    double best_score = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      double score = 0.0;
      for (int f = 0; f < dhat; ++f) score += centroids(c, f) * point[f];
      if (score > best_score) {
        best_score = score;
        best = c;
      }
    }
  }
  return best;
}

}  // namespace

int assign_one_hot(Eigen::Ref<const Vector> point, const ClusteringUnit& unit) {
  if (point.size() != unit.subspace_dim())
    throw config_error("assign_one_hot: point dimension " +
                                std::to_string(point.size()) + " != unit subspace " +
                                std::to_string(unit.subspace_dim()));
  if (!point.allFinite()) throw config_error("assign_one_hot: non-finite point");
  Vector buf = point;  // contiguous
  return nearest_centroid(buf.data(), unit.centroids, unit.metric);
}

EnsembleModel train_ensemble(const Matrix& data, const EncoderConfig& config,
                             int layer_index) {
  const auto n = data.rows();
  const auto d = data.cols();
  if (config.units < 1) throw config_error("train_ensemble: V must be >= 1");
  if (!(config.delta > 0.0 && config.delta < 1.0))
    throw config_error("train_ensemble: delta must be in (0,1)");
  if (!(config.feature_fraction > 0.0) || config.feature_fraction > 1.0)
    throw config_error("train_ensemble: feature fraction a must be in (0,1]");
  if (d < 1) throw config_error("train_ensemble: data has no features");
  if (static_cast<int>(std::floor(config.delta * static_cast<double>(n))) < 1)
    throw config_error("train_ensemble: floor(delta*n) = 0 for n = " + std::to_string(n) +
                       "; increase delta");

  EnsembleModel model;
  model.input_dim = static_cast<int>(d);
  model.layer_index = layer_index;
  model.units.resize(static_cast<std::size_t>(config.units));
  const AssignMetric metric =
      layer_index == 1 ? AssignMetric::squared_euclidean : AssignMetric::dot_product;

#pragma omp parallel for schedule(static)
  for (int v = 0; v < config.units; ++v) {
    auto eng = rng::make_engine(rng::child_seed(config.master_seed,
                                                static_cast<std::uint64_t>(layer_index),
                                                static_cast<std::uint64_t>(v)));
    ClusteringUnit unit;
    unit.metric = metric;
    unit.feature_indices = select_features(static_cast<int>(d), config.feature_fraction, eng);
    Matrix subset(n, unit.feature_indices.size());
    for (std::size_t f = 0; f < unit.feature_indices.size(); ++f)
      subset.col(static_cast<Eigen::Index>(f)) = data.col(unit.feature_indices[f]);
    unit.centroids = sample_centroids(subset, config.delta, eng);
    model.units[static_cast<std::size_t>(v)] = std::move(unit);
  }
  return model;
}

SparseCode encode(const EnsembleModel& model, const Matrix& data) {
  if (data.cols() != model.input_dim)
    throw config_error("encode: data dimension " + std::to_string(data.cols()) +
                                " != model input dimension " + std::to_string(model.input_dim));
  const int n = static_cast<int>(data.rows());
  const int V = model.num_units();

  SparseCode code;
  code.active.resize(n, V);
  code.block_sizes.resize(static_cast<std::size_t>(V));
  code.total_dim = 0;
  for (int v = 0; v < V; ++v) code.block_sizes[static_cast<std::size_t>(v)] = model.units[static_cast<std::size_t>(v)].k();
  for (int kv : code.block_sizes) code.total_dim += kv;

  // units are independent; each thread fills whole columns of `active`
#pragma omp parallel for schedule(static)
  for (int v = 0; v < V; ++v) {
    const ClusteringUnit& unit = model.units[static_cast<std::size_t>(v)];
    const int dhat = unit.subspace_dim();
    std::vector<double> point(static_cast<std::size_t>(dhat));
    for (int i = 0; i < n; ++i) {
      for (int f = 0; f < dhat; ++f)
        point[static_cast<std::size_t>(f)] = data(i, unit.feature_indices[static_cast<std::size_t>(f)]);
      code.active(i, v) = nearest_centroid(point.data(), unit.centroids, unit.metric);
    }
  }
  return code;
}

StackResult stack_layers(const Matrix& data, const EncoderConfig& config) {
  if (config.layers < 1) throw config_error("stack_layers: layer count must be >= 1");
  StackResult result;
  Matrix input = data;
  for (int layer = 1; layer <= config.layers; ++layer) {
    EnsembleModel model = train_ensemble(input, config, layer);
    SparseCode code = encode(model, input);
    result.models.push_back(std::move(model));
    if (layer < config.layers) input = code.dense();
    result.top = std::move(code);
  }
  return result;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

const char* metric_name(AssignMetric m) {
  return m == AssignMetric::squared_euclidean ? "sqeuclidean" : "dot";
}

}  // namespace

void save_model(const std::vector<EnsembleModel>& layers, const EncoderConfig& config,
                const std::string& path) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write '" + path + "'");
  out << "reskern-model 1\n";
  out << "units " << config.units << " delta " << fmt(config.delta) << " feature_fraction "
      << fmt(config.feature_fraction) << " layers " << layers.size() << " master_seed "
      << config.master_seed << "\n";
  for (const EnsembleModel& model : layers) {
    out << "layer " << model.layer_index << " metric "
        << metric_name(model.units.empty() ? AssignMetric::squared_euclidean
                                           : model.units.front().metric)
        << " input_dim " << model.input_dim << " units " << model.num_units() << "\n";
    for (int v = 0; v < model.num_units(); ++v) {
      const ClusteringUnit& unit = model.units[static_cast<std::size_t>(v)];
      out << "unit " << v << " dhat " << unit.subspace_dim() << " k " << unit.k() << "\n";
      for (std::size_t f = 0; f < unit.feature_indices.size(); ++f)
        out << (f ? " " : "") << unit.feature_indices[f];
      out << "\n";
      for (int r = 0; r < unit.k(); ++r) {
        for (int f = 0; f < unit.subspace_dim(); ++f)
          out << (f ? " " : "") << fmt(unit.centroids(r, f));
        out << "\n";
      }
    }
  }
  if (!out) throw data_error("write failed for '" + path + "'");
}

namespace {

struct TokenReader {
  std::ifstream in;
  explicit TokenReader(const std::string& path) : in(path) {}
  std::string next(const char* what) {
    std::string tok;
    if (!(in >> tok)) throw data_error(std::string("model file truncated, expected ") + what);
    return tok;
  }
  void expect(const char* literal) {
    const std::string tok = next(literal);
    if (tok != literal)
      throw data_error("model file: expected '" + std::string(literal) + "', got '" + tok + "'");
  }
  long long integer(const char* what) {
    const std::string tok = next(what);
    long long v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size())
      throw data_error("model file: bad integer for " + std::string(what));
    return v;
  }
  std::uint64_t unsigned_integer(const char* what) {
    const std::string tok = next(what);
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size())
      throw data_error("model file: bad integer for " + std::string(what));
    return v;
  }
  double real(const char* what) {
    const std::string tok = next(what);
    double v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size())
      throw data_error("model file: bad number for " + std::string(what));
    return v;
  }
};

}  // namespace

std::pair<std::vector<EnsembleModel>, EncoderConfig> load_model(const std::string& path) {
  TokenReader rd(path);
  if (!rd.in) throw data_error("cannot open '" + path + "'");
  rd.expect("reskern-model");
  const long long version = rd.integer("format version");
  if (version != 1)
    throw data_error("model file: unsupported version " + std::to_string(version));

  EncoderConfig config;
  rd.expect("units");
  config.units = static_cast<int>(rd.integer("units"));
  rd.expect("delta");
  config.delta = rd.real("delta");
  rd.expect("feature_fraction");
  config.feature_fraction = rd.real("feature_fraction");
  rd.expect("layers");
  config.layers = static_cast<int>(rd.integer("layers"));
  rd.expect("master_seed");
  config.master_seed = rd.unsigned_integer("master_seed");

  std::vector<EnsembleModel> layers;
  for (int layer = 0; layer < config.layers; ++layer) {
    EnsembleModel model;
    rd.expect("layer");
    model.layer_index = static_cast<int>(rd.integer("layer index"));
    rd.expect("metric");
    const std::string metric = rd.next("metric");
    AssignMetric m;
    if (metric == "sqeuclidean")
      m = AssignMetric::squared_euclidean;
    else if (metric == "dot")
      m = AssignMetric::dot_product;
    else
      throw data_error("model file: unknown metric '" + metric + "'");
    rd.expect("input_dim");
    model.input_dim = static_cast<int>(rd.integer("input_dim"));
    rd.expect("units");
    const int V = static_cast<int>(rd.integer("unit count"));
    model.units.resize(static_cast<std::size_t>(V));
    for (int v = 0; v < V; ++v) {
      rd.expect("unit");
      if (rd.integer("unit index") != v) throw data_error("model file: unit index mismatch");
      rd.expect("dhat");
      const int dhat = static_cast<int>(rd.integer("dhat"));
      rd.expect("k");
      const int k = static_cast<int>(rd.integer("k"));
      ClusteringUnit unit;
      unit.metric = m;
      unit.feature_indices.resize(static_cast<std::size_t>(dhat));
      for (int f = 0; f < dhat; ++f)
        unit.feature_indices[static_cast<std::size_t>(f)] =
            static_cast<int>(rd.integer("feature index"));
      unit.centroids.resize(k, dhat);
      for (int r = 0; r < k; ++r)
        for (int f = 0; f < dhat; ++f) unit.centroids(r, f) = rd.real("centroid value");
      model.units[static_cast<std::size_t>(v)] = std::move(unit);
    }
    layers.push_back(std::move(model));
  }
  return {std::move(layers), config};
}

void write_codes_csv(const SparseCode& code, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write '" + path + "'");
  for (int i = 0; i < code.num_points(); ++i) {
    for (int v = 0; v < code.num_units(); ++v) out << (v ? "," : "") << code.active(i, v);
    out << "\n";
  }
  if (!out) throw data_error("write failed for '" + path + "'");
}

}  // namespace reskern
