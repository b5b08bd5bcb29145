#include <doctest.h>

#include <omp.h>

#include <cmath>
#include <filesystem>
#include <set>
#include <vector>

#include "reskern/dataset.hpp"
#include "reskern/ensemble.hpp"
#include "reskern/reference.hpp"
#include "reskern/rng.hpp"

using namespace reskern;

namespace {

Matrix random_matrix(int n, int d, std::uint64_t seed) {
  auto eng = rng::make_engine(seed);
  Matrix m(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = rng::normal(eng);
  return m;
}

}  // namespace

TEST_CASE("feature_subset_size rounds half up and clamps") {
  CHECK(feature_subset_size(13, 0.5) == 7);  // round(6.5) = 7
  CHECK(feature_subset_size(5, 1.0) == 5);
  CHECK(feature_subset_size(1, 0.1) == 1);   // max(1, .) clamp
  CHECK(feature_subset_size(12, 0.5) == 6);
  CHECK(feature_subset_size(10, 0.25) == 3);  // round(2.5) = 3, not banker's 2
  CHECK(feature_subset_size(5, 0.3) == 2);    // round(1.5) = 2
  for (int d = 1; d <= 20; ++d) {
    const int expected = std::max(1, static_cast<int>(std::floor(0.5 * d + 0.5)));
    CHECK(feature_subset_size(d, 0.5) == expected);
  }
}

TEST_CASE("select_features returns sorted distinct indices") {
  auto eng = rng::make_engine(5);
  const auto full = select_features(5, 1.0, eng);
  CHECK(full == std::vector<int>{0, 1, 2, 3, 4});

  auto eng2 = rng::make_engine(5);
  const auto single = select_features(1, 0.1, eng2);
  CHECK(single == std::vector<int>{0});

  auto eng3 = rng::make_engine(17);
  for (int round = 0; round < 30; ++round) {
    const auto picks = select_features(13, 0.5, eng3);
    REQUIRE(picks.size() == 7);
    for (std::size_t i = 1; i < picks.size(); ++i) CHECK(picks[i - 1] < picks[i]);
    for (int p : picks) {
      CHECK(p >= 0);
      CHECK(p < 13);
    }
  }
}

TEST_CASE("sample_centroids takes floor(delta*n) distinct data rows") {
  const Matrix data = random_matrix(178, 4, 1);
  auto eng = rng::make_engine(2);
  const Matrix centroids = sample_centroids(data, 0.7, eng);
  CHECK(centroids.rows() == 124);  // floor(0.7 * 178)
  CHECK(centroids.cols() == 4);

  const Matrix small = random_matrix(10, 2, 3);
  auto eng2 = rng::make_engine(4);
  CHECK_THROWS_AS(sample_centroids(small, 0.05, eng2), config_error);

  const Matrix four = random_matrix(4, 2, 5);
  auto eng3 = rng::make_engine(6);
  const Matrix three = sample_centroids(four, 0.9, eng3);
  REQUIRE(three.rows() == 3);  // floor(3.6)
  std::set<int> sources;
  for (int c = 0; c < 3; ++c) {
    bool found = false;
    for (int i = 0; i < 4; ++i) {
      if ((three.row(c) - four.row(i)).cwiseAbs().maxCoeff() == 0.0) {
        found = true;
        sources.insert(i);
      }
    }
    CHECK(found);  // centroid rows are copied data rows
  }
  CHECK(sources.size() == 3);  // distinct rows
}

TEST_CASE("assign_one_hot nearest, tie and dot-product rules") {
  ClusteringUnit unit;
  unit.feature_indices = {0, 1};
  unit.centroids.resize(2, 2);
  unit.centroids << 0, 0, 1, 1;
  unit.metric = AssignMetric::squared_euclidean;

  Vector p(2);
  p << 0.2, 0.1;
  CHECK(assign_one_hot(p, unit) == 0);  // 0.05 vs 1.45

  p << 0.5, 0.5;
  CHECK(assign_one_hot(p, unit) == 0);  // exact tie, lowest index

  ClusteringUnit dot;
  dot.feature_indices = {0, 1};
  dot.centroids.resize(2, 2);
  dot.centroids << 1, 0, 0, 1;
  dot.metric = AssignMetric::dot_product;
  p << 3, 2;
  CHECK(assign_one_hot(p, dot) == 0);  // 3 > 2
}

TEST_CASE("assign_one_hot matches the brute-force scan") {
  auto eng = rng::make_engine(31);
  for (int round = 0; round < 50; ++round) {
    ClusteringUnit unit;
    unit.feature_indices = {0, 1, 2};
    unit.centroids = random_matrix(3, 3, 100 + round);
    unit.metric = round % 2 ? AssignMetric::dot_product : AssignMetric::squared_euclidean;
    Vector p(3);
    for (int j = 0; j < 3; ++j) p[j] = rng::normal(eng);

    std::vector<double> pv(p.data(), p.data() + 3);
    CHECK(assign_one_hot(p, unit) == reference::nearest_centroid(pv, unit.centroids, unit.metric));
  }
}

TEST_CASE("train_ensemble builds units at the documented shape") {
  const Matrix data = random_matrix(178, 13, 8);
  EncoderConfig config;
  config.units = 25;
  config.delta = 0.7;
  config.feature_fraction = 0.5;
  config.master_seed = 11;
  const EnsembleModel model = train_ensemble(data, config);

  REQUIRE(model.num_units() == 25);
  CHECK(model.input_dim == 13);
  CHECK(model.layer_index == 1);
  for (const ClusteringUnit& unit : model.units) {
    CHECK(unit.subspace_dim() == 7);
    CHECK(unit.k() == 124);
    CHECK(unit.metric == AssignMetric::squared_euclidean);
  }

  // each centroid row is some data row restricted to the unit's features
  const ClusteringUnit& unit = model.units[3];
  for (int c = 0; c < 5; ++c) {
    bool found = false;
    for (int i = 0; i < data.rows() && !found; ++i) {
      bool same = true;
      for (int f = 0; f < unit.subspace_dim(); ++f)
        same = same && unit.centroids(c, f) == data(i, unit.feature_indices[f]);
      found = same;
    }
    CHECK(found);
  }
}

TEST_CASE("train_ensemble is deterministic and seed-sensitive") {
  const Matrix data = random_matrix(40, 6, 12);
  EncoderConfig config;
  config.units = 10;
  config.master_seed = 77;

  const EnsembleModel a = train_ensemble(data, config);
  const EnsembleModel b = train_ensemble(data, config);
  for (int v = 0; v < 10; ++v) {
    CHECK(a.units[v].feature_indices == b.units[v].feature_indices);
    CHECK((a.units[v].centroids - b.units[v].centroids).cwiseAbs().maxCoeff() == 0.0);
  }

  config.master_seed = 78;
  const EnsembleModel c = train_ensemble(data, config);
  bool any_diff = false;
  for (int v = 0; v < 10 && !any_diff; ++v)
    any_diff = a.units[v].feature_indices != c.units[v].feature_indices ||
               (a.units[v].centroids - c.units[v].centroids).cwiseAbs().maxCoeff() > 0.0;
  CHECK(any_diff);
}

TEST_CASE("encode is pure and one-hot per unit") {
  Matrix data = random_matrix(20, 5, 21);
  data.row(7) = data.row(2);  // duplicate pair
  EncoderConfig config;
  config.units = 6;
  config.delta = 0.5;
  config.master_seed = 5;
  const EnsembleModel model = train_ensemble(data, config);
  const SparseCode code = encode(model, data);

  REQUIRE(code.num_points() == 20);
  REQUIRE(code.num_units() == 6);
  const SparseCode again = encode(model, data);
  CHECK((code.active - again.active).cwiseAbs().maxCoeff() == 0);

  // duplicates get identical codes
  CHECK((code.active.row(7) - code.active.row(2)).cwiseAbs().maxCoeff() == 0);

  const Matrix dense = code.dense();
  CHECK(dense.cols() == code.total_dim);
  for (int i = 0; i < 20; ++i) {
    CHECK(dense.row(i).sum() == 6.0);  // V ones per row
    CHECK(dense.row(i).squaredNorm() == 6.0);
  }
}

TEST_CASE("encode equals the serial reference bit for bit") {
  auto eng = rng::make_engine(400);
  for (int round = 0; round < 20; ++round) {
    const int n = 5 + static_cast<int>(rng::below(eng, 46));
    const int d = 2 + static_cast<int>(rng::below(eng, 9));
    const Matrix data = random_matrix(n, d, 500 + round);
    EncoderConfig config;
    config.units = 1 + static_cast<int>(rng::below(eng, 10));
    config.delta = 0.3 + 0.4 * rng::uniform01(eng);
    config.feature_fraction = 0.3 + 0.7 * rng::uniform01(eng);
    config.master_seed = 600 + round;
    if (static_cast<int>(config.delta * n) < 1) continue;

    const EnsembleModel model = train_ensemble(data, config);
    const SparseCode ours = encode(model, data);
    const SparseCode ref = reference::encode(model, data);
    CHECK((ours.active - ref.active).cwiseAbs().maxCoeff() == 0);
  }
}

TEST_CASE("training and encoding are independent of the thread count") {
  const Matrix data = random_matrix(60, 8, 33);
  EncoderConfig config;
  config.units = 16;
  config.master_seed = 99;

  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const EnsembleModel m1 = train_ensemble(data, config);
  const SparseCode c1 = encode(m1, data);
  omp_set_num_threads(4);
  const EnsembleModel m4 = train_ensemble(data, config);
  const SparseCode c4 = encode(m4, data);
  omp_set_num_threads(saved);

  for (int v = 0; v < 16; ++v) {
    CHECK(m1.units[v].feature_indices == m4.units[v].feature_indices);
    CHECK((m1.units[v].centroids - m4.units[v].centroids).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK((c1.active - c4.active).cwiseAbs().maxCoeff() == 0);
}

TEST_CASE("stack_layers base case and two-layer stacking") {
  const Matrix data = random_matrix(30, 4, 44);
  EncoderConfig config;
  config.units = 5;
  config.delta = 0.4;
  config.master_seed = 3;

  config.layers = 1;
  const StackResult one = stack_layers(data, config);
  const SparseCode direct = encode(train_ensemble(data, config), data);
  CHECK((one.top.active - direct.active).cwiseAbs().maxCoeff() == 0);

  config.layers = 2;
  const StackResult two = stack_layers(data, config);
  REQUIRE(two.models.size() == 2);
  CHECK(two.models[1].layer_index == 2);
  CHECK(two.models[1].input_dim == one.top.total_dim);
  for (const ClusteringUnit& unit : two.models[1].units)
    CHECK(unit.metric == AssignMetric::dot_product);

  // top layer still one-hot: V ones per dense row
  const Matrix dense = two.top.dense();
  for (int i = 0; i < 30; ++i) CHECK(dense.row(i).sum() == 5.0);

  // layer-2 assignments match the reference scan over the layer-1 expansion
  const SparseCode layer1 = encode(two.models[0], data);
  const SparseCode ref_top = reference::encode(two.models[1], layer1.dense());
  CHECK((two.top.active - ref_top.active).cwiseAbs().maxCoeff() == 0);
}

TEST_CASE("model serialization round-trips exactly") {
  const Matrix data = random_matrix(25, 6, 55);
  EncoderConfig config;
  config.units = 4;
  config.delta = 0.37;
  config.feature_fraction = 0.61;
  config.layers = 2;
  config.master_seed = 0xABCDEF0123456789ULL;
  const StackResult stack = stack_layers(data, config);

  const auto path =
      (std::filesystem::temp_directory_path() / "reskern_test_model.txt").string();
  save_model(stack.models, config, path);
  const auto [models, loaded_config] = load_model(path);

  CHECK(loaded_config.units == config.units);
  CHECK(loaded_config.delta == config.delta);  // shortest round trip: bit-exact
  CHECK(loaded_config.feature_fraction == config.feature_fraction);
  CHECK(loaded_config.layers == config.layers);
  CHECK(loaded_config.master_seed == config.master_seed);

  REQUIRE(models.size() == stack.models.size());
  for (std::size_t l = 0; l < models.size(); ++l) {
    REQUIRE(models[l].num_units() == stack.models[l].num_units());
    CHECK(models[l].input_dim == stack.models[l].input_dim);
    CHECK(models[l].layer_index == stack.models[l].layer_index);
    for (int v = 0; v < models[l].num_units(); ++v) {
      CHECK(models[l].units[v].feature_indices == stack.models[l].units[v].feature_indices);
      CHECK(models[l].units[v].metric == stack.models[l].units[v].metric);
      CHECK((models[l].units[v].centroids - stack.models[l].units[v].centroids)
                .cwiseAbs()
                .maxCoeff() == 0.0);
    }
  }

  // the reloaded stack encodes identically
  const SparseCode before = encode(stack.models[1], encode(stack.models[0], data).dense());
  const SparseCode after = encode(models[1], encode(models[0], data).dense());
  CHECK((before.active - after.active).cwiseAbs().maxCoeff() == 0);

  CHECK_THROWS_AS(load_model("/no/such/model.txt"), data_error);
}

TEST_CASE("encode rejects dimension mismatches") {
  const Matrix data = random_matrix(10, 3, 66);
  EncoderConfig config;
  config.units = 2;
  config.master_seed = 1;
  const EnsembleModel model = train_ensemble(data, config);
  const Matrix wrong = random_matrix(4, 5, 67);
  CHECK_THROWS_AS(encode(model, wrong), config_error);
}
