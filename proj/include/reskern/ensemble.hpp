#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "reskern/common.hpp"
#include "reskern/rng.hpp"

namespace reskern {

enum class AssignMetric { squared_euclidean, dot_product };

struct EncoderConfig {
  int units = 400;                // V
  double delta = 0.7;             // centroid fraction, k = floor(delta * n)
  double feature_fraction = 0.5;  // a, d_hat = max(1, round(a * d))
  int layers = 1;
  std::uint64_t master_seed = 0;
};

/// One resampled k-centroids quantizer: a random feature subset plus k
/// centroid rows copied verbatim from the data. No Lloyd iterations.
struct ClusteringUnit {
  std::vector<int> feature_indices;  // strictly increasing, size d_hat
  Matrix centroids;                  // k x d_hat
  AssignMetric metric = AssignMetric::squared_euclidean;

  int k() const { return static_cast<int>(centroids.rows()); }
  int subspace_dim() const { return static_cast<int>(feature_indices.size()); }
};

struct EnsembleModel {
  std::vector<ClusteringUnit> units;
  int input_dim = 0;
  int layer_index = 1;

  int num_units() const { return static_cast<int>(units.size()); }
};

/// Concatenated one-hot codes, stored as one active centroid index per
/// (point, unit). The dense expansion has exactly V ones per row.
struct SparseCode {
  IndexMatrix active;            // n x V, entry in {0..k_v-1}
  std::vector<int> block_sizes;  // k_v per unit
  int total_dim = 0;             // sum of block_sizes

  int num_points() const { return static_cast<int>(active.rows()); }
  int num_units() const { return static_cast<int>(active.cols()); }

  /// One-hot expansion, n x total_dim. Dense memory; intended for tests,
  /// small problems and layer stacking.
  Matrix dense() const;
};

/// d_hat = max(1, round(a * d)), round-half-up.
int feature_subset_size(int d, double a);

/// d_hat distinct indices sampled uniformly without replacement, sorted.
std::vector<int> select_features(int d, double a, rng::Engine& eng);

/// k = floor(delta * n) distinct rows of `subset`, selection order preserved.
/// Throws config_error when k would be 0.
Matrix sample_centroids(const Matrix& subset, double delta, rng::Engine& eng);

/// Index of the nearest centroid under the unit's metric; ties go to the
/// lowest index.
int assign_one_hot(Eigen::Ref<const Vector> point, const ClusteringUnit& unit);

/// V units, unit v drawn from the child stream child_seed(master_seed,
/// layer_index, v); feature draw precedes the centroid draw on that stream.
/// Layer 1 assigns by squared Euclidean distance, deeper layers by dot
/// product. Bit-identical result for any thread count.
EnsembleModel train_ensemble(const Matrix& data, const EncoderConfig& config,
                             int layer_index = 1);

SparseCode encode(const EnsembleModel& model, const Matrix& data);

struct StackResult {
  std::vector<EnsembleModel> models;  // one per layer
  SparseCode top;                     // codes of the last layer
};

/// Layer 1 trains on the raw data; layer l >= 2 trains on the dense
/// expansion of layer l-1's codes. Dense intermediate layers keep this
/// practical only at modest V*k; the evaluated configurations use one layer.
StackResult stack_layers(const Matrix& data, const EncoderConfig& config);

/// Versioned text serialization of a trained stack (codes are recomputed by
/// encode, not stored). Doubles are written in shortest round-trip form, so
/// save/load is value-exact. Layout (whitespace-separated tokens):
///   reskern-model 1
///   units <V> delta <delta> feature_fraction <a> layers <L> master_seed <seed>
///   layer <index> metric <sqeuclidean|dot> input_dim <d> units <V>
///   unit <v> dhat <d_hat> k <k>
///   <d_hat feature indices> then k centroid rows of d_hat values each
void save_model(const std::vector<EnsembleModel>& layers, const EncoderConfig& config,
                const std::string& path);
std::pair<std::vector<EnsembleModel>, EncoderConfig> load_model(const std::string& path);

/// Active-index CSV: one row per point, one column per unit.
void write_codes_csv(const SparseCode& code, const std::string& path);

}  // namespace reskern
