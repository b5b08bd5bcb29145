#pragma once

#include <cstdint>
#include <vector>

#include "reskern/common.hpp"
#include "reskern/kernel.hpp"

namespace reskern {

struct SpectralConfig {
  int clusters = 2;            // c
  int kmeans_restarts = 50;
  int kmeans_max_iters = 300;
  double kmeans_tol = 1e-9;    // on max squared centroid displacement
  std::uint64_t seed = 0;
};

struct ClusteringResult {
  std::vector<int> labels;  // length n, values in {0..c-1}
  double objective = 0.0;   // within-cluster sum of squares of the winner
  int restarts_run = 0;
  int chosen_restart = 0;   // lowest objective, ties to the lowest index
};

struct EmbedOptions {
  int dense_threshold = 3000;  // above this the Lanczos path is used
  double lanczos_tol = 1e-10;
  double residual_tol = 1e-8;  // postcondition: ||L u - lambda u|| <= tol * ||L||_F
};

/// Ng-Jordan-Weiss embedding: rows of the top-c eigenvectors of
/// D^{-1/2} K D^{-1/2}, each row scaled to unit norm (zero rows stay zero).
/// Throws numeric_error for zero-degree rows (degenerate affinity, with the
/// offending point indices) and for eigenpairs failing the residual check.
Matrix spectral_embed(const KernelMatrix& kernel, int clusters,
                      const EmbedOptions& opts = {});

/// Multi-restart Lloyd with k-means++ seeding; restart r draws from
/// child_seed(config.seed, kSlotKmeansRestart, r). Empty clusters are
/// repaired by moving the point farthest from its centroid. The returned
/// result is bit-identical for any thread count.
ClusteringResult kmeans(const Matrix& points, const SpectralConfig& config);

/// kmeans(spectral_embed(kernel, config.clusters), config).
ClusteringResult spectral_cluster(const KernelMatrix& kernel, const SpectralConfig& config);

/// Labels as a single CSV column.
void write_labels_csv(const ClusteringResult& result, const std::string& path);
std::vector<int> read_labels_csv(const std::string& path);

}  // namespace reskern
