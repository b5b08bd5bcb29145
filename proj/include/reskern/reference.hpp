#pragma once

#include <vector>

#include "reskern/common.hpp"
#include "reskern/ensemble.hpp"

// Naive single-threaded reference implementations. They are the independent
// oracles for the parallel kernels (tests) and the serial side of the
// benchmark comparison. No OpenMP, no blocking, no algebraic shortcuts;
// everything is the direct textbook loop.

namespace reskern::reference {

/// Per (point, unit): gather the unit's features, scan every centroid.
/// Matches reskern::encode bit-for-bit.
SparseCode encode(const EnsembleModel& model, const Matrix& data);

/// Brute-force nearest centroid for a single point.
int nearest_centroid(const std::vector<double>& point, const Matrix& centroids,
                     AssignMetric metric);

/// Gram matrix of the explicit dense one-hot expansion.
Matrix resample_gram(const SparseCode& codes);

/// Scalar-loop Gaussian kernel, squared distances accumulated directly.
Matrix rbf_kernel(const Matrix& data, double sigma);

/// Direct two-loop mean of pairwise Euclidean distances.
double average_pairwise_distance(const Matrix& data);

/// Best within-cluster sum of squares over every 2-partition (n <= ~20).
double best_two_partition_objective(const Matrix& points);

/// NMI via an explicit probability table in long double arithmetic,
/// geometric normalization.
double nmi(const std::vector<int>& a, const std::vector<int>& b);

/// Clustering accuracy by exhaustive enumeration of one-to-one class
/// mappings (padded square, all permutations; factorial cost).
double accuracy(const std::vector<int>& pred, const std::vector<int>& truth);

/// Minimum assignment cost over all permutations of the zero-padded square.
double assignment_min_cost(const Matrix& cost);

/// Welch two-tailed p-value with the t CDF evaluated by composite Simpson
/// quadrature of the density.
double welch_p_value(const std::vector<double>& sample_a, const std::vector<double>& sample_b);

}  // namespace reskern::reference
