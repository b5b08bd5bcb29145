#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "reskern/common.hpp"

namespace reskern {

/// Joint class-count table of two labelings; rows index the first argument's
/// classes, columns the second's.
struct ContingencyTable {
  Eigen::MatrixXi counts;
  int total = 0;

  static ContingencyTable from_labels(const std::vector<int>& a, const std::vector<int>& b);
};

enum class NmiNorm { geometric, arithmetic };

/// Normalized mutual information in [0,1], natural logs, 0*log0 = 0.
/// Geometric normalization I/sqrt(Ha*Hb) by default. Both partitions trivial
/// -> 1; exactly one trivial -> 0. Bitwise symmetric in its arguments.
double nmi(const std::vector<int>& a, const std::vector<int>& b,
           NmiNorm norm = NmiNorm::geometric);

/// Clustering accuracy: best one-to-one matching of predicted classes onto
/// truth classes (Hungarian on the contingency table), matched count over n.
double accuracy(const std::vector<int>& pred, const std::vector<int>& truth);

struct AssignmentResult {
  std::vector<int> col_of_row;  // size = padded square dimension
  double total_cost = 0.0;
};

/// Minimum-cost perfect matching; rectangular inputs are padded to square
/// with zero-cost cells. Deterministic tie handling (first minimum wins),
/// which yields the identity mapping on all-equal cost matrices.
AssignmentResult optimal_assignment(const Matrix& cost);

struct TTestResult {
  double p_value = 1.0;
  bool significant = false;
  double t_statistic = 0.0;
  double degrees_of_freedom = 0.0;
};

/// Welch's unequal-variance two-tailed t-test. Zero variance in both samples
/// degenerates to p = 1 (equal means) or p = 0 (unequal).
TTestResult two_tailed_ttest(const std::vector<double>& sample_a,
                             const std::vector<double>& sample_b, double alpha);

/// Per-run (nmi, acc) pairs with mean/sd accessors (sample sd, n-1; zero for
/// a single run).
struct MetricsReport {
  std::vector<std::pair<double, double>> per_run;

  int runs() const { return static_cast<int>(per_run.size()); }
  double nmi_mean() const;
  double nmi_sd() const;
  double acc_mean() const;
  double acc_sd() const;
  std::vector<double> nmi_values() const;
  std::vector<double> acc_values() const;
};

/// Sample mean and standard deviation (n-1 denominator; sd = 0 when n < 2).
std::pair<double, double> mean_sd(const std::vector<double>& values);

}  // namespace reskern
