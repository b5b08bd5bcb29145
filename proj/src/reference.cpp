#include "reskern/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace reskern::reference {

int nearest_centroid(const std::vector<double>& point, const Matrix& centroids,
                     AssignMetric metric) {
  const int k = static_cast<int>(centroids.rows());
  const int dhat = static_cast<int>(centroids.cols());
  int best = 0;
  if (metric == AssignMetric::squared_euclidean) {
    double best_dist = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      double dist = 0.0;
      for (int f = 0; f < dhat; ++f) {
        const double diff = centroids(c, f) - point[static_cast<std::size_t>(f)];
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
      for (int f = 0; f < dhat; ++f)
        score += centroids(c, f) * point[static_cast<std::size_t>(f)];
      if (score > best_score) {
        best_score = score;
        best = c;
      }
    }
  }
  return best;
}

SparseCode encode(const EnsembleModel& model, const Matrix& data) {
  if (data.cols() != model.input_dim)
    throw config_error("reference::encode: dimension mismatch");
  const int n = static_cast<int>(data.rows());
  const int V = model.num_units();

  SparseCode code;
  code.active.resize(n, V);
  code.block_sizes.resize(static_cast<std::size_t>(V));
  code.total_dim = 0;
  for (int v = 0; v < V; ++v) {
    code.block_sizes[static_cast<std::size_t>(v)] = model.units[static_cast<std::size_t>(v)].k();
    code.total_dim += code.block_sizes[static_cast<std::size_t>(v)];
  }

  for (int i = 0; i < n; ++i) {
    for (int v = 0; v < V; ++v) {
      const ClusteringUnit& unit = model.units[static_cast<std::size_t>(v)];
      std::vector<double> point(static_cast<std::size_t>(unit.subspace_dim()));
      for (int f = 0; f < unit.subspace_dim(); ++f)
        point[static_cast<std::size_t>(f)] =
            data(i, unit.feature_indices[static_cast<std::size_t>(f)]);
      code.active(i, v) = nearest_centroid(point, unit.centroids, unit.metric);
    }
  }
  return code;
}

Matrix resample_gram(const SparseCode& codes) {
  const Matrix dense = codes.dense();
  const int n = codes.num_points();
  Matrix gram(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double dot = 0.0;
      for (int t = 0; t < codes.total_dim; ++t) dot += dense(i, t) * dense(j, t);
      gram(i, j) = dot;
    }
  }
  return gram;
}

Matrix rbf_kernel(const Matrix& data, double sigma) {
  const int n = static_cast<int>(data.rows());
  const int d = static_cast<int>(data.cols());
  Matrix kernel(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double sq = 0.0;
      for (int f = 0; f < d; ++f) {
        const double diff = data(i, f) - data(j, f);
        sq += diff * diff;
      }
      kernel(i, j) = std::exp(-sq / (2.0 * sigma * sigma));
    }
  }
  return kernel;
}

double average_pairwise_distance(const Matrix& data) {
  const int n = static_cast<int>(data.rows());
  const int d = static_cast<int>(data.cols());
  double total = 0.0;
  long pairs = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double sq = 0.0;
      for (int f = 0; f < d; ++f) {
        const double diff = data(i, f) - data(j, f);
        sq += diff * diff;
      }
      total += std::sqrt(sq);
      ++pairs;
    }
  }
  return total / static_cast<double>(pairs);
}

double best_two_partition_objective(const Matrix& points) {
  const int n = static_cast<int>(points.rows());
  if (n < 2 || n > 24) throw config_error("best_two_partition_objective: n out of range");
  double best = std::numeric_limits<double>::infinity();
  // point 0 stays in cluster 0; masks enumerate the second cluster
  for (unsigned long mask = 1; mask < (1UL << (n - 1)); ++mask) {
    Eigen::RowVectorXd mean0 = Eigen::RowVectorXd::Zero(points.cols());
    Eigen::RowVectorXd mean1 = Eigen::RowVectorXd::Zero(points.cols());
    int n0 = 0, n1 = 0;
    for (int i = 0; i < n; ++i) {
      const bool in1 = i > 0 && ((mask >> (i - 1)) & 1UL);
      if (in1) {
        mean1 += points.row(i);
        ++n1;
      } else {
        mean0 += points.row(i);
        ++n0;
      }
    }
    mean0 /= n0;
    mean1 /= n1;
    double objective = 0.0;
    for (int i = 0; i < n; ++i) {
      const bool in1 = i > 0 && ((mask >> (i - 1)) & 1UL);
      objective += (points.row(i) - (in1 ? mean1 : mean0)).squaredNorm();
    }
    best = std::min(best, objective);
  }
  return best;
}

double nmi(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size() || a.empty())
    throw config_error("reference::nmi: bad label vectors");
  const int ca = *std::max_element(a.begin(), a.end()) + 1;
  const int cb = *std::max_element(b.begin(), b.end()) + 1;
  const long double n = static_cast<long double>(a.size());

  // probabilities come from integer counts by one exact division each, so a
  // trivial marginal is exactly 1 and the degenerate guards below stay exact
  std::vector<std::vector<long>> counts(static_cast<std::size_t>(ca),
                                        std::vector<long>(static_cast<std::size_t>(cb), 0));
  std::vector<long> row(static_cast<std::size_t>(ca), 0);
  std::vector<long> col(static_cast<std::size_t>(cb), 0);
  for (std::size_t t = 0; t < a.size(); ++t) {
    ++counts[static_cast<std::size_t>(a[t])][static_cast<std::size_t>(b[t])];
    ++row[static_cast<std::size_t>(a[t])];
    ++col[static_cast<std::size_t>(b[t])];
  }

  std::vector<std::vector<long double>> joint(static_cast<std::size_t>(ca),
                                              std::vector<long double>(static_cast<std::size_t>(cb), 0.0L));
  std::vector<long double> pa(static_cast<std::size_t>(ca), 0.0L);
  std::vector<long double> pb(static_cast<std::size_t>(cb), 0.0L);
  for (int i = 0; i < ca; ++i)
    for (int j = 0; j < cb; ++j)
      joint[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          counts[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] / n;
  for (int i = 0; i < ca; ++i) pa[static_cast<std::size_t>(i)] = row[static_cast<std::size_t>(i)] / n;
  for (int j = 0; j < cb; ++j) pb[static_cast<std::size_t>(j)] = col[static_cast<std::size_t>(j)] / n;

  long double ha = 0.0L, hb = 0.0L, mi = 0.0L;
  for (int i = 0; i < ca; ++i)
    if (pa[static_cast<std::size_t>(i)] > 0)
      ha -= pa[static_cast<std::size_t>(i)] * std::log(pa[static_cast<std::size_t>(i)]);
  for (int j = 0; j < cb; ++j)
    if (pb[static_cast<std::size_t>(j)] > 0)
      hb -= pb[static_cast<std::size_t>(j)] * std::log(pb[static_cast<std::size_t>(j)]);
  for (int i = 0; i < ca; ++i)
    for (int j = 0; j < cb; ++j) {
      const long double pij = joint[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (pij > 0)
        mi += pij * std::log(pij / (pa[static_cast<std::size_t>(i)] * pb[static_cast<std::size_t>(j)]));
    }

  if (ha == 0.0L && hb == 0.0L) return 1.0;
  if (ha == 0.0L || hb == 0.0L) return 0.0;
  const long double value = mi / std::sqrt(ha * hb);
  return static_cast<double>(std::min(1.0L, std::max(0.0L, value)));
}

double accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
  if (pred.size() != truth.size() || pred.empty())
    throw config_error("reference::accuracy: bad label vectors");
  const int cp = *std::max_element(pred.begin(), pred.end()) + 1;
  const int ct = *std::max_element(truth.begin(), truth.end()) + 1;
  const int m = std::max(cp, ct);

  std::vector<std::vector<long>> counts(static_cast<std::size_t>(m),
                                        std::vector<long>(static_cast<std::size_t>(m), 0));
  for (std::size_t i = 0; i < pred.size(); ++i)
    ++counts[static_cast<std::size_t>(pred[i])][static_cast<std::size_t>(truth[i])];

  std::vector<int> perm(static_cast<std::size_t>(m));
  std::iota(perm.begin(), perm.end(), 0);
  long best = 0;
  do {
    long matched = 0;
    for (int r = 0; r < m; ++r) matched += counts[static_cast<std::size_t>(r)][static_cast<std::size_t>(perm[static_cast<std::size_t>(r)])];
    best = std::max(best, matched);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(pred.size());
}

double assignment_min_cost(const Matrix& cost) {
  const int m = static_cast<int>(std::max(cost.rows(), cost.cols()));
  Matrix padded = Matrix::Zero(m, m);
  padded.topLeftCorner(cost.rows(), cost.cols()) = cost;

  std::vector<int> perm(static_cast<std::size_t>(m));
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (int r = 0; r < m; ++r) total += padded(r, perm[static_cast<std::size_t>(r)]);
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

namespace {

long double t_pdf(long double x, long double df) {
  const long double log_norm = std::lgamma((df + 1.0L) / 2.0L) - std::lgamma(df / 2.0L) -
                               0.5L * std::log(df * 3.14159265358979323846264338328L);
  return std::exp(log_norm - (df + 1.0L) / 2.0L * std::log1p(x * x / df));
}

}  // namespace

double welch_p_value(const std::vector<double>& sample_a, const std::vector<double>& sample_b) {
  if (sample_a.size() < 2 || sample_b.size() < 2)
    throw config_error("reference::welch_p_value: samples too small");

  auto stats = [](const std::vector<double>& s) {
    long double mean = 0.0L;
    for (double v : s) mean += v;
    mean /= s.size();
    long double var = 0.0L;
    for (double v : s) var += (v - mean) * (v - mean);
    var /= (s.size() - 1);
    return std::pair<long double, long double>(mean, var);
  };
  const auto [ma, va] = stats(sample_a);
  const auto [mb, vb] = stats(sample_b);
  const long double na = static_cast<long double>(sample_a.size());
  const long double nb = static_cast<long double>(sample_b.size());

  if (va == 0.0L && vb == 0.0L) return ma == mb ? 1.0 : 0.0;

  const long double se2 = va / na + vb / nb;
  const long double t = std::abs((ma - mb) / std::sqrt(se2));
  const long double df =
      se2 * se2 / (va * va / (na * na * (na - 1)) + vb * vb / (nb * nb * (nb - 1)));

  // P(|T| > t) = 1 - 2 * integral_0^t pdf; composite Simpson on the body
  const int intervals = 200000;  // even
  const long double h = t / intervals;
  long double sum = t_pdf(0.0L, df) + t_pdf(t, df);
  for (int i = 1; i < intervals; ++i)
    sum += t_pdf(h * i, df) * (i % 2 ? 4.0L : 2.0L);
  const long double body = sum * h / 3.0L;
  const long double p = 1.0L - 2.0L * body;
  return static_cast<double>(std::max(0.0L, std::min(1.0L, p)));
}

}  // namespace reskern::reference
