#include "reskern/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <boost/math/distributions/students_t.hpp>

namespace reskern {

ContingencyTable ContingencyTable::from_labels(const std::vector<int>& a,
                                               const std::vector<int>& b) {
  if (a.size() != b.size())
    throw config_error("contingency: label vectors differ in length");
  if (a.empty()) throw config_error("contingency: empty label vectors");
  int ca = 0, cb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < 0 || b[i] < 0) throw config_error("contingency: negative label");
    ca = std::max(ca, a[i] + 1);
    cb = std::max(cb, b[i] + 1);
  }
  ContingencyTable table;
  table.counts = Eigen::MatrixXi::Zero(ca, cb);
  table.total = static_cast<int>(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) ++table.counts(a[i], b[i]);
  return table;
}

namespace {

double entropy_of_marginal(const Eigen::VectorXi& marginal, double n) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < marginal.size(); ++i) {
    if (marginal[i] == 0) continue;
    const double p = marginal[i] / n;
    h -= p * std::log(p);
  }
  return h;
}

}  // namespace

double nmi(const std::vector<int>& a, const std::vector<int>& b, NmiNorm norm) {
  if (a.size() != b.size()) throw config_error("nmi: label vectors differ in length");
  if (a.empty()) throw config_error("nmi: empty label vectors");

  // canonical argument order makes the result bitwise symmetric
  const bool swap = std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
  const std::vector<int>& first = swap ? b : a;
  const std::vector<int>& second = swap ? a : b;

  const ContingencyTable table = ContingencyTable::from_labels(first, second);
  const double n = static_cast<double>(table.total);
  const Eigen::VectorXi row_marginal = table.counts.rowwise().sum();
  const Eigen::VectorXi col_marginal = table.counts.colwise().sum();

  const double ha = entropy_of_marginal(row_marginal, n);
  const double hb = entropy_of_marginal(col_marginal, n);
  if (ha == 0.0 && hb == 0.0) return 1.0;
  if (ha == 0.0 || hb == 0.0) return 0.0;

  double mi = 0.0;
  for (Eigen::Index i = 0; i < table.counts.rows(); ++i) {
    for (Eigen::Index j = 0; j < table.counts.cols(); ++j) {
      const int nij = table.counts(i, j);
      if (nij == 0) continue;
      const double pij = nij / n;
      mi += pij * std::log(nij * n / (static_cast<double>(row_marginal[i]) * col_marginal[j]));
    }
  }

  const double denom = norm == NmiNorm::geometric ? std::sqrt(ha * hb) : 0.5 * (ha + hb);
  return std::clamp(mi / denom, 0.0, 1.0);
}

AssignmentResult optimal_assignment(const Matrix& cost) {
  if (cost.rows() < 1 || cost.cols() < 1)
    throw config_error("optimal_assignment: empty cost matrix");
  if (!cost.allFinite())
    throw config_error("optimal_assignment: non-finite cost entry");

  const int m = static_cast<int>(std::max(cost.rows(), cost.cols()));
  Matrix padded = Matrix::Zero(m, m);
  padded.topLeftCorner(cost.rows(), cost.cols()) = cost;

  // potential-based Hungarian, O(m^3); 1-based internal arrays
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(m) + 1, 0.0);
  std::vector<double> v(static_cast<std::size_t>(m) + 1, 0.0);
  std::vector<int> match(static_cast<std::size_t>(m) + 1, 0);  // col -> row
  std::vector<int> way(static_cast<std::size_t>(m) + 1, 0);

  for (int i = 1; i <= m; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(m) + 1, inf);
    std::vector<char> used(static_cast<std::size_t>(m) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = match[static_cast<std::size_t>(j0)];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = padded(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] -
                           v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(match[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (match[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      match[static_cast<std::size_t>(j0)] = match[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0);
  }

  AssignmentResult result;
  result.col_of_row.assign(static_cast<std::size_t>(m), -1);
  for (int j = 1; j <= m; ++j)
    result.col_of_row[static_cast<std::size_t>(match[static_cast<std::size_t>(j)] - 1)] = j - 1;
  result.total_cost = 0.0;
  for (int r = 0; r < m; ++r)
    result.total_cost += padded(r, result.col_of_row[static_cast<std::size_t>(r)]);
  return result;
}

double accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
  if (pred.size() != truth.size())
    throw config_error("accuracy: label vectors differ in length");
  const ContingencyTable table = ContingencyTable::from_labels(pred, truth);

  // maximize matched counts == minimize negated counts
  const Matrix cost = -table.counts.cast<double>();
  const AssignmentResult assignment = optimal_assignment(cost);

  long matched = 0;
  for (Eigen::Index r = 0; r < table.counts.rows(); ++r) {
    const int c = assignment.col_of_row[static_cast<std::size_t>(r)];
    if (c < table.counts.cols()) matched += table.counts(r, c);
  }
  return static_cast<double>(matched) / static_cast<double>(table.total);
}

TTestResult two_tailed_ttest(const std::vector<double>& sample_a,
                             const std::vector<double>& sample_b, double alpha) {
  if (sample_a.size() < 2 || sample_b.size() < 2)
    throw config_error("two_tailed_ttest: each sample needs at least 2 values");

  const auto [mean_a, sd_a] = mean_sd(sample_a);
  const auto [mean_b, sd_b] = mean_sd(sample_b);
  const double na = static_cast<double>(sample_a.size());
  const double nb = static_cast<double>(sample_b.size());
  const double var_a = sd_a * sd_a;
  const double var_b = sd_b * sd_b;

  TTestResult result;
  if (var_a == 0.0 && var_b == 0.0) {
    result.p_value = mean_a == mean_b ? 1.0 : 0.0;
    result.t_statistic = mean_a == mean_b ? 0.0 : std::numeric_limits<double>::infinity();
    result.degrees_of_freedom = na + nb - 2.0;
    result.significant = result.p_value < alpha;
    return result;
  }

  const double se2 = var_a / na + var_b / nb;
  result.t_statistic = (mean_a - mean_b) / std::sqrt(se2);
  const double df = se2 * se2 /
                    (var_a * var_a / (na * na * (na - 1.0)) +
                     var_b * var_b / (nb * nb * (nb - 1.0)));
  result.degrees_of_freedom = df;
  const boost::math::students_t dist(df);
  result.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(result.t_statistic)));
  result.significant = result.p_value < alpha;
  return result;
}

namespace {

double column_mean(const std::vector<std::pair<double, double>>& rows, bool second) {
  if (rows.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& [x, y] : rows) sum += second ? y : x;
  return sum / static_cast<double>(rows.size());
}

double column_sd(const std::vector<std::pair<double, double>>& rows, bool second) {
  if (rows.size() < 2) return 0.0;
  const double mean = column_mean(rows, second);
  double ss = 0.0;
  for (const auto& [x, y] : rows) {
    const double d = (second ? y : x) - mean;
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(rows.size() - 1));
}

}  // namespace

double MetricsReport::nmi_mean() const { return column_mean(per_run, false); }
double MetricsReport::nmi_sd() const { return column_sd(per_run, false); }
double MetricsReport::acc_mean() const { return column_mean(per_run, true); }
double MetricsReport::acc_sd() const { return column_sd(per_run, true); }

std::vector<double> MetricsReport::nmi_values() const {
  std::vector<double> out;
  out.reserve(per_run.size());
  for (const auto& [x, y] : per_run) out.push_back(x);
  return out;
}

std::vector<double> MetricsReport::acc_values() const {
  std::vector<double> out;
  out.reserve(per_run.size());
  for (const auto& [x, y] : per_run) out.push_back(y);
  return out;
}

std::pair<double, double> mean_sd(const std::vector<double>& values) {
  if (values.empty()) return {0.0, 0.0};
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

}  // namespace reskern
