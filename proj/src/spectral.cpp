#include "reskern/spectral.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include "reskern/rng.hpp"

namespace reskern {

namespace {

// Top-c eigenpairs by Lanczos with full reorthogonalization. Deterministic:
// fixed internal start seed, serial matvecs. Grows the Krylov basis until the
// wanted Ritz pairs converge or the basis saturates.
void lanczos_top_eigs(const Matrix& L, int want, double tol, Vector& eigenvalues,
                      Matrix& eigenvectors) {
  const int n = static_cast<int>(L.rows());
  const int max_basis = std::min(n, std::max(4 * want + 40, 120));

  auto eng = rng::make_engine(rng::mix64(0x6c616e637a6f73ULL));  // fixed stream
  Vector v = Vector::NullaryExpr(n, [&](Eigen::Index) { return rng::normal(eng); });
  v.normalize();

  Matrix basis(n, max_basis);
  std::vector<double> alpha, beta;  // beta[j] couples basis j and j+1
  basis.col(0) = v;

  const double scale = L.norm();  // Frobenius
  Vector w(n);
  int m = 0;
  Eigen::SelfAdjointEigenSolver<Matrix> small;

  while (m < max_basis) {
    w.noalias() = L * basis.col(m);
    const double a = basis.col(m).dot(w);
    alpha.push_back(a);
    w -= a * basis.col(m);
    if (m > 0) w -= beta[static_cast<std::size_t>(m - 1)] * basis.col(m - 1);
    // full reorthogonalization, twice
    for (int pass = 0; pass < 2; ++pass)
      for (int j = 0; j <= m; ++j) w -= basis.col(j).dot(w) * basis.col(j);
    const double b = w.norm();
    ++m;

    const bool invariant = b <= 1e-14 * std::max(1.0, scale);
    if (m >= want && (invariant || m == max_basis || m % 10 == 0)) {
      Matrix T = Matrix::Zero(m, m);
      for (int i = 0; i < m; ++i) {
        T(i, i) = alpha[static_cast<std::size_t>(i)];
        if (i + 1 < m) {
          T(i, i + 1) = beta[static_cast<std::size_t>(i)];
          T(i + 1, i) = beta[static_cast<std::size_t>(i)];
        }
      }
      small.compute(T);
      bool converged = true;
      for (int j = 0; j < want; ++j) {
        const int col = m - 1 - j;  // largest eigenvalues sit at the end
        const double resid = invariant ? 0.0 : std::abs(b * small.eigenvectors()(m - 1, col));
        if (resid > tol * std::max(1.0, scale)) {
          converged = false;
          break;
        }
      }
      if (converged || invariant || m == max_basis) {
        eigenvalues.resize(want);
        eigenvectors.resize(n, want);
        for (int j = 0; j < want; ++j) {
          const int col = m - 1 - j;
          eigenvalues[j] = small.eigenvalues()(col);
          eigenvectors.col(j) = basis.leftCols(m) * small.eigenvectors().col(col);
          eigenvectors.col(j).normalize();
        }
        return;
      }
    }

    if (invariant) break;  // exhausted the reachable subspace
    if (m < max_basis) {
      beta.push_back(b);
      basis.col(m) = w / b;
    }
  }
  throw numeric_error("lanczos: failed to converge " + std::to_string(want) +
                      " eigenpairs in a basis of " + std::to_string(max_basis));
}

}  // namespace

Matrix spectral_embed(const KernelMatrix& kernel, int clusters, const EmbedOptions& opts) {
  const int n = kernel.n();
  if (clusters < 1) throw config_error("spectral_embed: cluster count must be >= 1");
  if (n < clusters)
    throw config_error("spectral_embed: n = " + std::to_string(n) + " < c = " +
                       std::to_string(clusters));
  if (kernel.values.rows() != kernel.values.cols())
    throw config_error("spectral_embed: kernel is not square");

  const Vector degrees = kernel.values.rowwise().sum();
  std::string degenerate;
  int degenerate_count = 0;
  for (int i = 0; i < n; ++i) {
    if (!(degrees[i] > 0.0)) {
      ++degenerate_count;
      if (degenerate_count <= 10) {
        if (!degenerate.empty()) degenerate += ",";
        degenerate += std::to_string(i);
      }
    }
  }
  if (degenerate_count > 0) {
    if (degenerate_count > 10)
      degenerate += ",... " + std::to_string(degenerate_count - 10) + " more";
    throw numeric_error("spectral_embed: degenerate affinity, zero-degree points [" +
                        degenerate + "]");
  }

  const Vector inv_sqrt = degrees.array().rsqrt();
  Matrix laplacian = kernel.values;
#pragma omp parallel for schedule(static)
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) laplacian(i, j) *= inv_sqrt[i] * inv_sqrt[j];

  Vector eigenvalues;
  Matrix eigenvectors;
  if (n <= opts.dense_threshold) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(laplacian);
    if (solver.info() != Eigen::Success)
      throw numeric_error("spectral_embed: dense eigendecomposition failed to converge");
    eigenvalues.resize(clusters);
    eigenvectors.resize(n, clusters);
    for (int j = 0; j < clusters; ++j) {  // descending eigenvalue order
      eigenvalues[j] = solver.eigenvalues()(n - 1 - j);
      eigenvectors.col(j) = solver.eigenvectors().col(n - 1 - j);
    }
  } else {
    lanczos_top_eigs(laplacian, clusters, opts.lanczos_tol, eigenvalues, eigenvectors);
  }

  const double scale = laplacian.norm();
  for (int j = 0; j < clusters; ++j) {
    const double resid =
        (laplacian * eigenvectors.col(j) - eigenvalues[j] * eigenvectors.col(j)).norm();
    if (resid > opts.residual_tol * std::max(1.0, scale))
      throw numeric_error("spectral_embed: eigenpair " + std::to_string(j) +
                          " residual " + std::to_string(resid) + " exceeds tolerance");
  }

  Matrix embedding = eigenvectors;
  for (int i = 0; i < n; ++i) {
    const double norm = embedding.row(i).norm();
    if (norm > 0.0) embedding.row(i) /= norm;
  }
  return embedding;
}

namespace {

struct RestartOutcome {
  std::vector<int> labels;
  double objective = std::numeric_limits<double>::infinity();
};

int nearest_center(const Matrix& points, const Matrix& centers, int i) {
  const int c = static_cast<int>(centers.rows());
  int best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int t = 0; t < c; ++t) {
    const double dist = (points.row(i) - centers.row(t)).squaredNorm();
    if (dist < best_dist) {
      best_dist = dist;
      best = t;
    }
  }
  return best;
}

// k-means++ D^2 seeding; falls back to a uniform pick when every remaining
// distance is zero (coincident points).
Matrix seed_centers_plusplus(const Matrix& points, int c, rng::Engine& eng) {
  const int n = static_cast<int>(points.rows());
  Matrix centers(c, points.cols());
  const int first = static_cast<int>(rng::below(eng, static_cast<std::uint64_t>(n)));
  centers.row(0) = points.row(first);

  Vector d2(n);
  for (int i = 0; i < n; ++i) d2[i] = (points.row(i) - centers.row(0)).squaredNorm();

  for (int t = 1; t < c; ++t) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += d2[i];
    int pick;
    if (total > 0.0) {
      const double target = rng::uniform01(eng) * total;
      double cum = 0.0;
      pick = n - 1;
      for (int i = 0; i < n; ++i) {
        cum += d2[i];
        if (cum > target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<int>(rng::below(eng, static_cast<std::uint64_t>(n)));
    }
    centers.row(t) = points.row(pick);
    for (int i = 0; i < n; ++i)
      d2[i] = std::min(d2[i], (points.row(i) - centers.row(t)).squaredNorm());
  }
  return centers;
}

RestartOutcome run_one_restart(const Matrix& points, int c, int max_iters, double tol,
                               std::uint64_t seed) {
  const int n = static_cast<int>(points.rows());
  auto eng = rng::make_engine(seed);
  Matrix centers = seed_centers_plusplus(points, c, eng);
  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  std::vector<int> sizes(static_cast<std::size_t>(c), 0);

  for (int iter = 0; iter < max_iters; ++iter) {
    for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = nearest_center(points, centers, i);

    std::fill(sizes.begin(), sizes.end(), 0);
    for (int i = 0; i < n; ++i) ++sizes[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];

    // empty-cluster repair: hand the farthest point to each empty cluster
    for (int e = 0; e < c; ++e) {
      if (sizes[static_cast<std::size_t>(e)] > 0) continue;
      int worst = -1;
      double worst_dist = -1.0;
      for (int i = 0; i < n; ++i) {
        const int owner = labels[static_cast<std::size_t>(i)];
        if (sizes[static_cast<std::size_t>(owner)] <= 1) continue;
        const double dist = (points.row(i) - centers.row(owner)).squaredNorm();
        if (dist > worst_dist) {
          worst_dist = dist;
          worst = i;
        }
      }
      if (worst < 0) continue;  // n < distinct points; leave empty, objective unaffected
      --sizes[static_cast<std::size_t>(labels[static_cast<std::size_t>(worst)])];
      labels[static_cast<std::size_t>(worst)] = e;
      ++sizes[static_cast<std::size_t>(e)];
    }

    Matrix new_centers = Matrix::Zero(c, points.cols());
    for (int i = 0; i < n; ++i) new_centers.row(labels[static_cast<std::size_t>(i)]) += points.row(i);
    for (int t = 0; t < c; ++t) {
      if (sizes[static_cast<std::size_t>(t)] > 0)
        new_centers.row(t) /= static_cast<double>(sizes[static_cast<std::size_t>(t)]);
      else
        new_centers.row(t) = centers.row(t);
    }

    double shift = 0.0;
    for (int t = 0; t < c; ++t)
      shift = std::max(shift, (new_centers.row(t) - centers.row(t)).squaredNorm());
    centers = std::move(new_centers);
    if (shift < tol) break;
  }

  RestartOutcome out;
  out.labels.resize(static_cast<std::size_t>(n));
  out.objective = 0.0;
  for (int i = 0; i < n; ++i) {
    const int t = nearest_center(points, centers, i);
    out.labels[static_cast<std::size_t>(i)] = t;
    out.objective += (points.row(i) - centers.row(t)).squaredNorm();
  }
  return out;
}

}  // namespace

ClusteringResult kmeans(const Matrix& points, const SpectralConfig& config) {
  const int n = static_cast<int>(points.rows());
  const int c = config.clusters;
  if (c < 2) throw config_error("kmeans: cluster count must be >= 2");
  if (config.kmeans_restarts < 1) throw config_error("kmeans: restarts must be >= 1");
  if (n < c)
    throw config_error("kmeans: n = " + std::to_string(n) + " < c = " + std::to_string(c));

  const int restarts = config.kmeans_restarts;
  std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(restarts));
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < restarts; ++r) {
    outcomes[static_cast<std::size_t>(r)] = run_one_restart(
        points, c, config.kmeans_max_iters, config.kmeans_tol,
        rng::child_seed(config.seed, rng::kSlotKmeansRestart, static_cast<std::uint64_t>(r)));
  }

  int winner = 0;
  for (int r = 1; r < restarts; ++r)
    if (outcomes[static_cast<std::size_t>(r)].objective <
        outcomes[static_cast<std::size_t>(winner)].objective)
      winner = r;

  ClusteringResult result;
  result.labels = std::move(outcomes[static_cast<std::size_t>(winner)].labels);
  result.objective = outcomes[static_cast<std::size_t>(winner)].objective;
  result.restarts_run = restarts;
  result.chosen_restart = winner;
  return result;
}

ClusteringResult spectral_cluster(const KernelMatrix& kernel, const SpectralConfig& config) {
  if (config.clusters < 2) throw config_error("spectral_cluster: cluster count must be >= 2");
  const Matrix embedding = spectral_embed(kernel, config.clusters);
  return kmeans(embedding, config);
}

void write_labels_csv(const ClusteringResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write '" + path + "'");
  for (int l : result.labels) out << l << "\n";
  if (!out) throw data_error("write failed for '" + path + "'");
}

std::vector<int> read_labels_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open '" + path + "'");
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    int v = 0;
    const char* b = line.data();
    const char* e = b + line.size();
    while (e > b && (e[-1] == '\r' || e[-1] == ' ')) --e;
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e)
      throw data_error("labels file '" + path + "' line " + std::to_string(line_no) +
                       ": not an integer");
    labels.push_back(v);
  }
  if (labels.empty()) throw data_error("labels file '" + path + "' is empty");
  return labels;
}

}  // namespace reskern
