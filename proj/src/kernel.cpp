#include "reskern/kernel.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace reskern {

KernelMatrix build_resample_kernel(const SparseCode& codes) {
  const int n = codes.num_points();
  const int V = codes.num_units();
  if (n < 1 || V < 1) throw config_error("build_resample_kernel: empty code");

  KernelMatrix kernel;
  kernel.kind = KernelKind::resample;
  kernel.scale = static_cast<double>(V);
  kernel.values.resize(n, n);

  const IndexMatrix& active = codes.active;  // row-major, row i contiguous
#pragma omp parallel for schedule(dynamic, 8)
  for (int i = 0; i < n; ++i) {
    const int* row_i = active.data() + static_cast<std::ptrdiff_t>(i) * V;
    kernel.values(i, i) = static_cast<double>(V);
    for (int j = i + 1; j < n; ++j) {
      const int* row_j = active.data() + static_cast<std::ptrdiff_t>(j) * V;
      int agree = 0;
      for (int v = 0; v < V; ++v) agree += row_i[v] == row_j[v];
      const double value = static_cast<double>(agree);
      kernel.values(i, j) = value;
      kernel.values(j, i) = value;
    }
  }
  return kernel;
}

KernelMatrix normalize_kernel(const KernelMatrix& kernel) {
  if (kernel.kind != KernelKind::resample)
    throw config_error("normalize_kernel: only resample kernels are normalized");
  if (kernel.normalized) return kernel;
  KernelMatrix out = kernel;
  out.values /= kernel.scale;
  out.normalized = true;
  return out;
}

double average_pairwise_distance(const Matrix& data) {
  const int n = static_cast<int>(data.rows());
  if (n < 2) throw config_error("average_pairwise_distance: need at least 2 points");

  const Vector sq_norms = data.rowwise().squaredNorm();
  // per-row partials reduced serially in index order, so the result does not
  // depend on the thread count
  std::vector<double> row_sums(static_cast<std::size_t>(n), 0.0);
#pragma omp parallel for schedule(dynamic, 8)
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = i + 1; j < n; ++j) {
      const double sq =
          std::max(0.0, sq_norms[i] + sq_norms[j] - 2.0 * data.row(i).dot(data.row(j)));
      acc += std::sqrt(sq);
    }
    row_sums[static_cast<std::size_t>(i)] = acc;
  }
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += row_sums[static_cast<std::size_t>(i)];
  const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  return total / pairs;
}

KernelMatrix build_rbf_kernel(const Matrix& data, const RbfParams& params) {
  const double sigma = params.sigma();
  if (!(sigma > 0.0))
    throw config_error("build_rbf_kernel: sigma must be > 0 (degenerate distance scale?)");
  const int n = static_cast<int>(data.rows());
  if (n < 1) throw config_error("build_rbf_kernel: empty data");

  KernelMatrix kernel;
  kernel.kind = KernelKind::rbf;
  kernel.scale = sigma;
  kernel.values.resize(n, n);

  const Vector sq_norms = data.rowwise().squaredNorm();
  const double inv = 1.0 / (2.0 * sigma * sigma);
#pragma omp parallel for schedule(dynamic, 8)
  for (int i = 0; i < n; ++i) {
    kernel.values(i, i) = 1.0;
    for (int j = i + 1; j < n; ++j) {
      const double sq =
          std::max(0.0, sq_norms[i] + sq_norms[j] - 2.0 * data.row(i).dot(data.row(j)));
      const double value = std::exp(-sq * inv);
      kernel.values(i, j) = value;
      kernel.values(j, i) = value;
    }
  }
  return kernel;
}

KernelMatrix build_linear_kernel(const Matrix& data) {
  KernelMatrix kernel;
  kernel.kind = KernelKind::linear;
  kernel.scale = 0.0;
  const int n = static_cast<int>(data.rows());
  kernel.values.resize(n, n);
#pragma omp parallel for schedule(dynamic, 8)
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double value = data.row(i).dot(data.row(j));
      kernel.values(i, j) = value;
      kernel.values(j, i) = value;
    }
  }
  return kernel;
}

KernelMatrix with_zero_diagonal(const KernelMatrix& kernel) {
  KernelMatrix out = kernel;
  out.values.diagonal().setZero();
  return out;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

void write_kernel_csv(const KernelMatrix& kernel, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write '" + path + "'");
  const int n = kernel.n();
  for (int i = 0; i < n; ++i) {
    std::string line;
    for (int j = 0; j < n; ++j) {
      if (j) line += ",";
      line += fmt(kernel.values(i, j));
    }
    out << line << "\n";
  }
  if (!out) throw data_error("write failed for '" + path + "'");
}

void write_kernel_binary(const KernelMatrix& kernel, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write '" + path + "'");
  const char magic[4] = {'R', 'K', 'R', 'N'};
  out.write(magic, 4);
  auto put_u32 = [&](std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
  auto put_u64 = [&](std::uint64_t v) { out.write(reinterpret_cast<const char*>(&v), 8); };
  put_u32(1);
  put_u64(static_cast<std::uint64_t>(kernel.n()));
  put_u32(static_cast<std::uint32_t>(kernel.kind));
  put_u32(kernel.normalized ? 1 : 0);
  out.write(reinterpret_cast<const char*>(&kernel.scale), 8);
  const int n = kernel.n();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out.write(reinterpret_cast<const char*>(&kernel.values(i, j)), 8);
  if (!out) throw data_error("write failed for '" + path + "'");
}

KernelMatrix read_kernel_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open '" + path + "'");
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "RKRN", 4) != 0)
    throw data_error("kernel file '" + path + "': bad magic");
  auto get_u32 = [&] {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 4);
    return v;
  };
  auto get_u64 = [&] {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 8);
    return v;
  };
  const std::uint32_t version = get_u32();
  if (version != 1) throw data_error("kernel file '" + path + "': unsupported version");
  const std::uint64_t n = get_u64();
  KernelMatrix kernel;
  kernel.kind = static_cast<KernelKind>(get_u32());
  kernel.normalized = get_u32() != 0;
  in.read(reinterpret_cast<char*>(&kernel.scale), 8);
  kernel.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::uint64_t i = 0; i < n; ++i)
    for (std::uint64_t j = 0; j < n; ++j)
      in.read(reinterpret_cast<char*>(&kernel.values(static_cast<Eigen::Index>(i),
                                                     static_cast<Eigen::Index>(j))),
              8);
  if (!in) throw data_error("kernel file '" + path + "': truncated");
  return kernel;
}

}  // namespace reskern
