#pragma once

#include <string>

#include "reskern/common.hpp"
#include "reskern/ensemble.hpp"

namespace reskern {

enum class KernelKind { resample, rbf, linear };

/// n x n symmetric similarity matrix. Resample kernels carry scale = V and
/// hold integer agreement counts until normalize_kernel divides them out
/// (then `normalized` is set and the diagonal is 1). RBF kernels carry
/// scale = sigma.
struct KernelMatrix {
  Matrix values;
  KernelKind kind = KernelKind::resample;
  double scale = 0.0;
  bool normalized = false;

  int n() const { return static_cast<int>(values.rows()); }
};

/// K(i,j) = number of units on which points i and j share a centroid; the
/// Gram matrix of the one-hot expansion, assembled without materializing it.
/// Diagonal is exactly V.
KernelMatrix build_resample_kernel(const SparseCode& codes);

/// Entries divided by V; diagonal becomes exactly 1.
KernelMatrix normalize_kernel(const KernelMatrix& kernel);

/// Mean Euclidean distance over unordered distinct pairs.
double average_pairwise_distance(const Matrix& data);

struct RbfParams {
  double sigma_multiplier = 1.0;  // grid value 2^m
  double scale_reference = 0.0;   // A, the dataset's average pairwise distance

  double sigma() const { return sigma_multiplier * scale_reference; }
};

/// K(i,j) = exp(-||x_i - x_j||^2 / (2 sigma^2)), diagonal exactly 1.
KernelMatrix build_rbf_kernel(const Matrix& data, const RbfParams& params);

/// Plain Gram matrix of the raw features; debugging aid.
KernelMatrix build_linear_kernel(const Matrix& data);

/// Copy with the diagonal forced to zero (Ng et al. style affinity).
KernelMatrix with_zero_diagonal(const KernelMatrix& kernel);

/// One row per line, comma separated, shortest round-trip doubles.
void write_kernel_csv(const KernelMatrix& kernel, const std::string& path);

/// Binary layout, little endian: magic "RKRN", u32 version = 1, u64 n,
/// u32 kind, u32 normalized, f64 scale, then n*n row-major f64 values.
void write_kernel_binary(const KernelMatrix& kernel, const std::string& path);
KernelMatrix read_kernel_binary(const std::string& path);

}  // namespace reskern
