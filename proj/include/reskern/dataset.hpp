#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reskern/common.hpp"

namespace reskern {

enum class LabelColumn { none, first, last };

/// A dense n x d feature matrix with optional ground-truth class ids.
/// Immutable after construction; labels, when present, are contiguous
/// {0..c-1} with every class occupied.
struct Dataset {
  Matrix features;          // n x d
  std::vector<int> labels;  // empty when unlabeled, else length n
  std::string name;

  int n() const { return static_cast<int>(features.rows()); }
  int dim() const { return static_cast<int>(features.cols()); }
  bool has_labels() const { return !labels.empty(); }
  int num_classes() const;
};

struct CsvOptions {
  LabelColumn label_column = LabelColumn::none;
  bool skip_header = false;
};

/// Check the Dataset invariants (n >= 2, finite features, contiguous labels).
/// Throws data_error on violation.
void validate_dataset(const Dataset& ds);

/// Comma-separated numeric rows, no quoting. Label cells may be any string;
/// classes are mapped to ids in first-appearance order.
Dataset load_csv(const std::string& path, const CsvOptions& opts = {});

/// "label idx:val idx:val ..." lines with 1-based strictly ascending indices;
/// d = max index seen, missing entries are zero.
Dataset load_libsvm(const std::string& path);

/// Write features (and labels, unless LabelColumn::none) as CSV.
void write_csv(const Dataset& ds, const std::string& path,
               LabelColumn label_column = LabelColumn::last);

/// c isotropic Gaussian clusters with noise_sd per coordinate, centers on
/// the all-ones diagonal spaced `separation` apart (so every feature
/// separates the clusters); pure function of its arguments.
Dataset generate_blobs(int clusters, int per_cluster, int dim, double separation,
                       double noise_sd, std::uint64_t seed);

/// Per-column mean 0 / sample standard deviation 1; constant columns are
/// centered to exactly 0. Idempotent.
Dataset standardize(const Dataset& ds);

}  // namespace reskern
