#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reskern/dataset.hpp"
#include "reskern/kernel.hpp"
#include "reskern/metrics.hpp"
#include "reskern/spectral.hpp"

namespace reskern {

enum class Method { resample, rbf, kmeans_raw, kmeans_pca };

std::string method_name(Method m);
Method parse_method(const std::string& name);  // throws config_error

struct ExperimentConfig {
  Method method = Method::resample;
  int clusters = 0;  // 0 -> number of truth classes
  int repetitions = 10;
  std::uint64_t master_seed = 0;

  // resample kernel
  double delta = 0.7;
  double feature_fraction = 0.5;  // a
  int units = 400;                // V
  int layers = 1;

  // rbf kernel: sigma = sigma_multiplier * A, A = average pairwise distance
  double sigma_multiplier = 0.0625;  // 2^-4

  bool zero_diagonal = false;
  int pca_dims = 0;  // kmeans_pca: 0 -> clusters, always clamped to dim

  int kmeans_restarts = 50;
  int kmeans_max_iters = 300;
  double kmeans_tol = 1e-9;
};

/// One repetition of the pipeline. Failed repetitions (numerical errors,
/// e.g. a sigma too small for the affinity to stay connected) keep ok =
/// false and the message; metrics aggregate over the successful ones.
struct RunRecord {
  int repetition = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  double nmi = 0.0;
  double acc = 0.0;
  double objective = 0.0;  // winning k-means objective
  int chosen_restart = 0;
  std::string error;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::string dataset_name;
  std::vector<RunRecord> runs;

  MetricsReport report() const;  // successful runs only
  int failed_runs() const;
  int successful_runs() const;
};

/// Center the columns and project onto the top `dims` principal components
/// (eigenvectors of the sample covariance, descending eigenvalue order).
/// dims is clamped to the feature dimension.
Matrix pca_project(const Matrix& features, int dims);

/// `repetitions` pipeline runs, repetition r seeded with
/// child_seed(master_seed, kSlotRepetition, r). resample: fresh ensemble ->
/// normalized agreement kernel -> spectral clustering; rbf: fixed Gaussian
/// kernel (sigma from the dataset's average pairwise distance), reseeded
/// spectral k-means; kmeans_raw / kmeans_pca: k-means on the (projected)
/// features. Throws data_error when labels are missing, config_error for a
/// bad configuration; per-repetition numerical failures become failure rows.
ExperimentResult run_experiment(const Dataset& ds, const ExperimentConfig& config);

enum class SweepParameter { delta, sigma_multiplier };

std::string sweep_parameter_name(SweepParameter p);
SweepParameter parse_sweep_parameter(const std::string& name);  // throws config_error

/// delta: {0.1 .. 0.9 step 0.1}; sigma_multiplier: {2^-4 .. 2^4}.
std::vector<double> default_grid(SweepParameter p);

struct SweepSpec {
  SweepParameter parameter = SweepParameter::delta;
  std::vector<double> grid;  // empty -> default_grid(parameter)
};

struct SweepPoint {
  int index = 1;  // 1-based, the figures' x-axis convention
  double value = 0.0;
  ExperimentResult result;
  std::string error;  // set when the whole point aborted

  bool failed() const;  // aborted or zero successful repetitions
};

struct SweepResult {
  SweepSpec spec;
  std::vector<SweepPoint> points;

  int failed_points() const;
};

/// One experiment per grid value. The swept parameter dictates the method
/// (delta -> resample, sigma_multiplier -> rbf) regardless of base.method.
/// A failing grid point is recorded and never aborts its siblings.
SweepResult run_sweep(const Dataset& ds, const ExperimentConfig& base, const SweepSpec& spec);

/// kmeans_raw and kmeans_pca under the same configuration.
std::vector<ExperimentResult> run_baselines(const Dataset& ds, const ExperimentConfig& base);

enum class Verdict { win, tied, lose };

std::string verdict_name(Verdict v);

struct MetricComparison {
  double mean_a = 0.0;
  double mean_b = 0.0;
  double p_value = 1.0;
  Verdict verdict = Verdict::tied;
};

struct MethodComparison {
  MetricComparison nmi;
  MetricComparison acc;
  double alpha = 0.05;
};

/// Welch two-tailed t-test per metric; verdict from a's perspective (win:
/// significantly larger mean). Throws config_error when either side has
/// fewer than 2 successful runs.
MethodComparison compare_methods(const MetricsReport& a, const MetricsReport& b, double alpha);

// --- CSV / Markdown emitters. All doubles in CSV files are shortest
// round-trip; identical inputs give byte-identical files.

struct SummaryRow {
  std::string dataset;
  std::string method;
  std::string params;
  int reps = 0;
  int failed = 0;
  double nmi_mean = 0.0, nmi_sd = 0.0, acc_mean = 0.0, acc_sd = 0.0;
  std::string p_value;  // vs-comparison NMI p-value; empty outside compare
};

SummaryRow summarize(const ExperimentResult& result);

void write_runs_csv(const std::vector<ExperimentResult>& results, const std::string& path);
void write_summary_csv(const std::vector<SummaryRow>& rows, const std::string& path);
void write_summary_md(const std::vector<SummaryRow>& rows, const std::string& path);

/// index,value,reps,failed,nmi_mean,nmi_sd,acc_mean,acc_sd,error
void write_sweep_csv(const SweepResult& sweep, const std::string& path);
/// runs.csv with leading index,value columns.
void write_sweep_runs_csv(const SweepResult& sweep, const std::string& path);

/// metric,mean_a,mean_b,p_value,verdict
void write_comparison_csv(const MethodComparison& cmp, const std::string& path);

}  // namespace reskern
