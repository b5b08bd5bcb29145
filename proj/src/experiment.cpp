#include "reskern/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include "reskern/ensemble.hpp"
#include "reskern/rng.hpp"

namespace reskern {

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

// percent with two decimals, the tables' convention
std::string format_percent(double v) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(2);
  out << 100.0 * v;
  return out.str();
}

std::string sanitize(const std::string& message) {
  std::string out = message;
  for (char& ch : out)
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // fixed newlines everywhere
  if (!out) throw data_error("cannot write " + path);
  return out;
}

int resolve_clusters(const Dataset& ds, const ExperimentConfig& config) {
  int c = config.clusters;
  if (c == 0) {
    if (!ds.has_labels())
      throw config_error("cluster count not given and dataset has no labels to infer it from");
    c = ds.num_classes();
  }
  if (c < 2) throw config_error("need at least 2 clusters");
  return c;
}

SpectralConfig spectral_config(const ExperimentConfig& config, int clusters,
                               std::uint64_t rep_seed) {
  SpectralConfig sc;
  sc.clusters = clusters;
  sc.kmeans_restarts = config.kmeans_restarts;
  sc.kmeans_max_iters = config.kmeans_max_iters;
  sc.kmeans_tol = config.kmeans_tol;
  sc.seed = rep_seed;
  return sc;
}

std::string params_string(const ExperimentConfig& config) {
  switch (config.method) {
    case Method::resample: {
      std::string s = "delta=" + format_double(config.delta) +
                      " a=" + format_double(config.feature_fraction) +
                      " V=" + std::to_string(config.units);
      if (config.layers != 1) s += " layers=" + std::to_string(config.layers);
      return s;
    }
    case Method::rbf:
      return "sigma_mult=" + format_double(config.sigma_multiplier);
    case Method::kmeans_raw:
      return "restarts=" + std::to_string(config.kmeans_restarts);
    case Method::kmeans_pca:
      return "pca_dims=" + std::to_string(config.pca_dims) +
             " restarts=" + std::to_string(config.kmeans_restarts);
  }
  return {};
}

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::resample: return "resample";
    case Method::rbf: return "rbf";
    case Method::kmeans_raw: return "kmeans_raw";
    case Method::kmeans_pca: return "kmeans_pca";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  if (name == "resample") return Method::resample;
  if (name == "rbf") return Method::rbf;
  if (name == "kmeans_raw" || name == "kmeans-raw") return Method::kmeans_raw;
  if (name == "kmeans_pca" || name == "kmeans-pca") return Method::kmeans_pca;
  throw config_error("unknown method '" + name +
                     "' (expected resample, rbf, kmeans_raw or kmeans_pca)");
}

MetricsReport ExperimentResult::report() const {
  MetricsReport rep;
  for (const RunRecord& run : runs)
    if (run.ok) rep.per_run.emplace_back(run.nmi, run.acc);
  return rep;
}

int ExperimentResult::failed_runs() const {
  int failed = 0;
  for (const RunRecord& run : runs) failed += !run.ok;
  return failed;
}

int ExperimentResult::successful_runs() const {
  return static_cast<int>(runs.size()) - failed_runs();
}

Matrix pca_project(const Matrix& features, int dims) {
  if (dims < 1) throw config_error("pca dims must be positive");
  const int d = static_cast<int>(features.cols());
  dims = std::min(dims, d);

  const Eigen::RowVectorXd mean = features.colwise().mean();
  const Matrix centered = features.rowwise() - mean;
  const Matrix cov =
      centered.transpose() * centered / std::max(1.0, static_cast<double>(features.rows() - 1));

  Eigen::SelfAdjointEigenSolver<Matrix> solver(cov);
  if (solver.info() != Eigen::Success) throw numeric_error("pca eigendecomposition failed");
  // ascending eigenvalues; take the trailing columns in descending order
  Matrix basis(d, dims);
  for (int j = 0; j < dims; ++j) basis.col(j) = solver.eigenvectors().col(d - 1 - j);
  return centered * basis;
}

ExperimentResult run_experiment(const Dataset& ds, const ExperimentConfig& config) {
  validate_dataset(ds);
  if (!ds.has_labels()) throw data_error("dataset '" + ds.name + "' has no truth labels");
  if (config.repetitions < 1) throw config_error("repetitions must be >= 1");

  const int c = resolve_clusters(ds, config);

  // deterministic per-method precomputation, shared across repetitions
  std::optional<KernelMatrix> fixed_kernel;
  std::optional<Matrix> fixed_points;
  switch (config.method) {
    case Method::resample:
      if (static_cast<int>(config.delta * ds.n()) < 1)
        throw config_error("delta * n < 1: no centroids to sample");
      break;
    case Method::rbf: {
      RbfParams params;
      params.sigma_multiplier = config.sigma_multiplier;
      params.scale_reference = average_pairwise_distance(ds.features);
      KernelMatrix kernel = build_rbf_kernel(ds.features, params);
      fixed_kernel = config.zero_diagonal ? with_zero_diagonal(kernel) : kernel;
      break;
    }
    case Method::kmeans_raw:
      fixed_points = ds.features;
      break;
    case Method::kmeans_pca:
      fixed_points = pca_project(ds.features, config.pca_dims > 0 ? config.pca_dims : c);
      break;
  }

  ExperimentResult result;
  result.config = config;
  result.dataset_name = ds.name;
  result.runs.resize(static_cast<std::size_t>(config.repetitions));

  for (int rep = 0; rep < config.repetitions; ++rep) {
    RunRecord& record = result.runs[static_cast<std::size_t>(rep)];
    record.repetition = rep;
    record.seed = rng::child_seed(config.master_seed, rng::kSlotRepetition,
                                  static_cast<std::uint64_t>(rep));
    try {
      ClusteringResult clustering;
      if (fixed_points) {
        clustering = kmeans(*fixed_points, spectral_config(config, c, record.seed));
      } else {
        KernelMatrix kernel;
        if (fixed_kernel) {
          kernel = *fixed_kernel;
        } else {
          EncoderConfig enc;
          enc.units = config.units;
          enc.delta = config.delta;
          enc.feature_fraction = config.feature_fraction;
          enc.layers = config.layers;
          enc.master_seed = record.seed;
          const StackResult stack = stack_layers(ds.features, enc);
          kernel = normalize_kernel(build_resample_kernel(stack.top));
          if (config.zero_diagonal) kernel = with_zero_diagonal(kernel);
        }
        clustering = spectral_cluster(kernel, spectral_config(config, c, record.seed));
      }
      record.nmi = nmi(clustering.labels, ds.labels);
      record.acc = accuracy(clustering.labels, ds.labels);
      record.objective = clustering.objective;
      record.chosen_restart = clustering.chosen_restart;
      record.ok = true;
    } catch (const numeric_error& e) {
      record.ok = false;
      record.error = e.what();
    }
  }
  return result;
}

std::string sweep_parameter_name(SweepParameter p) {
  return p == SweepParameter::delta ? "delta" : "sigma_mult";
}

SweepParameter parse_sweep_parameter(const std::string& name) {
  if (name == "delta") return SweepParameter::delta;
  if (name == "sigma_mult" || name == "sigma-mult" || name == "sigma_multiplier")
    return SweepParameter::sigma_multiplier;
  throw config_error("unknown sweep parameter '" + name + "' (expected delta or sigma_mult)");
}

std::vector<double> default_grid(SweepParameter p) {
  std::vector<double> grid;
  if (p == SweepParameter::delta) {
    for (int i = 1; i <= 9; ++i) grid.push_back(i / 10.0);
  } else {
    for (int m = -4; m <= 4; ++m) grid.push_back(std::ldexp(1.0, m));
  }
  return grid;
}

bool SweepPoint::failed() const {
  return !error.empty() || result.successful_runs() == 0;
}

int SweepResult::failed_points() const {
  int failed = 0;
  for (const SweepPoint& point : points) failed += point.failed();
  return failed;
}

SweepResult run_sweep(const Dataset& ds, const ExperimentConfig& base, const SweepSpec& spec) {
  SweepResult sweep;
  sweep.spec = spec;
  if (sweep.spec.grid.empty()) sweep.spec.grid = default_grid(spec.parameter);

  for (std::size_t g = 0; g < sweep.spec.grid.size(); ++g) {
    SweepPoint point;
    point.index = static_cast<int>(g) + 1;
    point.value = sweep.spec.grid[g];

    ExperimentConfig config = base;
    if (spec.parameter == SweepParameter::delta) {
      config.method = Method::resample;
      config.delta = point.value;
    } else {
      config.method = Method::rbf;
      config.sigma_multiplier = point.value;
    }
    try {
      point.result = run_experiment(ds, config);
    } catch (const config_error& e) {  // value-specific, e.g. delta*n < 1
      point.error = e.what();
      point.result.config = config;
      point.result.dataset_name = ds.name;
    } catch (const numeric_error& e) {
      point.error = e.what();
      point.result.config = config;
      point.result.dataset_name = ds.name;
    }
    sweep.points.push_back(std::move(point));
  }
  return sweep;
}

std::vector<ExperimentResult> run_baselines(const Dataset& ds, const ExperimentConfig& base) {
  std::vector<ExperimentResult> results;
  for (Method m : {Method::kmeans_raw, Method::kmeans_pca}) {
    ExperimentConfig config = base;
    config.method = m;
    results.push_back(run_experiment(ds, config));
  }
  return results;
}

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::win: return "win";
    case Verdict::tied: return "tied";
    case Verdict::lose: return "lose";
  }
  return "?";
}

namespace {

MetricComparison compare_metric(const std::vector<double>& a, const std::vector<double>& b,
                                double alpha) {
  MetricComparison cmp;
  cmp.mean_a = mean_sd(a).first;
  cmp.mean_b = mean_sd(b).first;
  const TTestResult test = two_tailed_ttest(a, b, alpha);
  cmp.p_value = test.p_value;
  if (!test.significant || cmp.mean_a == cmp.mean_b)
    cmp.verdict = Verdict::tied;
  else
    cmp.verdict = cmp.mean_a > cmp.mean_b ? Verdict::win : Verdict::lose;
  return cmp;
}

}  // namespace

MethodComparison compare_methods(const MetricsReport& a, const MetricsReport& b, double alpha) {
  if (a.runs() < 2 || b.runs() < 2)
    throw config_error("comparison needs at least 2 successful runs per method");
  MethodComparison cmp;
  cmp.alpha = alpha;
  cmp.nmi = compare_metric(a.nmi_values(), b.nmi_values(), alpha);
  cmp.acc = compare_metric(a.acc_values(), b.acc_values(), alpha);
  return cmp;
}

SummaryRow summarize(const ExperimentResult& result) {
  SummaryRow row;
  row.dataset = result.dataset_name;
  row.method = method_name(result.config.method);
  row.params = params_string(result.config);
  row.reps = static_cast<int>(result.runs.size());
  row.failed = result.failed_runs();
  const MetricsReport rep = result.report();
  row.nmi_mean = rep.nmi_mean();
  row.nmi_sd = rep.nmi_sd();
  row.acc_mean = rep.acc_mean();
  row.acc_sd = rep.acc_sd();
  return row;
}

namespace {

void write_run_row(std::ofstream& out, const ExperimentResult& result, const RunRecord& run) {
  out << result.dataset_name << ',' << method_name(result.config.method) << ','
      << run.repetition << ',' << run.seed << ',' << (run.ok ? "1" : "0") << ',';
  if (run.ok)
    out << format_double(run.nmi) << ',' << format_double(run.acc) << ','
        << format_double(run.objective) << ',' << run.chosen_restart;
  else
    out << ",,,";
  out << ',' << sanitize(run.error) << '\n';
}

}  // namespace

void write_runs_csv(const std::vector<ExperimentResult>& results, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "dataset,method,rep,seed,ok,nmi,acc,objective,restart,error\n";
  for (const ExperimentResult& result : results)
    for (const RunRecord& run : result.runs) write_run_row(out, result, run);
}

void write_summary_csv(const std::vector<SummaryRow>& rows, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "dataset,method,params,reps,failed,nmi_mean,nmi_sd,acc_mean,acc_sd,p_value\n";
  for (const SummaryRow& row : rows) {
    out << row.dataset << ',' << row.method << ',' << row.params << ',' << row.reps << ','
        << row.failed << ',';
    if (row.failed < row.reps)
      out << format_double(row.nmi_mean) << ',' << format_double(row.nmi_sd) << ','
          << format_double(row.acc_mean) << ',' << format_double(row.acc_sd);
    else
      out << ",,,";
    out << ',' << row.p_value << '\n';
  }
}

void write_summary_md(const std::vector<SummaryRow>& rows, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "| dataset | method | params | NMI (%) | ACC (%) | runs |\n";
  out << "| --- | --- | --- | --- | --- | --- |\n";
  for (const SummaryRow& row : rows) {
    out << "| " << row.dataset << " | " << row.method << " | " << row.params << " | ";
    if (row.failed < row.reps)
      out << format_percent(row.nmi_mean) << " ± " << format_percent(row.nmi_sd) << " | "
          << format_percent(row.acc_mean) << " ± " << format_percent(row.acc_sd);
    else
      out << "failed | failed";
    out << " | " << (row.reps - row.failed) << '/' << row.reps << " |\n";
  }
}

void write_sweep_csv(const SweepResult& sweep, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "index,value,reps,failed,nmi_mean,nmi_sd,acc_mean,acc_sd,error\n";
  for (const SweepPoint& point : sweep.points) {
    const SummaryRow row = summarize(point.result);
    out << point.index << ',' << format_double(point.value) << ',' << row.reps << ','
        << row.failed << ',';
    if (!point.failed())
      out << format_double(row.nmi_mean) << ',' << format_double(row.nmi_sd) << ','
          << format_double(row.acc_mean) << ',' << format_double(row.acc_sd);
    else
      out << ",,,";
    std::string message = point.error;
    if (message.empty() && point.failed() && !point.result.runs.empty())
      message = point.result.runs.front().error;
    out << ',' << sanitize(message) << '\n';
  }
}

void write_sweep_runs_csv(const SweepResult& sweep, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "index,value,dataset,method,rep,seed,ok,nmi,acc,objective,restart,error\n";
  for (const SweepPoint& point : sweep.points)
    for (const RunRecord& run : point.result.runs) {
      out << point.index << ',' << format_double(point.value) << ',';
      write_run_row(out, point.result, run);
    }
}

void write_comparison_csv(const MethodComparison& cmp, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "metric,mean_a,mean_b,p_value,verdict\n";
  out << "nmi," << format_double(cmp.nmi.mean_a) << ',' << format_double(cmp.nmi.mean_b) << ','
      << format_double(cmp.nmi.p_value) << ',' << verdict_name(cmp.nmi.verdict) << '\n';
  out << "acc," << format_double(cmp.acc.mean_a) << ',' << format_double(cmp.acc.mean_b) << ','
      << format_double(cmp.acc.p_value) << ',' << verdict_name(cmp.acc.verdict) << '\n';
}

}  // namespace reskern
