// command-line front end: eight subcommands over the library pipeline.
// Exit codes: 0 ok, 1 usage/config, 2 data, 3 numerical, 4 partial sweep failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "reskern/dataset.hpp"
#include "reskern/ensemble.hpp"
#include "reskern/experiment.hpp"
#include "reskern/kernel.hpp"
#include "reskern/metrics.hpp"
#include "reskern/spectral.hpp"
#include "reskern/svg.hpp"

namespace rk = reskern;
using json = nlohmann::json;

namespace {

struct Options {
  std::string config_path;
  std::string dataset;
  std::string format = "csv";
  std::string label_column = "last";
  bool standardize = false;

  std::string method = "resample";
  double delta = 0.7;
  double a = 0.5;
  int V = 400;
  int layers = 1;
  double sigma_mult = 0.0625;
  bool zero_diagonal = false;
  int pca_dims = 0;

  int clusters = 0;
  int reps = 10;
  std::uint64_t seed = 0;
  std::string out_dir = ".";

  std::string param = "delta";
  std::vector<double> grid;

  std::string vs = "rbf";
  double alpha = 0.05;

  std::string pred_path;
  std::string truth_path;
};

// JSON config plumbing: every bound option remembers how to fill its field
// from the config file when the command line left it untouched.
struct Binding {
  std::string key;
  CLI::Option* option;
  std::function<void(const json&)> apply;
};
std::map<const CLI::App*, std::vector<Binding>> g_bindings;

template <typename T>
CLI::Option* bind_option(CLI::App* sub, const std::string& flag, const std::string& key,
                         T& field, const std::string& desc) {
  CLI::Option* opt = sub->add_option(flag, field, desc);
  g_bindings[sub].push_back({key, opt, [&field](const json& v) { field = v.get<T>(); }});
  return opt;
}

CLI::Option* bind_flag(CLI::App* sub, const std::string& flag, const std::string& key,
                       bool& field, const std::string& desc) {
  CLI::Option* opt = sub->add_flag(flag, field, desc);
  g_bindings[sub].push_back({key, opt, [&field](const json& v) { field = v.get<bool>(); }});
  return opt;
}

void apply_config(const CLI::App* sub, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw rk::config_error("cannot read config file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw rk::config_error("config file " + path + ": " + e.what());
  }
  if (!doc.is_object()) throw rk::config_error("config file " + path + ": expected an object");

  auto it = g_bindings.find(sub);
  if (it == g_bindings.end()) return;
  for (const Binding& binding : it->second) {
    if (binding.option->count() > 0) continue;  // command line wins
    auto field = doc.find(binding.key);
    if (field == doc.end()) continue;
    try {
      binding.apply(*field);
    } catch (const json::exception& e) {
      throw rk::config_error("config key '" + binding.key + "': " + e.what());
    }
  }
}

rk::LabelColumn parse_label_column(const std::string& name) {
  if (name == "none") return rk::LabelColumn::none;
  if (name == "first") return rk::LabelColumn::first;
  if (name == "last") return rk::LabelColumn::last;
  throw rk::config_error("unknown --label-column '" + name + "' (none, first or last)");
}

rk::Dataset load_dataset(const Options& o) {
  if (o.dataset.empty()) throw rk::config_error("--dataset is required");
  rk::Dataset ds;
  if (o.format == "csv") {
    rk::CsvOptions copts;
    copts.label_column = parse_label_column(o.label_column);
    ds = rk::load_csv(o.dataset, copts);
  } else if (o.format == "libsvm") {
    ds = rk::load_libsvm(o.dataset);
  } else {
    throw rk::config_error("unknown --format '" + o.format + "' (csv or libsvm)");
  }
  if (o.standardize) ds = rk::standardize(ds);
  return ds;
}

rk::ExperimentConfig to_experiment_config(const Options& o) {
  rk::ExperimentConfig config;
  config.method = rk::parse_method(o.method);
  config.clusters = o.clusters;
  config.repetitions = o.reps;
  config.master_seed = o.seed;
  config.delta = o.delta;
  config.feature_fraction = o.a;
  config.units = o.V;
  config.layers = o.layers;
  config.sigma_multiplier = o.sigma_mult;
  config.zero_diagonal = o.zero_diagonal;
  config.pca_dims = o.pca_dims;
  return config;
}

rk::EncoderConfig to_encoder_config(const Options& o, std::uint64_t seed) {
  rk::EncoderConfig enc;
  enc.units = o.V;
  enc.delta = o.delta;
  enc.feature_fraction = o.a;
  enc.layers = o.layers;
  enc.master_seed = seed;
  return enc;
}

std::string out_path(const Options& o, const std::string& file) {
  std::filesystem::create_directories(o.out_dir);
  return (std::filesystem::path(o.out_dir) / file).string();
}

rk::KernelMatrix build_kernel(const rk::Dataset& ds, const Options& o, std::uint64_t seed) {
  rk::KernelMatrix kernel;
  if (o.method == "resample") {
    const rk::StackResult stack = rk::stack_layers(ds.features, to_encoder_config(o, seed));
    kernel = rk::normalize_kernel(rk::build_resample_kernel(stack.top));
  } else if (o.method == "rbf") {
    rk::RbfParams params;
    params.sigma_multiplier = o.sigma_mult;
    params.scale_reference = rk::average_pairwise_distance(ds.features);
    kernel = rk::build_rbf_kernel(ds.features, params);
  } else if (o.method == "linear") {
    kernel = rk::build_linear_kernel(ds.features);
  } else {
    throw rk::config_error("kernel method must be resample, rbf or linear");
  }
  return o.zero_diagonal ? rk::with_zero_diagonal(kernel) : kernel;
}

int resolve_clusters(const rk::Dataset& ds, const Options& o) {
  if (o.clusters > 0) return o.clusters;
  if (!ds.has_labels())
    throw rk::config_error("--clusters not given and dataset has no labels to infer it from");
  return ds.num_classes();
}

void print_summary(const rk::SummaryRow& row) {
  std::cout << row.dataset << " " << row.method;
  if (!row.params.empty()) std::cout << " (" << row.params << ")";
  if (row.failed < row.reps)
    std::cout << ": nmi " << row.nmi_mean << " +- " << row.nmi_sd << ", acc " << row.acc_mean
              << " +- " << row.acc_sd;
  else
    std::cout << ": all repetitions failed";
  if (row.failed > 0) std::cout << " [" << row.failed << "/" << row.reps << " failed]";
  std::cout << "\n";
}

int cmd_encode(const Options& o) {
  const rk::Dataset ds = load_dataset(o);
  const rk::EncoderConfig enc = to_encoder_config(o, o.seed);
  const rk::StackResult stack = rk::stack_layers(ds.features, enc);
  rk::save_model(stack.models, enc, out_path(o, "model.txt"));
  rk::write_codes_csv(stack.top, out_path(o, "codes.csv"));
  std::cout << "encoded " << ds.name << ": " << stack.top.num_points() << " points, "
            << stack.top.num_units() << " units, code dim " << stack.top.total_dim << "\n";
  return 0;
}

int cmd_kernel(const Options& o) {
  const rk::Dataset ds = load_dataset(o);
  const rk::KernelMatrix kernel = build_kernel(ds, o, o.seed);
  rk::write_kernel_binary(kernel, out_path(o, "kernel.bin"));
  rk::write_kernel_csv(kernel, out_path(o, "kernel.csv"));
  std::cout << "kernel " << ds.name << ": n " << kernel.n() << ", method " << o.method << "\n";
  return 0;
}

int cmd_cluster(const Options& o) {
  const rk::Dataset ds = load_dataset(o);
  const int c = resolve_clusters(ds, o);

  rk::SpectralConfig sc;
  sc.clusters = c;
  sc.seed = o.seed;

  rk::ClusteringResult result;
  if (o.method == "kmeans_raw" || o.method == "kmeans-raw") {
    result = rk::kmeans(ds.features, sc);
  } else if (o.method == "kmeans_pca" || o.method == "kmeans-pca") {
    result = rk::kmeans(rk::pca_project(ds.features, o.pca_dims > 0 ? o.pca_dims : c), sc);
  } else {
    result = rk::spectral_cluster(build_kernel(ds, o, o.seed), sc);
  }
  rk::write_labels_csv(result, out_path(o, "labels.csv"));
  std::cout << "clustered " << ds.name << " into " << c << " clusters, objective "
            << result.objective;
  if (ds.has_labels())
    std::cout << ", nmi " << rk::nmi(result.labels, ds.labels) << ", acc "
              << rk::accuracy(result.labels, ds.labels);
  std::cout << "\n";
  return 0;
}

int cmd_evaluate(const Options& o) {
  if (o.pred_path.empty()) throw rk::config_error("--pred is required");
  const std::vector<int> pred = rk::read_labels_csv(o.pred_path);

  std::vector<int> truth;
  if (!o.truth_path.empty()) {
    truth = rk::read_labels_csv(o.truth_path);
  } else {
    const rk::Dataset ds = load_dataset(o);
    if (!ds.has_labels()) throw rk::data_error("dataset has no truth labels");
    truth = ds.labels;
  }
  std::cout << "nmi " << rk::nmi(pred, truth) << "\n";
  std::cout << "acc " << rk::accuracy(pred, truth) << "\n";
  return 0;
}

int cmd_experiment(const Options& o) {
  const rk::Dataset ds = load_dataset(o);
  const rk::ExperimentResult result = rk::run_experiment(ds, to_experiment_config(o));

  rk::write_runs_csv({result}, out_path(o, "runs.csv"));
  const rk::SummaryRow row = rk::summarize(result);
  rk::write_summary_csv({row}, out_path(o, "summary.csv"));
  rk::write_summary_md({row}, out_path(o, "summary.md"));
  print_summary(row);

  if (result.successful_runs() == 0)
    throw rk::numeric_error("all " + std::to_string(result.runs.size()) +
                            " repetitions failed; first error: " + result.runs.front().error);
  if (result.failed_runs() > 0)
    std::cerr << "warning: " << result.failed_runs() << " repetitions failed\n";
  return 0;
}

int cmd_sweep(const Options& o) {
  const rk::Dataset ds = load_dataset(o);
  rk::SweepSpec spec;
  spec.parameter = rk::parse_sweep_parameter(o.param);
  spec.grid = o.grid;

  const rk::SweepResult sweep = rk::run_sweep(ds, to_experiment_config(o), spec);

  rk::write_sweep_csv(sweep, out_path(o, "sweep.csv"));
  rk::write_sweep_runs_csv(sweep, out_path(o, "runs.csv"));
  rk::write_sweep_svg(sweep, "nmi", out_path(o, "sweep_nmi.svg"));
  rk::write_sweep_svg(sweep, "acc", out_path(o, "sweep_acc.svg"));

  for (const rk::SweepPoint& point : sweep.points) {
    rk::SummaryRow row = rk::summarize(point.result);
    std::cout << "[" << point.index << "] " << rk::sweep_parameter_name(spec.parameter) << " "
              << point.value << ": ";
    if (point.failed())
      std::cout << "failed"
                << (point.error.empty() ? "" : " (" + point.error + ")") << "\n";
    else
      std::cout << "nmi " << row.nmi_mean << " +- " << row.nmi_sd << ", acc " << row.acc_mean
                << " +- " << row.acc_sd << "\n";
  }
  if (sweep.failed_points() > 0) {
    std::cerr << "warning: " << sweep.failed_points() << "/" << sweep.points.size()
              << " grid points failed\n";
    return 4;
  }
  return 0;
}

int cmd_baselines(const Options& o) {
  const rk::Dataset ds = load_dataset(o);
  const std::vector<rk::ExperimentResult> results =
      rk::run_baselines(ds, to_experiment_config(o));

  std::vector<rk::SummaryRow> rows;
  for (const rk::ExperimentResult& result : results) rows.push_back(rk::summarize(result));
  rk::write_runs_csv(results, out_path(o, "runs.csv"));
  rk::write_summary_csv(rows, out_path(o, "summary.csv"));
  rk::write_summary_md(rows, out_path(o, "summary.md"));
  for (const rk::SummaryRow& row : rows) print_summary(row);
  return 0;
}

int cmd_compare(const Options& o) {
  const rk::Dataset ds = load_dataset(o);

  rk::ExperimentConfig config_a = to_experiment_config(o);
  rk::ExperimentConfig config_b = config_a;
  config_b.method = rk::parse_method(o.vs);

  const rk::ExperimentResult result_a = rk::run_experiment(ds, config_a);
  const rk::ExperimentResult result_b = rk::run_experiment(ds, config_b);
  const rk::MethodComparison cmp =
      rk::compare_methods(result_a.report(), result_b.report(), o.alpha);

  rk::SummaryRow row_a = rk::summarize(result_a);
  rk::SummaryRow row_b = rk::summarize(result_b);
  {  // NMI p-value on the first row, per the summary schema
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), cmp.nmi.p_value);
    (void)ec;
    row_a.p_value.assign(buf, ptr);
  }
  rk::write_runs_csv({result_a, result_b}, out_path(o, "runs.csv"));
  rk::write_summary_csv({row_a, row_b}, out_path(o, "summary.csv"));
  rk::write_summary_md({row_a, row_b}, out_path(o, "summary.md"));
  rk::write_comparison_csv(cmp, out_path(o, "compare.csv"));

  print_summary(row_a);
  print_summary(row_b);
  std::cout << "nmi: " << rk::verdict_name(cmp.nmi.verdict) << " (p " << cmp.nmi.p_value
            << "), acc: " << rk::verdict_name(cmp.acc.verdict) << " (p " << cmp.acc.p_value
            << ") at alpha " << cmp.alpha << "\n";
  return 0;
}

void add_data_options(CLI::App* sub, Options& o) {
  bind_option(sub, "--dataset", "dataset", o.dataset, "input file");
  bind_option(sub, "--format", "format", o.format, "csv or libsvm");
  bind_option(sub, "--label-column", "label_column", o.label_column,
              "csv label column: none, first or last");
  bind_flag(sub, "--standardize", "standardize", o.standardize,
            "zero-mean unit-variance columns");
  sub->add_option("--config", o.config_path, "JSON config file; flags override its values");
}

void add_method_options(CLI::App* sub, Options& o, bool with_method = true) {
  if (with_method)
    bind_option(sub, "--method", "method", o.method,
                "resample, rbf, kmeans_raw or kmeans_pca");
  bind_option(sub, "--delta", "delta", o.delta, "centroid fraction, k = floor(delta*n)");
  bind_option(sub, "--a", "a", o.a, "feature fraction per unit");
  bind_option(sub, "--V", "V", o.V, "ensemble size");
  bind_option(sub, "--layers", "layers", o.layers, "stacked encoder layers");
  bind_option(sub, "--sigma-mult", "sigma_mult", o.sigma_mult,
              "rbf sigma as a multiple of the average pairwise distance");
  bind_flag(sub, "--zero-diagonal", "zero_diagonal", o.zero_diagonal,
            "zero the kernel diagonal before the spectral step");
  bind_option(sub, "--pca-dims", "pca_dims", o.pca_dims,
              "kmeans_pca dimensionality (0 = cluster count)");
  bind_option(sub, "--seed", "seed", o.seed, "master seed");
  bind_option(sub, "--out-dir", "out_dir", o.out_dir, "output directory");
}

void add_experiment_options(CLI::App* sub, Options& o) {
  bind_option(sub, "--clusters", "clusters", o.clusters, "cluster count (0 = truth classes)");
  bind_option(sub, "--reps", "reps", o.reps, "repetitions");
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"learned-kernel spectral clustering toolkit"};
  app.require_subcommand(1);

  CLI::App* encode = app.add_subcommand("encode", "train the ensemble encoder, save model and codes");
  add_data_options(encode, o);
  add_method_options(encode, o, /*with_method=*/false);

  CLI::App* kernel = app.add_subcommand("kernel", "build a kernel matrix (resample, rbf or linear)");
  add_data_options(kernel, o);
  add_method_options(kernel, o);

  CLI::App* cluster = app.add_subcommand("cluster", "one spectral clustering run, write labels");
  add_data_options(cluster, o);
  add_method_options(cluster, o);
  bind_option(cluster, "--clusters", "clusters", o.clusters, "cluster count (0 = truth classes)");

  CLI::App* evaluate = app.add_subcommand("evaluate", "score predicted labels with nmi and acc");
  add_data_options(evaluate, o);
  bind_option(evaluate, "--pred", "pred", o.pred_path, "predicted labels csv");
  bind_option(evaluate, "--truth", "truth", o.truth_path,
              "truth labels csv (default: dataset labels)");

  CLI::App* experiment = app.add_subcommand("experiment", "repeated pipeline runs with summary");
  add_data_options(experiment, o);
  add_method_options(experiment, o);
  add_experiment_options(experiment, o);

  CLI::App* sweep = app.add_subcommand("sweep", "experiment per grid value of delta or sigma");
  add_data_options(sweep, o);
  add_method_options(sweep, o);
  add_experiment_options(sweep, o);
  bind_option(sweep, "--param", "param", o.param, "swept parameter: delta or sigma_mult");
  bind_option(sweep, "--grid", "grid", o.grid, "grid values (default: the parameter's grid)")
      ->delimiter(',');

  CLI::App* baselines = app.add_subcommand("baselines", "k-means on raw and PCA features");
  add_data_options(baselines, o);
  add_method_options(baselines, o, /*with_method=*/false);
  add_experiment_options(baselines, o);

  CLI::App* compare = app.add_subcommand("compare", "two methods plus a two-tailed t-test");
  add_data_options(compare, o);
  add_method_options(compare, o);
  add_experiment_options(compare, o);
  bind_option(compare, "--vs", "vs", o.vs, "second method");
  bind_option(compare, "--alpha", "alpha", o.alpha, "significance level");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  CLI::App* active = app.get_subcommands().front();
  try {
    if (!o.config_path.empty()) apply_config(active, o.config_path);

    if (active == encode) return cmd_encode(o);
    if (active == kernel) return cmd_kernel(o);
    if (active == cluster) return cmd_cluster(o);
    if (active == evaluate) return cmd_evaluate(o);
    if (active == experiment) return cmd_experiment(o);
    if (active == sweep) return cmd_sweep(o);
    if (active == baselines) return cmd_baselines(o);
    if (active == compare) return cmd_compare(o);
    return 1;
  } catch (const rk::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const rk::data_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const rk::numeric_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
