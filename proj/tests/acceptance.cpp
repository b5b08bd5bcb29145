// Acceptance gate: one PASS/FAIL/SKIP line per criterion, nonzero exit when
// anything fails. Run via ctest or directly:
//   acceptance --root <repo> --cli <reskern binary> --out <scratch dir>

#include <sys/wait.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "reskern/dataset.hpp"
#include "reskern/ensemble.hpp"
#include "reskern/experiment.hpp"
#include "reskern/kernel.hpp"
#include "reskern/metrics.hpp"
#include "reskern/reference.hpp"
#include "reskern/rng.hpp"

using namespace reskern;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& status, const std::string& detail) {
  std::cout << "criterion " << criterion << ": " << status << " — " << detail << "\n";
  if (status == "FAIL") ++g_failures;
}

std::string num(double v) {
  std::ostringstream s;
  s << std::setprecision(4) << v;
  return s.str();
}

bool within(double value, double target, double tol) {
  return std::abs(value - target) <= tol;
}

Dataset load_labeled_csv(const fs::path& path) {
  CsvOptions opts;
  opts.label_column = LabelColumn::last;
  return load_csv(path.string(), opts);
}

ExperimentConfig headline_preset() {
  ExperimentConfig config;  // delta 0.7, a 0.5, V 400
  config.method = Method::resample;
  config.repetitions = 10;
  config.master_seed = 1;
  return config;
}

// criteria 1-2: resample preset against the published table rows
void check_reproduction(int criterion, const fs::path& csv, const std::string& name,
                        double nmi_target, double nmi_tol, double acc_target, double acc_tol,
                        bool optional) {
  if (!fs::exists(csv)) {
    const std::string detail =
        name + " data missing at " + csv.string() + " (see README data section)";
    report(criterion, optional ? "SKIP" : "FAIL", detail);
    return;
  }
  const ExperimentResult result = run_experiment(load_labeled_csv(csv), headline_preset());
  const MetricsReport rep = result.report();
  const bool ok = result.failed_runs() == 0 && within(rep.nmi_mean(), nmi_target, nmi_tol) &&
                  within(rep.acc_mean(), acc_target, acc_tol);
  report(criterion, ok ? "PASS" : "FAIL",
         name + ": nmi " + num(rep.nmi_mean()) + " (target " + num(nmi_target) + "±" +
             num(nmi_tol) + "), acc " + num(rep.acc_mean()) + " (target " + num(acc_target) +
             "±" + num(acc_tol) + "), failed runs " + std::to_string(result.failed_runs()));
}

void check_rbf_sweep(const fs::path& wine) {
  if (!fs::exists(wine)) {
    report(3, "FAIL", "wine data missing at " + wine.string());
    return;
  }
  const Dataset ds = load_labeled_csv(wine);
  SweepSpec spec;
  spec.parameter = SweepParameter::sigma_multiplier;  // default grid 2^-4..2^4
  const SweepResult sweep = run_sweep(ds, headline_preset(), spec);
  double best = -1.0;
  double best_sigma = 0.0;
  for (const SweepPoint& point : sweep.points) {
    if (point.failed()) continue;
    const double mean = point.result.report().nmi_mean();
    if (mean > best) {
      best = mean;
      best_sigma = point.value;
    }
  }
  const bool ok = best >= 0.0 && within(best, 0.4302, 0.08);
  report(3, ok ? "PASS" : "FAIL",
         "best rbf nmi " + num(best) + " at sigma_mult " + num(best_sigma) +
             " (target 0.4302±0.08)");
}

void check_delta_insensitivity(const fs::path& wine) {
  if (!fs::exists(wine)) {
    report(4, "FAIL", "wine data missing at " + wine.string());
    return;
  }
  const Dataset ds = load_labeled_csv(wine);
  std::vector<double> means;
  for (double delta : {0.6, 0.7, 0.8}) {
    ExperimentConfig config = headline_preset();
    config.delta = delta;
    means.push_back(run_experiment(ds, config).report().nmi_mean());
  }
  double spread = 0.0;
  for (std::size_t i = 0; i < means.size(); ++i)
    for (std::size_t j = i + 1; j < means.size(); ++j)
      spread = std::max(spread, std::abs(means[i] - means[j]));
  report(4, spread < 0.10 ? "PASS" : "FAIL",
         "nmi at delta 0.6/0.7/0.8 = " + num(means[0]) + "/" + num(means[1]) + "/" +
             num(means[2]) + ", max pairwise gap " + num(spread) + " (< 0.10)");
}

void check_kernel_properties() {
  auto eng = rng::make_engine(2024);
  int bad = 0;
  std::string first_error;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng::below(eng, 49));   // 2..50
    const int d = 1 + static_cast<int>(rng::below(eng, 10));   // 1..10
    const int units = 1 + static_cast<int>(rng::below(eng, 20));  // 1..20
    const int k = 1 + static_cast<int>(rng::below(eng, static_cast<std::uint64_t>(n - 1)));

    Matrix data(n, d);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < d; ++j) data(i, j) = rng::normal(eng);

    EncoderConfig config;
    config.units = units;
    config.delta = (k + 0.5) / n;  // floor(delta * n) == k
    config.feature_fraction = rng::uniform01(eng);
    config.master_seed = 9000 + static_cast<std::uint64_t>(trial);

    const SparseCode codes = encode(train_ensemble(data, config), data);
    const Matrix& kernel = build_resample_kernel(codes).values;

    std::string error;
    if ((kernel - kernel.transpose()).cwiseAbs().maxCoeff() != 0.0)
      error = "asymmetric";
    else if ((kernel.diagonal().array() != static_cast<double>(units)).any())
      error = "diagonal != V";
    else {
      for (int i = 0; i < n && error.empty(); ++i)
        for (int j = 0; j < n; ++j) {
          const double v = kernel(i, j);
          if (v != std::floor(v) || v < 0.0 || v > units) {
            error = "non-integer or out-of-range entry";
            break;
          }
        }
    }
    if (error.empty()) {
      const Eigen::SelfAdjointEigenSolver<Matrix> eigen(kernel, Eigen::EigenvaluesOnly);
      if (eigen.eigenvalues().minCoeff() < -1e-8 * n) error = "negative eigenvalue";
    }
    if (error.empty() &&
        (kernel - reference::resample_gram(codes)).cwiseAbs().maxCoeff() != 0.0)
      error = "mismatch vs dense-expansion oracle";

    if (!error.empty()) {
      ++bad;
      if (first_error.empty())
        first_error = error + " (trial " + std::to_string(trial) + ")";
    }
  }
  report(5, bad == 0 ? "PASS" : "FAIL",
         bad == 0 ? "200/200 randomized instances clean (symmetry, diag=V, integrality, "
                    "PSD, oracle equality)"
                  : std::to_string(bad) + " instances violated properties; first: " + first_error);
}

// all canonical (restricted-growth) label vectors of length n with <= 3 classes
std::vector<std::vector<int>> canonical_labelings(int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(n);
  std::function<void(int, int)> fill = [&](int pos, int used) {
    if (pos == n) {
      out.push_back(cur);
      return;
    }
    const int top = std::min(used + 1, 3);
    for (int v = 0; v < top; ++v) {
      cur[pos] = v;
      fill(pos + 1, std::max(used, v + 1));
    }
  };
  fill(0, 0);
  return out;
}

std::uint64_t table_key(const ContingencyTable& table) {
  std::uint64_t key = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const bool in = i < table.counts.rows() && j < table.counts.cols();
      key = (key << 4) | static_cast<std::uint64_t>(in ? table.counts(i, j) : 0);
    }
  return key;
}

void check_metric_oracles() {
  long pairs = 0;
  long mismatches = 0;
  std::string first_error;
  // metrics are pure functions of the contingency table, so the oracle runs
  // once per distinct table while the implementation runs on every pair
  std::unordered_map<std::uint64_t, std::pair<double, double>> oracle;

  for (int n = 1; n <= 8; ++n) {
    const std::vector<std::vector<int>> labelings = canonical_labelings(n);
    for (const auto& a : labelings)
      for (const auto& b : labelings) {
        ++pairs;
        const std::uint64_t key = table_key(ContingencyTable::from_labels(a, b));
        auto it = oracle.find(key);
        if (it == oracle.end())
          it = oracle.emplace(key, std::make_pair(reference::nmi(a, b),
                                                  reference::accuracy(a, b)))
                   .first;
        const double nmi_gap = std::abs(nmi(a, b) - it->second.first);
        const double acc_gap = std::abs(accuracy(a, b) - it->second.second);
        if (nmi_gap > 1e-12 || acc_gap > 1e-12) {
          ++mismatches;
          if (first_error.empty()) {
            std::ostringstream s;
            s << "n=" << n << " nmi gap " << nmi_gap << " acc gap " << acc_gap;
            first_error = s.str();
          }
        }
      }
  }

  auto eng = rng::make_engine(777);
  int assignment_bad = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const int rows = 1 + static_cast<int>(rng::below(eng, 7));
    const int cols = 1 + static_cast<int>(rng::below(eng, 7));
    Matrix cost(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) cost(i, j) = rng::uniform01(eng) * 10.0;
    const double got = optimal_assignment(cost).total_cost;
    const double want = reference::assignment_min_cost(cost);
    if (std::abs(got - want) > 1e-12 * std::max(1.0, std::abs(want))) ++assignment_bad;
  }

  const bool ok = mismatches == 0 && assignment_bad == 0;
  std::ostringstream detail;
  if (ok)
    detail << pairs << " label pairs (n<=8, c<=3, " << oracle.size()
           << " distinct tables) and 500 assignment matrices match the oracles";
  else
    detail << mismatches << " metric mismatches (first: " << first_error << "), "
           << assignment_bad << " assignment mismatches";
  report(6, ok ? "PASS" : "FAIL", detail.str());
}

void check_synthetic_end_to_end() {
  const Dataset ds = generate_blobs(3, 60, 2, 10.0, 0.5, 1234);
  ExperimentConfig config = headline_preset();
  config.master_seed = 42;
  const ExperimentResult result = run_experiment(ds, config);
  int perfect = 0;
  for (const RunRecord& run : result.runs)
    if (run.ok && run.nmi >= 1.0 - 1e-12 && run.acc >= 1.0 - 1e-12) ++perfect;
  report(7, perfect >= 9 ? "PASS" : "FAIL",
         std::to_string(perfect) + "/10 runs with nmi = acc = 1.0 on 3x60 blobs (need >= 9)");
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void check_determinism(const std::string& cli, const fs::path& out) {
  const fs::path data = out / "det_blobs.csv";
  write_csv(generate_blobs(3, 60, 2, 10.0, 0.5, 1234), data.string(), LabelColumn::last);

  auto run = [&](int threads, const fs::path& dir) {
    std::ostringstream cmd;
    cmd << "OMP_NUM_THREADS=" << threads << " \"" << cli << "\" experiment --dataset \""
        << data.string() << "\" --label-column last --method resample --V 120 --reps 5"
        << " --seed 77 --out-dir \"" << dir.string() << "\" > /dev/null 2>&1";
    const int raw = std::system(cmd.str().c_str());
    return WIFEXITED(raw) && WEXITSTATUS(raw) == 0;
  };

  const fs::path dir1 = out / "det_t1";
  const fs::path dir4 = out / "det_t4";
  if (!run(1, dir1) || !run(4, dir4)) {
    report(8, "FAIL", "cli experiment run failed under OMP_NUM_THREADS=1 or =4");
    return;
  }
  const std::string a = slurp(dir1 / "runs.csv");
  const std::string b = slurp(dir4 / "runs.csv");
  const bool ok = !a.empty() && a == b;
  report(8, ok ? "PASS" : "FAIL",
         ok ? "runs.csv byte-identical across OMP_NUM_THREADS=1 and =4"
            : "runs.csv differs across thread counts");
}

void check_large_dataset_docs(const fs::path& readme) {
  std::ifstream in(readme, std::ios::binary);
  if (!in.good()) {
    report(9, "FAIL", "README.md not found at " + readme.string());
    return;
  }
  std::vector<std::string> wanted = {"coil100", "usps", "mnist", "yaleb"};
  std::vector<bool> found(wanted.size(), false);
  std::string line;
  while (std::getline(in, line)) {
    std::string lower = line;
    for (char& ch : lower) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (lower.find("reskern") == std::string::npos) continue;
    for (std::size_t i = 0; i < wanted.size(); ++i)
      if (lower.find(wanted[i]) != std::string::npos) found[i] = true;
  }
  std::string missing;
  for (std::size_t i = 0; i < wanted.size(); ++i)
    if (!found[i]) missing += (missing.empty() ? "" : ", ") + wanted[i];
  report(9, missing.empty() ? "PASS" : "FAIL",
         missing.empty() ? "README documents reproduction command lines for coil100, usps, "
                           "mnist and yaleb"
                         : "README lacks command lines mentioning: " + missing);
}

}  // namespace

int main(int argc, char** argv) {
  fs::path root;
  std::string cli;
  fs::path out;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--root")
      root = argv[i + 1];
    else if (flag == "--cli")
      cli = argv[i + 1];
    else if (flag == "--out")
      out = argv[i + 1];
  }
  if (root.empty() || cli.empty() || out.empty()) {
    std::cerr << "usage: acceptance --root <repo> --cli <reskern binary> --out <scratch dir>\n";
    return 2;
  }
  fs::create_directories(out);

  auto guarded = [](int criterion, const std::function<void()>& body) {
    try {
      body();
    } catch (const std::exception& e) {
      report(criterion, "FAIL", std::string("exception: ") + e.what());
    }
  };

  guarded(1, [&] {
    check_reproduction(1, root / "data" / "wine.csv", "wine", 0.6394, 0.08, 0.8708, 0.08,
                       /*optional=*/false);
  });
  guarded(2, [&] {
    check_reproduction(2, root / "data" / "new-thyroid.csv", "new-thyroid", 0.7408, 0.10,
                       0.9442, 0.06, /*optional=*/true);
  });
  guarded(3, [&] { check_rbf_sweep(root / "data" / "wine.csv"); });
  guarded(4, [&] { check_delta_insensitivity(root / "data" / "wine.csv"); });
  guarded(5, [&] { check_kernel_properties(); });
  guarded(6, [&] { check_metric_oracles(); });
  guarded(7, [&] { check_synthetic_end_to_end(); });
  guarded(8, [&] { check_determinism(cli, out); });
  guarded(9, [&] { check_large_dataset_docs(root / "README.md"); });

  if (g_failures > 0) {
    std::cout << g_failures << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "all criteria passed (or were skipped with a documented recipe)\n";
  return 0;
}
