#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "reskern/dataset.hpp"

using namespace reskern;

namespace {

std::filesystem::path tmp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("reskern_test_" + name);
}

std::string write_tmp(const std::string& name, const std::string& content) {
  const auto path = tmp_file(name);
  std::ofstream out(path);
  out << content;
  return path.string();
}

}  // namespace

TEST_CASE("load_csv with a trailing label column") {
  const auto path = write_tmp("basic.csv", "1.5,2,a\n3,4.25,b\n5,6,a\n");
  CsvOptions opts;
  opts.label_column = LabelColumn::last;
  const Dataset ds = load_csv(path, opts);
  CHECK(ds.n() == 3);
  CHECK(ds.dim() == 2);
  CHECK(ds.features(0, 0) == 1.5);
  CHECK(ds.features(1, 1) == 4.25);
  // first-appearance order: a -> 0, b -> 1
  CHECK(ds.labels == std::vector<int>{0, 1, 0});
  CHECK(ds.num_classes() == 2);
}

TEST_CASE("load_csv label column variants") {
  const auto path = write_tmp("first.csv", "x,1,2\ny,3,4\n");
  CsvOptions opts;
  opts.label_column = LabelColumn::first;
  const Dataset ds = load_csv(path, opts);
  CHECK(ds.dim() == 2);
  CHECK(ds.labels == std::vector<int>{0, 1});

  opts.label_column = LabelColumn::none;
  const auto path2 = write_tmp("none.csv", "1,2\n3,4\n");
  const Dataset ds2 = load_csv(path2, opts);
  CHECK(ds2.dim() == 2);
  CHECK(!ds2.has_labels());
}

TEST_CASE("load_csv skip_header") {
  const auto path = write_tmp("hdr.csv", "f1,f2,class\n1,2,a\n3,4,b\n");
  CsvOptions opts;
  opts.label_column = LabelColumn::last;
  opts.skip_header = true;
  const Dataset ds = load_csv(path, opts);
  CHECK(ds.n() == 2);
}

TEST_CASE("load_csv error reporting carries line numbers") {
  const auto ragged = write_tmp("ragged.csv", "1,2\n3\n");
  CHECK_THROWS_WITH_AS(load_csv(ragged), doctest::Contains("line 2"), data_error);

  const auto junk = write_tmp("junk.csv", "1,2\n3,oops\n");
  CHECK_THROWS_AS(load_csv(junk), data_error);

  const auto empty = write_tmp("empty.csv", "");
  CHECK_THROWS_AS(load_csv(empty), data_error);

  CHECK_THROWS_AS(load_csv("/no/such/file.csv"), data_error);
}

TEST_CASE("load_libsvm parses sparse rows") {
  const auto path = write_tmp("basic.libsvm", "1 1:0.5 3:2\n2 2:1\n1 1:1 2:1 3:1\n");
  const Dataset ds = load_libsvm(path);
  CHECK(ds.n() == 3);
  CHECK(ds.dim() == 3);  // max index seen
  CHECK(ds.features(0, 0) == 0.5);
  CHECK(ds.features(0, 1) == 0.0);  // missing entries are zero
  CHECK(ds.features(0, 2) == 2.0);
  CHECK(ds.labels == std::vector<int>{0, 1, 0});
}

TEST_CASE("load_libsvm rejects non-ascending indices") {
  const auto path = write_tmp("bad.libsvm", "1 3:1 2:1\n1 1:1\n");
  CHECK_THROWS_AS(load_libsvm(path), data_error);

  const auto empty = write_tmp("empty.libsvm", "");
  CHECK_THROWS_AS(load_libsvm(empty), data_error);
}

TEST_CASE("csv round trip preserves feature bits and label structure") {
  Dataset ds = generate_blobs(2, 5, 3, 4.0, 0.7, 99);
  const auto path = tmp_file("roundtrip.csv").string();
  write_csv(ds, path, LabelColumn::last);

  CsvOptions opts;
  opts.label_column = LabelColumn::last;
  const Dataset back = load_csv(path, opts);
  REQUIRE(back.n() == ds.n());
  REQUIRE(back.dim() == ds.dim());
  CHECK((back.features - ds.features).cwiseAbs().maxCoeff() == 0.0);  // shortest round trip
  CHECK(back.labels == ds.labels);
}

TEST_CASE("generate_blobs shape, balance and determinism") {
  const Dataset ds = generate_blobs(2, 50, 2, 10.0, 0.5, 7);
  CHECK(ds.n() == 100);
  CHECK(ds.dim() == 2);
  int zeros = 0;
  for (int label : ds.labels) zeros += label == 0;
  CHECK(zeros == 50);

  const Dataset again = generate_blobs(2, 50, 2, 10.0, 0.5, 7);
  CHECK((again.features - ds.features).cwiseAbs().maxCoeff() == 0.0);

  const Dataset other = generate_blobs(2, 50, 2, 10.0, 0.5, 8);
  CHECK((other.features - ds.features).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("generate_blobs centers sit separation apart") {
  const Dataset exact = generate_blobs(3, 2, 4, 10.0, 0.0, 1);
  // noise_sd = 0: every point is exactly its center
  for (int c = 0; c + 1 < 3; ++c) {
    const double dist = (exact.features.row(2 * c) - exact.features.row(2 * (c + 1))).norm();
    CHECK(dist == doctest::Approx(10.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(generate_blobs(1, 5, 2, 1.0, 0.1, 0), config_error);
  CHECK_THROWS_AS(generate_blobs(2, 5, 2, -1.0, 0.1, 0), config_error);
}

TEST_CASE("standardize centers and scales columns") {
  Dataset ds = generate_blobs(2, 30, 3, 5.0, 1.0, 3);
  ds.features.col(2).setConstant(4.0);  // constant column
  const Dataset std1 = standardize(ds);

  for (int j = 0; j < 2; ++j) {
    const double mean = std1.features.col(j).mean();
    const double sd = std::sqrt((std1.features.col(j).array() - mean).square().sum() /
                                (std1.n() - 1));
    CHECK(std::abs(mean) < 1e-12);
    CHECK(sd == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(std1.features.col(2).cwiseAbs().maxCoeff() == 0.0);

  const Dataset std2 = standardize(std1);  // idempotent
  CHECK((std2.features - std1.features).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("validate_dataset rejects malformed inputs") {
  Dataset tiny;
  tiny.features.resize(1, 2);
  tiny.features << 1, 2;
  CHECK_THROWS_AS(validate_dataset(tiny), data_error);

  Dataset nan_ds = generate_blobs(2, 3, 2, 5.0, 0.1, 0);
  nan_ds.features(0, 0) = std::nan("");
  CHECK_THROWS_AS(validate_dataset(nan_ds), data_error);

  Dataset skip = generate_blobs(2, 3, 2, 5.0, 0.1, 0);
  for (auto& label : skip.labels)
    if (label == 1) label = 2;  // class 1 unoccupied
  CHECK_THROWS_AS(validate_dataset(skip), data_error);

  Dataset ok = generate_blobs(2, 3, 2, 5.0, 0.1, 0);
  CHECK_NOTHROW(validate_dataset(ok));
}
