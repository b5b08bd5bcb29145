#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace reskern {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
// active-index matrices are scanned row-wise in the kernel assembly loops
using IndexMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Bad parameters or configuration (CLI exit code 1).
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Unreadable or malformed input data (CLI exit code 2).
struct data_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numerical failure: degenerate affinity, eigensolver breakdown (CLI exit code 3).
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace reskern
