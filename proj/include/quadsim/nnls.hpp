#pragma once

#include <Eigen/Dense>

namespace quadsim {

struct NnlsResult {
  Eigen::VectorXd x;
  double residual = 0.0;  // ||A x - b||
  int iterations = 0;
  bool converged = false;
};

// Lawson-Hanson active-set solver for min ||A x - b|| subject to x >= 0.
// Converged means every inactive gradient component is below `tolerance`
// relative to max(1, ||A^T b||_inf).
NnlsResult nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double tolerance = 1e-8,
                int max_iterations = 0);

}  // namespace quadsim
