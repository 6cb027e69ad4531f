#include "quadsim/nnls.hpp"

#include "quadsim/common.hpp"

#include <vector>

namespace quadsim {

namespace {

Eigen::VectorXd solve_passive(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const std::vector<bool>& passive) {
  std::vector<int> cols;
  for (int j = 0; j < static_cast<int>(passive.size()); ++j) {
    if (passive[j]) cols.push_back(j);
  }
  Eigen::MatrixXd Ap(A.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) Ap.col(k) = A.col(cols[k]);
  const Eigen::VectorXd zp = Ap.colPivHouseholderQr().solve(b);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(A.cols());
  for (std::size_t k = 0; k < cols.size(); ++k) z(cols[k]) = zp(k);
  return z;
}

}  // namespace

NnlsResult nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double tolerance, int max_iterations) {
  if (A.rows() != b.size()) throw DegenerateInputError("nnls: dimension mismatch");
  const int n = static_cast<int>(A.cols());
  if (max_iterations <= 0) max_iterations = 30 * std::max(n, 1);
  const double scale = std::max(1.0, (A.transpose() * b).cwiseAbs().maxCoeff());
  const double tol = tolerance * scale;

  NnlsResult out;
  out.x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(n, false);
  Eigen::VectorXd w = A.transpose() * b;

  while (out.iterations < max_iterations) {
    int best = -1;
    for (int j = 0; j < n; ++j) {
      if (!passive[j] && w(j) > tol && (best < 0 || w(j) > w(best))) best = j;
    }
    if (best < 0) {
      out.converged = true;
      break;
    }
    passive[best] = true;
    Eigen::VectorXd z = solve_passive(A, b, passive);
    if (z(best) <= 0.0) {
      // Column is numerically dependent on the passive set; skip it this round.
      passive[best] = false;
      w(best) = 0.0;
      ++out.iterations;
      continue;
    }
    // Step back toward the feasible set until the passive solution is positive.
    while (out.iterations++ < max_iterations) {
      bool all_positive = true;
      for (int j = 0; j < n; ++j) all_positive = all_positive && (!passive[j] || z(j) > 0.0);
      if (all_positive) break;
      double alpha = 1.0;
      for (int j = 0; j < n; ++j) {
        if (passive[j] && z(j) <= 0.0) alpha = std::min(alpha, out.x(j) / (out.x(j) - z(j)));
      }
      out.x += alpha * (z - out.x);
      for (int j = 0; j < n; ++j) {
        if (passive[j] && out.x(j) <= tol * 1e-6) {
          passive[j] = false;
          out.x(j) = 0.0;
        }
      }
      z = solve_passive(A, b, passive);
    }
    for (int j = 0; j < n; ++j) out.x(j) = passive[j] ? std::max(z(j), 0.0) : 0.0;
    w = A.transpose() * (b - A * out.x);
  }
  out.residual = (A * out.x - b).norm();
  return out;
}

}  // namespace quadsim
