#pragma once

#include <functional>
#include <utility>

#include <Eigen/Dense>

namespace daur {

struct ConvexStatus {
  bool converged = false;
  bool infeasible = false;
  int iterations = 0;
  double kkt_residual = 0.0;
  double objective = 0.0;
};

// Maximize a smooth concave f subject to G z <= h and lower <= z <= upper.
// Infinite bounds are ignored. `eval` returns f(z) and fills the gradient and
// Hessian when the pointers are non-null; it may return -inf or NaN outside
// the domain of f.
struct ConcaveProblem {
  int dim = 0;
  std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*, Eigen::MatrixXd*)> eval;
  Eigen::MatrixXd G;
  Eigen::VectorXd h;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

struct ConcaveOptions {
  double tol = 1e-7;
  double t0 = 1.0;
  double mu = 20.0;
  int max_newton = 400;
};

// Log-barrier interior-point method. Stops once the relative barrier gap
// m / (t (1 + |f|)) and the scaled stationarity residual are both below tol.
// The KKT residual reported is the larger of the two, with stationarity
// ||grad f - G_all^T lambda||_inf / (1 + ||grad f||_inf) and lambda_i = 1 / (t s_i).
// Throws Infeasible if `start` is not strictly inside every constraint.
std::pair<Eigen::VectorXd, ConvexStatus> solve_concave(const ConcaveProblem& problem,
                                                       const Eigen::VectorXd& start,
                                                       const ConcaveOptions& options = {});

}  // namespace daur
