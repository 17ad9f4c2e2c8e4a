#pragma once

#include <vector>

#include <Eigen/Dense>

#include "daur/convex.hpp"

namespace daur {

// Symmetric matrix stored as upper-triangle entries (row <= col). An
// off-diagonal entry v at (r, c) stands for v at both (r, c) and (c, r).
struct SparseSym {
  struct Entry {
    int row;
    int col;
    double value;
  };
  std::vector<Entry> entries;

  void add(int r, int c, double v);  // accumulates, swapping into upper form
  double trace_with(const Eigen::MatrixXd& S) const;  // Tr(A S)
  Eigen::MatrixXd dense(int dim) const;
};

enum class Sense { Equal, LessEqual };

struct SdpConstraint {
  SparseSym a;
  double b = 0.0;
  Sense sense = Sense::Equal;
};

// minimize Tr(C S) s.t. Tr(A_i S) (= or <=) b_i, S PSD.
struct SdpProblem {
  int dim = 0;
  Eigen::MatrixXd C;
  std::vector<SdpConstraint> constraints;
};

struct SdpOptions {
  double tol = 1e-7;
  int max_iter = 100;
};

struct SdpResult {
  Eigen::MatrixXd S;
  Eigen::VectorXd y;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  ConvexStatus status;
};

// Primal-dual path-following (HKM direction, Mehrotra predictor-corrector).
// Inequalities receive non-negative slack variables. status.infeasible is set
// when a primal infeasibility certificate is detected.
SdpResult solve_sdp(const SdpProblem& problem, const SdpOptions& options = {});

double min_eigenvalue(const Eigen::MatrixXd& S);

}  // namespace daur
