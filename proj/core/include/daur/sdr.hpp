#pragma once

#include <iosfwd>
#include <vector>

#include "daur/qcqp.hpp"
#include "daur/sdp_solver.hpp"

namespace daur {

// Lifted problem over S = (Q; 1)(Q; 1)^T, dimension N + NM + 1. Every
// constraint family is homogeneous in S (the corner entry plays the role of
// the constant 1) except `corner`, which pins S_ll = 1.
struct SdrData {
  int dim = 0;
  int n_users = 0;
  int n_servers = 0;
  double varpi = 0.0;

  Eigen::MatrixXd P1;         // [[P0, W0/2], [W0^T/2, T_u + T_s + C]]
  Eigen::MatrixXd P7;         // user delay bound, [[0, P2_Tu/2], [., P1_Tu]]
  Eigen::MatrixXd P8;         // server delay bound, blockdiag(P0_Ts, P1_Ts)
  Eigen::MatrixXd objective;  // P1 with the delay bounds substituted tight

  SparseSym corner;                 // Tr = 1
  std::vector<SparseSym> P2;        // x_i^2 - x_i = 0, one per pair
  std::vector<SparseSym> P3;        // sum_m x_nm - 1 = 0, one per user
  std::vector<SparseSym> P4_upper;  // phi_n - hi <= 0
  std::vector<SparseSym> P4_lower;  // lo - phi_n <= 0
  std::vector<SparseSym> P5;        // sum_n phi_bw x_nm - 1 <= 0, one per server
  std::vector<SparseSym> P6;        // sum_n zeta x_nm - 1 <= 0, one per server
  std::vector<SparseSym> valid;     // valid inequalities (<= 0): phi^2 <= phi, McCormick

  int last() const { return dim - 1; }
  // Feasible set with objective C.
  SdpProblem problem(const Eigen::MatrixXd& C) const;
};

// t_u and t_s enter only the corner of P1.
SdrData lift_to_sdr(const QcqpData& qcqp, double varpi, double t_u = 0.0, double t_s = 0.0);

Eigen::MatrixXd lift_q(const Eigen::VectorXd& Q);

// Tr(S) - lambda_max(S). Throws ContractViolation for non-symmetric input.
double dc_penalty(const Eigen::MatrixXd& S);
Eigen::VectorXd leading_eigenvector(const Eigen::MatrixXd& S);

// Continuous Q read from the last column of S divided by the corner entry.
// Throws ExtractionDegenerate if the corner is <= 1e-8.
Eigen::VectorXd extract_q(const Eigen::MatrixXd& S);

struct DcTraceRow {
  int round = 0;
  double objective = 0.0;
  double penalty = 0.0;
};

struct DcResult {
  Eigen::MatrixXd S;
  Eigen::VectorXd Q;
  std::vector<DcTraceRow> trace;
  ConvexStatus status;
  double penalty = 0.0;
  int sdp_iterations = 0;
  int rejected_rounds = 0;  // 1 when a sub-solve failed or went uphill and was dropped
};

// Plain relaxation without the rank penalty.
SdpResult solve_sdr(const SdrData& sdr, const SdpOptions& options = {});

// Penalized rounds: minimize Tr(obj S) + varpi <I - s s^T, S> with s the
// leading eigenvector of the previous iterate, until the relative change of
// Tr(obj S) + varpi (Tr S - lambda_max S) is at most eps2. A round whose
// sub-solve fails or raises that value ends the loop at the previous iterate,
// so the trace is non-increasing up to the sub-solver's precision.
DcResult dc_solve(const SdrData& sdr, const Eigen::MatrixXd& S_init, double eps2, int max_rounds,
                  const SdpOptions& options = {});

void write_dc_trace_csv(std::ostream& out, const std::vector<DcTraceRow>& trace);

}  // namespace daur
