#pragma once

#include "daur/transforms.hpp"

namespace daur {

// Association/offload subproblem with resources fixed, in min-form:
//   Q^T P0 Q + W0^T Q + T_u + T_s + C
// with  P2_Tu^T Q + P1_Tu <= T_u  and  Q^T P0_Ts Q + P1_Ts <= T_s.
// Q stacks phi_off (N entries) followed by the columns of x (x(n, m) sits at
// N + m N + n).
struct QcqpData {
  int n_users = 0;
  int n_servers = 0;
  Eigen::MatrixXd P0;
  Eigen::VectorXd W0;
  double C = 0.0;
  Eigen::VectorXd P2_Tu;
  double P1_Tu = 0.0;
  Eigen::MatrixXd P0_Ts;
  double P1_Ts = 0.0;
  Eigen::VectorXd phi_bw_vec;  // NM, same pair order as the x block
  Eigen::VectorXd zeta_vec;
  Eigen::VectorXd A;
  Eigen::MatrixXd B;
  double offload_lo = 0.0;
  double offload_hi = 1.0;

  int dim() const { return n_users + n_users * n_servers; }
  int phi_index(int n) const { return n; }
  int x_index(int n, int m) const { return n_users + m * n_users + n; }
};

double optimal_gamma(double omega_b);

// Requires every gamma equal to optimal_gamma(omega_b). `aux` provides the
// alpha/theta multipliers (normally prospective_auxiliary). Offload bounds are
// [1 - offload_cap, offload_cap].
QcqpData assemble_qcqp(const NetworkInstance& inst, const Decision& dec, const AuxState& aux,
                       double offload_cap = 0.999);

double qcqp_objective(const QcqpData& data, const Eigen::VectorXd& Q, double T_u, double T_s);
// Left-hand sides of the two delay-bound constraints.
double qcqp_tu(const QcqpData& data, const Eigen::VectorXd& Q);
double qcqp_ts(const QcqpData& data, const Eigen::VectorXd& Q);

Eigen::VectorXd stack_q(const Eigen::MatrixXd& x, const Eigen::VectorXd& phi_off);
void unstack_q(const QcqpData& data, const Eigen::VectorXd& Q, Eigen::MatrixXd& x,
               Eigen::VectorXd& phi_off);

// Max-form objective evaluated directly from the cost model with the given
// multipliers; equals -qcqp_objective at tight delay bounds.
double p7_objective(const NetworkInstance& inst, const Decision& dec, const AuxState& aux);

}  // namespace daur
