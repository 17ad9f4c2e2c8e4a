#include "daur/qcqp.hpp"

#include <cmath>

#include "daur/error.hpp"

namespace daur {

double optimal_gamma(double omega_b) {
  if (!(omega_b > 0.0)) throw Error(ErrorKind::InvalidParameter, "omega_b must be > 0");
  return 1.0 / (1.0 + omega_b);
}

QcqpData assemble_qcqp(const NetworkInstance& inst, const Decision& dec, const AuxState& aux,
                       double offload_cap) {
  const int N = inst.n_users, M = inst.n_servers;
  if (dec.x.rows() != N || dec.x.cols() != M || aux.alpha_s.rows() != N ||
      aux.alpha_s.cols() != M || aux.alpha_u.size() != N)
    throw Error(ErrorKind::DimensionMismatch, "decision or aux does not match the instance");
  const double g_opt = optimal_gamma(inst.omega_b);
  if (((dec.gamma.array() - g_opt).abs() > 1e-12).any())
    throw Error(ErrorKind::ContractViolation, "gamma must equal the optimal split");

  QcqpData q;
  q.n_users = N;
  q.n_servers = M;
  q.offload_lo = 1.0 - offload_cap;
  q.offload_hi = offload_cap;
  const int dim = q.dim();
  q.P0 = MatrixXd::Zero(dim, dim);
  q.P0_Ts = MatrixXd::Zero(dim, dim);
  q.W0 = VectorXd::Zero(dim);
  q.P2_Tu = VectorXd::Zero(dim);
  q.A = VectorXd::Zero(N);
  q.B = MatrixXd::Zero(N, M);
  q.phi_bw_vec = VectorXd::Zero(N * M);
  q.zeta_vec = VectorXd::Zero(N * M);

  const double wt = inst.omega_t, we = inst.omega_e;
  for (int n = 0; n < N; ++n) {
    const double au = aux.alpha_u(n), tu = aux.theta_u(n);
    const double freq = dec.psi(n) * inst.f_u(n);
    q.A(n) = au * inst.c_u(n) * inst.d(n) -
             au * tu * we * inst.kappa_u(n) * inst.d(n) * inst.eta_u(n) * freq * freq;
    const double tu_coef = au * tu * wt * inst.d(n) * inst.eta_u(n) / freq;
    q.P2_Tu(n) = -tu_coef;
    q.P1_Tu += tu_coef;
    q.W0(n) = q.A(n);
    q.C -= q.A(n);

    for (int m = 0; m < M; ++m) {
      const int xi = q.x_index(n, m);
      q.phi_bw_vec(m * N + n) = dec.phi_bw(n, m);
      q.zeta_vec(m * N + n) = dec.zeta(n, m);
      const double as = aux.alpha_s(n, m), ts = aux.theta_s(n, m);
      const double g = dec.gamma(n, m), f = inst.f_s(m), zeta = dec.zeta(n, m);
      const double rate = transmission_rate(inst, n, m, dec.phi_bw(n, m), dec.rho(n));
      const double d = inst.d(n);
      q.B(n, m) = as * ts * we * d *
                      (dec.rho(n) * inst.p(n) / rate +
                       inst.kappa_s(m) * zeta * zeta * f * f *
                           (g * g * inst.eta_s(m) + inst.omega_b * (1 - g) * (1 - g) * inst.eta_gen(m))) -
                  as * inst.c_s(n, m) * d;
      const double ts_coef = as * ts * wt * d *
                             (1.0 / rate + inst.eta_s(m) / (g * zeta * f) +
                              inst.omega_b * inst.eta_gen(m) / ((1 - g) * zeta * f));
      q.P0(n, xi) = q.P0(xi, n) = 0.5 * q.B(n, m);
      q.P0_Ts(n, xi) = q.P0_Ts(xi, n) = 0.5 * ts_coef;
      q.P1_Ts += as * ts * wt * (inst.S_b / inst.R_wired(m) + verification_delay(inst, dec, n, m));
    }
  }
  return q;
}

double qcqp_objective(const QcqpData& data, const VectorXd& Q, double T_u, double T_s) {
  if (Q.size() != data.dim()) throw Error(ErrorKind::DimensionMismatch, "Q has the wrong length");
  return Q.dot(data.P0 * Q) + data.W0.dot(Q) + T_u + T_s + data.C;
}

double qcqp_tu(const QcqpData& data, const VectorXd& Q) {
  if (Q.size() != data.dim()) throw Error(ErrorKind::DimensionMismatch, "Q has the wrong length");
  return data.P2_Tu.dot(Q) + data.P1_Tu;
}

double qcqp_ts(const QcqpData& data, const VectorXd& Q) {
  if (Q.size() != data.dim()) throw Error(ErrorKind::DimensionMismatch, "Q has the wrong length");
  return Q.dot(data.P0_Ts * Q) + data.P1_Ts;
}

VectorXd stack_q(const MatrixXd& x, const VectorXd& phi_off) {
  const int N = static_cast<int>(x.rows()), M = static_cast<int>(x.cols());
  if (phi_off.size() != N) throw Error(ErrorKind::DimensionMismatch, "phi_off length != rows of x");
  VectorXd Q(N + N * M);
  Q.head(N) = phi_off;
  for (int m = 0; m < M; ++m) Q.segment(N + m * N, N) = x.col(m);
  return Q;
}

void unstack_q(const QcqpData& data, const VectorXd& Q, MatrixXd& x, VectorXd& phi_off) {
  const int N = data.n_users, M = data.n_servers;
  if (Q.size() != data.dim()) throw Error(ErrorKind::DimensionMismatch, "Q has the wrong length");
  phi_off = Q.head(N);
  x.resize(N, M);
  for (int m = 0; m < M; ++m) x.col(m) = Q.segment(N + m * N, N);
}

double p7_objective(const NetworkInstance& inst, const Decision& dec, const AuxState& aux) {
  double v = 0.0;
  for (int n = 0; n < inst.n_users; ++n) {
    const double num_u = inst.c_u(n) * (1.0 - dec.phi_off(n)) * inst.d(n);
    v += aux.alpha_u(n) * (num_u - aux.theta_u(n) * user_cost(inst, dec, n).cost);
    for (int m = 0; m < inst.n_servers; ++m) {
      const double x = dec.x(n, m);
      const double num_s = inst.c_s(n, m) * x * dec.phi_off(n) * inst.d(n);
      v += aux.alpha_s(n, m) * (num_s - aux.theta_s(n, m) * pair_cost(inst, dec, n, m, x).cost);
    }
  }
  return v;
}

}  // namespace daur
