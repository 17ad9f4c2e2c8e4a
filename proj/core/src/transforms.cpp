#include "daur/transforms.hpp"

#include "daur/error.hpp"

namespace daur {
namespace {

AuxState build_aux(const NetworkInstance& inst, const Decision& dec, bool prospective) {
  const int N = inst.n_users, M = inst.n_servers;
  AuxState aux;
  aux.alpha_u = VectorXd::Zero(N);
  aux.theta_u = VectorXd::Zero(N);
  aux.T_u = VectorXd::Zero(N);
  aux.alpha_s = MatrixXd::Zero(N, M);
  aux.theta_s = MatrixXd::Zero(N, M);
  aux.T_s = MatrixXd::Zero(N, M);
  for (int n = 0; n < N; ++n) {
    const UserCost u = user_cost(inst, dec, n);
    const double num_u = inst.c_u(n) * (1.0 - dec.phi_off(n)) * inst.d(n);
    aux.T_u(n) = u.t_up;
    if (u.cost > 0.0) {
      aux.alpha_u(n) = 1.0 / u.cost;
      aux.theta_u(n) = num_u / u.cost;
    } else {
      aux.flagged = true;
    }
    for (int m = 0; m < M; ++m) {
      const double x = (prospective && dec.x(n, m) == 0.0) ? 1.0 : dec.x(n, m);
      const PairCost c = pair_cost(inst, dec, n, m, x);
      const double num_s = inst.c_s(n, m) * x * dec.phi_off(n) * inst.d(n);
      aux.T_s(n, m) = c.t_ut + c.t_sp + c.t_sg + c.t_bp + c.t_sv;
      if (c.cost > 0.0) {
        aux.alpha_s(n, m) = 1.0 / c.cost;
        aux.theta_s(n, m) = num_s / c.cost;
      } else {
        aux.flagged = true;
      }
    }
  }
  bool flag = false;
  aux.upsilon = update_upsilon(inst, dec, &flag);
  aux.flagged |= flag;
  return aux;
}

}  // namespace

AuxState update_auxiliary(const NetworkInstance& inst, const Decision& dec) {
  return build_aux(inst, dec, false);
}

AuxState prospective_auxiliary(const NetworkInstance& inst, const Decision& dec) {
  return build_aux(inst, dec, true);
}

MatrixXd update_upsilon(const NetworkInstance& inst, const Decision& dec, bool* flagged) {
  const int N = inst.n_users, M = inst.n_servers;
  MatrixXd ups = MatrixXd::Zero(N, M);
  for (int n = 0; n < N; ++n) {
    for (int m = 0; m < M; ++m) {
      if (dec.x(n, m) == 0.0) continue;
      const double chi = dec.x(n, m) * dec.rho(n) * inst.p(n) * dec.phi_off(n) * inst.d(n);
      const double rate = dec.phi_bw(n, m) > 0.0
                              ? transmission_rate(inst, n, m, dec.phi_bw(n, m), dec.rho(n))
                              : 0.0;
      double denom = 2.0 * chi * rate;
      // Natural scale of chi * r is p * d * b.
      const double floor = kFloor * inst.p(n) * inst.d(n) * inst.b(m);
      if (!(denom > floor)) {
        denom = floor;
        if (flagged) *flagged = true;
      }
      ups(n, m) = 1.0 / denom;
    }
  }
  return ups;
}

double upsilon_form_cost(const NetworkInstance& inst, const Decision& dec, int n, int m,
                         double upsilon) {
  const double x = dec.x(n, m);
  const PairCost c = pair_cost(inst, dec, n, m, x);
  const double t_total = c.t_ut + c.t_sp + c.t_sg + c.t_bp + c.t_sv;
  double e_ut = 0.0;
  if (x * dec.phi_off(n) * inst.d(n) > 0.0) {
    if (!(upsilon > 0.0))
      throw Error(ErrorKind::ContractViolation, "upsilon must be positive on a loaded pair");
    const double chi = x * dec.rho(n) * inst.p(n) * dec.phi_off(n) * inst.d(n);
    e_ut = chi * chi * upsilon + 1.0 / (4.0 * c.rate * c.rate * upsilon);
  }
  return inst.omega_t * t_total + inst.omega_e * (e_ut + c.e_sp + c.e_sg);
}

double p3_value(const NetworkInstance& inst, const Decision& dec, const AuxState& aux) {
  double value = 0.0;
  for (int n = 0; n < inst.n_users; ++n) {
    const double num_u = inst.c_u(n) * (1.0 - dec.phi_off(n)) * inst.d(n);
    value += aux.theta_u(n) + aux.alpha_u(n) * (num_u - aux.theta_u(n) * user_cost(inst, dec, n).cost);
    for (int m = 0; m < inst.n_servers; ++m) {
      const double num_s = inst.c_s(n, m) * dec.x(n, m) * dec.phi_off(n) * inst.d(n);
      const double cost = pair_cost(inst, dec, n, m, dec.x(n, m)).cost;
      value += aux.theta_s(n, m) + aux.alpha_s(n, m) * (num_s - aux.theta_s(n, m) * cost);
    }
  }
  return value;
}

}  // namespace daur
