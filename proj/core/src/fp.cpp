#include "daur/fp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "daur/error.hpp"

namespace daur {
namespace {

constexpr double kMargin = 1e-6;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Per-user coefficients of the concave objective.
struct UserTerm {
  double w_u = 0;       // alpha_u * theta_u
  double a_t = 0, a_e = 0;  // user cost = a_t / psi + a_e * psi^2
  double w_s = 0;       // alpha_s * theta_s of the attached pair
  double load = 0;      // x * phi_off * d
  double snr = 0;       // g p / (sigma2 b)
  double bw = 0;        // b
  double ups = 0;
  double chi0 = 0;      // x p phi_off d
  double k1 = 0, k3 = 0;  // omega_t k1 / zeta + omega_e k3 zeta^2
};

}  // namespace

P5Problem build_p5(const NetworkInstance& inst, const Decision& dec, const AuxState& aux) {
  const int N = inst.n_users, M = inst.n_servers;
  if (!is_discrete(dec.x)) throw Error(ErrorKind::ContractViolation, "build_p5 needs one-hot x");
  const MatrixXd ups = update_upsilon(inst, dec);
  if (aux.upsilon.rows() != N || aux.upsilon.cols() != M)
    throw Error(ErrorKind::ContractViolation, "upsilon has the wrong shape");
  for (int n = 0; n < N; ++n)
    for (int m = 0; m < M; ++m)
      if (std::abs(aux.upsilon(n, m) - ups(n, m)) > 1e-9 * std::abs(ups(n, m)))
        throw Error(ErrorKind::ContractViolation, "upsilon is not synchronized with the decision");

  const double wt = inst.omega_t, we = inst.omega_e;
  P5Problem out;
  out.server.resize(N);
  std::vector<UserTerm> terms(N);
  double constant = 0.0;
  for (int n = 0; n < N; ++n) {
    const int m = dec.server_of(n);
    out.server[n] = m;
    UserTerm& u = terms[n];
    const double local = (1.0 - dec.phi_off(n)) * inst.d(n) * inst.eta_u(n);
    u.w_u = aux.alpha_u(n) * aux.theta_u(n);
    u.a_t = wt * local / inst.f_u(n);
    u.a_e = we * inst.kappa_u(n) * local * inst.f_u(n) * inst.f_u(n);
    constant += aux.theta_u(n) + aux.alpha_u(n) * inst.c_u(n) * (1.0 - dec.phi_off(n)) * inst.d(n);

    for (int k = 0; k < M; ++k) {
      const double x = dec.x(n, k);
      constant += aux.theta_s(n, k) + aux.alpha_s(n, k) * inst.c_s(n, k) * x * dec.phi_off(n) * inst.d(n);
      if (k == m) continue;
      // Unattached pairs keep their (constant) cost.
      constant -= aux.alpha_s(n, k) * aux.theta_s(n, k) * pair_cost(inst, dec, n, k, x).cost;
    }

    u.w_s = aux.alpha_s(n, m) * aux.theta_s(n, m);
    u.load = dec.x(n, m) * dec.phi_off(n) * inst.d(n);
    u.bw = inst.b(m);
    u.snr = inst.gain(n, m) * inst.p(n) / (inst.sigma2 * inst.b(m));
    u.ups = ups(n, m);
    u.chi0 = dec.x(n, m) * inst.p(n) * dec.phi_off(n) * inst.d(n);
    const double g = dec.gamma(n, m), f = inst.f_s(m);
    u.k1 = u.load * (inst.eta_s(m) / (g * f) + inst.omega_b * inst.eta_gen(m) / ((1.0 - g) * f));
    u.k3 = inst.kappa_s(m) * u.load * f * f *
           (inst.eta_s(m) * g * g + inst.eta_gen(m) * inst.omega_b * (1.0 - g) * (1.0 - g));
    const double fixed_delay = inst.S_b / inst.R_wired(m) + verification_delay(inst, dec, n, m);
    constant -= u.w_s * wt * fixed_delay;
  }
  out.constant = constant;

  const int dim = 4 * N;
  ConcaveProblem& prob = out.problem;
  prob.dim = dim;
  prob.lower = Eigen::VectorXd::Zero(dim);
  prob.upper = Eigen::VectorXd::Ones(dim);
  std::vector<int> load_count(M, 0);
  for (int n = 0; n < N; ++n) ++load_count[out.server[n]];
  int rows = 0;
  for (int m = 0; m < M; ++m) rows += load_count[m] > 0 ? 2 : 0;
  prob.G = Eigen::MatrixXd::Zero(rows, dim);
  prob.h = Eigen::VectorXd::Ones(rows);
  int r = 0;
  for (int m = 0; m < M; ++m) {
    if (load_count[m] == 0) continue;
    for (int n = 0; n < N; ++n) {
      if (out.server[n] != m) continue;
      prob.G(r, 4 * n) = 1.0;
      prob.G(r + 1, 4 * n + 1) = 1.0;
    }
    r += 2;
  }

  prob.eval = [terms, wt, we](const Eigen::VectorXd& z, Eigen::VectorXd* grad,
                              Eigen::MatrixXd* hess) -> double {
    const int n_users = static_cast<int>(terms.size());
    if (grad) grad->setZero(4 * n_users);
    if (hess) hess->setZero(4 * n_users, 4 * n_users);
    constexpr double inv_ln2 = 1.0 / std::numbers::ln2;
    double value = 0.0;
    for (int n = 0; n < n_users; ++n) {
      const UserTerm& u = terms[n];
      const int i = 4 * n;
      const double phi = z(i), zeta = z(i + 1), rho = z(i + 2), psi = z(i + 3);
      if (!(phi > 0 && zeta > 0 && rho > 0 && psi > 0)) return kNegInf;

      value -= u.w_u * (u.a_t / psi + u.a_e * psi * psi);
      if (grad) (*grad)(i + 3) -= u.w_u * (-u.a_t / (psi * psi) + 2.0 * u.a_e * psi);
      if (hess) (*hess)(i + 3, i + 3) -= u.w_u * (2.0 * u.a_t / (psi * psi * psi) + 2.0 * u.a_e);

      if (u.load <= 0.0 || u.w_s == 0.0) continue;
      const double q = u.snr * rho / phi;
      const double c = u.bw * inv_ln2;
      const double rate = c * phi * std::log1p(q);
      if (!(rate > 0)) return kNegInf;
      const double h = wt * u.load / rate + we / (4.0 * u.ups * rate * rate);
      const double e_rho = we * u.chi0 * u.chi0 * u.ups * rho * rho;
      const double e_zeta = wt * u.k1 / zeta + we * u.k3 * zeta * zeta;
      value -= u.w_s * (h + e_rho + e_zeta);
      if (!grad && !hess) continue;

      const double dr_phi = c * (std::log1p(q) - q / (1.0 + q));
      const double dr_rho = c * u.snr / (1.0 + q);
      const double h1 = -wt * u.load / (rate * rate) - we / (2.0 * u.ups * rate * rate * rate);
      if (grad) {
        (*grad)(i) -= u.w_s * h1 * dr_phi;
        (*grad)(i + 2) -= u.w_s * (h1 * dr_rho + 2.0 * we * u.chi0 * u.chi0 * u.ups * rho);
        (*grad)(i + 1) -= u.w_s * (-wt * u.k1 / (zeta * zeta) + 2.0 * we * u.k3 * zeta);
      }
      if (hess) {
        const double h2 = 2.0 * wt * u.load / (rate * rate * rate) +
                          1.5 * we / (u.ups * rate * rate * rate * rate);
        const double opq2 = (1.0 + q) * (1.0 + q);
        const double r_pp = -c * q * q / (phi * opq2);
        const double r_rr = -c * u.snr * u.snr / (phi * opq2);
        const double r_pr = c * u.snr * q / (phi * opq2);
        auto& H = *hess;
        H(i, i) -= u.w_s * (h2 * dr_phi * dr_phi + h1 * r_pp);
        H(i + 2, i + 2) -= u.w_s * (h2 * dr_rho * dr_rho + h1 * r_rr + 2.0 * we * u.chi0 * u.chi0 * u.ups);
        const double cross = u.w_s * (h2 * dr_phi * dr_rho + h1 * r_pr);
        H(i, i + 2) -= cross;
        H(i + 2, i) -= cross;
        H(i + 1, i + 1) -= u.w_s * (2.0 * wt * u.k1 / (zeta * zeta * zeta) + 2.0 * we * u.k3);
      }
    }
    return value;
  };

  // Start: current values pushed into the strict interior.
  Eigen::VectorXd start(dim);
  for (int n = 0; n < N; ++n) {
    const int m = out.server[n];
    start(4 * n) = dec.phi_bw(n, m);
    start(4 * n + 1) = dec.zeta(n, m);
    start(4 * n + 2) = dec.rho(n);
    start(4 * n + 3) = dec.psi(n);
  }
  start = start.cwiseMax(kMargin).cwiseMin(1.0 - kMargin);
  for (int row = 0; row < prob.G.rows(); ++row) {
    const double used = prob.G.row(row).dot(start);
    if (used > 1.0 - kMargin) {
      for (int j = 0; j < dim; ++j)
        if (prob.G(row, j) != 0.0) start(j) *= (1.0 - kMargin) / used;
    }
  }
  out.start = start;
  return out;
}

Decision apply_p5(const P5Problem& p5, const Decision& dec, const Eigen::VectorXd& z) {
  Decision out = dec;
  for (int n = 0; n < static_cast<int>(p5.server.size()); ++n) {
    const int m = p5.server[n];
    out.phi_bw(n, m) = z(4 * n);
    out.zeta(n, m) = z(4 * n + 1);
    out.rho(n) = z(4 * n + 2);
    out.psi(n) = z(4 * n + 3);
  }
  return out;
}

FpResult fp_solve(const NetworkInstance& inst, const Decision& dec, const AuxState& aux,
                  double eps1, int max_rounds, const ConcaveOptions& options) {
  if (!is_discrete(dec.x)) throw Error(ErrorKind::ContractViolation, "fp_solve needs one-hot x");
  FpResult res;
  res.aux = aux;
  res.aux.upsilon = update_upsilon(inst, dec);
  res.dec = dec;
  double prev = p3_value(inst, dec, res.aux);
  double best = prev;
  Decision cur = dec;
  AuxState cur_aux = res.aux;
  for (int round = 1; round <= max_rounds; ++round) {
    const P5Problem p5 = build_p5(inst, cur, cur_aux);
    auto [z, status] = solve_concave(p5.problem, p5.start, options);
    cur = apply_p5(p5, cur, z);
    cur_aux.upsilon = update_upsilon(inst, cur);
    const double obj = p3_value(inst, cur, cur_aux);
    res.trace.push_back({round, obj, status.kkt_residual});
    res.rounds = round;
    if (obj >= best) {
      best = obj;
      res.dec = cur;
      res.aux = cur_aux;
    }
    if (std::abs(obj - prev) <= eps1 * std::abs(prev)) {
      res.converged = true;
      break;
    }
    prev = obj;
  }
  return res;
}

void write_fp_trace_csv(std::ostream& out, const std::vector<FpTraceRow>& trace) {
  out << "round,objective,kkt_residual\n";
  out.precision(17);
  for (const auto& row : trace) out << row.round << ',' << row.objective << ',' << row.kkt_residual << '\n';
}

}  // namespace daur
