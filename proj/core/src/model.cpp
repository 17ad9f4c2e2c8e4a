#include "daur/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include "daur/error.hpp"
#include "daur/rng.hpp"

namespace daur {
namespace {

constexpr double kBitsPerKB = 8e3;
constexpr double kBitsPerMB = 8e6;

double floored(double v, double scale, bool& flag) {
  const double lo = kFloor * scale;
  if (v < lo) {
    flag = true;
    return lo;
  }
  return v;
}

std::string num(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

void NetworkInstance::validate() const {
  const int N = n_users, M = n_servers;
  if (N < 1 || M < 1) throw Error(ErrorKind::InvalidParameter, "instance needs N >= 1 and M >= 1");
  auto vec_ok = [](const VectorXd& v, int n) { return v.size() == n && (v.array() > 0).all(); };
  if (gain.rows() != N || gain.cols() != M)
    throw Error(ErrorKind::DimensionMismatch, "gain must be N x M");
  if (!gain.allFinite() || !(gain.array() > 0).all())
    throw Error(ErrorKind::InvalidParameter, "gains must be finite and positive");
  if (!vec_ok(d, N) || !vec_ok(eta_u, N) || !vec_ok(f_u, N) || !vec_ok(p, N) || !vec_ok(kappa_u, N))
    throw Error(ErrorKind::InvalidParameter, "user parameters must be positive with length N");
  if (!vec_ok(eta_s, M) || !vec_ok(eta_gen, M) || !vec_ok(f_s, M) || !vec_ok(kappa_s, M) ||
      !vec_ok(b, M) || !vec_ok(R_wired, M))
    throw Error(ErrorKind::InvalidParameter, "server parameters must be positive with length M");
  if (!(eta_v > 0 && S_b > 0 && omega_b > 0 && omega_t > 0 && omega_e > 0 && sigma2 > 0))
    throw Error(ErrorKind::InvalidParameter, "scalar parameters must be positive");
  if (c_u.size() != N || c_s.rows() != N || c_s.cols() != M)
    throw Error(ErrorKind::DimensionMismatch, "preference weights must be sized N and N x M");
  if ((c_u.array() < 0).any() || (c_s.array() < 0).any())
    throw Error(ErrorKind::InvalidParameter, "preference weights must be non-negative");
}

Decision Decision::zeros(int n_users, int n_servers) {
  Decision dec;
  dec.x = MatrixXd::Zero(n_users, n_servers);
  dec.phi_off = VectorXd::Zero(n_users);
  dec.gamma = MatrixXd::Constant(n_users, n_servers, 0.5);
  dec.phi_bw = MatrixXd::Zero(n_users, n_servers);
  dec.rho = VectorXd::Zero(n_users);
  dec.zeta = MatrixXd::Zero(n_users, n_servers);
  dec.psi = VectorXd::Zero(n_users);
  return dec;
}

int Decision::server_of(int n) const {
  int best = 0;
  for (int m = 1; m < x.cols(); ++m)
    if (x(n, m) > x(n, best)) best = m;
  return best;
}

bool is_discrete(const MatrixXd& x, double tol) {
  for (int n = 0; n < x.rows(); ++n) {
    double sum = 0.0;
    for (int m = 0; m < x.cols(); ++m) {
      const double v = x(n, m);
      if (std::abs(v) > tol && std::abs(v - 1.0) > tol) return false;
      sum += v;
    }
    if (std::abs(sum - 1.0) > tol) return false;
  }
  return true;
}

std::string feasibility_error(const NetworkInstance& inst, const Decision& dec, double tol,
                              bool require_discrete) {
  const int N = inst.n_users, M = inst.n_servers;
  if (dec.x.rows() != N || dec.x.cols() != M || dec.phi_off.size() != N ||
      dec.gamma.rows() != N || dec.gamma.cols() != M || dec.phi_bw.rows() != N ||
      dec.phi_bw.cols() != M || dec.rho.size() != N || dec.zeta.rows() != N ||
      dec.zeta.cols() != M || dec.psi.size() != N)
    return "dimension mismatch";
  auto in_unit = [tol](double v) { return v >= -tol && v <= 1.0 + tol; };
  for (int n = 0; n < N; ++n) {
    if (!in_unit(dec.phi_off(n))) return "phi_off out of [0,1]";
    if (!in_unit(dec.rho(n))) return "rho out of [0,1]";
    if (!in_unit(dec.psi(n))) return "psi out of [0,1]";
    for (int m = 0; m < M; ++m) {
      if (!in_unit(dec.x(n, m))) return "x out of [0,1]";
      if (!(dec.gamma(n, m) > 0.0 && dec.gamma(n, m) < 1.0)) return "gamma outside (0,1)";
      if (!in_unit(dec.phi_bw(n, m))) return "phi_bw out of [0,1]";
      if (!in_unit(dec.zeta(n, m))) return "zeta out of [0,1]";
    }
  }
  if (require_discrete && !is_discrete(dec.x)) return "x is not one-hot per row";
  for (int m = 0; m < M; ++m) {
    double bw = 0.0, cpu = 0.0;
    for (int n = 0; n < N; ++n) {
      bw += dec.x(n, m) * dec.phi_bw(n, m);
      cpu += dec.x(n, m) * dec.zeta(n, m);
    }
    if (bw > 1.0 + tol) return "bandwidth budget exceeded on server " + std::to_string(m);
    if (cpu > 1.0 + tol) return "compute budget exceeded on server " + std::to_string(m);
  }
  return {};
}

double path_loss_db(double distance_m) {
  const double km = std::max(distance_m, 1.0) / 1000.0;
  return 128.1 + 37.6 * std::log10(km);
}

NetworkInstance generate_network(const ScenarioParams& prm, std::uint64_t seed) {
  if (prm.n_users < 1 || prm.n_servers < 1)
    throw Error(ErrorKind::InvalidParameter, "n_users and n_servers must be >= 1");
  if (!(prm.radius_m > 0)) throw Error(ErrorKind::InvalidParameter, "radius must be > 0");
  if (!(prm.task_min_kb > 0) || prm.task_max_kb < prm.task_min_kb)
    throw Error(ErrorKind::InvalidParameter, "task size range invalid");

  const int N = prm.n_users, M = prm.n_servers;
  NetworkInstance inst;
  inst.n_users = N;
  inst.n_servers = M;

  Rng rng(seed);
  auto draw_point = [&](Eigen::MatrixX2d& pos, int i) {
    const double r = prm.radius_m * std::sqrt(rng.uniform());
    const double theta = 2.0 * std::numbers::pi * rng.uniform();
    pos(i, 0) = r * std::cos(theta);
    pos(i, 1) = r * std::sin(theta);
  };
  inst.server_pos.resize(M, 2);
  inst.user_pos.resize(N, 2);
  for (int m = 0; m < M; ++m) draw_point(inst.server_pos, m);
  for (int n = 0; n < N; ++n) draw_point(inst.user_pos, n);

  inst.gain.resize(N, M);
  for (int n = 0; n < N; ++n) {
    for (int m = 0; m < M; ++m) {
      const double dist = (inst.user_pos.row(n) - inst.server_pos.row(m)).norm();
      const double h = prm.fading ? rng.exponential() : 1.0;
      inst.gain(n, m) = std::pow(10.0, -path_loss_db(dist) / 10.0) * h;
    }
  }
  // A zero exponential draw is possible in principle; keep gains positive.
  inst.gain = inst.gain.cwiseMax(1e-300);

  inst.d.resize(N);
  for (int n = 0; n < N; ++n)
    inst.d(n) = rng.uniform(prm.task_min_kb, prm.task_max_kb) * kBitsPerKB;

  inst.eta_u = VectorXd::Constant(N, prm.eta_user);
  inst.f_u = VectorXd::Constant(N, prm.f_user_hz);
  inst.p = VectorXd::Constant(N, prm.power_w);
  inst.kappa_u = VectorXd::Constant(N, prm.kappa_user);

  inst.eta_s = VectorXd::Constant(M, prm.eta_server);
  inst.eta_gen = VectorXd::Constant(M, prm.eta_gen);
  inst.f_s = VectorXd::Constant(M, prm.f_server_hz);
  inst.kappa_s = VectorXd::Constant(M, prm.kappa_server);
  inst.b = VectorXd::Constant(M, prm.bandwidth_hz);
  inst.R_wired = VectorXd::Constant(M, prm.wired_rate_bps);

  inst.S_b = prm.block_size_mb * kBitsPerMB;
  inst.eta_v = prm.eta_v > 0 ? prm.eta_v : prm.eta_gen * inst.S_b * 1e-3;
  inst.omega_b = prm.omega_b;
  inst.omega_t = prm.omega_t;
  inst.omega_e = prm.omega_e;
  inst.sigma2 = std::pow(10.0, prm.noise_dbm_per_hz / 10.0) * 1e-3;

  const double base = prm.preference_base;
  if (prm.preference_mode == "mixed") {
    // Separate stream so the topology matches the fixed-preference instance.
    Rng pref(derive_seed(seed, 0x7072656600ull));
    inst.c_u.resize(N);
    inst.c_s.resize(N, M);
    for (int n = 0; n < N; ++n) inst.c_u(n) = pref.uniform() * base;
    for (int n = 0; n < N; ++n)
      for (int m = 0; m < M; ++m) inst.c_s(n, m) = pref.uniform() * base;
  } else if (prm.preference_mode == "fixed") {
    inst.c_u = VectorXd::Constant(N, prm.preference * base);
    inst.c_s = MatrixXd::Constant(N, M, prm.preference * base);
  } else {
    throw Error(ErrorKind::InvalidParameter, "unknown preference_mode '" + prm.preference_mode + "'");
  }
  inst.validate();
  return inst;
}

double transmission_rate(const NetworkInstance& inst, int n, int m, double phi_bw, double rho) {
  if (!(phi_bw > 0.0)) throw Error(ErrorKind::RateUndefined, "phi_bw must be > 0");
  if (rho < 0.0) throw Error(ErrorKind::InvalidParameter, "rho must be >= 0");
  const double bw = phi_bw * inst.b(m);
  const double snr = inst.gain(n, m) * rho * inst.p(n) / (inst.sigma2 * bw);
  return bw * std::log2(1.0 + snr);
}

UserCost user_cost(const NetworkInstance& inst, const Decision& dec, int n) {
  UserCost out;
  const double work = (1.0 - dec.phi_off(n)) * inst.d(n) * inst.eta_u(n);
  const double freq = floored(dec.psi(n), 1.0, out.floored) * inst.f_u(n);
  out.t_up = work / freq;
  out.e_up = inst.kappa_u(n) * work * freq * freq;
  out.cost = inst.omega_t * out.t_up + inst.omega_e * out.e_up;
  return out;
}

double verification_delay(const NetworkInstance& inst, const Decision& dec, int n, int m) {
  double worst = 0.0;
  bool flag = false;
  for (int k = 0; k < inst.n_servers; ++k) {
    if (k == m) continue;
    const double share = floored(1.0 - dec.gamma(n, k), 1.0, flag) *
                         floored(dec.zeta(n, k), 1.0, flag) * inst.f_s(k);
    worst = std::max(worst, inst.eta_v / share);
  }
  return worst;
}

PairCost pair_cost(const NetworkInstance& inst, const Decision& dec, int n, int m, double x) {
  PairCost c;
  const double load = x * dec.phi_off(n) * inst.d(n);
  const double gam = floored(dec.gamma(n, m), 1.0, c.floored);
  const double gam_c = floored(1.0 - dec.gamma(n, m), 1.0, c.floored);
  const double zeta = floored(dec.zeta(n, m), 1.0, c.floored);
  const double fs = inst.f_s(m);
  if (load > 0.0) {
    const double phi_bw = floored(dec.phi_bw(n, m), 1.0, c.floored);
    c.rate = floored(transmission_rate(inst, n, m, phi_bw, std::max(dec.rho(n), 0.0)), inst.b(m),
                     c.floored);
    c.t_ut = load / c.rate;
    c.e_ut = dec.rho(n) * inst.p(n) * c.t_ut;
    c.t_sp = load * inst.eta_s(m) / (gam * zeta * fs);
    c.e_sp = inst.kappa_s(m) * load * inst.eta_s(m) * std::pow(gam * zeta * fs, 2);
    c.t_sg = load * inst.omega_b * inst.eta_gen(m) / (gam_c * zeta * fs);
    c.e_sg = inst.kappa_s(m) * load * inst.eta_gen(m) * inst.omega_b * std::pow(gam_c * zeta * fs, 2);
  }
  c.t_bp = inst.S_b / inst.R_wired(m);
  c.t_sv = verification_delay(inst, dec, n, m);
  c.cost = inst.omega_t * (c.t_ut + c.t_sp + c.t_sg + c.t_bp + c.t_sv) +
           inst.omega_e * (c.e_ut + c.e_sp + c.e_sg);
  return c;
}

CostBreakdown cost_components(const NetworkInstance& inst, const Decision& dec) {
  const int N = inst.n_users, M = inst.n_servers;
  CostBreakdown out;
  out.t_up.resize(N);
  out.e_up.resize(N);
  out.cost_u.resize(N);
  for (auto* mat : {&out.t_ut, &out.e_ut, &out.t_sp, &out.e_sp, &out.t_sg, &out.e_sg, &out.t_bp,
                    &out.t_sv, &out.cost_s})
    mat->resize(N, M);
  for (int n = 0; n < N; ++n) {
    const UserCost u = user_cost(inst, dec, n);
    out.t_up(n) = u.t_up;
    out.e_up(n) = u.e_up;
    out.cost_u(n) = u.cost;
    out.floored |= u.floored;
    for (int m = 0; m < M; ++m) {
      const PairCost c = pair_cost(inst, dec, n, m, dec.x(n, m));
      out.t_ut(n, m) = c.t_ut;
      out.e_ut(n, m) = c.e_ut;
      out.t_sp(n, m) = c.t_sp;
      out.e_sp(n, m) = c.e_sp;
      out.t_sg(n, m) = c.t_sg;
      out.e_sg(n, m) = c.e_sg;
      out.t_bp(n, m) = c.t_bp;
      out.t_sv(n, m) = c.t_sv;
      out.cost_s(n, m) = c.cost;
      out.floored |= c.floored;
    }
  }
  return out;
}

double dpe_objective(const NetworkInstance& inst, const Decision& dec) {
  if (!is_discrete(dec.x)) throw Error(ErrorKind::ContractViolation, "dpe_objective needs one-hot x");
  double total = 0.0;
  for (int n = 0; n < inst.n_users; ++n) {
    const double num_u = inst.c_u(n) * (1.0 - dec.phi_off(n)) * inst.d(n);
    if (num_u != 0.0) {
      const double cost = user_cost(inst, dec, n).cost;
      if (!(cost > 0.0)) throw Error(ErrorKind::ModelDegeneracy, "user cost is not positive");
      total += num_u / cost;
    }
    for (int m = 0; m < inst.n_servers; ++m) {
      const double num_s = inst.c_s(n, m) * dec.x(n, m) * dec.phi_off(n) * inst.d(n);
      if (num_s == 0.0) continue;
      const double cost = pair_cost(inst, dec, n, m, dec.x(n, m)).cost;
      if (!(cost > 0.0)) throw Error(ErrorKind::ModelDegeneracy, "server cost is not positive");
      total += num_s / cost;
    }
  }
  return total;
}

void write_snapshot_csv(std::ostream& out, const NetworkInstance& inst) {
  out << "section,n,m,field,value\n";
  auto scalar = [&](const char* name, double v) { out << "scalar,,," << name << ',' << num(v) << '\n'; };
  scalar("n_users", inst.n_users);
  scalar("n_servers", inst.n_servers);
  scalar("eta_v", inst.eta_v);
  scalar("S_b", inst.S_b);
  scalar("omega_b", inst.omega_b);
  scalar("omega_t", inst.omega_t);
  scalar("omega_e", inst.omega_e);
  scalar("sigma2", inst.sigma2);
  for (int n = 0; n < inst.n_users; ++n) {
    auto user = [&](const char* name, double v) {
      out << "user," << n << ",," << name << ',' << num(v) << '\n';
    };
    user("x", inst.user_pos(n, 0));
    user("y", inst.user_pos(n, 1));
    user("d", inst.d(n));
    user("eta_u", inst.eta_u(n));
    user("f_u", inst.f_u(n));
    user("p", inst.p(n));
    user("kappa_u", inst.kappa_u(n));
    user("c_u", inst.c_u(n));
  }
  for (int m = 0; m < inst.n_servers; ++m) {
    auto server = [&](const char* name, double v) {
      out << "server,," << m << ',' << name << ',' << num(v) << '\n';
    };
    server("x", inst.server_pos(m, 0));
    server("y", inst.server_pos(m, 1));
    server("eta_s", inst.eta_s(m));
    server("eta_gen", inst.eta_gen(m));
    server("f_s", inst.f_s(m));
    server("kappa_s", inst.kappa_s(m));
    server("b", inst.b(m));
    server("R_wired", inst.R_wired(m));
  }
  for (int n = 0; n < inst.n_users; ++n) {
    for (int m = 0; m < inst.n_servers; ++m) {
      out << "pair," << n << ',' << m << ",gain," << num(inst.gain(n, m)) << '\n';
      out << "pair," << n << ',' << m << ",c_s," << num(inst.c_s(n, m)) << '\n';
    }
  }
}

std::string snapshot_csv(const NetworkInstance& inst) {
  std::ostringstream out;
  write_snapshot_csv(out, inst);
  return out.str();
}

}  // namespace daur
