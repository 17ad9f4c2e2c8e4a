#include "daur/daur.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>

#include <json.hpp>

#include "daur/error.hpp"
#include "daur/rng.hpp"
#include "daur/rounding.hpp"

namespace daur {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

ConcaveOptions concave_options(const SolverConfig& cfg) {
  ConcaveOptions o;
  o.tol = cfg.tol;
  return o;
}

SdpOptions sdp_options(const SolverConfig& cfg) {
  SdpOptions o;
  o.tol = cfg.tol;
  return o;
}

// Tracks the best feasible point seen during a run.
struct Incumbent {
  Decision dec;
  double dpe = -1.0;
  void offer(const NetworkInstance& inst, const Decision& cand) {
    const double v = dpe_objective(inst, cand);
    if (v > dpe) {
      dpe = v;
      dec = cand;
    }
  }
};

void repair_budgets(const NetworkInstance& inst, Decision& dec) {
  for (int m = 0; m < inst.n_servers; ++m) {
    double bw = 0.0, cpu = 0.0;
    for (int n = 0; n < inst.n_users; ++n) {
      bw += dec.x(n, m) * dec.phi_bw(n, m);
      cpu += dec.x(n, m) * dec.zeta(n, m);
    }
    for (int n = 0; n < inst.n_users; ++n) {
      if (dec.x(n, m) == 0.0) continue;
      if (bw > 1.0) dec.phi_bw(n, m) /= bw;
      if (cpu > 1.0) dec.zeta(n, m) /= cpu;
    }
  }
}

void finish(RunReport& r, const NetworkInstance& inst, const Incumbent& best, Clock::time_point t0) {
  r.decision = best.dec;
  r.dpe = dpe_objective(inst, best.dec);
  r.wall_ms = ms_since(t0);
  const std::string why = feasibility_error(inst, best.dec);
  if (!why.empty()) {
    r.converged = false;
    r.note = "final decision infeasible: " + why;
  }
}

}  // namespace

MatrixXd round_robin_association(int n_users, int n_servers) {
  MatrixXd x = MatrixXd::Zero(n_users, n_servers);
  for (int n = 0; n < n_users; ++n) x(n, n % n_servers) = 1.0;
  return x;
}

MatrixXd max_gain_association(const NetworkInstance& inst) {
  return round_secondary(inst.gain);
}

Decision initial_decision(const NetworkInstance& inst) {
  const int N = inst.n_users, M = inst.n_servers;
  Decision dec = Decision::zeros(N, M);
  dec.x = round_robin_association(N, M);
  dec.phi_off.setConstant(0.5);
  dec.gamma.setConstant(optimal_gamma(inst.omega_b));
  dec.phi_bw.setConstant(1.0 / N);
  dec.zeta.setConstant(1.0 / N);
  dec.rho.setOnes();
  dec.psi.setOnes();
  return dec;
}

Decision association_block(const NetworkInstance& inst, const Decision& dec,
                           const SolverConfig& cfg, RunReport* report) {
  const int N = inst.n_users;
  Decision view = dec;
  view.phi_bw.setConstant(1.0 / N);
  view.zeta.setConstant(1.0 / N);
  view.gamma.setConstant(optimal_gamma(inst.omega_b));
  const AuxState aux = prospective_auxiliary(inst, view);
  const QcqpData q = assemble_qcqp(inst, view, aux, cfg.offload_cap);
  const SdrData sdr = lift_to_sdr(q, cfg.varpi);
  const SdpOptions opt = sdp_options(cfg);
  const SdpResult plain = solve_sdr(sdr, opt);
  MatrixXd S = 0.5 * (plain.S + plain.S.transpose());
  if (!cfg.drop_rank1) {
    const DcResult dc = dc_solve(sdr, S, cfg.eps2, cfg.max_rounds, opt);
    S = dc.S;
    if (report) report->dc_trace = dc.trace;
  } else if (report) {
    report->dc_trace.clear();
  }
  if (report) {
    report->dc_penalty = dc_penalty(S);
    report->dc_trace_s = S.trace();
    ++report->qcqp_rounds;
  }

  Decision out = dec;
  out.x = round_rank1(S, N, inst.n_servers);
  const VectorXd Q = extract_q(S);
  for (int n = 0; n < N; ++n)
    out.phi_off(n) = std::clamp(Q(n), q.offload_lo, q.offload_hi);
  repair_budgets(inst, out);
  return out;
}

RunReport daur_run(const NetworkInstance& inst, const SolverConfig& cfg) {
  const auto t0 = Clock::now();
  RunReport r;
  r.method = "DAUR";
  Decision dec = initial_decision(inst);
  Incumbent best;
  best.offer(inst, dec);
  r.initial_dpe = best.dpe;
  double prev = best.dpe;
  bool stale = false;  // association changed after the last FP pass
  for (int round = 1; round <= cfg.max_rounds; ++round) {
    r.outer_rounds = round;
    auto tf = Clock::now();
    const FpResult fp = fp_solve(inst, dec, update_auxiliary(inst, dec), cfg.eps1, cfg.max_rounds,
                                 concave_options(cfg));
    r.fp_ms += ms_since(tf);
    r.fp_rounds += fp.rounds;
    r.fp_traces.push_back(fp.trace);
    r.converged &= fp.converged;
    dec = fp.dec;
    best.offer(inst, dec);

    auto tq = Clock::now();
    const Decision next = association_block(inst, dec, cfg, &r);
    r.qcqp_ms += ms_since(tq);
    stale = next.x != dec.x || next.phi_off != dec.phi_off;
    dec = next;
    best.offer(inst, dec);

    r.objective_trace.push_back(best.dpe);
    if (best.dpe / prev - 1.0 <= cfg.eps3) break;
    prev = best.dpe;
  }
  if (stale) {
    auto tf = Clock::now();
    const FpResult fp = fp_solve(inst, dec, update_auxiliary(inst, dec), cfg.eps1, cfg.max_rounds,
                                 concave_options(cfg));
    r.fp_ms += ms_since(tf);
    r.fp_rounds += fp.rounds;
    r.fp_traces.push_back(fp.trace);
    best.offer(inst, fp.dec);
    r.objective_trace.back() = best.dpe;
  }
  finish(r, inst, best, t0);
  return r;
}

RunReport baseline_rucaa(const NetworkInstance& inst, std::uint64_t seed, const SolverConfig& cfg) {
  const auto t0 = Clock::now();
  RunReport r;
  r.method = "RUCAA";
  Rng rng(derive_seed(seed, 0x72756361ull));
  MatrixXd x = MatrixXd::Zero(inst.n_users, inst.n_servers);
  for (int n = 0; n < inst.n_users; ++n) x(n, rng.index(inst.n_servers)) = 1.0;
  Incumbent best;
  best.offer(inst, equal_share_decision(inst, x, VectorXd::Constant(inst.n_users, 0.5), cfg));
  r.initial_dpe = best.dpe;
  finish(r, inst, best, t0);
  return r;
}

RunReport baseline_gucaa(const NetworkInstance& inst, const SolverConfig& cfg) {
  const auto t0 = Clock::now();
  RunReport r;
  r.method = "GUCAA";
  Incumbent best;
  best.offer(inst, equal_share_decision(inst, max_gain_association(inst),
                                        VectorXd::Constant(inst.n_users, 0.5), cfg));
  r.initial_dpe = best.dpe;
  finish(r, inst, best, t0);
  return r;
}

RunReport baseline_aauco(const NetworkInstance& inst, const SolverConfig& cfg) {
  const auto t0 = Clock::now();
  RunReport r;
  r.method = "AAUCO";
  Decision dec = equal_share_decision(inst, round_robin_association(inst.n_users, inst.n_servers),
                                      VectorXd::Constant(inst.n_users, 0.5), cfg);
  Incumbent best;
  best.offer(inst, dec);
  r.initial_dpe = best.dpe;
  double prev = best.dpe;
  for (int round = 1; round <= cfg.max_rounds; ++round) {
    r.outer_rounds = round;
    auto tq = Clock::now();
    const Decision next = association_block(inst, dec, cfg, &r);
    r.qcqp_ms += ms_since(tq);
    dec = equal_share_decision(inst, next.x, next.phi_off, cfg);
    best.offer(inst, dec);
    r.objective_trace.push_back(best.dpe);
    if (best.dpe / prev - 1.0 <= cfg.eps3) break;
    prev = best.dpe;
  }
  finish(r, inst, best, t0);
  return r;
}

RunReport baseline_gucro(const NetworkInstance& inst, const SolverConfig& cfg) {
  const auto t0 = Clock::now();
  RunReport r;
  r.method = "GUCRO";
  Decision dec = equal_share_decision(inst, max_gain_association(inst),
                                      VectorXd::Constant(inst.n_users, 0.5), cfg);
  Incumbent best;
  best.offer(inst, dec);
  r.initial_dpe = best.dpe;
  double prev = best.dpe;
  for (int round = 1; round <= cfg.max_rounds; ++round) {
    r.outer_rounds = round;
    auto tf = Clock::now();
    const FpResult fp = fp_solve(inst, dec, update_auxiliary(inst, dec), cfg.eps1, cfg.max_rounds,
                                 concave_options(cfg));
    r.fp_ms += ms_since(tf);
    r.fp_rounds += fp.rounds;
    r.fp_traces.push_back(fp.trace);
    r.converged &= fp.converged;
    dec = fp.dec;
    best.offer(inst, dec);
    r.objective_trace.push_back(best.dpe);
    if (best.dpe / prev - 1.0 <= cfg.eps3) break;
    prev = best.dpe;
  }
  finish(r, inst, best, t0);
  return r;
}

const std::vector<std::string>& method_names() {
  static const std::vector<std::string> names = {"RUCAA", "GUCAA", "AAUCO", "GUCRO", "DAUR"};
  return names;
}

RunReport run_method(const std::string& method, const NetworkInstance& inst,
                     const SolverConfig& cfg, std::uint64_t seed) {
  if (method == "RUCAA") return baseline_rucaa(inst, seed, cfg);
  if (method == "GUCAA") return baseline_gucaa(inst, cfg);
  if (method == "AAUCO") return baseline_aauco(inst, cfg);
  if (method == "GUCRO") return baseline_gucro(inst, cfg);
  if (method == "DAUR") return daur_run(inst, cfg);
  throw Error(ErrorKind::Usage, "unknown method '" + method + "'");
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string report_csv_header() { return "method,dpe,outer_rounds,fp_rounds,qcqp_rounds,wall_ms"; }

std::string report_csv_row(const RunReport& r, bool with_timing) {
  return r.method + ',' + format_number(r.dpe) + ',' + std::to_string(r.outer_rounds) + ',' +
         std::to_string(r.fp_rounds) + ',' + std::to_string(r.qcqp_rounds) + ',' +
         format_number(with_timing ? r.wall_ms : 0.0);
}

std::string report_json(const RunReport& r) {
  using nlohmann::json;
  json j;
  j["method"] = r.method;
  j["dpe"] = r.dpe;
  j["initial_dpe"] = r.initial_dpe;
  j["outer_rounds"] = r.outer_rounds;
  j["fp_rounds"] = r.fp_rounds;
  j["qcqp_rounds"] = r.qcqp_rounds;
  j["objective_trace"] = r.objective_trace;
  j["converged"] = r.converged;
  j["note"] = r.note;
  j["timing_ms"] = {{"wall", r.wall_ms}, {"fp", r.fp_ms}, {"qcqp", r.qcqp_ms}};
  json fp = json::array();
  for (const auto& trace : r.fp_traces) {
    json rows = json::array();
    for (const auto& row : trace) rows.push_back({row.round, row.objective, row.kkt_residual});
    fp.push_back(rows);
  }
  j["fp_traces"] = fp;
  json dc = json::array();
  for (const auto& row : r.dc_trace) dc.push_back({row.round, row.objective, row.penalty});
  j["dc_trace"] = dc;
  j["dc_penalty"] = r.dc_penalty;
  const Decision& d = r.decision;
  auto mat = [](const MatrixXd& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
      json row = json::array();
      for (int k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
      rows.push_back(row);
    }
    return rows;
  };
  auto vec = [](const VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  j["decision"] = {{"x", mat(d.x)},           {"phi_off", vec(d.phi_off)}, {"gamma", mat(d.gamma)},
                   {"phi_bw", mat(d.phi_bw)}, {"rho", vec(d.rho)},         {"zeta", mat(d.zeta)},
                   {"psi", vec(d.psi)}};
  return j.dump();
}

}  // namespace daur
