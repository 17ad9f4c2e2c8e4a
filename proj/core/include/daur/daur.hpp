#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "daur/config.hpp"
#include "daur/fp.hpp"
#include "daur/sdr.hpp"

namespace daur {

struct RunReport {
  std::string method;
  double dpe = 0.0;
  double initial_dpe = 0.0;
  int outer_rounds = 0;
  int fp_rounds = 0;
  int qcqp_rounds = 0;
  std::vector<double> objective_trace;  // best DPE after each outer round
  std::vector<std::vector<FpTraceRow>> fp_traces;
  std::vector<DcTraceRow> dc_trace;     // last association block
  double dc_penalty = 0.0;              // Tr(S) - lambda_max(S) of the last block
  double dc_trace_s = 0.0;              // Tr(S) of the last block
  double wall_ms = 0.0;
  double fp_ms = 0.0;
  double qcqp_ms = 0.0;
  Decision decision;
  bool converged = true;
  std::string note;
};

// Round-robin x, phi_off = 0.5, phi_bw = zeta = 1/N, rho = psi = 1, optimal gamma.
Decision initial_decision(const NetworkInstance& inst);
MatrixXd round_robin_association(int n_users, int n_servers);
MatrixXd max_gain_association(const NetworkInstance& inst);

// One pass of the association block: multipliers and QCQP built on the
// average-share view (phi_bw = zeta = 1/N for every pair), relaxation solved,
// DC rounds (unless cfg.drop_rank1), rank-1 rounding. The returned decision
// keeps the stored shares of `dec`, rescaled where a budget would overflow.
Decision association_block(const NetworkInstance& inst, const Decision& dec,
                           const SolverConfig& cfg, RunReport* report = nullptr);

RunReport daur_run(const NetworkInstance& inst, const SolverConfig& cfg);

RunReport baseline_rucaa(const NetworkInstance& inst, std::uint64_t seed,
                         const SolverConfig& cfg = {});
RunReport baseline_gucaa(const NetworkInstance& inst, const SolverConfig& cfg = {});
RunReport baseline_aauco(const NetworkInstance& inst, const SolverConfig& cfg);
RunReport baseline_gucro(const NetworkInstance& inst, const SolverConfig& cfg);

// Canonical method order.
const std::vector<std::string>& method_names();
RunReport run_method(const std::string& method, const NetworkInstance& inst,
                     const SolverConfig& cfg, std::uint64_t seed);

// CSV columns: method,dpe,outer_rounds,fp_rounds,qcqp_rounds,wall_ms
std::string report_csv_header();
std::string report_csv_row(const RunReport& report, bool with_timing = true);
std::string report_json(const RunReport& report);

// Shortest round-trip decimal form, locale independent.
std::string format_number(double v);

}  // namespace daur
