#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace daur {

// Scenario knobs. Task sizes are in kilobytes and the block size in
// megabytes (1 KB = 8e3 bits, 1 MB = 8e6 bits).
struct ScenarioParams {
  int n_users = 10;
  int n_servers = 2;
  double radius_m = 1000.0;
  bool fading = true;

  double noise_dbm_per_hz = -134.0;
  double bandwidth_hz = 10e6;
  double power_w = 0.2;

  double f_user_hz = 1e9;
  double f_server_hz = 20e9;
  double eta_user = 279.62;
  double eta_server = 279.62;
  double eta_gen = 737.5;
  double kappa_user = 1e-27;
  double kappa_server = 1e-27;

  double task_min_kb = 500.0;
  double task_max_kb = 2000.0;

  double block_size_mb = 8.0;
  double wired_rate_bps = 15e6;
  double omega_b = 1.0;
  // Verification cycles; a non-positive value selects eta_gen * S_b * 1e-3.
  double eta_v = 0.0;

  double omega_t = 0.5;
  double omega_e = 0.5;

  double preference_base = 2e-6;
  double preference = 1.0;
  // "fixed" scales every weight by `preference`; "mixed" draws each weight's
  // multiplier uniformly from [0, 1].
  std::string preference_mode = "fixed";
};

struct SolverConfig {
  double eps1 = 1e-3;
  double eps2 = 1e-3;
  double eps3 = 1e-3;
  double varpi = 175.0;
  int max_rounds = 20;
  double tol = 1e-7;
  // Offload ratios are kept in [1 - offload_cap, offload_cap].
  double offload_cap = 0.999;
  double baseline_rho = 1.0;
  double baseline_psi = 1.0;
  bool drop_rank1 = false;
};

struct Config {
  ScenarioParams scenario;
  SolverConfig solver;
};

// `key = value` lines, '#' starts a comment. Keys are the field names above,
// optionally prefixed with "scenario." or "solver.". Unknown keys throw.
Config parse_config(std::istream& in);
Config load_config(const std::string& path);
std::string dump_config(const Config& cfg);

// Throws InvalidParameter describing the first bad field.
void validate(const Config& cfg);

std::vector<std::string> config_keys();

}  // namespace daur
