#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include <Eigen/Dense>

#include "daur/config.hpp"

namespace daur {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Fixed parameters of one random topology. Matrices indexed [user][server].
struct NetworkInstance {
  int n_users = 0;
  int n_servers = 0;

  Eigen::MatrixX2d user_pos;
  Eigen::MatrixX2d server_pos;
  MatrixXd gain;

  VectorXd d;        // bits
  VectorXd eta_u;    // cycles/bit
  VectorXd f_u;      // Hz
  VectorXd p;        // W
  VectorXd kappa_u;

  VectorXd eta_s;
  VectorXd eta_gen;
  VectorXd f_s;
  VectorXd kappa_s;
  VectorXd b;        // Hz
  VectorXd R_wired;  // bit/s

  double eta_v = 0.0;  // cycles
  double S_b = 0.0;    // bits
  double omega_b = 1.0;
  double omega_t = 0.5;
  double omega_e = 0.5;
  double sigma2 = 0.0;  // W/Hz

  VectorXd c_u;
  MatrixXd c_s;

  // Throws InvalidParameter / DimensionMismatch when an invariant fails.
  void validate() const;
};

// Optimization variables. x may be relaxed to [0,1] inside the association
// block; everything downstream of rounding expects one-hot rows.
struct Decision {
  MatrixXd x;
  VectorXd phi_off;
  MatrixXd gamma;
  MatrixXd phi_bw;
  VectorXd rho;
  MatrixXd zeta;
  VectorXd psi;

  static Decision zeros(int n_users, int n_servers);
  int n_users() const { return static_cast<int>(phi_off.size()); }
  int n_servers() const { return static_cast<int>(x.cols()); }
  // Index of the server user n is attached to (row argmax, lowest index on ties).
  int server_of(int n) const;
};

bool is_discrete(const MatrixXd& x, double tol = 0.0);

// Empty string when feasible, otherwise a description of the first violation.
std::string feasibility_error(const NetworkInstance& inst, const Decision& dec,
                              double tol = 1e-9, bool require_discrete = true);

struct CostBreakdown {
  VectorXd t_up, e_up, cost_u;
  MatrixXd t_ut, e_ut, t_sp, e_sp, t_sg, e_sg, t_bp, t_sv, cost_s;
  bool floored = false;
};

struct UserCost {
  double t_up = 0, e_up = 0, cost = 0;
  bool floored = false;
};

struct PairCost {
  double t_ut = 0, e_ut = 0, t_sp = 0, e_sp = 0, t_sg = 0, e_sg = 0, t_bp = 0, t_sv = 0;
  double cost = 0;
  double rate = 0;
  bool floored = false;
};

// Relative floor applied to every denominator built from a ratio variable.
inline constexpr double kFloor = 1e-9;

NetworkInstance generate_network(const ScenarioParams& params, std::uint64_t seed);
double path_loss_db(double distance_m);

// phi_bw * b_m * log2(1 + g*rho*p / (sigma2 * phi_bw * b_m)).
double transmission_rate(const NetworkInstance& inst, int n, int m, double phi_bw, double rho);

UserCost user_cost(const NetworkInstance& inst, const Decision& dec, int n);
// Server-side cost of pair (n, m) evaluated with association value `x`
// (normally dec.x(n, m); 1.0 gives the cost the pair would have if connected).
PairCost pair_cost(const NetworkInstance& inst, const Decision& dec, int n, int m, double x);
double verification_delay(const NetworkInstance& inst, const Decision& dec, int n, int m);

CostBreakdown cost_components(const NetworkInstance& inst, const Decision& dec);
double dpe_objective(const NetworkInstance& inst, const Decision& dec);

// Snapshot of an instance as CSV (one row per (user, server) pair plus
// scalar header lines); used for golden regression files.
void write_snapshot_csv(std::ostream& out, const NetworkInstance& inst);
std::string snapshot_csv(const NetworkInstance& inst);

}  // namespace daur
