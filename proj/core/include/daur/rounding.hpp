#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "daur/config.hpp"
#include "daur/model.hpp"

namespace daur {

// Every technique returns one-hot rows; ties go to the lowest server index.
MatrixXd round_hungarian(const MatrixXd& x_cont);
MatrixXd round_randomized(const MatrixXd& x_cont, std::uint64_t seed);
MatrixXd round_secondary(const MatrixXd& x_cont);
// Leading eigenvector of S (size N + NM + 1), corner made positive and
// normalized to 1, x block arg-maxed per row.
MatrixXd round_rank1(const MatrixXd& S, int n_users, int n_servers);
MatrixXd round_greedy(const MatrixXd& x_cont);

// Minimum-cost perfect assignment on a square matrix; returns the column of
// each row.
std::vector<int> solve_assignment(const MatrixXd& cost);

enum class Rounding { Hungarian, Randomized, Secondary, Rank1, Greedy };
const std::vector<Rounding>& all_roundings();
std::string to_string(Rounding r);

struct RoundingRow {
  std::string technique;
  double mean_objective = 0.0;
  double mean_wall_ms = 0.0;
  bool all_feasible = true;
};

// Equal-share decision (phi_bw = zeta = 1/load on connected pairs, 1/N on the
// rest) for an association x; rho and psi from the config baseline values.
Decision equal_share_decision(const NetworkInstance& inst, const MatrixXd& x,
                              const VectorXd& phi_off, const SolverConfig& cfg);

// For each technique: round, build the equal-share decision at `phi_off`,
// run fp_solve once on synchronized multipliers, score the DPE; averaged over
// `repeats` (the randomized technique draws with seed + r).
std::vector<RoundingRow> compare_roundings(const NetworkInstance& inst, const MatrixXd& S,
                                           const MatrixXd& x_cont, const VectorXd& phi_off,
                                           int repeats, std::uint64_t seed,
                                           const SolverConfig& cfg);

}  // namespace daur
