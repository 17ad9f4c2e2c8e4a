#pragma once

#include <iosfwd>
#include <vector>

#include "daur/convex.hpp"
#include "daur/transforms.hpp"

namespace daur {

struct FpTraceRow {
  int round = 0;
  double objective = 0.0;
  double kkt_residual = 0.0;
};

// Resource-allocation subproblem with x, phi_off and gamma fixed. Variables
// are laid out per user as (phi_bw, zeta, rho, psi), where phi_bw and zeta
// belong to the pair (n, server_of(n)).
struct P5Problem {
  ConcaveProblem problem;
  Eigen::VectorXd start;   // current point projected to the strict interior
  std::vector<int> server; // attached server per user
  double constant = 0.0;   // value terms that do not depend on the variables

  double value(const Eigen::VectorXd& z) const { return constant + problem.eval(z, nullptr, nullptr); }
};

// aux.upsilon must equal update_upsilon(inst, dec) (relative 1e-9), otherwise
// ContractViolation is thrown.
P5Problem build_p5(const NetworkInstance& inst, const Decision& dec, const AuxState& aux);
Decision apply_p5(const P5Problem& p5, const Decision& dec, const Eigen::VectorXd& z);

struct FpResult {
  Decision dec;
  std::vector<FpTraceRow> trace;
  AuxState aux;  // alpha/theta as given, upsilon synchronized with dec
  bool converged = false;
  int rounds = 0;
};

// Alternates concave solves and upsilon updates until the relative change of
// the objective is at most eps1. Keeps the best iterate.
FpResult fp_solve(const NetworkInstance& inst, const Decision& dec, const AuxState& aux,
                  double eps1, int max_rounds, const ConcaveOptions& options = {});

void write_fp_trace_csv(std::ostream& out, const std::vector<FpTraceRow>& trace);

}  // namespace daur
