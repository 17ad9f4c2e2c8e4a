#pragma once

#include "daur/model.hpp"

namespace daur {

// Auxiliary variables of the sum-of-ratios reformulation.
struct AuxState {
  VectorXd alpha_u, theta_u, T_u;
  MatrixXd alpha_s, theta_s, T_s;
  MatrixXd upsilon;
  bool flagged = false;  // set when a zero cost forced a 0/0 fallback
};

// alpha = 1/cost, theta = numerator/cost, T bounds tight, upsilon synchronized.
AuxState update_auxiliary(const NetworkInstance& inst, const Decision& dec);

// Same as update_auxiliary, except pairs with x = 0 get the multipliers they
// would carry if connected (x = 1 at the current offload ratio). Used when the
// association itself is the variable.
AuxState prospective_auxiliary(const NetworkInstance& inst, const Decision& dec);

// 1 / (2 x rho p phi d r) on connected pairs, 0 elsewhere.
MatrixXd update_upsilon(const NetworkInstance& inst, const Decision& dec, bool* flagged = nullptr);

// Server cost with the transmit-energy term written as
// chi^2 upsilon + 1 / (4 r^2 upsilon), chi = x rho p phi d. Equals the ratio
// form when upsilon = update_upsilon and upper-bounds it otherwise.
double upsilon_form_cost(const NetworkInstance& inst, const Decision& dec, int n, int m,
                         double upsilon);

// sum(theta) + sum(alpha * (numerator - theta * cost)). Equals the DPE when
// the auxiliaries are synchronized with `dec`.
double p3_value(const NetworkInstance& inst, const Decision& dec, const AuxState& aux);

}  // namespace daur
