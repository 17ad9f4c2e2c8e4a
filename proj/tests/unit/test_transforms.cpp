#include <gtest/gtest.h>

#include "daur/transforms.hpp"
#include "test_util.hpp"

using namespace daur;
using daur::testing::random_decision;
using daur::testing::rel_err;
using daur::testing::small_params;

TEST(Auxiliary, KktFixedPoint) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const NetworkInstance inst = generate_network(ScenarioParams{}, seed);
    Rng rng(seed + 100);
    const Decision dec = random_decision(inst, rng);
    const AuxState aux = update_auxiliary(inst, dec);
    const CostBreakdown c = cost_components(inst, dec);
    for (int n = 0; n < inst.n_users; ++n) {
      EXPECT_NEAR(aux.alpha_u(n) * c.cost_u(n), 1.0, 1e-12);
      EXPECT_LT(rel_err(aux.theta_u(n), inst.c_u(n) * (1 - dec.phi_off(n)) * inst.d(n) / c.cost_u(n)), 1e-12);
      for (int m = 0; m < inst.n_servers; ++m) {
        if (dec.x(n, m) == 0.0) {
          EXPECT_EQ(aux.theta_s(n, m), 0.0);
          continue;
        }
        EXPECT_NEAR(aux.alpha_s(n, m) * c.cost_s(n, m), 1.0, 1e-12);
      }
    }
  }
}

TEST(Auxiliary, ThetaSumsToDpe) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const NetworkInstance inst = generate_network(ScenarioParams{}, seed);
    Rng rng(seed);
    const Decision dec = random_decision(inst, rng);
    const AuxState aux = update_auxiliary(inst, dec);
    const double dpe = dpe_objective(inst, dec);
    EXPECT_LT(rel_err(aux.theta_u.sum() + aux.theta_s.sum(), dpe), 1e-12);
    EXPECT_LT(rel_err(p3_value(inst, dec, aux), dpe), 1e-12);
  }
}

TEST(Auxiliary, DelayBoundsAreTight) {
  const NetworkInstance inst = generate_network(ScenarioParams{}, 4);
  Rng rng(4);
  const Decision dec = random_decision(inst, rng);
  const AuxState aux = update_auxiliary(inst, dec);
  const CostBreakdown c = cost_components(inst, dec);
  for (int n = 0; n < inst.n_users; ++n) {
    EXPECT_LT(rel_err(aux.T_u(n), c.t_up(n)), 1e-12);
    const int m = dec.server_of(n);
    EXPECT_LT(rel_err(aux.T_s(n, m), c.t_ut(n, m) + c.t_sp(n, m) + c.t_sg(n, m) + c.t_bp(n, m) + c.t_sv(n, m)),
              1e-12);
  }
}

TEST(Auxiliary, ProspectiveUsesConnectedCost) {
  const NetworkInstance inst = generate_network(ScenarioParams{}, 6);
  Rng rng(6);
  const Decision dec = random_decision(inst, rng);
  const AuxState aux = prospective_auxiliary(inst, dec);
  for (int n = 0; n < inst.n_users; ++n)
    for (int m = 0; m < inst.n_servers; ++m) {
      const double cost = pair_cost(inst, dec, n, m, 1.0).cost;
      EXPECT_NEAR(aux.alpha_s(n, m) * cost, 1.0, 1e-12);
      EXPECT_LT(rel_err(aux.theta_s(n, m), inst.c_s(n, m) * dec.phi_off(n) * inst.d(n) / cost), 1e-12);
    }
}

TEST(Upsilon, HandExample) {
  ScenarioParams p = small_params(1, 1);
  p.fading = false;
  NetworkInstance inst = generate_network(p, 1);
  inst.b(0) = 1e6;
  inst.p(0) = 1.0;
  inst.d(0) = 2e6;
  inst.gain(0, 0) = inst.sigma2 * 1e6;  // SNR 1 at full bandwidth: r = 1e6
  Decision dec = Decision::zeros(1, 1);
  dec.x(0, 0) = 1.0;
  dec.phi_off(0) = 0.5;
  dec.gamma(0, 0) = 0.5;
  dec.phi_bw(0, 0) = dec.zeta(0, 0) = dec.rho(0) = dec.psi(0) = 1.0;
  const MatrixXd u = update_upsilon(inst, dec);
  EXPECT_NEAR(u(0, 0) / 5e-13, 1.0, 1e-12);
}

TEST(Upsilon, ZeroOnUnconnectedPairs) {
  const NetworkInstance inst = generate_network(ScenarioParams{}, 2);
  Rng rng(2);
  const Decision dec = random_decision(inst, rng);
  const MatrixXd u = update_upsilon(inst, dec);
  for (int n = 0; n < inst.n_users; ++n)
    for (int m = 0; m < inst.n_servers; ++m) {
      if (dec.x(n, m) == 0.0) EXPECT_EQ(u(n, m), 0.0);
      else EXPECT_GT(u(n, m), 0.0);
    }
}

TEST(Upsilon, FormMatchesRatioFormAtUpdate) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const NetworkInstance inst = generate_network(ScenarioParams{}, seed);
    Rng rng(seed * 7);
    const Decision dec = random_decision(inst, rng);
    const MatrixXd u = update_upsilon(inst, dec);
    const int n = rng.index(inst.n_users), m = dec.server_of(n);
    const double ratio = pair_cost(inst, dec, n, m, 1.0).cost;
    EXPECT_LT(rel_err(upsilon_form_cost(inst, dec, n, m, u(n, m)), ratio), 1e-9);
  }
}

TEST(Upsilon, FormUpperBoundsElsewhere) {
  const NetworkInstance inst = generate_network(ScenarioParams{}, 3);
  Rng rng(3);
  const Decision dec = random_decision(inst, rng);
  const MatrixXd u = update_upsilon(inst, dec);
  for (int n = 0; n < inst.n_users; ++n) {
    const int m = dec.server_of(n);
    const double ratio = pair_cost(inst, dec, n, m, 1.0).cost;
    for (double scale : {0.1, 0.5, 0.9, 1.1, 2.0, 10.0})
      EXPECT_GE(upsilon_form_cost(inst, dec, n, m, scale * u(n, m)), ratio * (1 - 1e-12));
  }
}
