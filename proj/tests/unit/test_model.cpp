#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "daur/error.hpp"
#include "daur/model.hpp"
#include "test_util.hpp"

using namespace daur;
using daur::testing::random_decision;
using daur::testing::rel_err;
using daur::testing::small_params;

namespace {

// Straight transcription of the delay/energy formulas, kept free of any
// helper from the library so it can act as an oracle.
struct OracleCosts {
  double t_up, e_up, cost_u;
  MatrixXd t_ut, e_ut, t_sp, e_sp, t_sg, e_sg, t_bp, t_sv, cost_s;
};

OracleCosts oracle_costs(const NetworkInstance& I, const Decision& D) {
  const int N = I.n_users, M = I.n_servers;
  OracleCosts o{};
  for (auto* m : {&o.t_ut, &o.e_ut, &o.t_sp, &o.e_sp, &o.t_sg, &o.e_sg, &o.t_bp, &o.t_sv, &o.cost_s})
    m->setZero(N, M);
  for (int n = 0; n < N; ++n) {
    for (int m = 0; m < M; ++m) {
      const double x = D.x(n, m), phi = D.phi_off(n), d = I.d(n);
      const double bw = D.phi_bw(n, m) * I.b(m);
      const double r = bw * std::log2(1.0 + I.gain(n, m) * D.rho(n) * I.p(n) / (I.sigma2 * bw));
      const double g = D.gamma(n, m), z = D.zeta(n, m), f = I.f_s(m);
      o.t_ut(n, m) = x * phi * d / r;
      o.e_ut(n, m) = x * D.rho(n) * I.p(n) * phi * d / r;
      o.t_sp(n, m) = x * phi * d * I.eta_s(m) / (g * z * f);
      o.e_sp(n, m) = I.kappa_s(m) * x * phi * d * I.eta_s(m) * std::pow(g * z * f, 2);
      o.t_sg(n, m) = x * phi * d * I.omega_b * I.eta_gen(m) / ((1 - g) * z * f);
      o.e_sg(n, m) = I.kappa_s(m) * x * phi * d * I.eta_gen(m) * I.omega_b * std::pow((1 - g) * z * f, 2);
      o.t_bp(n, m) = I.S_b / I.R_wired(m);
      double worst = 0.0;
      for (int k = 0; k < M; ++k)
        if (k != m) worst = std::max(worst, I.eta_v / ((1 - D.gamma(n, k)) * D.zeta(n, k) * I.f_s(k)));
      o.t_sv(n, m) = worst;
      o.cost_s(n, m) = I.omega_t * (o.t_ut(n, m) + o.t_sp(n, m) + o.t_sg(n, m) + o.t_bp(n, m) + o.t_sv(n, m)) +
                       I.omega_e * (o.e_ut(n, m) + o.e_sp(n, m) + o.e_sg(n, m));
    }
  }
  return o;
}

double oracle_dpe(const NetworkInstance& I, const Decision& D) {
  const OracleCosts o = oracle_costs(I, D);
  double total = 0.0;
  for (int n = 0; n < I.n_users; ++n) {
    const double w = (1 - D.phi_off(n)) * I.d(n) * I.eta_u(n);
    const double f = D.psi(n) * I.f_u(n);
    const double cost_u = I.omega_t * w / f + I.omega_e * I.kappa_u(n) * w * f * f;
    total += I.c_u(n) * (1 - D.phi_off(n)) * I.d(n) / cost_u;
    for (int m = 0; m < I.n_servers; ++m)
      if (D.x(n, m) > 0) total += I.c_s(n, m) * D.x(n, m) * D.phi_off(n) * I.d(n) / o.cost_s(n, m);
  }
  return total;
}

NetworkInstance no_fading(int N, int M, std::uint64_t seed) {
  ScenarioParams p = small_params(N, M);
  p.fading = false;
  return generate_network(p, seed);
}

}  // namespace

TEST(PathLoss, ReferenceDistances) {
  EXPECT_NEAR(path_loss_db(1000.0), 128.1, 1e-12);
  EXPECT_NEAR(path_loss_db(100.0), 90.5, 1e-12);
}

TEST(GenerateNetwork, GainMatchesPathLossWithoutFading) {
  const NetworkInstance inst = no_fading(5, 3, 4);
  for (int n = 0; n < 5; ++n)
    for (int m = 0; m < 3; ++m) {
      const double dist = (inst.user_pos.row(n) - inst.server_pos.row(m)).norm();
      const double pl = 128.1 + 37.6 * std::log10(std::max(dist, 1.0) / 1000.0);
      EXPECT_LT(rel_err(inst.gain(n, m), std::pow(10.0, -pl / 10.0)), 1e-12);
    }
}

TEST(GenerateNetwork, DefaultsAndRanges) {
  const ScenarioParams p;
  const NetworkInstance inst = generate_network(p, 11);
  EXPECT_EQ(inst.n_users, 10);
  EXPECT_EQ(inst.n_servers, 2);
  EXPECT_NO_THROW(inst.validate());
  for (int n = 0; n < inst.n_users; ++n) {
    EXPECT_LE(inst.user_pos.row(n).norm(), p.radius_m);
    EXPECT_GE(inst.d(n), 500 * 8e3);
    EXPECT_LE(inst.d(n), 2000 * 8e3);
    for (int m = 0; m < inst.n_servers; ++m) EXPECT_GT(inst.gain(n, m), 0.0);
  }
  EXPECT_DOUBLE_EQ(inst.S_b, 8.0 * 8e6);
  EXPECT_DOUBLE_EQ(inst.eta_v, 737.5 * 8.0 * 8e6 * 1e-3);
  EXPECT_NEAR(inst.sigma2, std::pow(10.0, -13.4) * 1e-3, 1e-30);
  EXPECT_DOUBLE_EQ(inst.c_u(0), 2e-6);
}

TEST(GenerateNetwork, DeterministicPerSeed) {
  const ScenarioParams p;
  EXPECT_EQ(snapshot_csv(generate_network(p, 3)), snapshot_csv(generate_network(p, 3)));
  EXPECT_NE(snapshot_csv(generate_network(p, 3)), snapshot_csv(generate_network(p, 4)));
}

TEST(GenerateNetwork, MixedPreferenceKeepsTopology) {
  ScenarioParams fixed, mixed;
  mixed.preference_mode = "mixed";
  const auto a = generate_network(fixed, 9), b = generate_network(mixed, 9);
  EXPECT_EQ(a.gain, b.gain);
  EXPECT_EQ(a.d, b.d);
  EXPECT_NE(a.c_u, b.c_u);
  EXPECT_GE(b.c_u.minCoeff(), 0.0);
  EXPECT_LE(b.c_u.maxCoeff(), fixed.preference_base);
}

TEST(GenerateNetwork, RejectsBadParameters) {
  ScenarioParams p;
  p.radius_m = 0;
  EXPECT_THROW(generate_network(p, 1), Error);
  p = {};
  p.n_users = 0;
  EXPECT_THROW(generate_network(p, 1), Error);
}

TEST(GenerateNetwork, MatchesGoldenSnapshot) {
  const std::string path = std::string(DAUR_TEST_DATA_DIR) + "/snapshot_seed1.csv";
  std::ifstream f(path, std::ios::binary);
  ASSERT_TRUE(f) << "missing " << path;
  std::stringstream golden;
  golden << f.rdbuf();
  const NetworkInstance inst = generate_network(ScenarioParams{}, 1);
  EXPECT_NO_THROW(inst.validate());
  EXPECT_EQ(snapshot_csv(inst), golden.str());
}

TEST(Rate, UnitSnrGivesBandwidth) {
  NetworkInstance inst = no_fading(1, 1, 1);
  inst.b(0) = 1e6;
  inst.p(0) = 1.0;
  inst.gain(0, 0) = inst.sigma2 * 1e6;  // g p = sigma2 * phi * b
  EXPECT_NEAR(transmission_rate(inst, 0, 0, 1.0, 1.0), 1e6, 1e-6);
  inst.gain(0, 0) = 3.0 * inst.sigma2 * 1e6;
  EXPECT_NEAR(transmission_rate(inst, 0, 0, 1.0, 1.0), 2e6, 1e-6);
}

TEST(Rate, MatchesHandEvaluation) {
  const NetworkInstance inst = generate_network(ScenarioParams{}, 2);
  const double phi = 0.37, rho = 0.81;
  const double bw = phi * 10e6;
  const double sigma2 = std::pow(10.0, (-134.0 - 30.0) / 10.0);
  const double expect = bw * std::log2(1.0 + inst.gain(3, 1) * rho * 0.2 / (sigma2 * bw));
  EXPECT_LT(rel_err(transmission_rate(inst, 3, 1, phi, rho), expect), 1e-12);
}

TEST(Rate, MonotoneInRhoGainAndBandwidth) {
  NetworkInstance inst = generate_network(ScenarioParams{}, 5);
  Rng rng(17);
  for (int t = 0; t < 200; ++t) {
    const int n = rng.index(inst.n_users), m = rng.index(inst.n_servers);
    const double phi = rng.uniform(0.01, 0.99), rho = rng.uniform(0.01, 0.99);
    const double r = transmission_rate(inst, n, m, phi, rho);
    EXPECT_GT(transmission_rate(inst, n, m, phi, rho * 1.01), r);
    EXPECT_GT(transmission_rate(inst, n, m, phi * 1.01, rho), r);
    NetworkInstance louder = inst;
    louder.gain(n, m) *= 1.01;
    EXPECT_GT(transmission_rate(louder, n, m, phi, rho), r);
  }
}

TEST(Rate, ZeroBandwidthIsUndefined) {
  const NetworkInstance inst = generate_network(ScenarioParams{}, 1);
  try {
    transmission_rate(inst, 0, 0, 0.0, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::RateUndefined);
  }
}

TEST(Costs, MatchIndependentTranscription) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const NetworkInstance inst = generate_network(small_params(3, 2), seed);
    Rng rng(seed * 31);
    const Decision dec = random_decision(inst, rng);
    const CostBreakdown c = cost_components(inst, dec);
    const OracleCosts o = oracle_costs(inst, dec);
    for (int n = 0; n < 3; ++n) {
      const double w = (1 - dec.phi_off(n)) * inst.d(n) * inst.eta_u(n);
      const double f = dec.psi(n) * inst.f_u(n);
      EXPECT_LT(rel_err(c.t_up(n), w / f), 1e-12);
      EXPECT_LT(rel_err(c.e_up(n), inst.kappa_u(n) * w * f * f), 1e-12);
      for (int m = 0; m < 2; ++m) {
        EXPECT_LT(rel_err(c.t_ut(n, m), o.t_ut(n, m)), 1e-12);
        EXPECT_LT(rel_err(c.e_ut(n, m), o.e_ut(n, m)), 1e-12);
        EXPECT_LT(rel_err(c.t_sp(n, m), o.t_sp(n, m)), 1e-12);
        EXPECT_LT(rel_err(c.e_sp(n, m), o.e_sp(n, m)), 1e-12);
        EXPECT_LT(rel_err(c.t_sg(n, m), o.t_sg(n, m)), 1e-12);
        EXPECT_LT(rel_err(c.e_sg(n, m), o.e_sg(n, m)), 1e-12);
        EXPECT_LT(rel_err(c.t_bp(n, m), o.t_bp(n, m)), 1e-12);
        EXPECT_LT(rel_err(c.t_sv(n, m), o.t_sv(n, m)), 1e-12);
        EXPECT_LT(rel_err(c.cost_s(n, m), o.cost_s(n, m)), 1e-12);
      }
    }
    EXPECT_LT(rel_err(dpe_objective(inst, dec), oracle_dpe(inst, dec)), 1e-12);
  }
}

TEST(Costs, UserCostIsWeightedSum) {
  const NetworkInstance inst = generate_network(ScenarioParams{}, 8);
  Rng rng(8);
  const Decision dec = random_decision(inst, rng);
  const CostBreakdown c = cost_components(inst, dec);
  for (int n = 0; n < inst.n_users; ++n)
    EXPECT_EQ(c.cost_u(n), inst.omega_t * c.t_up(n) + inst.omega_e * c.e_up(n));
}

TEST(Costs, ZeroAndFullOffload) {
  const NetworkInstance inst = generate_network(small_params(3, 2), 6);
  Rng rng(6);
  Decision dec = random_decision(inst, rng);
  dec.phi_off(0) = 0.0;
  dec.phi_off(1) = 1.0;
  const CostBreakdown c = cost_components(inst, dec);
  for (int m = 0; m < 2; ++m) {
    EXPECT_EQ(c.t_ut(0, m), 0.0);
    EXPECT_EQ(c.e_ut(0, m), 0.0);
    EXPECT_EQ(c.t_sp(0, m), 0.0);
    EXPECT_EQ(c.e_sp(0, m), 0.0);
    EXPECT_EQ(c.t_sg(0, m), 0.0);
    EXPECT_EQ(c.e_sg(0, m), 0.0);
  }
  EXPECT_EQ(c.t_up(1), 0.0);
  EXPECT_EQ(c.e_up(1), 0.0);
}

TEST(Costs, PositiveForInteriorOffload) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const NetworkInstance inst = generate_network(ScenarioParams{}, seed);
    Rng rng(seed);
    const Decision dec = random_decision(inst, rng);
    const CostBreakdown c = cost_components(inst, dec);
    EXPECT_GT(c.cost_u.minCoeff(), 0.0);
    for (int n = 0; n < inst.n_users; ++n) {
      const int m = dec.server_of(n);
      for (const MatrixXd* part : {&c.t_ut, &c.e_ut, &c.t_sp, &c.e_sp, &c.t_sg, &c.e_sg, &c.t_bp, &c.t_sv})
        EXPECT_GT((*part)(n, m), 0.0);
    }
  }
}

TEST(Dpe, ZeroWeightsGiveZero) {
  NetworkInstance inst = generate_network(ScenarioParams{}, 2);
  inst.c_u.setZero();
  inst.c_s.setZero();
  Rng rng(2);
  EXPECT_EQ(dpe_objective(inst, random_decision(inst, rng)), 0.0);
}

TEST(Dpe, ScalesLinearlyWithWeights) {
  NetworkInstance inst = generate_network(ScenarioParams{}, 3);
  Rng rng(3);
  const Decision dec = random_decision(inst, rng);
  const double base = dpe_objective(inst, dec);
  inst.c_u *= 4.0;
  inst.c_s *= 4.0;
  EXPECT_DOUBLE_EQ(dpe_objective(inst, dec), 4.0 * base);
}

TEST(Dpe, SingleLocalUser) {
  NetworkInstance inst = generate_network(small_params(1, 1), 1);
  Decision dec = Decision::zeros(1, 1);
  dec.x(0, 0) = 1.0;
  dec.phi_off(0) = 0.0;
  dec.gamma(0, 0) = 0.5;
  dec.phi_bw(0, 0) = dec.zeta(0, 0) = dec.rho(0) = dec.psi(0) = 1.0;
  // Pick c_u so that c_u * d / cost_u = 5.
  const double cost = cost_components(inst, dec).cost_u(0);
  inst.c_u(0) = 5.0 * cost / inst.d(0);
  EXPECT_NEAR(dpe_objective(inst, dec), 5.0, 1e-12);
}

TEST(Dpe, RequiresOneHotAssociation) {
  const NetworkInstance inst = generate_network(ScenarioParams{}, 1);
  Rng rng(1);
  Decision dec = random_decision(inst, rng);
  dec.x(0, 0) = 0.5;
  dec.x(0, 1) = 0.5;
  EXPECT_THROW(dpe_objective(inst, dec), Error);
}

TEST(Dpe, NonPositiveCostIsDegenerate) {
  NetworkInstance inst = generate_network(ScenarioParams{}, 1);
  inst.omega_t = inst.omega_e = 0.0;
  Rng rng(1);
  try {
    dpe_objective(inst, random_decision(inst, rng));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ModelDegeneracy);
  }
}

TEST(Feasibility, DetectsViolations) {
  const NetworkInstance inst = generate_network(ScenarioParams{}, 1);
  Rng rng(1);
  const Decision ok = random_decision(inst, rng);
  EXPECT_EQ(feasibility_error(inst, ok), "");

  Decision two = ok;
  two.x.row(0).setOnes();
  EXPECT_NE(feasibility_error(inst, two), "");

  Decision over = ok;
  for (int n = 0; n < inst.n_users; ++n) over.phi_bw(n, over.server_of(n)) = 0.9;
  EXPECT_NE(feasibility_error(inst, over), "");

  Decision ratio = ok;
  ratio.rho(2) = 1.5;
  EXPECT_NE(feasibility_error(inst, ratio), "");
}
