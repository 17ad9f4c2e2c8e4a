#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "daur/error.hpp"
#include "daur/qcqp.hpp"
#include "test_util.hpp"

using namespace daur;
using daur::testing::random_decision;
using daur::testing::rel_err;
using daur::testing::small_params;

namespace {

struct Fixture {
  NetworkInstance inst;
  Decision dec;
  AuxState aux;
  QcqpData q;
};

Fixture make(int N, int M, std::uint64_t seed) {
  Fixture f;
  f.inst = generate_network(small_params(N, M), seed);
  Rng rng(seed + 1000);
  f.dec = random_decision(f.inst, rng);
  f.dec.gamma.setConstant(optimal_gamma(f.inst.omega_b));
  f.aux = prospective_auxiliary(f.inst, f.dec);
  f.q = assemble_qcqp(f.inst, f.dec, f.aux, 0.999);
  return f;
}

VectorXd random_q(const QcqpData& q, Rng& rng) {
  VectorXd Q(q.dim());
  for (int i = 0; i < q.dim(); ++i) Q(i) = rng.uniform();
  return Q;
}

// T_sp + T_sg for unit load, as a function of gamma.
double split_delay(const NetworkInstance& inst, double g) {
  return inst.eta_s(0) / g + inst.omega_b * inst.eta_gen(0) / (1.0 - g);
}

double scan_minimizer(const NetworkInstance& inst, int points) {
  double best = std::numeric_limits<double>::infinity(), arg = 0.0;
  for (int i = 1; i <= points; ++i) {
    const double g = double(i) / (points + 1);
    const double v = split_delay(inst, g);
    if (v < best) best = v, arg = g;
  }
  return arg;
}

}  // namespace

TEST(OptimalGamma, Values) {
  EXPECT_DOUBLE_EQ(optimal_gamma(1.0), 0.5);
  EXPECT_DOUBLE_EQ(optimal_gamma(3.0), 0.25);
  EXPECT_THROW(optimal_gamma(0.0), Error);
}

TEST(OptimalGamma, ScanAgreesWithStationaryPoint) {
  // d/dg (a/g + b/(1-g)) = 0  =>  g = sqrt(a) / (sqrt(a) + sqrt(b)).
  for (double wb : {0.5, 1.0, 2.0}) {
    for (bool single_eta : {true, false}) {
      ScenarioParams p;
      p.omega_b = wb;
      if (single_eta) p.eta_gen = p.eta_server;
      const NetworkInstance inst = generate_network(p, 1);
      const double a = inst.eta_s(0), b = wb * inst.eta_gen(0);
      const double closed = std::sqrt(a) / (std::sqrt(a) + std::sqrt(b));
      EXPECT_NEAR(scan_minimizer(inst, 10000), closed, 1.0 / 10001);
      if (single_eta && wb == 1.0) EXPECT_NEAR(closed, optimal_gamma(wb), 1e-12);
    }
  }
}

TEST(Qcqp, QuadraticFormMatchesDoubleSum) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const Fixture f = make(3 + seed % 5, 2 + seed % 2, seed);
    Rng rng(seed);
    const VectorXd Q = random_q(f.q, rng);
    MatrixXd x;
    VectorXd phi;
    unstack_q(f.q, Q, x, phi);
    double direct = 0.0, linear = 0.0;
    for (int n = 0; n < f.q.n_users; ++n) {
      linear += f.q.A(n) * phi(n);
      for (int m = 0; m < f.q.n_servers; ++m) direct += f.q.B(n, m) * x(n, m) * phi(n);
    }
    EXPECT_LE(std::abs(Q.dot(f.q.P0 * Q) - direct), 1e-10 * (1 + std::abs(direct)));
    EXPECT_LE(std::abs(f.q.W0.dot(Q) - linear), 1e-10 * (1 + std::abs(linear)));
  }
}

TEST(Qcqp, ZeroPointGivesConstant) {
  const Fixture f = make(4, 2, 5);
  EXPECT_DOUBLE_EQ(qcqp_objective(f.q, VectorXd::Zero(f.q.dim()), 0.0, 0.0), f.q.C);
}

TEST(Qcqp, NegatingCoefficientsNegatesQPart) {
  Fixture f = make(4, 2, 6);
  Rng rng(6);
  const VectorXd Q = random_q(f.q, rng);
  const double part = qcqp_objective(f.q, Q, 0, 0) - f.q.C;
  QcqpData neg = f.q;
  neg.P0 = -neg.P0;
  neg.W0 = -neg.W0;
  neg.C = -neg.C;
  EXPECT_NEAR(qcqp_objective(neg, Q, 0, 0) - neg.C, -part, 1e-12 * (1 + std::abs(part)));
}

TEST(Qcqp, TightMinFormIsNegatedMaxForm) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const Fixture f = make(2 + seed % 4, 2, seed);
    const VectorXd Q = stack_q(f.dec.x, f.dec.phi_off);
    const double min_form = qcqp_objective(f.q, Q, qcqp_tu(f.q, Q), qcqp_ts(f.q, Q));
    const double max_form = p7_objective(f.inst, f.dec, f.aux);
    EXPECT_LT(rel_err(min_form, -max_form), 1e-10) << "seed " << seed;
  }
}

TEST(Qcqp, ArgminMatchesArgmaxOnTinyGrid) {
  const Fixture f = make(2, 2, 9);
  double best_min = std::numeric_limits<double>::infinity(), best_max = -best_min;
  int arg_min = -1, arg_max = -1, idx = 0;
  for (int a0 = 0; a0 < 2; ++a0)
    for (int a1 = 0; a1 < 2; ++a1)
      for (double p0 : {0.0, 0.5, 1.0})
        for (double p1 : {0.0, 0.5, 1.0}) {
          Decision d = f.dec;
          d.x.setZero();
          d.x(0, a0) = d.x(1, a1) = 1.0;
          d.phi_off << p0, p1;
          const VectorXd Q = stack_q(d.x, d.phi_off);
          const double mn = qcqp_objective(f.q, Q, qcqp_tu(f.q, Q), qcqp_ts(f.q, Q));
          const double mx = p7_objective(f.inst, d, f.aux);
          if (mn < best_min) best_min = mn, arg_min = idx;
          if (mx > best_max) best_max = mx, arg_max = idx;
          ++idx;
        }
  EXPECT_EQ(arg_min, arg_max);
}

TEST(Qcqp, StackRoundTrip) {
  const Fixture f = make(5, 3, 2);
  const VectorXd Q = stack_q(f.dec.x, f.dec.phi_off);
  EXPECT_EQ(Q(f.q.x_index(3, 2)), f.dec.x(3, 2));
  EXPECT_EQ(Q(f.q.phi_index(4)), f.dec.phi_off(4));
  MatrixXd x;
  VectorXd phi;
  unstack_q(f.q, Q, x, phi);
  EXPECT_EQ(x, f.dec.x);
  EXPECT_EQ(phi, f.dec.phi_off);
}

TEST(Qcqp, RequiresOptimalGamma) {
  Fixture f = make(3, 2, 1);
  f.dec.gamma(0, 0) = 0.3;
  try {
    assemble_qcqp(f.inst, f.dec, f.aux);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ContractViolation);
  }
}

TEST(Qcqp, DimensionChecks) {
  const Fixture f = make(3, 2, 1);
  EXPECT_THROW(qcqp_objective(f.q, VectorXd::Zero(2), 0, 0), Error);
  EXPECT_THROW(stack_q(f.dec.x, VectorXd::Zero(2)), Error);
}
