#include "daur/sdr.hpp"

#include <cmath>
#include <ostream>

#include "daur/error.hpp"

namespace daur {

SdpProblem SdrData::problem(const MatrixXd& C) const {
  SdpProblem p;
  p.dim = dim;
  p.C = C;
  p.constraints.push_back({corner, 1.0, Sense::Equal});
  for (const auto& a : P2) p.constraints.push_back({a, 0.0, Sense::Equal});
  for (const auto& a : P3) p.constraints.push_back({a, 0.0, Sense::Equal});
  for (const auto* family : {&P4_upper, &P4_lower, &P5, &P6, &valid})
    for (const auto& a : *family) p.constraints.push_back({a, 0.0, Sense::LessEqual});
  return p;
}

SdrData lift_to_sdr(const QcqpData& q, double varpi, double t_u, double t_s) {
  if (!(varpi > 0.0)) throw Error(ErrorKind::InvalidParameter, "varpi must be > 0");
  const int N = q.n_users, M = q.n_servers;
  const int k = q.dim();
  if (q.P0.rows() != k || q.W0.size() != k || q.P0_Ts.rows() != k || q.P2_Tu.size() != k)
    throw Error(ErrorKind::DimensionMismatch, "QCQP matrices do not match N + NM");
  SdrData s;
  s.dim = k + 1;
  s.n_users = N;
  s.n_servers = M;
  s.varpi = varpi;
  const int l = k;

  s.P1 = MatrixXd::Zero(s.dim, s.dim);
  s.P1.topLeftCorner(k, k) = q.P0;
  s.P1.col(l).head(k) = 0.5 * q.W0;
  s.P1.row(l).head(k) = 0.5 * q.W0.transpose();
  s.P1(l, l) = t_u + t_s + q.C;

  s.P7 = MatrixXd::Zero(s.dim, s.dim);
  s.P7.col(l).head(k) = 0.5 * q.P2_Tu;
  s.P7.row(l).head(k) = 0.5 * q.P2_Tu.transpose();
  s.P7(l, l) = q.P1_Tu;

  s.P8 = MatrixXd::Zero(s.dim, s.dim);
  s.P8.topLeftCorner(k, k) = q.P0_Ts;
  s.P8(l, l) = q.P1_Ts;

  s.objective = s.P1 + s.P7 + s.P8;
  s.objective(l, l) = q.C + q.P1_Tu + q.P1_Ts;

  s.corner.add(l, l, 1.0);
  for (int m = 0; m < M; ++m) {
    for (int n = 0; n < N; ++n) {
      const int xi = q.x_index(n, m);
      SparseSym a;
      a.add(xi, xi, 1.0);
      a.add(xi, l, -0.5);
      s.P2.push_back(a);
    }
  }
  for (int n = 0; n < N; ++n) {
    SparseSym a;
    for (int m = 0; m < M; ++m) a.add(q.x_index(n, m), l, 0.5);
    a.add(l, l, -1.0);
    s.P3.push_back(a);

    SparseSym hi, lo;
    hi.add(n, l, 0.5);
    hi.add(l, l, -q.offload_hi);
    lo.add(n, l, -0.5);
    lo.add(l, l, q.offload_lo);
    s.P4_upper.push_back(hi);
    s.P4_lower.push_back(lo);

    SparseSym sq;  // phi^2 - phi <= 0
    sq.add(n, n, 1.0);
    sq.add(n, l, -0.5);
    s.valid.push_back(sq);
    for (int m = 0; m < M; ++m) {
      const int xi = q.x_index(n, m);
      SparseSym up, nonneg;  // phi x - x <= 0 and -phi x <= 0
      up.add(n, xi, 0.5);
      up.add(xi, l, -0.5);
      nonneg.add(n, xi, -0.5);
      s.valid.push_back(up);
      s.valid.push_back(nonneg);
    }
  }
  for (int m = 0; m < M; ++m) {
    SparseSym bw, cpu;
    for (int n = 0; n < N; ++n) {
      bw.add(q.x_index(n, m), l, 0.5 * q.phi_bw_vec(m * N + n));
      cpu.add(q.x_index(n, m), l, 0.5 * q.zeta_vec(m * N + n));
    }
    bw.add(l, l, -1.0);
    cpu.add(l, l, -1.0);
    s.P5.push_back(bw);
    s.P6.push_back(cpu);
  }
  return s;
}

MatrixXd lift_q(const VectorXd& Q) {
  VectorXd v(Q.size() + 1);
  v.head(Q.size()) = Q;
  v(Q.size()) = 1.0;
  return v * v.transpose();
}

double dc_penalty(const MatrixXd& S) {
  if (S.rows() != S.cols()) throw Error(ErrorKind::DimensionMismatch, "S must be square");
  if ((S - S.transpose()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + S.cwiseAbs().maxCoeff()))
    throw Error(ErrorKind::ContractViolation, "S must be symmetric");
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(S, Eigen::EigenvaluesOnly);
  return S.trace() - es.eigenvalues()(S.rows() - 1);
}

VectorXd leading_eigenvector(const MatrixXd& S) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (S + S.transpose()));
  return es.eigenvectors().col(S.rows() - 1);
}

VectorXd extract_q(const MatrixXd& S) {
  const int l = static_cast<int>(S.rows()) - 1;
  const double corner = S(l, l);
  if (!(corner > 1e-8)) throw Error(ErrorKind::ExtractionDegenerate, "corner entry of S is ~0");
  return S.col(l).head(l) / corner;
}

SdpResult solve_sdr(const SdrData& sdr, const SdpOptions& options) {
  SdpResult r = solve_sdp(sdr.problem(sdr.objective), options);
  if (r.status.infeasible) throw Error(ErrorKind::Infeasible, "relaxation is infeasible");
  return r;
}

DcResult dc_solve(const SdrData& sdr, const MatrixXd& S_init, double eps2, int max_rounds,
                  const SdpOptions& options) {
  if (S_init.rows() != sdr.dim || S_init.cols() != sdr.dim)
    throw Error(ErrorKind::DimensionMismatch, "S_init has the wrong size");
  auto penalized = [&](const MatrixXd& S, double& pen) {
    pen = dc_penalty(S);
    return sdr.objective.cwiseProduct(S).sum() + sdr.varpi * pen;
  };
  DcResult res;
  res.S = 0.5 * (S_init + S_init.transpose());
  double pen = 0.0;
  double prev = penalized(res.S, pen);
  res.trace.push_back({0, prev, pen});
  res.penalty = pen;
  res.status.converged = true;
  res.status.objective = prev;
  const MatrixXd I = MatrixXd::Identity(sdr.dim, sdr.dim);
  for (int round = 1; round <= max_rounds; ++round) {
    const VectorXd se = leading_eigenvector(res.S);
    const MatrixXd C = sdr.objective + sdr.varpi * (I - se * se.transpose());
    const SdpResult r = solve_sdp(sdr.problem(C), options);
    res.sdp_iterations += r.status.iterations;
    if (r.status.infeasible) throw Error(ErrorKind::Infeasible, "penalized relaxation is infeasible");
    const MatrixXd S = 0.5 * (r.S + r.S.transpose());
    double next_pen = 0.0;
    const double obj = penalized(S, next_pen);
    // Changes below the sub-solver's precision are noise.
    const double floor = options.tol * (1.0 + C.norm());
    // The previous iterate is feasible for this round at value `prev`, so a
    // worse answer means the sub-solve failed; keep what we have.
    if (!r.status.converged || obj > prev + floor) {
      res.rejected_rounds = 1;
      break;
    }
    pen = next_pen;
    res.status = r.status;
    res.trace.push_back({round, obj, pen});
    res.S = S;
    res.penalty = pen;
    res.status.iterations = round;
    res.status.objective = obj;
    if (std::abs(obj - prev) <= eps2 * std::abs(prev) + floor) break;
    prev = obj;
  }
  res.Q = extract_q(res.S);
  return res;
}

void write_dc_trace_csv(std::ostream& out, const std::vector<DcTraceRow>& trace) {
  out << "round,objective,penalty\n";
  out.precision(17);
  for (const auto& row : trace) out << row.round << ',' << row.objective << ',' << row.penalty << '\n';
}

}  // namespace daur
