#include "daur/sdp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "daur/error.hpp"

namespace daur {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct FullEntry {
  int p;
  int q;
  double a;
};

// Both triangles expanded, so Tr(A Y) = sum a * Y(q, p) for any Y.
std::vector<std::vector<FullEntry>> expand(const SdpProblem& prob) {
  std::vector<std::vector<FullEntry>> out(prob.constraints.size());
  for (size_t i = 0; i < prob.constraints.size(); ++i) {
    for (const auto& e : prob.constraints[i].a.entries) {
      if (e.value == 0.0) continue;
      out[i].push_back({e.row, e.col, e.value});
      if (e.row != e.col) out[i].push_back({e.col, e.row, e.value});
    }
  }
  return out;
}

double trace_full(const std::vector<FullEntry>& a, const MatrixXd& Y) {
  double v = 0.0;
  for (const auto& e : a) v += e.a * Y(e.q, e.p);
  return v;
}

// Largest alpha with M + alpha * dM PSD, given a Cholesky factor of M.
double psd_step(const Eigen::LLT<MatrixXd>& chol, const MatrixXd& dM) {
  const auto L = chol.matrixL();
  MatrixXd T = L.solve(dM);
  T = L.solve(T.transpose()).transpose();
  T = 0.5 * (T + T.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(T, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  return lmin >= 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / lmin;
}

double lp_step(const VectorXd& x, const VectorXd& dx) {
  double a = std::numeric_limits<double>::infinity();
  for (int i = 0; i < x.size(); ++i)
    if (dx(i) < 0) a = std::min(a, -x(i) / dx(i));
  return a;
}

MatrixXd sym(const MatrixXd& A) { return 0.5 * (A + A.transpose()); }

}  // namespace

void SparseSym::add(int r, int c, double v) {
  if (r > c) std::swap(r, c);
  for (auto& e : entries) {
    if (e.row == r && e.col == c) {
      e.value += v;
      return;
    }
  }
  entries.push_back({r, c, v});
}

double SparseSym::trace_with(const MatrixXd& S) const {
  double v = 0.0;
  for (const auto& e : entries) {
    v += e.row == e.col ? e.value * S(e.row, e.row) : e.value * (S(e.row, e.col) + S(e.col, e.row));
  }
  return v;
}

MatrixXd SparseSym::dense(int dim) const {
  MatrixXd A = MatrixXd::Zero(dim, dim);
  for (const auto& e : entries) {
    A(e.row, e.col) += e.value;
    if (e.row != e.col) A(e.col, e.row) += e.value;
  }
  return A;
}

double min_eigenvalue(const MatrixXd& S) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym(S), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

SdpResult solve_sdp(const SdpProblem& prob, const SdpOptions& opt) {
  const int n = prob.dim;
  const int m = static_cast<int>(prob.constraints.size());
  if (prob.C.rows() != n || prob.C.cols() != n)
    throw Error(ErrorKind::DimensionMismatch, "C must be dim x dim");
  for (const auto& c : prob.constraints)
    for (const auto& e : c.a.entries)
      if (e.row < 0 || e.col < 0 || e.row >= n || e.col >= n)
        throw Error(ErrorKind::DimensionMismatch, "constraint entry outside the matrix");

  const auto A = expand(prob);
  // Work with a unit-scale objective; tolerances are relative to the data.
  const double c_scale = std::max(1.0, sym(prob.C).norm());
  const MatrixXd C = sym(prob.C) / c_scale;
  VectorXd b(m);
  std::vector<int> slack_of(m, -1);
  int p = 0;
  for (int i = 0; i < m; ++i) {
    b(i) = prob.constraints[i].b;
    if (prob.constraints[i].sense == Sense::LessEqual) slack_of[i] = p++;
  }

  // Starting point scaled to the data.
  double a_max = 0.0, ratio = 0.0;
  for (int i = 0; i < m; ++i) {
    double nrm = 0.0;
    for (const auto& e : A[i]) nrm += e.a * e.a;
    nrm = std::sqrt(nrm);
    a_max = std::max(a_max, nrm);
    ratio = std::max(ratio, (1.0 + std::abs(b(i))) / (1.0 + nrm));
  }
  const double xi = std::max({10.0, std::sqrt(double(n)), n * ratio});
  const double eta = std::max({10.0, std::sqrt(double(n)), a_max, C.norm()});
  MatrixXd X = xi * MatrixXd::Identity(n, n);
  MatrixXd Z = eta * MatrixXd::Identity(n, n);
  VectorXd xs = VectorXd::Constant(p, xi);
  VectorXd zs = VectorXd::Constant(p, eta);
  VectorXd y = VectorXd::Zero(m);

  const double b_norm = b.norm();
  const double c_norm = C.norm();
  auto aty = [&](const VectorXd& v) {
    MatrixXd S = MatrixXd::Zero(n, n);
    for (int i = 0; i < m; ++i)
      for (const auto& e : A[i]) S(e.p, e.q) += v(i) * e.a;
    return S;
  };
  auto slack_sum = [&](const VectorXd& v) {  // B * v
    VectorXd out = VectorXd::Zero(m);
    for (int i = 0; i < m; ++i)
      if (slack_of[i] >= 0) out(i) = v(slack_of[i]);
    return out;
  };
  auto slack_t = [&](const VectorXd& v) {  // B^T * v
    VectorXd out(p);
    for (int i = 0; i < m; ++i)
      if (slack_of[i] >= 0) out(slack_of[i]) = v(i);
    return out;
  };

  SdpResult res;
  ConvexStatus& st = res.status;
  MatrixXd Msch(m, m);
  int iter = 0;
  double best_kkt = std::numeric_limits<double>::infinity();
  int stalled = 0;
  for (; iter <= opt.max_iter; ++iter) {
    VectorXd AX(m);
    for (int i = 0; i < m; ++i) AX(i) = trace_full(A[i], X);
    const VectorXd Rp = b - AX - slack_sum(xs);
    const MatrixXd Rd = C - Z - aty(y);
    const VectorXd rd = -zs - slack_t(y);
    const double pobj = (C.cwiseProduct(X)).sum();
    const double dobj = b.dot(y);
    const double compl_gap = X.cwiseProduct(Z).sum() + xs.dot(zs);
    const double mu = compl_gap / (n + p);
    res.primal_infeasibility = Rp.norm() / (1.0 + b_norm);
    res.dual_infeasibility = (std::sqrt(Rd.squaredNorm() + rd.squaredNorm())) / (1.0 + c_norm);
    const double rel_gap = std::max(std::abs(pobj - dobj), compl_gap) /
                           (1.0 + std::abs(pobj) + std::abs(dobj));
    st.kkt_residual = std::max({res.primal_infeasibility, res.dual_infeasibility, rel_gap});
    res.primal_objective = pobj;
    res.dual_objective = dobj;
    if (st.kkt_residual <= opt.tol) {
      st.converged = true;
      break;
    }
    // Give up once rounding noise stops the residuals from shrinking.
    if (st.kkt_residual < 0.5 * best_kkt) {
      best_kkt = st.kkt_residual;
      stalled = 0;
    } else if (++stalled >= 5) {
      break;
    }
    if (dobj > 1e8 * (1.0 + c_norm) && res.dual_infeasibility < 1e-3) {
      st.infeasible = true;
      break;
    }
    if (X.norm() > 1e12 || !X.allFinite() || !Z.allFinite()) break;
    if (iter == opt.max_iter) break;

    Eigen::LLT<MatrixXd> cholZ(Z), cholX(X);
    if (cholZ.info() != Eigen::Success || cholX.info() != Eigen::Success) break;
    const MatrixXd W = cholZ.solve(MatrixXd::Identity(n, n));

    // Schur complement M_ij = Tr(A_i X A_j W) + slack terms.
    const double* xd = X.data();
    const double* wd = W.data();
    for (int i = 0; i < m; ++i) {
      for (int j = i; j < m; ++j) {
        double v = 0.0;
        for (const auto& ei : A[i]) {
          const double* xcol = xd + ei.q;  // X(ei.q, .) strided by n
          const double* wcol = wd + static_cast<size_t>(ei.p) * n;  // W(., ei.p)
          double inner = 0.0;
          for (const auto& ej : A[j]) inner += ej.a * xcol[static_cast<size_t>(ej.p) * n] * wcol[ej.q];
          v += ei.a * inner;
        }
        Msch(i, j) = v;
        Msch(j, i) = v;
      }
      if (slack_of[i] >= 0) Msch(i, i) += xs(slack_of[i]) / zs(slack_of[i]);
    }
    Eigen::LLT<MatrixXd> cholM(Msch);
    if (cholM.info() != Eigen::Success) {
      const double reg = 1e-14 * (1.0 + Msch.diagonal().cwiseAbs().maxCoeff());
      cholM.compute(Msch + reg * MatrixXd::Identity(m, m));
      if (cholM.info() != Eigen::Success) break;
    }
    const VectorXd dlp = xs.cwiseQuotient(zs);
    const MatrixXd XRdW = X * Rd * W;

    struct Dir {
      MatrixXd dX, dZ;
      VectorXd dy, dxs, dzs;
    };
    auto direction = [&](double sigma_mu, const MatrixXd* corrX, const MatrixXd* corrZ,
                         const VectorXd* corrx, const VectorXd* corrz) {
      MatrixXd G = sigma_mu * W - X - XRdW;
      if (corrX) G -= (*corrX) * (*corrZ) * W;
      VectorXd g = (VectorXd::Constant(p, sigma_mu) - xs.cwiseProduct(zs)).cwiseQuotient(zs);
      if (corrx) g -= corrx->cwiseProduct(*corrz).cwiseQuotient(zs);
      VectorXd rhs(m);
      for (int i = 0; i < m; ++i) rhs(i) = Rp(i) - trace_full(A[i], G);
      rhs -= slack_sum(g - dlp.cwiseProduct(rd));
      Dir d;
      d.dy = cholM.solve(rhs);
      d.dZ = Rd - aty(d.dy);
      d.dX = sym(G + X * aty(d.dy) * W);
      d.dzs = rd - slack_t(d.dy);
      d.dxs = g - dlp.cwiseProduct(d.dzs);
      return d;
    };
    auto steps = [&](const Dir& d) {
      double ap = psd_step(cholX, d.dX), ad = psd_step(cholZ, d.dZ);
      if (p > 0) {
        ap = std::min(ap, lp_step(xs, d.dxs));
        ad = std::min(ad, lp_step(zs, d.dzs));
      }
      return std::pair<double, double>{ap, ad};
    };

    const Dir pred = direction(0.0, nullptr, nullptr, nullptr, nullptr);
    auto [ap_a, ad_a] = steps(pred);
    ap_a = std::min(1.0, ap_a);
    ad_a = std::min(1.0, ad_a);
    const double mu_aff = ((X + ap_a * pred.dX).cwiseProduct(Z + ad_a * pred.dZ).sum() +
                           (xs + ap_a * pred.dxs).dot(zs + ad_a * pred.dzs)) /
                          (n + p);
    const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);
    const Dir dir = direction(sigma * mu, &pred.dX, &pred.dZ, &pred.dxs, &pred.dzs);
    auto [ap, ad] = steps(dir);
    const double gamma = 0.98;
    ap = std::min(1.0, gamma * ap);
    ad = std::min(1.0, gamma * ad);
    if (ap < 1e-12 && ad < 1e-12) break;
    X = sym(X + ap * dir.dX);
    xs += ap * dir.dxs;
    Z = sym(Z + ad * dir.dZ);
    zs += ad * dir.dzs;
    y += ad * dir.dy;
  }
  st.iterations = iter;
  res.primal_objective *= c_scale;
  res.dual_objective *= c_scale;
  st.objective = res.primal_objective;
  res.S = X;
  res.y = y * c_scale;
  return res;
}

}  // namespace daur
