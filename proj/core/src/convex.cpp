#include "daur/convex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "daur/error.hpp"

namespace daur {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Slacks {
  VectorXd g, lo, up;
};

class Barrier {
 public:
  Barrier(const ConcaveProblem& p) : p_(p) {
    has_lo_.resize(p.dim);
    has_up_.resize(p.dim);
    m_ = static_cast<int>(p.G.rows());
    for (int i = 0; i < p.dim; ++i) {
      has_lo_[i] = p.lower.size() == p.dim && std::isfinite(p.lower(i));
      has_up_[i] = p.upper.size() == p.dim && std::isfinite(p.upper(i));
      m_ += has_lo_[i] + has_up_[i];
    }
  }

  int constraint_count() const { return m_; }

  // Returns false if z is not strictly inside.
  bool slacks(const VectorXd& z, Slacks& s) const {
    s.g = p_.G.rows() ? VectorXd(p_.h - p_.G * z) : VectorXd();
    s.lo = VectorXd::Ones(p_.dim);
    s.up = VectorXd::Ones(p_.dim);
    for (int i = 0; i < p_.dim; ++i) {
      if (has_lo_[i]) s.lo(i) = z(i) - p_.lower(i);
      if (has_up_[i]) s.up(i) = p_.upper(i) - z(i);
    }
    return (s.g.size() == 0 || (s.g.array() > 0).all()) && (s.lo.array() > 0).all() &&
           (s.up.array() > 0).all();
  }

  double log_barrier(const Slacks& s) const {
    double v = 0.0;
    for (int i = 0; i < s.g.size(); ++i) v += std::log(s.g(i));
    for (int i = 0; i < p_.dim; ++i) {
      if (has_lo_[i]) v += std::log(s.lo(i));
      if (has_up_[i]) v += std::log(s.up(i));
    }
    return v;
  }

  // Gradient and Hessian of sum(log s).
  void barrier_derivatives(const Slacks& s, VectorXd& grad, MatrixXd& hess) const {
    grad = VectorXd::Zero(p_.dim);
    hess = MatrixXd::Zero(p_.dim, p_.dim);
    if (s.g.size()) {
      const VectorXd inv = s.g.cwiseInverse();
      grad -= p_.G.transpose() * inv;
      hess -= p_.G.transpose() * inv.cwiseAbs2().asDiagonal() * p_.G;
    }
    for (int i = 0; i < p_.dim; ++i) {
      if (has_lo_[i]) {
        grad(i) += 1.0 / s.lo(i);
        hess(i, i) -= 1.0 / (s.lo(i) * s.lo(i));
      }
      if (has_up_[i]) {
        grad(i) -= 1.0 / s.up(i);
        hess(i, i) -= 1.0 / (s.up(i) * s.up(i));
      }
    }
  }

  double max_step(const VectorXd& z, const VectorXd& dz, const Slacks& s) const {
    double a = std::numeric_limits<double>::infinity();
    if (s.g.size()) {
      const VectorXd ds = -(p_.G * dz);
      for (int i = 0; i < ds.size(); ++i)
        if (ds(i) < 0) a = std::min(a, -s.g(i) / ds(i));
    }
    for (int i = 0; i < p_.dim; ++i) {
      if (has_lo_[i] && dz(i) < 0) a = std::min(a, -s.lo(i) / dz(i));
      if (has_up_[i] && dz(i) > 0) a = std::min(a, s.up(i) / dz(i));
    }
    (void)z;
    return a;
  }

  // Scaled stationarity of the barrier multipliers at (z, t).
  double stationarity(const VectorXd& grad_f, const Slacks& s, double t) const {
    VectorXd r = grad_f;
    if (s.g.size()) r -= p_.G.transpose() * (s.g.cwiseInverse() / t);
    for (int i = 0; i < p_.dim; ++i) {
      if (has_lo_[i]) r(i) += 1.0 / (t * s.lo(i));
      if (has_up_[i]) r(i) -= 1.0 / (t * s.up(i));
    }
    return r.lpNorm<Eigen::Infinity>() / (1.0 + grad_f.lpNorm<Eigen::Infinity>());
  }

 private:
  const ConcaveProblem& p_;
  std::vector<char> has_lo_, has_up_;
  int m_ = 0;
};

}  // namespace

std::pair<VectorXd, ConvexStatus> solve_concave(const ConcaveProblem& problem,
                                                const VectorXd& start,
                                                const ConcaveOptions& opt) {
  if (start.size() != problem.dim)
    throw Error(ErrorKind::DimensionMismatch, "start has wrong dimension");
  if (problem.G.rows() != problem.h.size() || (problem.G.rows() && problem.G.cols() != problem.dim))
    throw Error(ErrorKind::DimensionMismatch, "G/h dimensions inconsistent");

  Barrier barrier(problem);
  Slacks s;
  if (!barrier.slacks(start, s)) throw Error(ErrorKind::Infeasible, "start is not strictly feasible");

  VectorXd z = start;
  VectorXd grad_f(problem.dim), grad_b;
  MatrixXd hess_f(problem.dim, problem.dim), hess_b;
  double f = problem.eval(z, &grad_f, &hess_f);
  if (!std::isfinite(f)) throw Error(ErrorKind::Infeasible, "objective undefined at start");
  const double f_start = f;

  const int m = barrier.constraint_count();
  barrier.barrier_derivatives(s, grad_b, hess_b);
  double t = opt.t0;
  if (grad_f.norm() > 0 && m > 0) t = std::clamp(grad_b.norm() / grad_f.norm(), 1e-6, 1e6);
  if (m == 0) t = 1.0;

  ConvexStatus st;
  int newton = 0;
  double stat = 1.0;
  for (;;) {
    // Centering by damped Newton.
    for (; newton < opt.max_newton; ++newton) {
      barrier.barrier_derivatives(s, grad_b, hess_b);
      const VectorXd g = t * grad_f + grad_b;
      MatrixXd negH = -(t * hess_f + hess_b);
      Eigen::LLT<MatrixXd> llt(negH);
      double reg = 0.0;
      while (llt.info() != Eigen::Success) {
        reg = reg == 0.0 ? 1e-12 * (1.0 + negH.diagonal().cwiseAbs().maxCoeff()) : reg * 10.0;
        llt.compute(negH + reg * MatrixXd::Identity(problem.dim, problem.dim));
      }
      const VectorXd dz = llt.solve(g);
      const double dec2 = g.dot(dz);
      stat = barrier.stationarity(grad_f, s, t);
      if (dec2 <= 1e-20 || (dec2 <= 1e-10 && stat <= 0.1 * opt.tol)) break;
      const double phi0 = t * f + barrier.log_barrier(s);
      double a = std::min(1.0, 0.99 * barrier.max_step(z, dz, s));
      bool accepted = false;
      Slacks s_new;
      VectorXd z_new;
      while (a > 1e-14) {
        z_new = z + a * dz;
        if (barrier.slacks(z_new, s_new)) {
          const double f_new = problem.eval(z_new, nullptr, nullptr);
          // Inside the quadratic-convergence region the Armijo test drowns
          // in rounding of phi0, so a feasible full step is taken as is.
          if (std::isfinite(f_new) &&
              ((dec2 < 1e-8 && a == 1.0) ||
               t * f_new + barrier.log_barrier(s_new) >= phi0 + 0.25 * a * dec2)) {
            accepted = true;
            break;
          }
        }
        a *= 0.5;
      }
      if (!accepted || z_new == z) break;
      z = z_new;
      s = s_new;
      f = problem.eval(z, &grad_f, &hess_f);
    }
    stat = barrier.stationarity(grad_f, s, t);
    if ((m == 0 || m / t <= opt.tol * (1.0 + std::abs(f))) || newton >= opt.max_newton) break;
    t *= opt.mu;
  }

  st.iterations = newton;
  st.objective = f;
  const double gap = m > 0 ? m / t / (1.0 + std::abs(f)) : 0.0;
  st.kkt_residual = std::max(stat, gap);
  st.converged = st.kkt_residual <= opt.tol;
  if (f < f_start) {
    // Never hand back something worse than the caller's feasible start.
    z = start;
    st.objective = f_start;
    st.converged = false;
  }
  return {z, st};
}

}  // namespace daur
