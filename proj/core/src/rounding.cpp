#include "daur/rounding.hpp"

#include <algorithm>
#include <chrono>
#include <limits>

#include "daur/error.hpp"
#include "daur/fp.hpp"
#include "daur/qcqp.hpp"
#include "daur/rng.hpp"
#include "daur/sdr.hpp"

namespace daur {
namespace {

MatrixXd one_hot(int n_users, int n_servers, const std::vector<int>& pick) {
  MatrixXd x = MatrixXd::Zero(n_users, n_servers);
  for (int n = 0; n < n_users; ++n) x(n, pick[n]) = 1.0;
  return x;
}

int row_argmax(const MatrixXd& x, int n) {
  int best = 0;
  for (int m = 1; m < x.cols(); ++m)
    if (x(n, m) > x(n, best)) best = m;
  return best;
}

}  // namespace

std::vector<int> solve_assignment(const MatrixXd& cost) {
  // Shortest augmenting path with potentials, O(n^3).
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n) throw Error(ErrorKind::DimensionMismatch, "assignment needs a square matrix");
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> col_of(n);
  for (int j = 1; j <= n; ++j) col_of[p[j] - 1] = j - 1;
  return col_of;
}

MatrixXd round_hungarian(const MatrixXd& x_cont) {
  const int N = static_cast<int>(x_cont.rows()), M = static_cast<int>(x_cont.cols());
  const int copies = (N + M - 1) / M;
  const int K = std::max(N, M * copies);
  // Rows are users (padded with zero-cost dummies); columns are server slots.
  MatrixXd cost = MatrixXd::Zero(K, K);
  for (int n = 0; n < N; ++n)
    for (int m = 0; m < M; ++m)
      for (int c = 0; c < copies; ++c) cost(n, m * copies + c) = 1.0 - x_cont(n, m);
  const std::vector<int> col = solve_assignment(cost);
  std::vector<int> pick(N);
  for (int n = 0; n < N; ++n) pick[n] = col[n] / copies;
  return one_hot(N, M, pick);
}

MatrixXd round_randomized(const MatrixXd& x_cont, std::uint64_t seed) {
  const int N = static_cast<int>(x_cont.rows()), M = static_cast<int>(x_cont.cols());
  Rng rng(seed);
  std::vector<int> pick(N);
  for (int n = 0; n < N; ++n) {
    const VectorXd w = x_cont.row(n).transpose().cwiseMax(0.0);
    const double total = w.sum();
    const double u = rng.uniform();
    if (!(total > 0.0)) {
      pick[n] = std::min(M - 1, static_cast<int>(u * M));
      continue;
    }
    double acc = 0.0;
    pick[n] = M - 1;
    for (int m = 0; m < M; ++m) {
      acc += w(m) / total;
      if (u < acc) {
        pick[n] = m;
        break;
      }
    }
    // Never land on a zero-probability server through rounding of acc.
    while (w(pick[n]) == 0.0 && pick[n] > 0) --pick[n];
  }
  return one_hot(N, M, pick);
}

MatrixXd round_secondary(const MatrixXd& x_cont) {
  // min ||x - x_cont||^2 over one-hot rows separates per row and reduces to
  // the row argmax, since ||e_m - r||^2 = 1 - 2 r_m + ||r||^2.
  const int N = static_cast<int>(x_cont.rows());
  std::vector<int> pick(N);
  for (int n = 0; n < N; ++n) pick[n] = row_argmax(x_cont, n);
  return one_hot(N, static_cast<int>(x_cont.cols()), pick);
}

MatrixXd round_rank1(const MatrixXd& S, int n_users, int n_servers) {
  const int dim = n_users + n_users * n_servers + 1;
  if (S.rows() != dim || S.cols() != dim)
    throw Error(ErrorKind::DimensionMismatch, "S does not match N + NM + 1");
  VectorXd v = leading_eigenvector(S);
  const double corner = v(dim - 1);
  if (corner < 0) v = -v;
  if (std::abs(corner) > 1e-12) v /= std::abs(corner);
  MatrixXd x(n_users, n_servers);
  for (int m = 0; m < n_servers; ++m)
    for (int n = 0; n < n_users; ++n) x(n, m) = v(n_users + m * n_users + n);
  return round_secondary(x);
}

MatrixXd round_greedy(const MatrixXd& x_cont) {
  const int N = static_cast<int>(x_cont.rows()), M = static_cast<int>(x_cont.cols());
  std::vector<int> pick(N, -1);
  for (int step = 0; step < N; ++step) {
    int bn = -1, bm = 0;
    for (int n = 0; n < N; ++n) {
      if (pick[n] >= 0) continue;
      for (int m = 0; m < M; ++m)
        if (bn < 0 || x_cont(n, m) > x_cont(bn, bm)) {
          bn = n;
          bm = m;
        }
    }
    pick[bn] = bm;
  }
  return one_hot(N, M, pick);
}

const std::vector<Rounding>& all_roundings() {
  static const std::vector<Rounding> all = {Rounding::Hungarian, Rounding::Randomized,
                                            Rounding::Secondary, Rounding::Rank1, Rounding::Greedy};
  return all;
}

std::string to_string(Rounding r) {
  switch (r) {
    case Rounding::Hungarian: return "hungarian";
    case Rounding::Randomized: return "randomized";
    case Rounding::Secondary: return "secondary";
    case Rounding::Rank1: return "rank1";
    case Rounding::Greedy: return "greedy";
  }
  return "unknown";
}

Decision equal_share_decision(const NetworkInstance& inst, const MatrixXd& x,
                              const VectorXd& phi_off, const SolverConfig& cfg) {
  const int N = inst.n_users, M = inst.n_servers;
  Decision dec = Decision::zeros(N, M);
  dec.x = x;
  dec.phi_off = phi_off;
  dec.gamma.setConstant(optimal_gamma(inst.omega_b));
  dec.rho.setConstant(cfg.baseline_rho);
  dec.psi.setConstant(cfg.baseline_psi);
  for (int m = 0; m < M; ++m) {
    const double load = x.col(m).sum();
    for (int n = 0; n < N; ++n) {
      const double share = x(n, m) > 0.5 ? 1.0 / load : 1.0 / N;
      dec.phi_bw(n, m) = share;
      dec.zeta(n, m) = share;
    }
  }
  return dec;
}

std::vector<RoundingRow> compare_roundings(const NetworkInstance& inst, const MatrixXd& S,
                                           const MatrixXd& x_cont, const VectorXd& phi_off,
                                           int repeats, std::uint64_t seed,
                                           const SolverConfig& cfg) {
  if (repeats < 1) throw Error(ErrorKind::InvalidParameter, "repeats must be >= 1");
  std::vector<RoundingRow> rows;
  for (Rounding tech : all_roundings()) {
    RoundingRow row;
    row.technique = to_string(tech);
    for (int r = 0; r < repeats; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      MatrixXd x;
      switch (tech) {
        case Rounding::Hungarian: x = round_hungarian(x_cont); break;
        case Rounding::Randomized: x = round_randomized(x_cont, seed + r); break;
        case Rounding::Secondary: x = round_secondary(x_cont); break;
        case Rounding::Rank1: x = round_rank1(S, inst.n_users, inst.n_servers); break;
        case Rounding::Greedy: x = round_greedy(x_cont); break;
      }
      row.all_feasible &= is_discrete(x);
      const Decision dec = equal_share_decision(inst, x, phi_off, cfg);
      const AuxState aux = update_auxiliary(inst, dec);
      const FpResult fp = fp_solve(inst, dec, aux, cfg.eps1, cfg.max_rounds, {cfg.tol});
      const double dpe = dpe_objective(inst, fp.dec);
      const auto t1 = std::chrono::steady_clock::now();
      row.mean_objective += dpe / repeats;
      row.mean_wall_ms += std::chrono::duration<double, std::milli>(t1 - t0).count() / repeats;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace daur
