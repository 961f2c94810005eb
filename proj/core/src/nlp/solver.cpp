#include "itdopf/nlp/solver.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "itdopf/nlp/kkt.hpp"

namespace itdopf::nlp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSigmaBox = 1e2;    // dual safeguard box around mu/gap
constexpr double kMaxGradient = 100; // gradient-based scaling target
constexpr double kRegInitial = 1e-8;
constexpr double kRegGrowth = 10.0;
constexpr double kRegMax = 1e8;
constexpr double kDualReg = 1e-8;
constexpr double kArmijo = 1e-4;
constexpr double kPenaltyRho = 0.1;
constexpr int kStallLimit = 15;

/// Slack-form workspace over the row-scaled problem: every constraint row
/// becomes sc_i r_i(x) - target = 0 or sc_i r_i(x) - s = 0 with s bounded.
struct Work {
  const NlpModel* model = nullptr;
  int nx = 0;  // original variables
  int ns = 0;  // slacks
  int n = 0;   // nx + ns
  int m = 0;   // constraint rows

  double sf = 1.0;             // objective scale
  Eigen::VectorXd sc;          // per-row constraint scale
  Eigen::VectorXd xl, xu;      // bounds on [x; s] (slack bounds are scaled)
  std::vector<int> slack_of_row;  // -1 for equality rows
  std::vector<int> row_of_slack;
  Eigen::VectorXd target;      // scaled equality level for non-slacked rows

  // iteration scratch
  Eigen::VectorXd raw;  // unscaled block residuals r(x)
  TripletSink jac;      // unscaled block jacobian triplets (x part)

  void residuals(const Eigen::VectorXd& X, Eigen::VectorXd& c) {
    eval_residuals(*model, X.head(nx), raw);
    c.resize(m);
    for (int i = 0; i < m; ++i)
      c[i] = sc[i] * raw[i] -
             (slack_of_row[i] >= 0 ? X[nx + slack_of_row[i]] : target[i]);
  }
};

Work make_work(const NlpModel& model) {
  Work w;
  w.model = &model;
  w.nx = model.num_vars();
  w.m = model.num_rows();
  w.slack_of_row.assign(w.m, -1);
  w.target.setZero(w.m);
  w.sc = Eigen::VectorXd::Ones(w.m);

  std::vector<double> slo, shi;
  int row = 0;
  for (const auto& b : model.blocks) {
    for (int i = 0; i < b->rows(); ++i, ++row) {
      const double lo = b->lower()[i], hi = b->upper()[i];
      if (lo == hi) {
        w.target[row] = lo;
      } else {
        w.slack_of_row[row] = static_cast<int>(slo.size());
        w.row_of_slack.push_back(row);
        slo.push_back(lo);
        shi.push_back(hi);
      }
    }
  }
  w.ns = static_cast<int>(slo.size());
  w.n = w.nx + w.ns;
  w.xl.resize(w.n);
  w.xu.resize(w.n);
  w.xl.head(w.nx) = model.lower;
  w.xu.head(w.nx) = model.upper;
  for (int i = 0; i < w.ns; ++i) {
    w.xl[w.nx + i] = slo[i];
    w.xu[w.nx + i] = shi[i];
  }
  return w;
}

/// IPOPT-style push of a point into the strict interior of its bounds.
double push_interior(double v, double lo, double hi) {
  constexpr double k1 = 1e-2, k2 = 1e-2;
  if (std::isfinite(lo) && std::isfinite(hi)) {
    const double pl = std::min(k1 * std::max(1.0, std::abs(lo)), k2 * (hi - lo));
    const double pu = std::min(k1 * std::max(1.0, std::abs(hi)), k2 * (hi - lo));
    return std::min(std::max(v, lo + pl), hi - pu);
  }
  if (std::isfinite(lo)) return std::max(v, lo + k1 * std::max(1.0, std::abs(lo)));
  if (std::isfinite(hi)) return std::min(v, hi - k1 * std::max(1.0, std::abs(hi)));
  return v;
}

struct HessToTriplets final : HessianSink {
  std::vector<TripletSink::Entry>* out = nullptr;
  double factor = 1.0;
  void pair(int a, int b, double v) override {
    v *= factor;
    if (a == b)
      out->push_back({a, a, 2.0 * v});
    else if (a > b)
      out->push_back({a, b, v});
    else
      out->push_back({b, a, v});
  }
  void diag(int a, double v) override { out->push_back({a, a, factor * v}); }
};

std::string format_log(int iter, double mu, double obj, double stat, double feas,
                       double comp, double alpha, double reg) {
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "%4d  mu=%9.3e  obj=%+.10e  stat=%9.3e  feas=%9.3e  comp=%9.3e  "
                "alpha=%8.2e  reg=%8.2e",
                iter, mu, obj, stat, feas, comp, alpha, reg);
  return buf;
}

struct Residuals {
  // the scaled stationarity norm feeds the barrier floor; the unscaled
  // norms decide convergence so the reported KKT residuals are
  // tolerance-true
  double stat_s = 0;
  double stat_u = 0, feas_u = 0, comp_u = 0;
  double max_u() const { return std::max(stat_u, std::max(feas_u, comp_u)); }
};

Residuals kkt_norms(const Work& w, const Eigen::VectorXd& grad_full,
                    const Eigen::SparseMatrix<double>& J, const Eigen::VectorXd& lambda,
                    const Eigen::VectorXd& zl, const Eigen::VectorXd& zu,
                    const Eigen::VectorXd& c, const Eigen::VectorXd& X) {
  Residuals r;
  const Eigen::VectorXd stat_vec = grad_full + J.transpose() * lambda - zl + zu;
  r.stat_s = stat_vec.lpNorm<Eigen::Infinity>();
  r.stat_u = r.stat_s / w.sf;
  for (int i = 0; i < w.m; ++i)
    r.feas_u = std::max(r.feas_u, std::abs(c[i]) / w.sc[i]);
  for (int i = 0; i < w.n; ++i) {
    if (std::isfinite(w.xl[i]))
      r.comp_u = std::max(r.comp_u, std::abs(zl[i] * (X[i] - w.xl[i])) / w.sf);
    if (std::isfinite(w.xu[i]))
      r.comp_u = std::max(r.comp_u, std::abs(zu[i] * (w.xu[i] - X[i])) / w.sf);
  }
  return r;
}

Solution run(const NlpModel& model, const SolverOptions& opts) {
  const auto t_start = std::chrono::steady_clock::now();
  Work w = make_work(model);
  const int nx = w.nx, m = w.m;
  const int n_all = w.n;
  const int dim = n_all + m;

  Solution sol;

  const bool dense = opts.kkt_backend == KktBackend::Dense ||
                     (opts.kkt_backend == KktBackend::Auto && dim <= opts.dense_limit);
  KktFactor kkt(dim, dense);

  // interior primal start (x part first; slacks after scaling is known)
  Eigen::VectorXd X(n_all);
  for (int i = 0; i < nx; ++i) X[i] = push_interior(model.x0[i], w.xl[i], w.xu[i]);

  // gradient-based scaling from the initial point
  Eigen::VectorXd grad(nx);
  model.obj_gradient(X.head(nx), grad);
  const double g0 = grad.lpNorm<Eigen::Infinity>();
  w.sf = g0 > kMaxGradient ? kMaxGradient / g0 : 1.0;
  {
    w.jac.clear();
    eval_jacobian(model, X.head(nx), w.jac);
    Eigen::VectorXd row_max = Eigen::VectorXd::Zero(m);
    for (const auto& e : w.jac.entries)
      row_max[e.row] = std::max(row_max[e.row], std::abs(e.value));
    for (int i = 0; i < m; ++i)
      if (row_max[i] > kMaxGradient) w.sc[i] = kMaxGradient / row_max[i];
  }
  // scale equality targets and slack bounds onto the scaled rows
  for (int i = 0; i < m; ++i)
    if (w.slack_of_row[i] < 0) w.target[i] *= w.sc[i];
  for (int s = 0; s < w.ns; ++s) {
    const double sc = w.sc[w.row_of_slack[s]];
    if (std::isfinite(w.xl[nx + s])) w.xl[nx + s] *= sc;
    if (std::isfinite(w.xu[nx + s])) w.xu[nx + s] *= sc;
  }
  {
    eval_residuals(model, X.head(nx), w.raw);
    for (int row = 0; row < m; ++row) {
      const int s = w.slack_of_row[row];
      if (s >= 0)
        X[nx + s] = push_interior(w.sc[row] * w.raw[row], w.xl[nx + s], w.xu[nx + s]);
    }
  }

  double mu = opts.mu_init;
  const double mu_min = opts.kkt_tol * w.sf / 10.0;
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd zl = Eigen::VectorXd::Zero(n_all), zu = Eigen::VectorXd::Zero(n_all);
  for (int i = 0; i < n_all; ++i) {
    if (std::isfinite(w.xl[i])) zl[i] = mu / (X[i] - w.xl[i]);
    if (std::isfinite(w.xu[i])) zu[i] = mu / (w.xu[i] - X[i]);
  }

  // scaled-row jacobian triplets at X
  std::vector<Eigen::Triplet<double>> jtrip;
  auto build_jacobian = [&](const Eigen::VectorXd& Xp, Eigen::SparseMatrix<double>& J) {
    w.jac.clear();
    eval_jacobian(model, Xp.head(nx), w.jac);
    jtrip.clear();
    jtrip.reserve(w.jac.entries.size() + static_cast<size_t>(w.ns));
    for (const auto& e : w.jac.entries)
      jtrip.emplace_back(e.row, e.col, w.sc[e.row] * e.value);
    for (int row = 0; row < m; ++row)
      if (w.slack_of_row[row] >= 0)
        jtrip.emplace_back(row, nx + w.slack_of_row[row], -1.0);
    J.setFromTriplets(jtrip.begin(), jtrip.end());
  };

  // least-squares multiplier initialization on the scaled problem
  {
    Eigen::SparseMatrix<double> J0(m, n_all);
    build_jacobian(X, J0);
    std::vector<TripletSink::Entry> init_trip;
    for (int i = 0; i < n_all; ++i) init_trip.push_back({i, i, 1.0});
    for (const auto& e : jtrip)
      init_trip.push_back({n_all + static_cast<int>(e.row()),
                           static_cast<int>(e.col()), e.value()});
    for (int i = 0; i < m; ++i) init_trip.push_back({n_all + i, n_all + i, -kDualReg});
    KktFactor init_kkt(dim, dense);
    if (init_kkt.factorize(init_trip).factorized) {
      Eigen::VectorXd rhs0 = Eigen::VectorXd::Zero(dim);
      for (int i = 0; i < nx; ++i) rhs0[i] = -(w.sf * grad[i] - zl[i] + zu[i]);
      for (int i = nx; i < n_all; ++i) rhs0[i] = zl[i] - zu[i];
      init_kkt.solve(rhs0);
      const Eigen::VectorXd lam0 = rhs0.tail(m);
      if (lam0.allFinite() && lam0.lpNorm<Eigen::Infinity>() <= 1e5) lambda = lam0;
    }
  }

  auto barrier = [&](const Eigen::VectorXd& Xp) {
    double phi = w.sf * model.obj_value(Xp.head(nx));
    for (int i = 0; i < n_all; ++i) {
      if (std::isfinite(w.xl[i])) {
        const double g = Xp[i] - w.xl[i];
        if (g <= 0) return kInf;
        phi -= mu * std::log(g);
      }
      if (std::isfinite(w.xu[i])) {
        const double g = w.xu[i] - Xp[i];
        if (g <= 0) return kInf;
        phi -= mu * std::log(g);
      }
    }
    return phi;
  };

  Eigen::VectorXd c(m), grad_full(n_all), dX(n_all), dlam(m), dzl(n_all), dzu(n_all),
      rhs(dim), lam_eff(m);
  Eigen::SparseMatrix<double> J(m, n_all);
  std::vector<TripletSink::Entry> ktrip;
  double nu = 1.0;        // l1 penalty
  double reg_last = 0.0;  // last successful primal regularization
  double feas_best = kInf;
  double stat_best = kInf;
  int stall = 0;
  int dual_stall = 0;
  int dual_restarts = 0;
  double alpha_logged = 0.0;
  bool failed = false;

  // one-shot re-centering of the multipliers used when the dual polish
  // stalls at the barrier floor (degenerate dual faces pinch the global
  // dual step length)
  auto restart_duals = [&](const Eigen::VectorXd& grad_now) {
    for (int i = 0; i < n_all; ++i) {
      if (std::isfinite(w.xl[i])) zl[i] = mu / (X[i] - w.xl[i]);
      if (std::isfinite(w.xu[i])) zu[i] = mu / (w.xu[i] - X[i]);
    }
    Eigen::SparseMatrix<double> J0(m, n_all);
    build_jacobian(X, J0);
    std::vector<TripletSink::Entry> init_trip;
    for (int i = 0; i < n_all; ++i) init_trip.push_back({i, i, 1.0});
    for (const auto& e : jtrip)
      init_trip.push_back({n_all + static_cast<int>(e.row()),
                           static_cast<int>(e.col()), e.value()});
    for (int i = 0; i < m; ++i) init_trip.push_back({n_all + i, n_all + i, -kDualReg});
    KktFactor init_kkt(dim, dense);
    if (init_kkt.factorize(init_trip).factorized) {
      Eigen::VectorXd rhs0 = Eigen::VectorXd::Zero(dim);
      for (int i = 0; i < nx; ++i) rhs0[i] = -(w.sf * grad_now[i] - zl[i] + zu[i]);
      for (int i = nx; i < n_all; ++i) rhs0[i] = zl[i] - zu[i];
      init_kkt.solve(rhs0);
      const Eigen::VectorXd lam0 = rhs0.tail(m);
      if (lam0.allFinite() && lam0.lpNorm<Eigen::Infinity>() <= 1e5) lambda = lam0;
    }
  };

  int iter = 0;
  for (;; ++iter) {
    w.residuals(X, c);
    const double fval = model.obj_value(X.head(nx));
    model.obj_gradient(X.head(nx), grad);
    grad_full.setZero(n_all);
    grad_full.head(nx) = w.sf * grad;
    build_jacobian(X, J);

    const Residuals res = kkt_norms(w, grad_full, J, lambda, zl, zu, c, X);
    sol.kkt = {res.stat_u, res.feas_u, res.comp_u};
    sol.objective = fval;

    if (opts.collect_iterate_log || opts.log_stream) {
      const std::string line = format_log(iter, mu, fval, res.stat_u, res.feas_u,
                                          res.comp_u, alpha_logged, reg_last);
      if (opts.collect_iterate_log) sol.iterate_log.push_back(line);
      if (opts.log_stream) (*opts.log_stream) << line << '\n';
    }

    if (res.max_u() <= opts.kkt_tol) {
      sol.status = SolveStatus::Optimal;
      break;
    }
    if (iter >= opts.max_iter) {
      sol.status = SolveStatus::IterationLimit;
      break;
    }

    // infeasibility stall detection on unscaled feasibility
    if (res.feas_u < 0.95 * feas_best) {
      feas_best = res.feas_u;
      stall = 0;
    } else {
      ++stall;
    }
    if (stall >= kStallLimit && res.feas_u > 100.0 * opts.kkt_tol) {
      sol.status = SolveStatus::Infeasible;
      break;
    }

    // dual-polish stall: feasibility converged, barrier at its floor, but
    // stationarity pinned by a pinched dual step
    if (res.stat_u < 0.95 * stat_best) {
      stat_best = res.stat_u;
      dual_stall = 0;
    } else {
      ++dual_stall;
    }
    if (dual_stall >= 10 && dual_restarts < 2 && mu <= 1.01 * mu_min &&
        res.feas_u <= opts.kkt_tol) {
      restart_duals(grad);
      ++dual_restarts;
      dual_stall = 0;
      stat_best = kInf;
      continue;
    }

    // barrier tracks the current average complementarity downward:
    // mu <- min(mu, sigma * avg(z . gap)), never below mu_min
    {
      double comp_sum = 0;
      int comp_cnt = 0;
      for (int i = 0; i < n_all; ++i) {
        if (std::isfinite(w.xl[i])) {
          comp_sum += zl[i] * (X[i] - w.xl[i]);
          ++comp_cnt;
        }
        if (std::isfinite(w.xu[i])) {
          comp_sum += zu[i] * (w.xu[i] - X[i]);
          ++comp_cnt;
        }
      }
      // the stationarity floor keeps mu from outrunning the dual
      // infeasibility on degenerate problems
      if (comp_cnt > 0) {
        const double target = std::max(opts.mu_reduction * comp_sum / comp_cnt,
                                       1e-5 * res.stat_s);
        mu = std::min(mu, std::max(mu_min, target));
      }
    }

    Eigen::VectorXd sigma = Eigen::VectorXd::Zero(n_all);
    for (int i = 0; i < n_all; ++i) {
      if (std::isfinite(w.xl[i])) sigma[i] += zl[i] / (X[i] - w.xl[i]);
      if (std::isfinite(w.xu[i])) sigma[i] += zu[i] / (w.xu[i] - X[i]);
    }
    for (int i = 0; i < m; ++i) lam_eff[i] = lambda[i] * w.sc[i];

    double reg_floor = 0.0;
    double alpha = 0.0, alpha_z = 1.0;
    bool step_ready = false;
    Eigen::VectorXd Xt(n_all), ct(m);
    while (!step_ready) {
      // assemble + factor with inertia correction
      double reg_w = reg_floor, reg_c = 0.0;
      bool have_factor = false;
      while (true) {
        ktrip.clear();
        HessToTriplets hs;
        hs.out = &ktrip;
        hs.factor = w.sf;
        if (model.obj_hessian) {
          model.obj_hessian(X.head(nx), hs);
        } else {
          Eigen::VectorXd e = Eigen::VectorXd::Zero(nx), col(nx);
          for (int jcol = 0; jcol < nx; ++jcol) {
            e[jcol] = 1.0;
            model.obj_hess_vec(X.head(nx), e, col);
            e[jcol] = 0.0;
            for (int i = jcol; i < nx; ++i)
              if (col[i] != 0.0) ktrip.push_back({i, jcol, w.sf * col[i]});
          }
        }
        hs.factor = 1.0;
        if (opts.hessian_mode == HessianMode::Exact) {
          int row = 0;
          for (const auto& blk : model.blocks) {
            if (!blk->affine()) blk->hessian(X.data(), lam_eff.data() + row, hs);
            row += blk->rows();
          }
        }
        for (int i = 0; i < n_all; ++i) ktrip.push_back({i, i, sigma[i] + reg_w});
        for (const auto& e : jtrip)
          ktrip.push_back({n_all + static_cast<int>(e.row()),
                           static_cast<int>(e.col()), e.value()});
        for (int i = 0; i < m; ++i) ktrip.push_back({n_all + i, n_all + i, -reg_c});

        const Inertia inertia = kkt.factorize(ktrip);
        if (inertia.factorized && inertia.positive == n_all && inertia.negative == m) {
          have_factor = true;
          break;
        }
        if (!inertia.factorized || inertia.zero > 0) reg_c = std::max(reg_c, kDualReg);
        reg_w = reg_w < kRegInitial ? kRegInitial : reg_w * kRegGrowth;
        if (reg_w > kRegMax) break;
      }
      if (!have_factor) {
        sol.status = res.feas_u > 100.0 * opts.kkt_tol ? SolveStatus::Infeasible
                                                       : SolveStatus::NumericalFailure;
        failed = true;
        break;
      }
      reg_last = reg_w;

      // primal-dual step
      rhs.setZero(dim);
      rhs.head(n_all) = -(grad_full + J.transpose() * lambda);
      for (int i = 0; i < n_all; ++i) {
        if (std::isfinite(w.xl[i])) rhs[i] += mu / (X[i] - w.xl[i]);
        if (std::isfinite(w.xu[i])) rhs[i] -= mu / (w.xu[i] - X[i]);
      }
      rhs.tail(m) = -c;
      const Eigen::VectorXd rhs_x = rhs.head(n_all);
      const Eigen::VectorXd barrier_grad = -rhs_x - J.transpose() * lambda;
      kkt.solve(rhs);
      dX = rhs.head(n_all);
      dlam = rhs.tail(m);

      for (int i = 0; i < n_all; ++i) {
        dzl[i] = std::isfinite(w.xl[i])
                     ? (mu - (X[i] - w.xl[i]) * zl[i]) / (X[i] - w.xl[i]) -
                           zl[i] / (X[i] - w.xl[i]) * dX[i]
                     : 0.0;
        dzu[i] = std::isfinite(w.xu[i])
                     ? (mu - (w.xu[i] - X[i]) * zu[i]) / (w.xu[i] - X[i]) +
                           zu[i] / (w.xu[i] - X[i]) * dX[i]
                     : 0.0;
      }

      // fraction-to-boundary step limits
      const double tau = opts.fraction_to_boundary;
      double alpha_max = 1.0;
      alpha_z = 1.0;
      for (int i = 0; i < n_all; ++i) {
        if (std::isfinite(w.xl[i]) && dX[i] < 0)
          alpha_max = std::min(alpha_max, -tau * (X[i] - w.xl[i]) / dX[i]);
        if (std::isfinite(w.xu[i]) && dX[i] > 0)
          alpha_max = std::min(alpha_max, tau * (w.xu[i] - X[i]) / dX[i]);
        if (std::isfinite(w.xl[i]) && dzl[i] < 0)
          alpha_z = std::min(alpha_z, -tau * zl[i] / dzl[i]);
        if (std::isfinite(w.xu[i]) && dzu[i] < 0)
          alpha_z = std::min(alpha_z, -tau * zu[i] / dzu[i]);
      }

      // l1 merit line search; the curvature product reuses the first KKT
      // row: (W + Sigma) dX = rhs_x - J^T dlam
      const double c_l1 = c.lpNorm<1>();
      const double dir_grad = barrier_grad.dot(dX);
      if (c_l1 > 1e-8 * (1.0 + std::abs(w.sf * fval))) {
        const double curvature = std::max(0.0, dX.dot(rhs_x - J.transpose() * dlam));
        const double nu_req = (dir_grad + 0.5 * curvature) / ((1.0 - kPenaltyRho) * c_l1);
        nu = std::max(nu, 1.1 * nu_req + 1e-6);
      }
      const double descent = dir_grad - nu * c_l1;

      const double phi0 = barrier(X) + nu * c_l1;
      alpha = alpha_max;
      for (int ls = 0; ls < 40 && alpha >= 1e-12; ++ls) {
        Xt = X + alpha * dX;
        w.residuals(Xt, ct);
        const double phit = barrier(Xt) + nu * ct.lpNorm<1>();
        if (std::isfinite(phit) &&
            phit <= phi0 + kArmijo * alpha * std::min(descent, 0.0)) {
          step_ready = true;
          break;
        }
        if (ls == 0 && alpha == 1.0) {
          // second-order correction against the full-step residual, which
          // cancels the quadratic constraint regrowth the l1 penalty would
          // otherwise reject (Maratos guard)
          Eigen::VectorXd rhs2 = Eigen::VectorXd::Zero(dim);
          rhs2.tail(m) = -ct;
          kkt.solve(rhs2);
          Eigen::VectorXd Xc = Xt + rhs2.head(n_all);
          double a_soc = 1.0;
          for (int i = 0; i < n_all; ++i) {
            const double di = Xc[i] - X[i];
            if (std::isfinite(w.xl[i]) && di < 0)
              a_soc = std::min(a_soc, -tau * (X[i] - w.xl[i]) / di);
            if (std::isfinite(w.xu[i]) && di > 0)
              a_soc = std::min(a_soc, tau * (w.xu[i] - X[i]) / di);
          }
          Xc = X + a_soc * (Xc - X);
          w.residuals(Xc, ct);
          const double phic = barrier(Xc) + nu * ct.lpNorm<1>();
          if (std::isfinite(phic) &&
              phic <= phi0 + kArmijo * alpha * std::min(descent, 0.0)) {
            Xt = Xc;
            step_ready = true;
            break;
          }
        }
        alpha *= 0.5;
      }
      if (step_ready) break;

      // no acceptable step along this direction; retry with a stronger
      // primal regularization floor
      const double next_floor =
          reg_last < kRegInitial ? kRegInitial : reg_last * kRegGrowth;
      if (alpha_max < 1e-12 || next_floor > kRegMax) {
        sol.status = res.feas_u > 100.0 * opts.kkt_tol ? SolveStatus::Infeasible
                                                       : SolveStatus::NumericalFailure;
        failed = true;
        break;
      }
      reg_floor = next_floor;
    }
    if (failed) break;

    X = Xt;
    lambda += alpha_z * dlam;
    zl += alpha_z * dzl;
    zu += alpha_z * dzu;
    alpha_logged = alpha;

    // dual safeguard box around mu / gap
    for (int i = 0; i < n_all; ++i) {
      if (std::isfinite(w.xl[i])) {
        const double g = X[i] - w.xl[i];
        zl[i] = std::min(std::max(zl[i], mu / (kSigmaBox * g)), kSigmaBox * mu / g);
      }
      if (std::isfinite(w.xu[i])) {
        const double g = w.xu[i] - X[i];
        zu[i] = std::min(std::max(zu[i], mu / (kSigmaBox * g)), kSigmaBox * mu / g);
      }
    }

#ifndef NDEBUG
    for (int i = 0; i < n_all; ++i) {
      assert(!(std::isfinite(w.xl[i]) && X[i] <= w.xl[i]) && "iterate left lower bound");
      assert(!(std::isfinite(w.xu[i]) && X[i] >= w.xu[i]) && "iterate left upper bound");
    }
#endif
  }

  // unscale the returned point and multipliers
  sol.iterations = iter;
  sol.x = X.head(nx);
  sol.slack.resize(w.ns);
  for (int s = 0; s < w.ns; ++s) sol.slack[s] = X[nx + s] / w.sc[w.row_of_slack[s]];
  sol.lambda.resize(m);
  for (int i = 0; i < m; ++i) sol.lambda[i] = lambda[i] * w.sc[i] / w.sf;
  sol.z_lower = zl.head(nx) / w.sf;
  sol.z_upper = zu.head(nx) / w.sf;
  sol.slack_z_lower.resize(w.ns);
  sol.slack_z_upper.resize(w.ns);
  for (int s = 0; s < w.ns; ++s) {
    // slack bound multipliers transfer onto the unscaled slack gap
    const double sc = w.sc[w.row_of_slack[s]];
    sol.slack_z_lower[s] = zl[nx + s] * sc / w.sf;
    sol.slack_z_upper[s] = zu[nx + s] * sc / w.sf;
  }
  sol.objective = model.obj_value(sol.x);
  sol.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return sol;
}

}  // namespace

namespace {

void check_options(const SolverOptions& opts) {
  if (!(opts.kkt_tol > 0) || !(opts.mu_init > 0) || !(opts.mu_reduction > 0) ||
      opts.max_iter <= 0)
    throw std::invalid_argument("solver options must be positive");
  if (!(opts.fraction_to_boundary > 0.0 && opts.fraction_to_boundary < 1.0))
    throw std::invalid_argument("fraction-to-boundary must lie in (0, 1)");
}

}  // namespace

Solution solve(const NlpModel& model, const SolverOptions& opts) {
  if (!model.obj_value || !model.obj_gradient)
    throw std::invalid_argument("model objective evaluators are not set");
  check_options(opts);
  return run(model, opts);
}

Solution solve_linear(const NlpModel& model, const SolverOptions& opts) {
  if (!model.all_affine())
    throw std::invalid_argument("solve_linear requires affine constraint blocks");
  check_options(opts);
  return run(model, opts);
}

KktResiduals kkt_residuals(const NlpModel& model, const Solution& sol) {
  Work w = make_work(model);  // unit scales: unscaled residuals
  Eigen::VectorXd X(w.n);
  X.head(w.nx) = sol.x;
  X.tail(w.ns) = sol.slack;

  Eigen::VectorXd zl(w.n), zu(w.n);
  zl.head(w.nx) = sol.z_lower;
  zu.head(w.nx) = sol.z_upper;
  zl.tail(w.ns) = sol.slack_z_lower;
  zu.tail(w.ns) = sol.slack_z_upper;

  Eigen::VectorXd c;
  w.residuals(X, c);

  Eigen::VectorXd grad(w.nx), grad_full = Eigen::VectorXd::Zero(w.n);
  model.obj_gradient(sol.x, grad);
  grad_full.head(w.nx) = grad;

  w.jac.clear();
  eval_jacobian(model, sol.x, w.jac);
  std::vector<Eigen::Triplet<double>> jtrip;
  for (const auto& e : w.jac.entries) jtrip.emplace_back(e.row, e.col, e.value);
  for (int row = 0; row < w.m; ++row)
    if (w.slack_of_row[row] >= 0) jtrip.emplace_back(row, w.nx + w.slack_of_row[row], -1.0);
  Eigen::SparseMatrix<double> J(w.m, w.n);
  J.setFromTriplets(jtrip.begin(), jtrip.end());

  double bound_viol = 0.0;
  for (int i = 0; i < w.n; ++i) {
    if (std::isfinite(w.xl[i])) bound_viol = std::max(bound_viol, w.xl[i] - X[i]);
    if (std::isfinite(w.xu[i])) bound_viol = std::max(bound_viol, X[i] - w.xu[i]);
  }

  const Residuals r = kkt_norms(w, grad_full, J, sol.lambda, zl, zu, c, X);
  return {r.stat_u, std::max(r.feas_u, bound_viol), r.comp_u};
}

}  // namespace itdopf::nlp
