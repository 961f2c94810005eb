#include "itdopf/form/derivative_check.hpp"

#include <cmath>
#include <map>

namespace itdopf::form {

namespace {

using DenseMap = std::map<std::pair<int, int>, double>;

DenseMap analytic_jacobian(const nlp::ConstraintBlock& blk, const Eigen::VectorXd& x) {
  nlp::TripletSink sink;
  blk.jacobian(x.data(), sink);
  DenseMap out;
  for (const auto& e : sink.entries) out[{e.row, e.col}] += e.value;
  return out;
}

Eigen::MatrixXd fd_jacobian(const nlp::ConstraintBlock& blk, Eigen::VectorXd x,
                            double step) {
  const int rows = blk.rows();
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd J(rows, n);
  Eigen::VectorXd rp(rows), rm(rows);
  for (int j = 0; j < n; ++j) {
    const double h = step * std::max(1.0, std::abs(x[j]));
    const double saved = x[j];
    x[j] = saved + h;
    blk.eval(x.data(), rp.data());
    x[j] = saved - h;
    blk.eval(x.data(), rm.data());
    x[j] = saved;
    J.col(j) = (rp - rm) / (2.0 * h);
  }
  return J;
}

struct HessAccum final : nlp::HessianSink {
  DenseMap m;
  void pair(int a, int b, double v) override {
    if (a == b) {
      m[{a, a}] += 2.0 * v;
    } else {
      m[{std::max(a, b), std::min(a, b)}] += v;
    }
  }
  void diag(int a, double v) override { m[{a, a}] += v; }
};

Eigen::VectorXd jac_t_lambda(const nlp::ConstraintBlock& blk, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& lambda, int n) {
  nlp::TripletSink sink;
  blk.jacobian(x.data(), sink);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
  for (const auto& e : sink.entries) g[e.col] += e.value * lambda[e.row];
  return g;
}

}  // namespace

DerivativeReport check_jacobians(std::span<const nlp::BlockPtr> blocks,
                                 const Eigen::VectorXd& point, double step,
                                 double tol_rel, double tol_abs) {
  DerivativeReport report;
  const int n = static_cast<int>(point.size());
  for (const auto& blk : blocks) {
    BlockDerivativeResult res;
    res.name = blk->name();
    const DenseMap an = analytic_jacobian(*blk, point);
    const Eigen::MatrixXd fd = fd_jacobian(*blk, point, step);
    Eigen::MatrixXd fd_small;  // computed lazily for suspect entries
    bool have_small = false;

    for (int r = 0; r < blk->rows(); ++r)
      for (int j = 0; j < n; ++j) {
        auto it = an.find({r, j});
        const double a = it == an.end() ? 0.0 : it->second;
        const double f = fd(r, j);
        const double scale = std::max(1.0, std::max(std::abs(a), std::abs(f)));
        const double dev = std::abs(a - f) / scale;
        if (std::abs(a - f) <= std::max(tol_abs, tol_rel * scale)) {
          res.max_deviation = std::max(res.max_deviation, dev);
          continue;
        }
        // Richardson-style reliability probe: if two FD step sizes
        // disagree with each other, the entry is ill-conditioned here.
        if (!have_small) {
          fd_small = fd_jacobian(*blk, point, step / 8.0);
          have_small = true;
        }
        const double f2 = fd_small(r, j);
        const double fd_spread =
            std::abs(f - f2) / std::max(1.0, std::max(std::abs(f), std::abs(f2)));
        if (fd_spread > 0.1 * dev) {
          res.ill_conditioned = true;
        } else if (std::abs(a - f2) > std::max(tol_abs, tol_rel * scale)) {
          res.passed = false;
          res.max_deviation = std::max(res.max_deviation, dev);
        }
      }
    report.blocks.push_back(std::move(res));
  }
  return report;
}

DerivativeReport check_hessians(std::span<const nlp::BlockPtr> blocks,
                                const Eigen::VectorXd& point, double step,
                                double tol_rel, double tol_abs) {
  DerivativeReport report;
  const int n = static_cast<int>(point.size());
  std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const auto& blk : blocks) {
    BlockDerivativeResult res;
    res.name = blk->name();
    Eigen::VectorXd lambda(blk->rows());
    for (int i = 0; i < blk->rows(); ++i) lambda[i] = u(rng);

    HessAccum an;
    blk->hessian(point.data(), lambda.data(), an);

    Eigen::VectorXd x = point;
    for (int j = 0; j < n; ++j) {
      const double h = step * std::max(1.0, std::abs(x[j]));
      const double saved = x[j];
      x[j] = saved + h;
      const Eigen::VectorXd gp = jac_t_lambda(*blk, x, lambda, n);
      x[j] = saved - h;
      const Eigen::VectorXd gm = jac_t_lambda(*blk, x, lambda, n);
      x[j] = saved;
      const Eigen::VectorXd col = (gp - gm) / (2.0 * h);
      for (int i = 0; i < n; ++i) {
        const double f = col[i];
        auto it = an.m.find({std::max(i, j), std::min(i, j)});
        double a = it == an.m.end() ? 0.0 : it->second;
        const double scale = std::max(1.0, std::max(std::abs(a), std::abs(f)));
        const double dev = std::abs(a - f) / scale;
        res.max_deviation = std::max(res.max_deviation, dev);
        if (std::abs(a - f) > std::max(tol_abs, tol_rel * scale)) res.passed = false;
      }
    }
    report.blocks.push_back(std::move(res));
  }
  return report;
}

Eigen::VectorXd sample_interior(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                const Eigen::VectorXd& x0, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const int n = static_cast<int>(lower.size());
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) {
    const double lo = lower[i], hi = upper[i];
    if (std::isfinite(lo) && std::isfinite(hi)) {
      const double inset = 0.15 * (hi - lo);
      x[i] = lo + inset + (hi - lo - 2 * inset) * u01(rng);
    } else if (std::isfinite(lo)) {
      x[i] = std::max(lo + 0.05, x0[i]) + u01(rng);
    } else if (std::isfinite(hi)) {
      x[i] = std::min(hi - 0.05, x0[i]) - u01(rng);
    } else {
      x[i] = x0[i] + 0.6 * (u01(rng) - 0.5);
    }
  }
  return x;
}

}  // namespace itdopf::form
