#pragma once

#include <random>
#include <span>
#include <string>
#include <vector>

#include "itdopf/nlp/model.hpp"

namespace itdopf::form {

struct BlockDerivativeResult {
  std::string name;
  double max_deviation = 0;  ///< scaled |analytic - fd| / max(1, |a|, |fd|)
  bool ill_conditioned = false;
  bool passed = true;
};

struct DerivativeReport {
  std::vector<BlockDerivativeResult> blocks;
  bool all_passed() const {
    for (const auto& b : blocks)
      if (!b.passed) return false;
    return true;
  }
};

/// Compare every block's analytic Jacobian against central finite
/// differences at `point`. Entries where the two FD step sizes disagree
/// with each other are reported ill-conditioned rather than failed.
DerivativeReport check_jacobians(std::span<const nlp::BlockPtr> blocks,
                                 const Eigen::VectorXd& point, double step = 1e-6,
                                 double tol_rel = 1e-6, double tol_abs = 1e-8);

/// Same idea one derivative higher: lambda-weighted block Hessians against
/// central differences of J(x)^T lambda.
DerivativeReport check_hessians(std::span<const nlp::BlockPtr> blocks,
                                const Eigen::VectorXd& point, double step = 1e-5,
                                double tol_rel = 1e-5, double tol_abs = 1e-7);

/// Random point strictly inside the variable bounds, anchored at x0 for
/// unbounded variables.
Eigen::VectorXd sample_interior(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                const Eigen::VectorXd& x0, std::mt19937_64& rng);

}  // namespace itdopf::form
