#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "itdopf/nlp/block.hpp"

namespace itdopf::nlp {

/// Smooth nonlinear program over bounded variables:
///   min f(x)   s.t.  lo_i <= r_i(x) <= hi_i  per block row,
///                    xl <= x <= xu            (+-inf allowed).
/// Objective evaluators must be consistent; hess_vec is the exact Hessian
/// of f applied to a vector. The initial point is clamped into the bounds
/// by the solver at load time.
struct NlpModel {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  Eigen::VectorXd x0;
  std::vector<BlockPtr> blocks;

  std::function<double(const Eigen::VectorXd&)> obj_value;
  std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)> obj_gradient;
  std::function<void(const Eigen::VectorXd&, const Eigen::VectorXd&, Eigen::VectorXd&)>
      obj_hess_vec;
  /// Optional explicit objective Hessian for the KKT assembly; when absent
  /// the solver extracts it through obj_hess_vec.
  std::function<void(const Eigen::VectorXd&, HessianSink&)> obj_hessian;

  int num_vars() const { return static_cast<int>(lower.size()); }
  int num_rows() const {
    int n = 0;
    for (const auto& b : blocks) n += b->rows();
    return n;
  }
  bool all_affine() const {
    for (const auto& b : blocks)
      if (!b->affine()) return false;
    return true;
  }
};

/// Zero objective helper (feasibility problems).
void set_zero_objective(NlpModel& model);

/// Evaluate all block residuals into one stacked vector.
void eval_residuals(const NlpModel& model, const Eigen::VectorXd& x, Eigen::VectorXd& r);

/// Stacked sparse Jacobian triplets of all blocks.
void eval_jacobian(const NlpModel& model, const Eigen::VectorXd& x, TripletSink& sink);

}  // namespace itdopf::nlp
