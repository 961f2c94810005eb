#pragma once

#include <ostream>

#include "itdopf/nlp/model.hpp"
#include "itdopf/nlp/solution.hpp"

namespace itdopf::nlp {

enum class HessianMode {
  Exact,        ///< objective Hessian + lambda-weighted constraint curvature
  GaussNewton,  ///< objective Hessian only
};

enum class KktBackend {
  Auto,   ///< dense up to `dense_limit`, sparse beyond
  Dense,  ///< LAPACK Bunch-Kaufman factorization
  Sparse, ///< fill-reducing simplicial LDLT on the quasi-definite system
};

struct SolverOptions {
  double kkt_tol = 1e-6;
  int max_iter = 300;
  double mu_init = 1e-1;
  double mu_reduction = 0.2;      ///< multiplicative barrier decrease
  double fraction_to_boundary = 0.99;
  HessianMode hessian_mode = HessianMode::Exact;
  KktBackend kkt_backend = KktBackend::Auto;
  int dense_limit = 400;          ///< Auto switches to sparse above this KKT size
  bool collect_iterate_log = true;
  std::ostream* log_stream = nullptr;  ///< optional live iterate stream
};

/// Primal-dual interior-point solve with an l1 merit line search.
/// Deterministic: identical model + options give bit-identical iterate logs.
Solution solve(const NlpModel& model, const SolverOptions& opts = {});

/// Same machinery restricted to affine constraint blocks; throws
/// std::invalid_argument if a non-affine block is present.
Solution solve_linear(const NlpModel& model, const SolverOptions& opts = {});

/// Independent KKT re-verification at a returned solution: infinity norms of
/// stationarity, primal feasibility and complementarity of the slack-form
/// KKT system with bound multipliers.
KktResiduals kkt_residuals(const NlpModel& model, const Solution& sol);

}  // namespace itdopf::nlp
