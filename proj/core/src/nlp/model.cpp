#include "itdopf/nlp/model.hpp"

#include <algorithm>

#include "itdopf/nlp/solution.hpp"

namespace itdopf::nlp {

void set_zero_objective(NlpModel& model) {
  model.obj_value = [](const Eigen::VectorXd&) { return 0.0; };
  model.obj_gradient = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g.setZero(x.size());
  };
  model.obj_hess_vec = [](const Eigen::VectorXd&, const Eigen::VectorXd& v,
                          Eigen::VectorXd& out) { out.setZero(v.size()); };
  model.obj_hessian = [](const Eigen::VectorXd&, HessianSink&) {};
}

void eval_residuals(const NlpModel& model, const Eigen::VectorXd& x, Eigen::VectorXd& r) {
  r.resize(model.num_rows());
  int off = 0;
  for (const auto& b : model.blocks) {
    b->eval(x.data(), r.data() + off);
    off += b->rows();
  }
}

void eval_jacobian(const NlpModel& model, const Eigen::VectorXd& x, TripletSink& sink) {
  int off = 0;
  for (const auto& b : model.blocks) {
    sink.row_offset = off;
    b->jacobian(x.data(), sink);
    off += b->rows();
  }
  sink.row_offset = 0;
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::IterationLimit: return "iteration_limit";
    case SolveStatus::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

double KktResiduals::max() const {
  return std::max(stationarity, std::max(feasibility, complementarity));
}

}  // namespace itdopf::nlp
