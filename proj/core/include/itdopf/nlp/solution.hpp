#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace itdopf::nlp {

enum class SolveStatus { Optimal, Infeasible, IterationLimit, NumericalFailure };

const char* to_string(SolveStatus s);

struct KktResiduals {
  double stationarity = 0;
  double feasibility = 0;
  double complementarity = 0;
  double max() const;
};

struct Solution {
  SolveStatus status = SolveStatus::NumericalFailure;
  Eigen::VectorXd x;        ///< primal point (original variables)
  Eigen::VectorXd slack;    ///< slack values of inequality rows (row order)
  Eigen::VectorXd lambda;   ///< row multipliers, all blocks stacked
  Eigen::VectorXd z_lower;  ///< bound multipliers on x (0 where bound infinite)
  Eigen::VectorXd z_upper;
  Eigen::VectorXd slack_z_lower;  ///< bound multipliers on inequality slacks
  Eigen::VectorXd slack_z_upper;
  double objective = 0;
  int iterations = 0;
  double wall_seconds = 0;
  KktResiduals kkt;

  /// One formatted line per iteration; stable format, byte-identical across
  /// repeated runs on the same inputs.
  std::vector<std::string> iterate_log;
};

}  // namespace itdopf::nlp
