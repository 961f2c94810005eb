#pragma once

#include <optional>
#include <span>

#include "itdopf/form/build.hpp"
#include "itdopf/io/result.hpp"
#include "itdopf/net/case.hpp"
#include "itdopf/nlp/solver.hpp"

namespace itdopf::prob {

/// Solved ITD problem: raw solver output plus the decoded result document.
/// The model is kept so downstream checks can evaluate constraint residuals
/// at the returned point.
struct ITDResult {
  nlp::SolveStatus status = nlp::SolveStatus::NumericalFailure;
  double objective = 0;  ///< $/hr
  int iterations = 0;
  double solve_seconds = 0;
  form::ItdModel model;
  nlp::Solution solution;
  io::ResultDocument document;
};

/// Assemble the OPFITD model: component variables, physics constraints,
/// boundary coupling, minimum fuel cost objective. Throws
/// std::invalid_argument when validate_case reports violations.
form::ItdModel build_opfitd(const net::ITDCase& c, form::Formulation form);

ITDResult solve_opfitd(const net::ITDCase& c, form::Formulation form,
                       const nlp::SolverOptions& opts = {});

/// Generator setpoints for the power-flow problem: every non-reference
/// transmission generator gets a fixed P (and its bus a fixed V where the
/// formulation carries voltage magnitudes); distribution generators get
/// fixed per-phase P and Q. The boundary import absorbs each feeder's
/// remaining degree of freedom.
struct Setpoints {
  struct TransGenSetpoint {
    int gen = 0;        ///< generator index
    double p_pu = 0;
    std::optional<double> v_pu;  ///< bus voltage magnitude
  };
  struct DistGenSetpoint {
    int feeder = 0;
    int gen = 0;
    net::PhaseVec p_pu{};
    net::PhaseVec q_pu{};
  };
  std::vector<TransGenSetpoint> trans;
  std::vector<DistGenSetpoint> dist;
};

/// Setpoints copied from a solved OPFITD result.
Setpoints setpoints_from_result(const net::ITDCase& c, const ITDResult& r);

form::ItdModel build_pfitd(const net::ITDCase& c, form::Formulation form,
                           const Setpoints& sp);
ITDResult solve_pfitd(const net::ITDCase& c, form::Formulation form, const Setpoints& sp,
                      const nlp::SolverOptions& opts = {});

/// One decoupled sub-solve of the independent coordination run.
struct SubSolve {
  nlp::SolveStatus status = nlp::SolveStatus::NumericalFailure;
  double objective = 0;  ///< $/hr
  int iterations = 0;
  double solve_seconds = 0;
};

/// Independent coordination: feeders solved first with DG headroom held
/// back, their source imports turned into transmission loads, transmission
/// solved last, costs and runtimes summed.
struct IndependentResult {
  std::vector<SubSolve> feeders;
  std::vector<net::PhaseVec> feeder_import_p;  ///< slack P per phase, feeder p.u.
  std::vector<net::PhaseVec> feeder_import_q;
  SubSolve transmission;
  double total_cost = 0;
  double total_runtime = 0;
  int total_iterations = 0;
  bool all_optimal = false;
};

IndependentResult solve_independent(const net::ITDCase& c, form::Formulation form,
                                    double reserve_fraction,
                                    const nlp::SolverOptions& opts = {},
                                    bool parallel = false);

struct ComparisonRow {
  form::Formulation formulation = form::Formulation::AcpAcpu;
  bool independent_ok = false;
  double independent_cost = 0, independent_time = 0;
  int independent_iterations = 0;
  bool itd_ok = false;
  double itd_cost = 0, itd_time = 0;
  int itd_iterations = 0;
  double diff_cost = 0, diff_time = 0;
  int diff_iterations = 0;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;
  bool all_ok() const {
    for (const auto& r : rows)
      if (!r.independent_ok || !r.itd_ok) return false;
    return true;
  }
};

/// Runs solve_independent and solve_opfitd per formulation; failures mark
/// the row and the table is still produced.
ComparisonTable compare(const net::ITDCase& c, std::span<const form::Formulation> forms,
                        double reserve_fraction, const nlp::SolverOptions& opts = {},
                        bool parallel = false);

std::string comparison_csv(const ComparisonTable& t);
std::string comparison_json(const ComparisonTable& t);

struct SweepRow {
  int k = 0;
  int total_nodes = 0;
  bool ok = false;
  double cost = 0;
  double seconds = 0;
  int iterations = 0;
};

struct SweepReport {
  std::vector<SweepRow> rows;
  bool all_ok() const {
    for (const auto& r : rows)
      if (!r.ok) return false;
    return true;
  }
};

/// Attach k feeder clones (k = k_from..k_to) at the given load buses and
/// solve each configuration; per-k failures are recorded and the sweep
/// continues. Clone bus names get a "#k" suffix.
SweepReport scale_sweep(const net::TransmissionNetwork& trans,
                        const net::DistributionNetwork& feeder_template,
                        std::span<const int> attach_buses, int k_from, int k_to,
                        form::Formulation form, const nlp::SolverOptions& opts = {},
                        bool parallel = false);

std::string sweep_csv(const SweepReport& t);
std::string sweep_json(const SweepReport& t);

/// Case with k feeder clones attached (used by the sweep and its tests).
net::ITDCase clone_case(const net::TransmissionNetwork& trans,
                        const net::DistributionNetwork& feeder_template,
                        std::span<const int> attach_buses, int k);

}  // namespace itdopf::prob
