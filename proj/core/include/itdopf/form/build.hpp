#pragma once

#include <stdexcept>

#include "itdopf/form/variables.hpp"
#include "itdopf/nlp/model.hpp"

namespace itdopf::form {

class UnsupportedFormulation : public std::runtime_error {
 public:
  explicit UnsupportedFormulation(const std::string& what) : std::runtime_error(what) {}
};

/// Transmission-side constraint blocks. Buses that carry a boundary link get
/// the boundary-extended power balance; everything else gets the standard
/// balance.
std::vector<nlp::BlockPtr> build_transmission(Formulation form,
                                              const net::TransmissionNetwork& net,
                                              const TransVariableSpace& sp,
                                              const net::ResolvedLinks& links,
                                              const std::vector<LinkVars>& link_vars);

/// Distribution-side constraint blocks for one feeder. `lv` is null for an
/// isolated feeder (which then gets its own source-bus angle reference);
/// linked feeders are pinned transitively through the boundary ties.
std::vector<nlp::BlockPtr> build_distribution(Formulation form,
                                              const net::DistributionNetwork& feeder,
                                              const DistVariableSpace& sp,
                                              int source_bus_index, const LinkVars* lv);

/// Boundary coupling blocks, one group per link.
std::vector<nlp::BlockPtr> build_boundary(Formulation form, const net::ITDCase& c,
                                          const TransVariableSpace& trans,
                                          const std::vector<DistVariableSpace>& dist,
                                          const std::vector<LinkVars>& link_vars);

/// Fuel-cost objective: sum over generators of c2 P^2 + c1 P + c0 with P in
/// MW; distribution generators contribute through their phase sums.
struct ObjectiveGroup {
  std::vector<int> vars;
  double scale;  ///< MW per p.u. of the summed variables
  net::GenCost cost;
};
struct Objective {
  std::vector<ObjectiveGroup> groups;
};

Objective objective_min_fuel_cost(const net::ITDCase& c, const TransVariableSpace& trans,
                                  const std::vector<DistVariableSpace>& dist);
void attach_objective(nlp::NlpModel& model, Objective obj);
void attach_zero_objective(nlp::NlpModel& model);

/// Full model: variables, physics, boundary coupling, min-fuel-cost
/// objective, flat-start initial point.
struct ItdModel {
  VariablePool pool;
  TransVariableSpace trans;
  std::vector<DistVariableSpace> dist;
  std::vector<LinkVars> links;
  nlp::NlpModel nlp;
};

ItdModel build_itd_model(const net::ITDCase& c, Formulation form);

}  // namespace itdopf::form
