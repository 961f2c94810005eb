#pragma once

#include <array>
#include <string>
#include <vector>

#include "itdopf/form/formulation.hpp"
#include "itdopf/net/case.hpp"

namespace itdopf::form {

enum class VarOwner { Trans, Dist, BoundaryTrans, BoundaryDist };

enum class VarKind {
  Vm, Va, Vre, Vim,       // voltages
  Pg, Qg,                 // generator powers
  Pflow, Qflow,           // directed branch/line powers
  IrFlow, IiFlow,         // directed branch/line currents (IVR)
  IrGen, IiGen,           // generator currents (IVR)
  IrLoad, IiLoad,         // load currents (IVR)
  Pbound, Qbound,         // boundary powers
  IrBound, IiBound,       // boundary currents (IVR)
};

struct VarInfo {
  std::string name;
  VarOwner owner;
  VarKind kind;
  int feeder;  ///< feeder index for Dist/BoundaryDist, else -1
  double lb, ub, x0;
};

/// Flat variable registry for one assembled model.
class VariablePool {
 public:
  int add(std::string name, VarOwner owner, VarKind kind, int feeder, double lb,
          double ub, double x0) {
    vars_.push_back({std::move(name), owner, kind, feeder, lb, ub, x0});
    return static_cast<int>(vars_.size()) - 1;
  }
  int size() const { return static_cast<int>(vars_.size()); }
  const VarInfo& info(int i) const { return vars_[static_cast<size_t>(i)]; }
  const std::vector<VarInfo>& all() const { return vars_; }

  int count_kind(VarKind kind) const {
    int c = 0;
    for (const auto& v : vars_)
      if (v.kind == kind) ++c;
    return c;
  }
  int count_owner(VarOwner owner) const {
    int c = 0;
    for (const auto& v : vars_)
      if (v.owner == owner) ++c;
    return c;
  }

 private:
  std::vector<VarInfo> vars_;
};

/// Index tables into the pool; -1 marks "not present in this formulation".
/// Directed branch slot convention: branch e owns slots 2e (from side, i->j)
/// and 2e+1 (to side, j->i).
struct TransVariableSpace {
  Formulation form = Formulation::AcpAcpu;
  std::vector<int> vm, va;          // ACP
  std::vector<int> vre, vim;        // ACR / IVR
  std::vector<int> pg, qg;          // per in-service generator slot (gen index aligned)
  std::vector<int> p_flow, q_flow;  // per directed branch
  std::vector<int> ir_flow, ii_flow;
  std::vector<int> ir_gen, ii_gen;
  std::vector<int> ir_load, ii_load;  // per bus, -1 when no load current needed
};

/// Per-feeder tables; node-phase slot n*3+p, line-direction-phase slot
/// ((line*2+dir)*3 + p).
struct DistVariableSpace {
  Formulation form = Formulation::AcpAcpu;
  int feeder = -1;
  std::vector<int> vm, va, vre, vim;  // node-phase slots
  std::vector<int> pg, qg;            // gen-phase slots (gen*3+p)
  std::vector<int> p_flow, q_flow;    // line-direction-phase slots
  std::vector<int> ir_flow, ii_flow;
  std::vector<int> ir_gen, ii_gen;    // gen-phase slots
  std::vector<int> ir_load, ii_load;  // load-phase slots
};

/// Boundary variables of one link ("variable_boundary_power": created once
/// per link). The distribution-side values are in feeder per-unit.
struct LinkVars {
  int p_trans = -1, q_trans = -1;
  int ir_trans = -1, ii_trans = -1;
  std::array<int, 3> p_dist = {-1, -1, -1};
  std::array<int, 3> q_dist = {-1, -1, -1};
  std::array<int, 3> ir_dist = {-1, -1, -1};
  std::array<int, 3> ii_dist = {-1, -1, -1};
};

/// Instantiate the variables of each component. The boundary variables are
/// created once per link, before the constraint builders run.
TransVariableSpace add_transmission_variables(VariablePool& pool, Formulation form,
                                              const net::TransmissionNetwork& net);
DistVariableSpace add_distribution_variables(VariablePool& pool, Formulation form,
                                             const net::DistributionNetwork& feeder,
                                             int feeder_index, bool linked);
std::vector<LinkVars> add_boundary_variables(VariablePool& pool, Formulation form,
                                             const net::ResolvedLinks& links);

}  // namespace itdopf::form
