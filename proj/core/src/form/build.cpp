#include "itdopf/form/build.hpp"

#include <cmath>
#include <memory>

#include "itdopf/form/admittance.hpp"
#include "itdopf/form/blocks.hpp"

namespace itdopf::form {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPiThirds = 2.0943951023931953;
constexpr double kHalfPi = 1.5707963267948966;

using nlp::BlockOwner;

Eigen::VectorXd zeros(int n) { return Eigen::VectorXd::Zero(n); }

double flat_angle(int phase) {
  return phase == 1 ? -kTwoPiThirds : phase == 2 ? kTwoPiThirds : 0.0;
}

double safe_tan(double angle) {
  const double lim = kHalfPi - 0.05;
  return std::tan(std::min(std::max(angle, -lim), lim));
}

// directed slots (2e = from side, 2e+1 = to side) incident to each bus
std::vector<std::vector<int>> trans_dirs_at_bus(const net::TransmissionNetwork& net) {
  std::vector<std::vector<int>> out(net.buses.size());
  for (size_t e = 0; e < net.branches.size(); ++e) {
    const int fi = net.bus_index(net.branches[e].from);
    const int ti = net.bus_index(net.branches[e].to);
    out[fi].push_back(static_cast<int>(2 * e));
    out[ti].push_back(static_cast<int>(2 * e + 1));
  }
  return out;
}

std::vector<std::vector<int>> trans_gens_at_bus(const net::TransmissionNetwork& net) {
  std::vector<std::vector<int>> out(net.buses.size());
  for (size_t k = 0; k < net.generators.size(); ++k) {
    if (!net.generators[k].status) continue;
    out[net.bus_index(net.generators[k].bus)].push_back(static_cast<int>(k));
  }
  return out;
}

std::vector<std::vector<int>> dist_dirs_at_bus(const net::DistributionNetwork& f) {
  std::vector<std::vector<int>> out(f.nodes.size());
  for (size_t e = 0; e < f.lines.size(); ++e) {
    out[f.bus_index(f.lines[e].from)].push_back(static_cast<int>(2 * e));
    out[f.bus_index(f.lines[e].to)].push_back(static_cast<int>(2 * e + 1));
  }
  return out;
}

}  // namespace

// --------------------------------------------------------------- transmission

std::vector<nlp::BlockPtr> build_transmission(Formulation form,
                                              const net::TransmissionNetwork& net,
                                              const TransVariableSpace& sp,
                                              const net::ResolvedLinks& links,
                                              const std::vector<LinkVars>& link_vars) {
  std::vector<nlp::BlockPtr> blocks;
  const int nb = static_cast<int>(net.buses.size());
  const int ne = static_cast<int>(net.branches.size());
  const auto dirs_at = trans_dirs_at_bus(net);
  const auto gens_at = trans_gens_at_bus(net);

  // link attached to each bus (-1 if none)
  std::vector<int> link_at(nb, -1);
  for (size_t l = 0; l < links.links.size(); ++l)
    link_at[links.links[l].trans_bus_index] = static_cast<int>(l);

  // reference constraint
  {
    std::vector<LinearRow> rows;
    for (int i = 0; i < nb; ++i) {
      if (!net.buses[i].is_reference) continue;
      if (form == Formulation::AcpAcpu)
        rows.push_back({{{sp.va[i], 1.0}}, 0.0});
      else if (is_rectangular(form))
        rows.push_back({{{sp.vim[i], 1.0}}, 0.0});
    }
    if (!rows.empty()) {
      const int n = static_cast<int>(rows.size());
      blocks.push_back(std::make_shared<LinearBlock>(
          "trans_ref_angle", BlockOwner::Transmission, std::move(rows), zeros(n), zeros(n)));
    }
  }

  // branch flow definitions
  if (form == Formulation::AcpAcpu) {
    std::vector<PolarFlowRow> rows;
    for (int e = 0; e < ne; ++e) {
      const auto& br = net.branches[e];
      const BranchY y = branch_admittance(br);
      const int i = net.bus_index(br.from), j = net.bus_index(br.to);
      const auto term = [&](int b1, int b2, std::complex<double> Y) {
        return PolarTerm{sp.vm[b1], sp.va[b1], sp.vm[b2], sp.va[b2], Y.real(), Y.imag()};
      };
      for (const bool reactive : {false, true}) {
        rows.push_back({reactive ? sp.q_flow[2 * e] : sp.p_flow[2 * e], reactive,
                        {term(i, i, y.ff), term(i, j, y.ft)}});
        rows.push_back({reactive ? sp.q_flow[2 * e + 1] : sp.p_flow[2 * e + 1], reactive,
                        {term(j, i, y.tf), term(j, j, y.tt)}});
      }
    }
    blocks.push_back(std::make_shared<PolarFlowBlock>("trans_flow_acp",
                                                      BlockOwner::Transmission,
                                                      std::move(rows)));
  } else if (form == Formulation::AcrAcru) {
    std::vector<RectFlowRow> rows;
    for (int e = 0; e < ne; ++e) {
      const auto& br = net.branches[e];
      const BranchY y = branch_admittance(br);
      const int i = net.bus_index(br.from), j = net.bus_index(br.to);
      const auto term = [&](int b1, int b2, std::complex<double> Y) {
        return RectTerm{sp.vre[b1], sp.vim[b1], sp.vre[b2], sp.vim[b2], Y.real(), Y.imag()};
      };
      for (const bool reactive : {false, true}) {
        rows.push_back({reactive ? sp.q_flow[2 * e] : sp.p_flow[2 * e], reactive,
                        {term(i, i, y.ff), term(i, j, y.ft)}});
        rows.push_back({reactive ? sp.q_flow[2 * e + 1] : sp.p_flow[2 * e + 1], reactive,
                        {term(j, i, y.tf), term(j, j, y.tt)}});
      }
    }
    blocks.push_back(std::make_shared<RectFlowBlock>("trans_flow_acr",
                                                     BlockOwner::Transmission,
                                                     std::move(rows)));
  } else if (form == Formulation::IvrIvru) {
    // linear Ohm's law branch equations plus bilinear flow power definitions
    std::vector<LinearRow> ohm;
    std::vector<VIRow> defs;
    for (int e = 0; e < ne; ++e) {
      const auto& br = net.branches[e];
      const BranchY y = branch_admittance(br);
      const int i = net.bus_index(br.from), j = net.bus_index(br.to);
      const auto current_rows = [&](int slot, int b1, std::complex<double> Y1, int b2,
                                    std::complex<double> Y2) {
        ohm.push_back({{{sp.ir_flow[slot], 1.0},
                        {sp.vre[b1], -Y1.real()},
                        {sp.vim[b1], Y1.imag()},
                        {sp.vre[b2], -Y2.real()},
                        {sp.vim[b2], Y2.imag()}},
                       0.0});
        ohm.push_back({{{sp.ii_flow[slot], 1.0},
                        {sp.vim[b1], -Y1.real()},
                        {sp.vre[b1], -Y1.imag()},
                        {sp.vim[b2], -Y2.real()},
                        {sp.vre[b2], -Y2.imag()}},
                       0.0});
      };
      current_rows(2 * e, i, y.ff, j, y.ft);
      current_rows(2 * e + 1, i, y.tf, j, y.tt);
      const auto def_rows = [&](int slot, int bus) {
        for (const bool reactive : {false, true}) {
          VIRow row;
          row.lin = {{reactive ? sp.q_flow[slot] : sp.p_flow[slot], 1.0}};
          row.combos = {{sp.vre[bus], sp.vim[bus], sp.ir_flow[slot], sp.ii_flow[slot],
                         reactive, -1.0}};
          defs.push_back(std::move(row));
        }
      };
      def_rows(2 * e, i);
      def_rows(2 * e + 1, j);
    }
    const int no = static_cast<int>(ohm.size());
    blocks.push_back(std::make_shared<LinearBlock>("trans_branch_iv",
                                                   BlockOwner::Transmission,
                                                   std::move(ohm), zeros(no), zeros(no)));
    const int nd = static_cast<int>(defs.size());
    blocks.push_back(std::make_shared<BilinearVIBlock>("trans_flow_def_iv",
                                                       BlockOwner::Transmission,
                                                       std::move(defs), zeros(nd),
                                                       zeros(nd)));
  } else {  // NFA: lossless pairing
    std::vector<LinearRow> rows;
    for (int e = 0; e < ne; ++e)
      rows.push_back({{{sp.p_flow[2 * e], 1.0}, {sp.p_flow[2 * e + 1], 1.0}}, 0.0});
    blocks.push_back(std::make_shared<LinearBlock>("trans_flow_nfa",
                                                   BlockOwner::Transmission,
                                                   std::move(rows), zeros(ne), zeros(ne)));
  }

  // generator and load power definitions (IVR only)
  if (form == Formulation::IvrIvru) {
    std::vector<VIRow> rows;
    for (size_t k = 0; k < net.generators.size(); ++k) {
      if (!net.generators[k].status) continue;
      const int bus = net.bus_index(net.generators[k].bus);
      for (const bool reactive : {false, true}) {
        VIRow row;
        row.lin = {{reactive ? sp.qg[k] : sp.pg[k], 1.0}};
        row.combos = {
            {sp.vre[bus], sp.vim[bus], sp.ir_gen[k], sp.ii_gen[k], reactive, -1.0}};
        rows.push_back(std::move(row));
      }
    }
    for (int i = 0; i < nb; ++i) {
      if (sp.ir_load[i] < 0) continue;
      const auto& b = net.buses[i];
      for (const bool reactive : {false, true}) {
        VIRow row;
        row.constant = -(reactive ? b.qd : b.pd);
        row.combos = {{sp.vre[i], sp.vim[i], sp.ir_load[i], sp.ii_load[i], reactive, 1.0}};
        rows.push_back(std::move(row));
      }
    }
    if (!rows.empty()) {
      const int n = static_cast<int>(rows.size());
      blocks.push_back(std::make_shared<BilinearVIBlock>(
          "trans_power_def_iv", BlockOwner::Transmission, std::move(rows), zeros(n),
          zeros(n)));
    }
  }

  // bus power (or current) balance, boundary-extended at linked buses
  if (form == Formulation::AcpAcpu || form == Formulation::AcrAcru) {
    std::vector<QuadLinRow> rows;
    for (int i = 0; i < nb; ++i) {
      const auto& b = net.buses[i];
      for (const bool reactive : {false, true}) {
        QuadLinRow row;
        row.constant = -(reactive ? b.qd : b.pd);
        for (int k : gens_at[i]) row.lin.push_back({reactive ? sp.qg[k] : sp.pg[k], 1.0});
        for (int d : dirs_at[i])
          row.lin.push_back({reactive ? sp.q_flow[d] : sp.p_flow[d], -1.0});
        if (link_at[i] >= 0)
          row.lin.push_back({reactive ? link_vars[link_at[i]].q_trans
                                      : link_vars[link_at[i]].p_trans,
                             -1.0});
        const double shunt = reactive ? b.bs : -b.gs;
        if (shunt != 0.0) {
          if (form == Formulation::AcpAcpu) {
            row.quad.push_back({sp.vm[i], shunt});
          } else {
            row.quad.push_back({sp.vre[i], shunt});
            row.quad.push_back({sp.vim[i], shunt});
          }
        }
        rows.push_back(std::move(row));
      }
    }
    const int n = static_cast<int>(rows.size());
    blocks.push_back(std::make_shared<QuadLinBlock>("trans_balance",
                                                    BlockOwner::Transmission,
                                                    std::move(rows), zeros(n), zeros(n)));
  } else if (form == Formulation::IvrIvru) {
    std::vector<LinearRow> rows;
    for (int i = 0; i < nb; ++i) {
      const auto& b = net.buses[i];
      for (const bool imag : {false, true}) {
        LinearRow row;
        for (int k : gens_at[i]) row.terms.push_back({imag ? sp.ii_gen[k] : sp.ir_gen[k], 1.0});
        if (sp.ir_load[i] >= 0)
          row.terms.push_back({imag ? sp.ii_load[i] : sp.ir_load[i], -1.0});
        // shunt current (gs + j bs)(e + j f)
        if (b.gs != 0.0 || b.bs != 0.0) {
          if (!imag) {
            row.terms.push_back({sp.vre[i], -b.gs});
            row.terms.push_back({sp.vim[i], b.bs});
          } else {
            row.terms.push_back({sp.vim[i], -b.gs});
            row.terms.push_back({sp.vre[i], -b.bs});
          }
        }
        for (int d : dirs_at[i])
          row.terms.push_back({imag ? sp.ii_flow[d] : sp.ir_flow[d], -1.0});
        if (link_at[i] >= 0)
          row.terms.push_back({imag ? link_vars[link_at[i]].ii_trans
                                    : link_vars[link_at[i]].ir_trans,
                               -1.0});
        rows.push_back(std::move(row));
      }
    }
    const int n = static_cast<int>(rows.size());
    blocks.push_back(std::make_shared<LinearBlock>("trans_balance_iv",
                                                   BlockOwner::Transmission,
                                                   std::move(rows), zeros(n), zeros(n)));
  } else {  // NFA
    std::vector<LinearRow> rows;
    for (int i = 0; i < nb; ++i) {
      const auto& b = net.buses[i];
      LinearRow row;
      row.constant = -b.pd - b.gs;  // shunt evaluated at unit voltage
      for (int k : gens_at[i]) row.terms.push_back({sp.pg[k], 1.0});
      for (int d : dirs_at[i]) row.terms.push_back({sp.p_flow[d], -1.0});
      if (link_at[i] >= 0) row.terms.push_back({link_vars[link_at[i]].p_trans, -1.0});
      rows.push_back(std::move(row));
    }
    blocks.push_back(std::make_shared<LinearBlock>("trans_balance_nfa",
                                                   BlockOwner::Transmission,
                                                   std::move(rows), zeros(nb), zeros(nb)));
  }

  // voltage magnitude limits (quadratic rows in rectangular coordinates;
  // variable bounds already cover the polar case)
  if (is_rectangular(form)) {
    std::vector<QuadLinRow> rows;
    Eigen::VectorXd lo(nb), hi(nb);
    for (int i = 0; i < nb; ++i) {
      QuadLinRow row;
      row.quad = {{sp.vre[i], 1.0}, {sp.vim[i], 1.0}};
      lo[i] = net.buses[i].v_min * net.buses[i].v_min;
      hi[i] = net.buses[i].v_max * net.buses[i].v_max;
      rows.push_back(std::move(row));
    }
    blocks.push_back(std::make_shared<QuadLinBlock>(
        "trans_vm_limits", BlockOwner::Transmission, std::move(rows), lo, hi));
  }

  // angle difference limits
  if (form == Formulation::AcpAcpu) {
    std::vector<LinearRow> rows;
    Eigen::VectorXd lo(ne), hi(ne);
    for (int e = 0; e < ne; ++e) {
      const auto& br = net.branches[e];
      const int i = net.bus_index(br.from), j = net.bus_index(br.to);
      rows.push_back({{{sp.va[i], 1.0}, {sp.va[j], -1.0}}, 0.0});
      lo[e] = br.angmin;
      hi[e] = br.angmax;
    }
    blocks.push_back(std::make_shared<LinearBlock>(
        "trans_angle_diff", BlockOwner::Transmission, std::move(rows), lo, hi));
  } else if (is_rectangular(form)) {
    std::vector<PadTanRow> rows;
    std::vector<double> lov, hiv;
    for (int e = 0; e < ne; ++e) {
      const auto& br = net.branches[e];
      const int i = net.bus_index(br.from), j = net.bus_index(br.to);
      rows.push_back({sp.vre[i], sp.vim[i], sp.vre[j], sp.vim[j], safe_tan(br.angmax)});
      lov.push_back(-kInf);
      hiv.push_back(0.0);
      rows.push_back({sp.vre[i], sp.vim[i], sp.vre[j], sp.vim[j], safe_tan(br.angmin)});
      lov.push_back(0.0);
      hiv.push_back(kInf);
    }
    Eigen::VectorXd lo = Eigen::Map<Eigen::VectorXd>(lov.data(), lov.size());
    Eigen::VectorXd hi = Eigen::Map<Eigen::VectorXd>(hiv.data(), hiv.size());
    blocks.push_back(std::make_shared<PadTanBlock>(
        "trans_angle_diff_rect", BlockOwner::Transmission, std::move(rows), lo, hi));
  }

  return blocks;
}

// --------------------------------------------------------------- distribution

std::vector<nlp::BlockPtr> build_distribution(Formulation form,
                                              const net::DistributionNetwork& feeder,
                                              const DistVariableSpace& sp,
                                              int source_bus_index, const LinkVars* lv) {
  std::vector<nlp::BlockPtr> blocks;
  const int nb = static_cast<int>(feeder.nodes.size());
  const int nl = static_cast<int>(feeder.lines.size());
  const auto dirs_at = dist_dirs_at_bus(feeder);
  const std::string fx = "dist" + std::to_string(sp.feeder) + "_";

  std::vector<std::vector<int>> gens_at(nb), loads_at(nb);
  for (size_t k = 0; k < feeder.generators.size(); ++k)
    if (feeder.generators[k].status)
      gens_at[feeder.bus_index(feeder.generators[k].bus)].push_back(static_cast<int>(k));
  for (size_t d = 0; d < feeder.loads.size(); ++d)
    loads_at[feeder.bus_index(feeder.loads[d].bus)].push_back(static_cast<int>(d));

  // source-bus angle reference for isolated feeders; linked feeders are
  // pinned through the boundary angle ties
  if (lv == nullptr && has_voltage(form)) {
    std::vector<LinearRow> rows;
    for (int p = 0; p < net::kNumPhases; ++p) {
      if (!feeder.nodes[source_bus_index].phases[p]) continue;
      const double a = flat_angle(p);
      if (form == Formulation::AcpAcpu)
        rows.push_back({{{sp.va[3 * source_bus_index + p], 1.0}}, -a});
      else
        rows.push_back({{{sp.vre[3 * source_bus_index + p], -std::sin(a)},
                         {sp.vim[3 * source_bus_index + p], std::cos(a)}},
                        0.0});
    }
    const int n = static_cast<int>(rows.size());
    blocks.push_back(std::make_shared<LinearBlock>(fx + "ref_angle",
                                                   BlockOwner::Distribution,
                                                   std::move(rows), zeros(n), zeros(n)));
  }

  // line flow definitions with full mutual coupling
  if (form == Formulation::AcpAcpu) {
    std::vector<PolarFlowRow> rows;
    for (int e = 0; e < nl; ++e) {
      const auto& ln = feeder.lines[e];
      const LineY y = line_admittance(ln);
      const int i = feeder.bus_index(ln.from), j = feeder.bus_index(ln.to);
      for (int dir = 0; dir < 2; ++dir)
        for (int p = 0; p < net::kNumPhases; ++p) {
          if (!ln.phases[p]) continue;
          const int slot = (2 * e + dir) * 3 + p;
          const int self = dir == 0 ? i : j;
          const int other = dir == 0 ? j : i;
          for (const bool reactive : {false, true}) {
            PolarFlowRow row;
            row.target = reactive ? sp.q_flow[slot] : sp.p_flow[slot];
            row.reactive = reactive;
            for (int q = 0; q < net::kNumPhases; ++q) {
              if (!ln.phases[q]) continue;
              const std::complex<double> y_self = dir == 0 ? y.ff[p][q] : y.tt[p][q];
              const std::complex<double> y_other = dir == 0 ? y.ft[p][q] : y.tf[p][q];
              row.terms.push_back({sp.vm[3 * self + p], sp.va[3 * self + p],
                                   sp.vm[3 * self + q], sp.va[3 * self + q],
                                   y_self.real(), y_self.imag()});
              row.terms.push_back({sp.vm[3 * self + p], sp.va[3 * self + p],
                                   sp.vm[3 * other + q], sp.va[3 * other + q],
                                   y_other.real(), y_other.imag()});
            }
            rows.push_back(std::move(row));
          }
        }
    }
    blocks.push_back(std::make_shared<PolarFlowBlock>(fx + "flow_acpu",
                                                      BlockOwner::Distribution,
                                                      std::move(rows)));
  } else if (form == Formulation::AcrAcru) {
    std::vector<RectFlowRow> rows;
    for (int e = 0; e < nl; ++e) {
      const auto& ln = feeder.lines[e];
      const LineY y = line_admittance(ln);
      const int i = feeder.bus_index(ln.from), j = feeder.bus_index(ln.to);
      for (int dir = 0; dir < 2; ++dir)
        for (int p = 0; p < net::kNumPhases; ++p) {
          if (!ln.phases[p]) continue;
          const int slot = (2 * e + dir) * 3 + p;
          const int self = dir == 0 ? i : j;
          const int other = dir == 0 ? j : i;
          for (const bool reactive : {false, true}) {
            RectFlowRow row;
            row.target = reactive ? sp.q_flow[slot] : sp.p_flow[slot];
            row.reactive = reactive;
            for (int q = 0; q < net::kNumPhases; ++q) {
              if (!ln.phases[q]) continue;
              const std::complex<double> y_self = dir == 0 ? y.ff[p][q] : y.tt[p][q];
              const std::complex<double> y_other = dir == 0 ? y.ft[p][q] : y.tf[p][q];
              row.terms.push_back({sp.vre[3 * self + p], sp.vim[3 * self + p],
                                   sp.vre[3 * self + q], sp.vim[3 * self + q],
                                   y_self.real(), y_self.imag()});
              row.terms.push_back({sp.vre[3 * self + p], sp.vim[3 * self + p],
                                   sp.vre[3 * other + q], sp.vim[3 * other + q],
                                   y_other.real(), y_other.imag()});
            }
            rows.push_back(std::move(row));
          }
        }
    }
    blocks.push_back(std::make_shared<RectFlowBlock>(fx + "flow_acru",
                                                     BlockOwner::Distribution,
                                                     std::move(rows)));
  } else if (form == Formulation::IvrIvru) {
    std::vector<LinearRow> ohm;
    std::vector<VIRow> defs;
    for (int e = 0; e < nl; ++e) {
      const auto& ln = feeder.lines[e];
      const LineY y = line_admittance(ln);
      const int i = feeder.bus_index(ln.from), j = feeder.bus_index(ln.to);
      for (int dir = 0; dir < 2; ++dir)
        for (int p = 0; p < net::kNumPhases; ++p) {
          if (!ln.phases[p]) continue;
          const int slot = (2 * e + dir) * 3 + p;
          const int self = dir == 0 ? i : j;
          const int other = dir == 0 ? j : i;
          LinearRow re_row, im_row;
          re_row.terms.push_back({sp.ir_flow[slot], 1.0});
          im_row.terms.push_back({sp.ii_flow[slot], 1.0});
          for (int q = 0; q < net::kNumPhases; ++q) {
            if (!ln.phases[q]) continue;
            const std::complex<double> y_self = dir == 0 ? y.ff[p][q] : y.tt[p][q];
            const std::complex<double> y_other = dir == 0 ? y.ft[p][q] : y.tf[p][q];
            re_row.terms.push_back({sp.vre[3 * self + q], -y_self.real()});
            re_row.terms.push_back({sp.vim[3 * self + q], y_self.imag()});
            re_row.terms.push_back({sp.vre[3 * other + q], -y_other.real()});
            re_row.terms.push_back({sp.vim[3 * other + q], y_other.imag()});
            im_row.terms.push_back({sp.vim[3 * self + q], -y_self.real()});
            im_row.terms.push_back({sp.vre[3 * self + q], -y_self.imag()});
            im_row.terms.push_back({sp.vim[3 * other + q], -y_other.real()});
            im_row.terms.push_back({sp.vre[3 * other + q], -y_other.imag()});
          }
          ohm.push_back(std::move(re_row));
          ohm.push_back(std::move(im_row));
          for (const bool reactive : {false, true}) {
            VIRow row;
            row.lin = {{reactive ? sp.q_flow[slot] : sp.p_flow[slot], 1.0}};
            row.combos = {{sp.vre[3 * self + p], sp.vim[3 * self + p], sp.ir_flow[slot],
                           sp.ii_flow[slot], reactive, -1.0}};
            defs.push_back(std::move(row));
          }
        }
    }
    const int no = static_cast<int>(ohm.size());
    blocks.push_back(std::make_shared<LinearBlock>(fx + "line_iv",
                                                   BlockOwner::Distribution,
                                                   std::move(ohm), zeros(no), zeros(no)));
    // generator and load power definitions
    for (size_t k = 0; k < feeder.generators.size(); ++k) {
      if (!feeder.generators[k].status) continue;
      const int bus = feeder.bus_index(feeder.generators[k].bus);
      for (int p = 0; p < net::kNumPhases; ++p) {
        if (sp.pg[3 * k + p] < 0) continue;
        for (const bool reactive : {false, true}) {
          VIRow row;
          row.lin = {{reactive ? sp.qg[3 * k + p] : sp.pg[3 * k + p], 1.0}};
          row.combos = {{sp.vre[3 * bus + p], sp.vim[3 * bus + p], sp.ir_gen[3 * k + p],
                         sp.ii_gen[3 * k + p], reactive, -1.0}};
          defs.push_back(std::move(row));
        }
      }
    }
    for (size_t d = 0; d < feeder.loads.size(); ++d) {
      const auto& ld = feeder.loads[d];
      const int bus = feeder.bus_index(ld.bus);
      for (int p = 0; p < net::kNumPhases; ++p) {
        if (sp.ir_load[3 * d + p] < 0) continue;
        for (const bool reactive : {false, true}) {
          VIRow row;
          row.constant = -(reactive ? ld.qd[p] : ld.pd[p]);
          row.combos = {{sp.vre[3 * bus + p], sp.vim[3 * bus + p], sp.ir_load[3 * d + p],
                         sp.ii_load[3 * d + p], reactive, 1.0}};
          defs.push_back(std::move(row));
        }
      }
    }
    const int nd2 = static_cast<int>(defs.size());
    blocks.push_back(std::make_shared<BilinearVIBlock>(
        fx + "power_def_iv", BlockOwner::Distribution, std::move(defs), zeros(nd2),
        zeros(nd2)));
  } else {  // NFAU
    std::vector<LinearRow> rows;
    for (int e = 0; e < nl; ++e)
      for (int p = 0; p < net::kNumPhases; ++p) {
        if (!feeder.lines[e].phases[p]) continue;
        rows.push_back(
            {{{sp.p_flow[(2 * e) * 3 + p], 1.0}, {sp.p_flow[(2 * e + 1) * 3 + p], 1.0}},
             0.0});
      }
    const int n = static_cast<int>(rows.size());
    blocks.push_back(std::make_shared<LinearBlock>(fx + "flow_nfau",
                                                   BlockOwner::Distribution,
                                                   std::move(rows), zeros(n), zeros(n)));
  }

  // per-phase node balance, boundary-extended at the linked source bus
  const bool src_linked = lv != nullptr;
  if (form == Formulation::AcpAcpu || form == Formulation::AcrAcru) {
    std::vector<QuadLinRow> rows;
    for (int i = 0; i < nb; ++i) {
      const auto& b = feeder.nodes[i];
      for (int p = 0; p < net::kNumPhases; ++p) {
        if (!b.phases[p]) continue;
        for (const bool reactive : {false, true}) {
          QuadLinRow row;
          double demand = 0;
          for (int d : loads_at[i])
            demand += reactive ? feeder.loads[d].qd[p] : feeder.loads[d].pd[p];
          row.constant = -demand;
          for (int k : gens_at[i])
            if (sp.pg[3 * k + p] >= 0)
              row.lin.push_back({reactive ? sp.qg[3 * k + p] : sp.pg[3 * k + p], 1.0});
          for (int d : dirs_at[i]) {
            const int slot = d * 3 + p;
            if (sp.p_flow[slot] >= 0)
              row.lin.push_back({reactive ? sp.q_flow[slot] : sp.p_flow[slot], -1.0});
          }
          if (src_linked && i == source_bus_index)
            row.lin.push_back({reactive ? lv->q_dist[p] : lv->p_dist[p], -1.0});
          const double shunt = reactive ? b.bs[p] : -b.gs[p];
          if (shunt != 0.0) {
            if (form == Formulation::AcpAcpu) {
              row.quad.push_back({sp.vm[3 * i + p], shunt});
            } else {
              row.quad.push_back({sp.vre[3 * i + p], shunt});
              row.quad.push_back({sp.vim[3 * i + p], shunt});
            }
          }
          rows.push_back(std::move(row));
        }
      }
    }
    const int n = static_cast<int>(rows.size());
    blocks.push_back(std::make_shared<QuadLinBlock>(fx + "balance",
                                                    BlockOwner::Distribution,
                                                    std::move(rows), zeros(n), zeros(n)));
  } else if (form == Formulation::IvrIvru) {
    std::vector<LinearRow> rows;
    for (int i = 0; i < nb; ++i) {
      const auto& b = feeder.nodes[i];
      for (int p = 0; p < net::kNumPhases; ++p) {
        if (!b.phases[p]) continue;
        for (const bool imag : {false, true}) {
          LinearRow row;
          for (int k : gens_at[i])
            if (sp.ir_gen[3 * k + p] >= 0)
              row.terms.push_back({imag ? sp.ii_gen[3 * k + p] : sp.ir_gen[3 * k + p], 1.0});
          for (int d : loads_at[i])
            if (sp.ir_load[3 * d + p] >= 0)
              row.terms.push_back(
                  {imag ? sp.ii_load[3 * d + p] : sp.ir_load[3 * d + p], -1.0});
          if (b.gs[p] != 0.0 || b.bs[p] != 0.0) {
            if (!imag) {
              row.terms.push_back({sp.vre[3 * i + p], -b.gs[p]});
              row.terms.push_back({sp.vim[3 * i + p], b.bs[p]});
            } else {
              row.terms.push_back({sp.vim[3 * i + p], -b.gs[p]});
              row.terms.push_back({sp.vre[3 * i + p], -b.bs[p]});
            }
          }
          for (int d : dirs_at[i]) {
            const int slot = d * 3 + p;
            if (sp.ir_flow[slot] >= 0)
              row.terms.push_back({imag ? sp.ii_flow[slot] : sp.ir_flow[slot], -1.0});
          }
          if (src_linked && i == source_bus_index)
            row.terms.push_back({imag ? lv->ii_dist[p] : lv->ir_dist[p], -1.0});
          rows.push_back(std::move(row));
        }
      }
    }
    const int n = static_cast<int>(rows.size());
    blocks.push_back(std::make_shared<LinearBlock>(fx + "balance_iv",
                                                   BlockOwner::Distribution,
                                                   std::move(rows), zeros(n), zeros(n)));
  } else {  // NFAU
    std::vector<LinearRow> rows;
    for (int i = 0; i < nb; ++i) {
      const auto& b = feeder.nodes[i];
      for (int p = 0; p < net::kNumPhases; ++p) {
        if (!b.phases[p]) continue;
        LinearRow row;
        double demand = 0;
        for (int d : loads_at[i]) demand += feeder.loads[d].pd[p];
        row.constant = -demand - b.gs[p];
        for (int k : gens_at[i])
          if (sp.pg[3 * k + p] >= 0) row.terms.push_back({sp.pg[3 * k + p], 1.0});
        for (int d : dirs_at[i]) {
          const int slot = d * 3 + p;
          if (sp.p_flow[slot] >= 0) row.terms.push_back({sp.p_flow[slot], -1.0});
        }
        if (src_linked && i == source_bus_index)
          row.terms.push_back({lv->p_dist[p], -1.0});
        rows.push_back(std::move(row));
      }
    }
    const int n = static_cast<int>(rows.size());
    blocks.push_back(std::make_shared<LinearBlock>(fx + "balance_nfau",
                                                   BlockOwner::Distribution,
                                                   std::move(rows), zeros(n), zeros(n)));
  }

  // voltage magnitude limits (rectangular)
  if (is_rectangular(form)) {
    std::vector<QuadLinRow> rows;
    std::vector<double> lov, hiv;
    for (int i = 0; i < nb; ++i) {
      const auto& b = feeder.nodes[i];
      for (int p = 0; p < net::kNumPhases; ++p) {
        if (!b.phases[p]) continue;
        QuadLinRow row;
        row.quad = {{sp.vre[3 * i + p], 1.0}, {sp.vim[3 * i + p], 1.0}};
        rows.push_back(std::move(row));
        lov.push_back(b.v_min[p] * b.v_min[p]);
        hiv.push_back(b.v_max[p] * b.v_max[p]);
      }
    }
    Eigen::VectorXd lo = Eigen::Map<Eigen::VectorXd>(lov.data(), lov.size());
    Eigen::VectorXd hi = Eigen::Map<Eigen::VectorXd>(hiv.data(), hiv.size());
    blocks.push_back(std::make_shared<QuadLinBlock>(
        fx + "vm_limits", BlockOwner::Distribution, std::move(rows), lo, hi));
  }

  // per-phase angle difference limits
  if (form == Formulation::AcpAcpu) {
    std::vector<LinearRow> rows;
    std::vector<double> lov, hiv;
    for (int e = 0; e < nl; ++e) {
      const auto& ln = feeder.lines[e];
      const int i = feeder.bus_index(ln.from), j = feeder.bus_index(ln.to);
      for (int p = 0; p < net::kNumPhases; ++p) {
        if (!ln.phases[p]) continue;
        rows.push_back({{{sp.va[3 * i + p], 1.0}, {sp.va[3 * j + p], -1.0}}, 0.0});
        lov.push_back(ln.angmin[p]);
        hiv.push_back(ln.angmax[p]);
      }
    }
    Eigen::VectorXd lo = Eigen::Map<Eigen::VectorXd>(lov.data(), lov.size());
    Eigen::VectorXd hi = Eigen::Map<Eigen::VectorXd>(hiv.data(), hiv.size());
    blocks.push_back(std::make_shared<LinearBlock>(fx + "angle_diff",
                                                   BlockOwner::Distribution,
                                                   std::move(rows), lo, hi));
  } else if (is_rectangular(form)) {
    std::vector<PadTanRow> rows;
    std::vector<double> lov, hiv;
    for (int e = 0; e < nl; ++e) {
      const auto& ln = feeder.lines[e];
      const int i = feeder.bus_index(ln.from), j = feeder.bus_index(ln.to);
      for (int p = 0; p < net::kNumPhases; ++p) {
        if (!ln.phases[p]) continue;
        const int ei = sp.vre[3 * i + p], fi = sp.vim[3 * i + p];
        const int ej = sp.vre[3 * j + p], fj = sp.vim[3 * j + p];
        rows.push_back({ei, fi, ej, fj, safe_tan(ln.angmax[p])});
        lov.push_back(-kInf);
        hiv.push_back(0.0);
        rows.push_back({ei, fi, ej, fj, safe_tan(ln.angmin[p])});
        lov.push_back(0.0);
        hiv.push_back(kInf);
      }
    }
    Eigen::VectorXd lo = Eigen::Map<Eigen::VectorXd>(lov.data(), lov.size());
    Eigen::VectorXd hi = Eigen::Map<Eigen::VectorXd>(hiv.data(), hiv.size());
    blocks.push_back(std::make_shared<PadTanBlock>(
        fx + "angle_diff_rect", BlockOwner::Distribution, std::move(rows), lo, hi));
  }

  return blocks;
}

// ------------------------------------------------------------------ boundary

std::vector<nlp::BlockPtr> build_boundary(Formulation form, const net::ITDCase& c,
                                          const TransVariableSpace& trans,
                                          const std::vector<DistVariableSpace>& dist,
                                          const std::vector<LinkVars>& link_vars) {
  std::vector<nlp::BlockPtr> blocks;
  for (size_t l = 0; l < c.boundary.links.size(); ++l) {
    const auto& link = c.boundary.links[l];
    const LinkVars& lv = link_vars[l];
    const DistVariableSpace& dsp = dist[link.feeder_index];
    const double kappa = link.base_factor;
    const int tb = link.trans_bus_index;
    const int db = link.dist_bus_index;
    const std::string lx = "link" + std::to_string(l) + "_";

    // power closure: sum_phi P_dist * kappa + P_trans = 0 (distribution
    // side converted onto the transmission power base)
    if (form != Formulation::IvrIvru) {
      std::vector<LinearRow> rows;
      {
        LinearRow p_row;
        for (int p = 0; p < net::kNumPhases; ++p)
          p_row.terms.push_back({lv.p_dist[p], kappa});
        p_row.terms.push_back({lv.p_trans, 1.0});
        rows.push_back(std::move(p_row));
      }
      if (has_reactive(form)) {
        LinearRow q_row;
        for (int p = 0; p < net::kNumPhases; ++p)
          q_row.terms.push_back({lv.q_dist[p], kappa});
        q_row.terms.push_back({lv.q_trans, 1.0});
        rows.push_back(std::move(q_row));
      }
      const int n = static_cast<int>(rows.size());
      blocks.push_back(std::make_shared<LinearBlock>(
          lx + "power", BlockOwner::Boundary, std::move(rows), zeros(n), zeros(n)));
    } else {
      // current-voltage products on both sides
      std::vector<VIRow> rows;
      for (const bool reactive : {false, true}) {
        VIRow row;
        row.combos.push_back(
            {trans.vre[tb], trans.vim[tb], lv.ir_trans, lv.ii_trans, reactive, 1.0});
        for (int p = 0; p < net::kNumPhases; ++p)
          row.combos.push_back({dsp.vre[3 * db + p], dsp.vim[3 * db + p], lv.ir_dist[p],
                                lv.ii_dist[p], reactive, kappa});
        rows.push_back(std::move(row));
      }
      blocks.push_back(std::make_shared<BilinearVIBlock>(
          lx + "power", BlockOwner::Boundary, std::move(rows), zeros(2), zeros(2)));

      // boundary power variables tied to the current-voltage products
      std::vector<VIRow> defs;
      for (const bool reactive : {false, true}) {
        VIRow row;
        row.lin = {{reactive ? lv.q_trans : lv.p_trans, 1.0}};
        row.combos = {
            {trans.vre[tb], trans.vim[tb], lv.ir_trans, lv.ii_trans, reactive, -1.0}};
        defs.push_back(std::move(row));
      }
      for (int p = 0; p < net::kNumPhases; ++p)
        for (const bool reactive : {false, true}) {
          VIRow row;
          row.lin = {{reactive ? lv.q_dist[p] : lv.p_dist[p], 1.0}};
          row.combos = {{dsp.vre[3 * db + p], dsp.vim[3 * db + p], lv.ir_dist[p],
                         lv.ii_dist[p], reactive, -1.0}};
          defs.push_back(std::move(row));
        }
      const int nd = static_cast<int>(defs.size());
      blocks.push_back(std::make_shared<BilinearVIBlock>(
          lx + "power_def", BlockOwner::Boundary, std::move(defs), zeros(nd), zeros(nd)));
    }

    if (form == Formulation::AcpAcpu) {
      std::vector<LinearRow> rows;
      for (int p = 0; p < net::kNumPhases; ++p)
        rows.push_back({{{trans.vm[tb], 1.0}, {dsp.vm[3 * db + p], -1.0}}, 0.0});
      rows.push_back({{{trans.va[tb], 1.0}, {dsp.va[3 * db + 0], -1.0}}, 0.0});
      rows.push_back(
          {{{dsp.va[3 * db + 1], 1.0}, {dsp.va[3 * db + 0], -1.0}}, kTwoPiThirds});
      rows.push_back(
          {{{dsp.va[3 * db + 2], 1.0}, {dsp.va[3 * db + 0], -1.0}}, -kTwoPiThirds});
      blocks.push_back(std::make_shared<LinearBlock>(
          lx + "voltage", BlockOwner::Boundary, std::move(rows), zeros(6), zeros(6)));
    } else if (is_rectangular(form)) {
      std::vector<QuadLinRow> mag;
      for (int p = 0; p < net::kNumPhases; ++p) {
        QuadLinRow row;
        row.quad = {{trans.vre[tb], 1.0},
                    {trans.vim[tb], 1.0},
                    {dsp.vre[3 * db + p], -1.0},
                    {dsp.vim[3 * db + p], -1.0}};
        mag.push_back(std::move(row));
      }
      blocks.push_back(std::make_shared<QuadLinBlock>(
          lx + "vmag", BlockOwner::Boundary, std::move(mag), zeros(3), zeros(3)));

      std::vector<LinearRow> tie;
      tie.push_back({{{trans.vim[tb], 1.0}, {dsp.vim[3 * db + 0], -1.0}}, 0.0});
      blocks.push_back(std::make_shared<LinearBlock>(
          lx + "vangle_a", BlockOwner::Boundary, std::move(tie), zeros(1), zeros(1)));

      std::vector<TangentRow> rot;
      rot.push_back({dsp.vre[3 * db + 0], dsp.vim[3 * db + 0], dsp.vre[3 * db + 1],
                     dsp.vim[3 * db + 1], -kTwoPiThirds});
      rot.push_back({dsp.vre[3 * db + 0], dsp.vim[3 * db + 0], dsp.vre[3 * db + 2],
                     dsp.vim[3 * db + 2], kTwoPiThirds});
      blocks.push_back(std::make_shared<TangentOffsetBlock>(
          lx + "vangle_bc", BlockOwner::Boundary, std::move(rot)));
    }
    // NFA: the power row above is the only boundary constraint
  }
  return blocks;
}

// ----------------------------------------------------------------- objective

Objective objective_min_fuel_cost(const net::ITDCase& c, const TransVariableSpace& trans,
                                  const std::vector<DistVariableSpace>& dist) {
  Objective obj;
  for (size_t k = 0; k < c.transmission.generators.size(); ++k) {
    const auto& g = c.transmission.generators[k];
    if (!g.status) continue;
    obj.groups.push_back({{trans.pg[k]}, c.transmission.base_mva, g.cost});
  }
  for (size_t f = 0; f < c.feeders.size(); ++f) {
    const auto& feeder = c.feeders[f];
    for (size_t k = 0; k < feeder.generators.size(); ++k) {
      const auto& g = feeder.generators[k];
      if (!g.status) continue;
      ObjectiveGroup grp;
      for (int p = 0; p < net::kNumPhases; ++p)
        if (dist[f].pg[3 * k + p] >= 0) grp.vars.push_back(dist[f].pg[3 * k + p]);
      grp.scale = feeder.base_kva / 1000.0;
      grp.cost = g.cost;
      obj.groups.push_back(std::move(grp));
    }
  }
  return obj;
}

void attach_objective(nlp::NlpModel& model, Objective obj) {
  auto data = std::make_shared<Objective>(std::move(obj));
  model.obj_value = [data](const Eigen::VectorXd& x) {
    double f = 0;
    for (const auto& g : data->groups) {
      double s = 0;
      for (int v : g.vars) s += x[v];
      const double mw = g.scale * s;
      f += g.cost.c2 * mw * mw + g.cost.c1 * mw + g.cost.c0;
    }
    return f;
  };
  model.obj_gradient = [data](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
    grad.setZero(x.size());
    for (const auto& g : data->groups) {
      double s = 0;
      for (int v : g.vars) s += x[v];
      const double d = (2.0 * g.cost.c2 * g.scale * s + g.cost.c1) * g.scale;
      for (int v : g.vars) grad[v] += d;
    }
  };
  model.obj_hess_vec = [data](const Eigen::VectorXd& x, const Eigen::VectorXd& v,
                              Eigen::VectorXd& out) {
    (void)x;
    out.setZero(v.size());
    for (const auto& g : data->groups) {
      const double h = 2.0 * g.cost.c2 * g.scale * g.scale;
      if (h == 0.0) continue;
      double s = 0;
      for (int var : g.vars) s += v[var];
      for (int var : g.vars) out[var] += h * s;
    }
  };
  model.obj_hessian = [data](const Eigen::VectorXd&, nlp::HessianSink& sink) {
    for (const auto& g : data->groups) {
      const double h = 2.0 * g.cost.c2 * g.scale * g.scale;
      if (h == 0.0) continue;
      for (size_t a = 0; a < g.vars.size(); ++a) {
        sink.diag(g.vars[a], h);
        for (size_t b = a + 1; b < g.vars.size(); ++b) sink.pair(g.vars[a], g.vars[b], h);
      }
    }
  };
}

void attach_zero_objective(nlp::NlpModel& model) { nlp::set_zero_objective(model); }

// ------------------------------------------------------------------ assembly

ItdModel build_itd_model(const net::ITDCase& c, Formulation form) {
  ItdModel m;
  m.trans = add_transmission_variables(m.pool, form, c.transmission);
  for (size_t f = 0; f < c.feeders.size(); ++f)
    m.dist.push_back(add_distribution_variables(m.pool, form, c.feeders[f],
                                                static_cast<int>(f),
                                                c.link_of_feeder(static_cast<int>(f)) >= 0));
  m.links = add_boundary_variables(m.pool, form, c.boundary);

  auto& blocks = m.nlp.blocks;
  auto tb = build_transmission(form, c.transmission, m.trans, c.boundary, m.links);
  blocks.insert(blocks.end(), tb.begin(), tb.end());
  for (size_t f = 0; f < c.feeders.size(); ++f) {
    const int l = c.link_of_feeder(static_cast<int>(f));
    const int src = c.feeders[f].bus_index(c.feeders[f].source_bus);
    auto db = build_distribution(form, c.feeders[f], m.dist[f],
                                 l >= 0 ? c.boundary.links[l].dist_bus_index : src,
                                 l >= 0 ? &m.links[l] : nullptr);
    blocks.insert(blocks.end(), db.begin(), db.end());
  }
  auto bb = build_boundary(form, c, m.trans, m.dist, m.links);
  blocks.insert(blocks.end(), bb.begin(), bb.end());

  const int n = m.pool.size();
  m.nlp.lower.resize(n);
  m.nlp.upper.resize(n);
  m.nlp.x0.resize(n);
  for (int i = 0; i < n; ++i) {
    const VarInfo& v = m.pool.info(i);
    double lb = v.lb, ub = v.ub;
    if (lb > ub) throw UnsupportedFormulation("variable '" + v.name + "' has empty bounds");
    if (lb == ub) {  // keep a usable interior for the barrier
      lb -= 5e-10;
      ub += 5e-10;
    }
    m.nlp.lower[i] = lb;
    m.nlp.upper[i] = ub;
    m.nlp.x0[i] = v.x0;
  }
  attach_objective(m.nlp, objective_min_fuel_cost(c, m.trans, m.dist));
  return m;
}

}  // namespace itdopf::form
