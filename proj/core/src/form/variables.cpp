#include "itdopf/form/variables.hpp"

#include <cmath>

namespace itdopf::form {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPiThirds = 2.0943951023931953;
// Rectangular phase-a real part stays away from the atan pole of the
// boundary angle ties; boundary buses operate near nominal voltage.
constexpr double kSourceReGuard = 0.1;

double midpoint(double lo, double hi) {
  if (std::isfinite(lo) && std::isfinite(hi)) return 0.5 * (lo + hi);
  if (std::isfinite(lo)) return lo;
  if (std::isfinite(hi)) return hi;
  return 0.0;
}

double flat_angle(int phase) {
  switch (phase) {
    case 1: return -kTwoPiThirds;
    case 2: return kTwoPiThirds;
    default: return 0.0;
  }
}

}  // namespace

TransVariableSpace add_transmission_variables(VariablePool& pool, Formulation form,
                                              const net::TransmissionNetwork& net) {
  TransVariableSpace sp;
  sp.form = form;
  const int nb = static_cast<int>(net.buses.size());
  const int ng = static_cast<int>(net.generators.size());
  const int ne = static_cast<int>(net.branches.size());
  const auto T = VarOwner::Trans;

  sp.vm.assign(nb, -1);
  sp.va.assign(nb, -1);
  sp.vre.assign(nb, -1);
  sp.vim.assign(nb, -1);
  if (form == Formulation::AcpAcpu) {
    for (int i = 0; i < nb; ++i) {
      const auto& b = net.buses[i];
      sp.vm[i] = pool.add("t.vm[" + std::to_string(b.id) + "]", T, VarKind::Vm, -1,
                          b.v_min, b.v_max, 1.0);
      sp.va[i] = pool.add("t.va[" + std::to_string(b.id) + "]", T, VarKind::Va, -1,
                          -kInf, kInf, 0.0);
    }
  } else if (is_rectangular(form)) {
    for (int i = 0; i < nb; ++i) {
      const auto& b = net.buses[i];
      const double lo_re = b.is_reference ? b.v_min : -b.v_max;
      sp.vre[i] = pool.add("t.vre[" + std::to_string(b.id) + "]", T, VarKind::Vre, -1,
                           lo_re, b.v_max, 1.0);
      sp.vim[i] = pool.add("t.vim[" + std::to_string(b.id) + "]", T, VarKind::Vim, -1,
                           -b.v_max, b.v_max, 0.0);
    }
  }

  sp.pg.assign(ng, -1);
  sp.qg.assign(ng, -1);
  sp.ir_gen.assign(ng, -1);
  sp.ii_gen.assign(ng, -1);
  for (int k = 0; k < ng; ++k) {
    const auto& g = net.generators[k];
    if (!g.status) continue;
    const std::string id = std::to_string(k);
    sp.pg[k] = pool.add("t.pg[" + id + "]", T, VarKind::Pg, -1, g.p_min, g.p_max,
                        midpoint(g.p_min, g.p_max));
    if (has_reactive(form))
      sp.qg[k] = pool.add("t.qg[" + id + "]", T, VarKind::Qg, -1, g.q_min, g.q_max,
                          midpoint(g.q_min, g.q_max));
    if (has_currents(form)) {
      sp.ir_gen[k] = pool.add("t.irg[" + id + "]", T, VarKind::IrGen, -1, -kInf, kInf, 0.0);
      sp.ii_gen[k] = pool.add("t.iig[" + id + "]", T, VarKind::IiGen, -1, -kInf, kInf, 0.0);
    }
  }

  sp.p_flow.assign(2 * ne, -1);
  sp.q_flow.assign(2 * ne, -1);
  sp.ir_flow.assign(2 * ne, -1);
  sp.ii_flow.assign(2 * ne, -1);
  for (int e = 0; e < ne; ++e) {
    const auto& br = net.branches[e];
    const double pmax = br.s_max;
    for (int dir = 0; dir < 2; ++dir) {
      const std::string id = std::to_string(e) + (dir == 0 ? "f" : "t");
      sp.p_flow[2 * e + dir] =
          pool.add("t.p[" + id + "]", T, VarKind::Pflow, -1, -pmax, pmax, 0.0);
      if (has_reactive(form))
        sp.q_flow[2 * e + dir] =
            pool.add("t.q[" + id + "]", T, VarKind::Qflow, -1, -pmax, pmax, 0.0);
      if (has_currents(form)) {
        double cmax = kInf;
        if (std::isfinite(pmax)) {
          const net::TransBus* fb = net.find_bus(br.from);
          const net::TransBus* tb = net.find_bus(br.to);
          const double vmin = std::min(fb ? fb->v_min : 1.0, tb ? tb->v_min : 1.0);
          cmax = pmax / std::max(vmin, 1e-3);
        }
        sp.ir_flow[2 * e + dir] =
            pool.add("t.ir[" + id + "]", T, VarKind::IrFlow, -1, -cmax, cmax, 0.0);
        sp.ii_flow[2 * e + dir] =
            pool.add("t.ii[" + id + "]", T, VarKind::IiFlow, -1, -cmax, cmax, 0.0);
      }
    }
  }

  sp.ir_load.assign(nb, -1);
  sp.ii_load.assign(nb, -1);
  if (has_currents(form))
    for (int i = 0; i < nb; ++i) {
      const auto& b = net.buses[i];
      if (b.pd == 0.0 && b.qd == 0.0) continue;
      sp.ir_load[i] = pool.add("t.ird[" + std::to_string(b.id) + "]", T, VarKind::IrLoad,
                               -1, -kInf, kInf, 0.0);
      sp.ii_load[i] = pool.add("t.iid[" + std::to_string(b.id) + "]", T, VarKind::IiLoad,
                               -1, -kInf, kInf, 0.0);
    }
  return sp;
}

DistVariableSpace add_distribution_variables(VariablePool& pool, Formulation form,
                                             const net::DistributionNetwork& feeder,
                                             int feeder_index, bool linked) {
  DistVariableSpace sp;
  sp.form = form;
  sp.feeder = feeder_index;
  const int nb = static_cast<int>(feeder.nodes.size());
  const int ng = static_cast<int>(feeder.generators.size());
  const int nl = static_cast<int>(feeder.lines.size());
  const int nd = static_cast<int>(feeder.loads.size());
  const auto D = VarOwner::Dist;
  const std::string fx = "d" + std::to_string(feeder_index) + ".";
  const int src = feeder.bus_index(feeder.source_bus);

  sp.vm.assign(3 * nb, -1);
  sp.va.assign(3 * nb, -1);
  sp.vre.assign(3 * nb, -1);
  sp.vim.assign(3 * nb, -1);
  for (int i = 0; i < nb && has_voltage(form); ++i) {
    const auto& b = feeder.nodes[i];
    for (int p = 0; p < net::kNumPhases; ++p) {
      if (!b.phases[p]) continue;
      const std::string id = b.id + "." + net::kPhaseNames[p];
      const double a0 = flat_angle(p);
      if (form == Formulation::AcpAcpu) {
        sp.vm[3 * i + p] = pool.add(fx + "vm[" + id + "]", D, VarKind::Vm, feeder_index,
                                    b.v_min[p], b.v_max[p], 1.0);
        sp.va[3 * i + p] =
            pool.add(fx + "va[" + id + "]", D, VarKind::Va, feeder_index, -kInf, kInf, a0);
      } else {
        double lo_re = -b.v_max[p];
        if (i == src && p == 0) lo_re = kSourceReGuard;
        sp.vre[3 * i + p] = pool.add(fx + "vre[" + id + "]", D, VarKind::Vre, feeder_index,
                                     lo_re, b.v_max[p], std::cos(a0));
        sp.vim[3 * i + p] = pool.add(fx + "vim[" + id + "]", D, VarKind::Vim, feeder_index,
                                     -b.v_max[p], b.v_max[p], std::sin(a0));
      }
    }
  }
  (void)linked;

  sp.pg.assign(3 * ng, -1);
  sp.qg.assign(3 * ng, -1);
  sp.ir_gen.assign(3 * ng, -1);
  sp.ii_gen.assign(3 * ng, -1);
  for (int k = 0; k < ng; ++k) {
    const auto& g = feeder.generators[k];
    if (!g.status) continue;
    const int bi = feeder.bus_index(g.bus);
    const net::PhaseMask& mask = feeder.nodes[bi].phases;
    for (int p = 0; p < net::kNumPhases; ++p) {
      if (!mask[p]) continue;
      const std::string id = std::to_string(k) + "." + net::kPhaseNames[p];
      sp.pg[3 * k + p] = pool.add(fx + "pg[" + id + "]", D, VarKind::Pg, feeder_index,
                                  g.p_min[p], g.p_max[p], midpoint(g.p_min[p], g.p_max[p]));
      if (has_reactive(form))
        sp.qg[3 * k + p] =
            pool.add(fx + "qg[" + id + "]", D, VarKind::Qg, feeder_index, g.q_min[p],
                     g.q_max[p], midpoint(g.q_min[p], g.q_max[p]));
      if (has_currents(form)) {
        sp.ir_gen[3 * k + p] = pool.add(fx + "irg[" + id + "]", D, VarKind::IrGen,
                                        feeder_index, -kInf, kInf, 0.0);
        sp.ii_gen[3 * k + p] = pool.add(fx + "iig[" + id + "]", D, VarKind::IiGen,
                                        feeder_index, -kInf, kInf, 0.0);
      }
    }
  }

  sp.p_flow.assign(6 * nl, -1);
  sp.q_flow.assign(6 * nl, -1);
  sp.ir_flow.assign(6 * nl, -1);
  sp.ii_flow.assign(6 * nl, -1);
  for (int e = 0; e < nl; ++e) {
    const auto& ln = feeder.lines[e];
    for (int dir = 0; dir < 2; ++dir)
      for (int p = 0; p < net::kNumPhases; ++p) {
        if (!ln.phases[p]) continue;
        const int slot = (2 * e + dir) * 3 + p;
        const std::string id =
            std::to_string(e) + (dir == 0 ? "f." : "t.") + net::kPhaseNames[p];
        sp.p_flow[slot] = pool.add(fx + "p[" + id + "]", D, VarKind::Pflow, feeder_index,
                                   -ln.p_max[p], ln.p_max[p], 0.0);
        if (has_reactive(form))
          sp.q_flow[slot] = pool.add(fx + "q[" + id + "]", D, VarKind::Qflow, feeder_index,
                                     -ln.q_max[p], ln.q_max[p], 0.0);
        if (has_currents(form)) {
          double cmax = kInf;
          if (std::isfinite(ln.p_max[p]) && std::isfinite(ln.q_max[p]))
            cmax = std::hypot(ln.p_max[p], ln.q_max[p]) / 0.5;
          sp.ir_flow[slot] = pool.add(fx + "ir[" + id + "]", D, VarKind::IrFlow,
                                      feeder_index, -cmax, cmax, 0.0);
          sp.ii_flow[slot] = pool.add(fx + "ii[" + id + "]", D, VarKind::IiFlow,
                                      feeder_index, -cmax, cmax, 0.0);
        }
      }
  }

  sp.ir_load.assign(3 * nd, -1);
  sp.ii_load.assign(3 * nd, -1);
  if (has_currents(form))
    for (int d = 0; d < nd; ++d) {
      const auto& ld = feeder.loads[d];
      for (int p = 0; p < net::kNumPhases; ++p) {
        if (ld.pd[p] == 0.0 && ld.qd[p] == 0.0) continue;
        const std::string id = std::to_string(d) + "." + net::kPhaseNames[p];
        sp.ir_load[3 * d + p] = pool.add(fx + "ird[" + id + "]", D, VarKind::IrLoad,
                                         feeder_index, -kInf, kInf, 0.0);
        sp.ii_load[3 * d + p] = pool.add(fx + "iid[" + id + "]", D, VarKind::IiLoad,
                                         feeder_index, -kInf, kInf, 0.0);
      }
    }
  return sp;
}

std::vector<LinkVars> add_boundary_variables(VariablePool& pool, Formulation form,
                                             const net::ResolvedLinks& links) {
  std::vector<LinkVars> out;
  for (size_t l = 0; l < links.links.size(); ++l) {
    LinkVars lv;
    const std::string lx = "link" + std::to_string(l) + ".";
    const int f = links.links[l].feeder_index;
    lv.p_trans = pool.add(lx + "p_t", VarOwner::BoundaryTrans, VarKind::Pbound, -1, -kInf,
                          kInf, 0.0);
    if (has_reactive(form))
      lv.q_trans = pool.add(lx + "q_t", VarOwner::BoundaryTrans, VarKind::Qbound, -1,
                            -kInf, kInf, 0.0);
    if (has_currents(form)) {
      lv.ir_trans = pool.add(lx + "ir_t", VarOwner::BoundaryTrans, VarKind::IrBound, -1,
                             -kInf, kInf, 0.0);
      lv.ii_trans = pool.add(lx + "ii_t", VarOwner::BoundaryTrans, VarKind::IiBound, -1,
                             -kInf, kInf, 0.0);
    }
    for (int p = 0; p < net::kNumPhases; ++p) {
      const std::string px = std::string(net::kPhaseNames[p]);
      lv.p_dist[p] = pool.add(lx + "p_d." + px, VarOwner::BoundaryDist, VarKind::Pbound, f,
                              -kInf, kInf, 0.0);
      if (has_reactive(form))
        lv.q_dist[p] = pool.add(lx + "q_d." + px, VarOwner::BoundaryDist, VarKind::Qbound,
                                f, -kInf, kInf, 0.0);
      if (has_currents(form)) {
        lv.ir_dist[p] = pool.add(lx + "ir_d." + px, VarOwner::BoundaryDist,
                                 VarKind::IrBound, f, -kInf, kInf, 0.0);
        lv.ii_dist[p] = pool.add(lx + "ii_d." + px, VarOwner::BoundaryDist,
                                 VarKind::IiBound, f, -kInf, kInf, 0.0);
      }
    }
    out.push_back(lv);
  }
  return out;
}

}  // namespace itdopf::form
