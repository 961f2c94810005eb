#include "itdopf/prob/problems.hpp"

#include <cmath>
#include <thread>

#include "itdopf/form/blocks.hpp"

namespace itdopf::prob {

namespace {

using form::Formulation;

void require_valid(const net::ITDCase& c) {
  const net::ValidationReport rep = net::validate_case(c);
  if (rep.ok()) return;
  std::string msg = "invalid case:";
  for (size_t i = 0; i < rep.violations.size() && i < 5; ++i)
    msg += "\n  " + rep.violations[i].component + ": " + rep.violations[i].message;
  if (rep.violations.size() > 5) msg += "\n  ...";
  throw std::invalid_argument(msg);
}

io::ResultDocument decode(const net::ITDCase& c, Formulation form,
                          const form::ItdModel& m, const nlp::Solution& sol) {
  io::ResultDocument doc;
  doc.formulation = form::tag(form);
  doc.status = nlp::to_string(sol.status);
  doc.objective_usd_per_hr = sol.objective;
  doc.iterations = sol.iterations;
  doc.solve_seconds = sol.wall_seconds;
  doc.has_voltages = form::has_voltage(form);
  const Eigen::VectorXd& x = sol.x;
  const double base_mw = c.transmission.base_mva;

  for (size_t k = 0; k < c.transmission.generators.size(); ++k) {
    if (m.trans.pg[k] < 0) continue;
    io::ResultDocument::TransGenDispatch g;
    g.bus = c.transmission.generators[k].bus;
    g.p_mw = x[m.trans.pg[k]] * base_mw;
    g.q_mvar = m.trans.qg[k] >= 0 ? x[m.trans.qg[k]] * base_mw : 0.0;
    doc.trans_generators.push_back(g);
  }
  if (doc.has_voltages)
    for (size_t i = 0; i < c.transmission.buses.size(); ++i) {
      io::ResultDocument::TransBusVoltage b;
      b.id = c.transmission.buses[i].id;
      if (form == Formulation::AcpAcpu) {
        b.vm_pu = x[m.trans.vm[i]];
        b.va_rad = x[m.trans.va[i]];
      } else {
        b.vm_pu = std::hypot(x[m.trans.vre[i]], x[m.trans.vim[i]]);
        b.va_rad = std::atan2(x[m.trans.vim[i]], x[m.trans.vre[i]]);
      }
      doc.trans_buses.push_back(b);
    }

  for (size_t f = 0; f < c.feeders.size(); ++f) {
    const auto& feeder = c.feeders[f];
    io::ResultDocument::FeederResult fr;
    fr.name = feeder.name;
    for (size_t k = 0; k < feeder.generators.size(); ++k) {
      io::ResultDocument::DistGenDispatch g;
      g.bus = feeder.generators[k].bus;
      bool any = false;
      for (int p = 0; p < net::kNumPhases; ++p) {
        const int vp = m.dist[f].pg[3 * k + p];
        if (vp < 0) continue;
        any = true;
        g.p_kw[p] = x[vp] * feeder.base_kva;
        const int vq = m.dist[f].qg[3 * k + p];
        g.q_kvar[p] = vq >= 0 ? x[vq] * feeder.base_kva : 0.0;
      }
      if (any) fr.generators.push_back(g);
    }
    if (doc.has_voltages)
      for (size_t i = 0; i < feeder.nodes.size(); ++i) {
        io::ResultDocument::DistBusVoltage b;
        b.id = feeder.nodes[i].id;
        for (int p = 0; p < net::kNumPhases; ++p) {
          if (!feeder.nodes[i].phases[p]) continue;
          if (form == Formulation::AcpAcpu) {
            b.vm_pu[p] = x[m.dist[f].vm[3 * i + p]];
            b.va_rad[p] = x[m.dist[f].va[3 * i + p]];
          } else {
            const double e = x[m.dist[f].vre[3 * i + p]];
            const double fi = x[m.dist[f].vim[3 * i + p]];
            b.vm_pu[p] = std::hypot(e, fi);
            b.va_rad[p] = std::atan2(fi, e);
          }
        }
        fr.buses.push_back(b);
      }
    doc.feeders.push_back(std::move(fr));
  }

  for (size_t l = 0; l < c.boundary.links.size(); ++l) {
    const auto& link = c.boundary.links[l];
    const auto& lv = m.links[l];
    io::ResultDocument::BoundaryFlow bf;
    bf.trans_bus = c.transmission.buses[link.trans_bus_index].id;
    bf.feeder = c.feeders[link.feeder_index].name;
    bf.p_mw = x[lv.p_trans] * base_mw;
    bf.q_mvar = lv.q_trans >= 0 ? x[lv.q_trans] * base_mw : 0.0;
    const double fbase_mw = c.feeders[link.feeder_index].base_kva / 1000.0;
    for (int p = 0; p < net::kNumPhases; ++p) {
      bf.p_dist_mw[p] = x[lv.p_dist[p]] * fbase_mw;
      bf.q_dist_mvar[p] = lv.q_dist[p] >= 0 ? x[lv.q_dist[p]] * fbase_mw : 0.0;
    }
    doc.boundaries.push_back(bf);
  }
  return doc;
}

ITDResult solve_model(const net::ITDCase& c, Formulation form, form::ItdModel model,
                      const nlp::SolverOptions& opts) {
  ITDResult out;
  out.model = std::move(model);
  out.solution = nlp::solve(out.model.nlp, opts);
  out.status = out.solution.status;
  out.objective = out.solution.objective;
  out.iterations = out.solution.iterations;
  out.solve_seconds = out.solution.wall_seconds;
  out.document = decode(c, form, out.model, out.solution);
  return out;
}

}  // namespace

form::ItdModel build_opfitd(const net::ITDCase& c, Formulation form) {
  require_valid(c);
  return form::build_itd_model(c, form);
}

ITDResult solve_opfitd(const net::ITDCase& c, Formulation form,
                       const nlp::SolverOptions& opts) {
  return solve_model(c, form, build_opfitd(c, form), opts);
}

// ---------------------------------------------------------------------- PFITD

Setpoints setpoints_from_result(const net::ITDCase& c, const ITDResult& r) {
  Setpoints sp;
  const Eigen::VectorXd& x = r.solution.x;
  for (size_t k = 0; k < c.transmission.generators.size(); ++k) {
    if (r.model.trans.pg[k] < 0) continue;
    const int bus = c.transmission.bus_index(c.transmission.generators[k].bus);
    if (c.transmission.buses[bus].is_reference) continue;
    Setpoints::TransGenSetpoint s;
    s.gen = static_cast<int>(k);
    s.p_pu = x[r.model.trans.pg[k]];
    if (r.model.trans.vm[bus] >= 0)
      s.v_pu = x[r.model.trans.vm[bus]];
    else if (r.model.trans.vre[bus] >= 0)
      s.v_pu = std::hypot(x[r.model.trans.vre[bus]], x[r.model.trans.vim[bus]]);
    sp.trans.push_back(s);
  }
  for (size_t f = 0; f < c.feeders.size(); ++f)
    for (size_t k = 0; k < c.feeders[f].generators.size(); ++k) {
      Setpoints::DistGenSetpoint s;
      s.feeder = static_cast<int>(f);
      s.gen = static_cast<int>(k);
      bool any = false;
      for (int p = 0; p < net::kNumPhases; ++p) {
        const int vp = r.model.dist[f].pg[3 * k + p];
        if (vp < 0) continue;
        any = true;
        s.p_pu[p] = x[vp];
        const int vq = r.model.dist[f].qg[3 * k + p];
        s.q_pu[p] = vq >= 0 ? x[vq] : 0.0;
      }
      if (any) sp.dist.push_back(s);
    }
  return sp;
}

form::ItdModel build_pfitd(const net::ITDCase& c, Formulation form, const Setpoints& sp) {
  require_valid(c);
  form::ItdModel m = form::build_itd_model(c, form);

  std::vector<form::LinearRow> lin_rows;
  std::vector<form::QuadLinRow> quad_rows;
  std::vector<double> quad_rhs;
  for (const auto& s : sp.trans) {
    const int pg = m.trans.pg[s.gen];
    if (pg < 0) throw std::invalid_argument("setpoint for an out-of-service generator");
    lin_rows.push_back({{{pg, 1.0}}, -s.p_pu});
    if (s.v_pu && form::has_voltage(form)) {
      const int bus =
          c.transmission.bus_index(c.transmission.generators[s.gen].bus);
      if (form == Formulation::AcpAcpu) {
        lin_rows.push_back({{{m.trans.vm[bus], 1.0}}, -*s.v_pu});
      } else {
        form::QuadLinRow row;
        row.quad = {{m.trans.vre[bus], 1.0}, {m.trans.vim[bus], 1.0}};
        quad_rows.push_back(std::move(row));
        quad_rhs.push_back(*s.v_pu * *s.v_pu);
      }
    }
  }
  for (const auto& s : sp.dist)
    for (int p = 0; p < net::kNumPhases; ++p) {
      const int pg = m.dist[s.feeder].pg[3 * s.gen + p];
      if (pg < 0) continue;
      lin_rows.push_back({{{pg, 1.0}}, -s.p_pu[p]});
      const int qg = m.dist[s.feeder].qg[3 * s.gen + p];
      if (qg >= 0) lin_rows.push_back({{{qg, 1.0}}, -s.q_pu[p]});
    }

  if (!lin_rows.empty()) {
    const int n = static_cast<int>(lin_rows.size());
    m.nlp.blocks.push_back(std::make_shared<form::LinearBlock>(
        "setpoints", nlp::BlockOwner::Transmission, std::move(lin_rows),
        Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)));
  }
  if (!quad_rows.empty()) {
    Eigen::VectorXd rhs =
        Eigen::Map<Eigen::VectorXd>(quad_rhs.data(), static_cast<int>(quad_rhs.size()));
    m.nlp.blocks.push_back(std::make_shared<form::QuadLinBlock>(
        "setpoint_vm", nlp::BlockOwner::Transmission, std::move(quad_rows), rhs, rhs));
  }
  form::attach_zero_objective(m.nlp);
  return m;
}

ITDResult solve_pfitd(const net::ITDCase& c, Formulation form, const Setpoints& sp,
                      const nlp::SolverOptions& opts) {
  return solve_model(c, form, build_pfitd(c, form, sp), opts);
}

// ---------------------------------------------------------------- independent

namespace {

constexpr double kSlackBound = 1e3;  // feeder p.u.; wide import/export headroom

/// Feeder-only OPF model (isolated reference at the source bus).
struct FeederModel {
  form::VariablePool pool;
  form::DistVariableSpace space;
  nlp::NlpModel nlp;
};

FeederModel build_feeder_model(const net::DistributionNetwork& feeder, Formulation form) {
  FeederModel m;
  m.space = form::add_distribution_variables(m.pool, form, feeder, 0, false);
  const int src = feeder.bus_index(feeder.source_bus);
  m.nlp.blocks = form::build_distribution(form, feeder, m.space, src, nullptr);

  const int n = m.pool.size();
  m.nlp.lower.resize(n);
  m.nlp.upper.resize(n);
  m.nlp.x0.resize(n);
  for (int i = 0; i < n; ++i) {
    const form::VarInfo& v = m.pool.info(i);
    double lb = v.lb, ub = v.ub;
    if (lb == ub) {
      lb -= 5e-10;
      ub += 5e-10;
    }
    m.nlp.lower[i] = lb;
    m.nlp.upper[i] = ub;
    m.nlp.x0[i] = v.x0;
  }

  form::Objective obj;
  for (size_t k = 0; k < feeder.generators.size(); ++k) {
    const auto& g = feeder.generators[k];
    if (!g.status) continue;
    form::ObjectiveGroup grp;
    for (int p = 0; p < net::kNumPhases; ++p)
      if (m.space.pg[3 * k + p] >= 0) grp.vars.push_back(m.space.pg[3 * k + p]);
    grp.scale = feeder.base_kva / 1000.0;
    grp.cost = g.cost;
    obj.groups.push_back(std::move(grp));
  }
  form::attach_objective(m.nlp, std::move(obj));
  return m;
}

/// Feeder prepared per the coordination algorithm: DG active-power upper
/// bounds scaled by (1 - reserve), a zero-cost slack generator at the
/// source bus standing in for the grid import.
net::DistributionNetwork prepare_feeder(const net::DistributionNetwork& feeder,
                                        double reserve_fraction, int& slack_gen_index) {
  net::DistributionNetwork out = feeder;
  for (auto& g : out.generators)
    for (int p = 0; p < net::kNumPhases; ++p)
      g.p_max[p] = g.p_min[p] + (1.0 - reserve_fraction) * (g.p_max[p] - g.p_min[p]);
  net::DistGen slack;
  slack.bus = out.source_bus;
  slack.p_min = {-kSlackBound, -kSlackBound, -kSlackBound};
  slack.p_max = {kSlackBound, kSlackBound, kSlackBound};
  slack.q_min = {-kSlackBound, -kSlackBound, -kSlackBound};
  slack.q_max = {kSlackBound, kSlackBound, kSlackBound};
  slack.cost = {0.0, 0.0, 0.0};
  slack_gen_index = static_cast<int>(out.generators.size());
  out.generators.push_back(slack);
  return out;
}

}  // namespace

IndependentResult solve_independent(const net::ITDCase& c, Formulation form,
                                    double reserve_fraction,
                                    const nlp::SolverOptions& opts, bool parallel) {
  require_valid(c);
  IndependentResult out;
  const size_t nf = c.feeders.size();
  out.feeders.resize(nf);
  out.feeder_import_p.assign(nf, {0, 0, 0});
  out.feeder_import_q.assign(nf, {0, 0, 0});

  auto run_feeder = [&](size_t f) {
    int slack_idx = -1;
    const net::DistributionNetwork prepared =
        prepare_feeder(c.feeders[f], reserve_fraction, slack_idx);
    FeederModel m = build_feeder_model(prepared, form);
    const nlp::Solution sol = nlp::solve(m.nlp, opts);
    out.feeders[f] = {sol.status, sol.objective, sol.iterations, sol.wall_seconds};
    for (int p = 0; p < net::kNumPhases; ++p) {
      const int vp = m.space.pg[3 * slack_idx + p];
      if (vp >= 0) out.feeder_import_p[f][p] = sol.x[vp];
      const int vq = m.space.qg[3 * slack_idx + p];
      if (vq >= 0) out.feeder_import_q[f][p] = sol.x[vq];
    }
  };

  if (parallel && nf > 1) {
    std::vector<std::thread> threads;
    threads.reserve(nf);
    for (size_t f = 0; f < nf; ++f) threads.emplace_back(run_feeder, f);
    for (auto& t : threads) t.join();
  } else {
    for (size_t f = 0; f < nf; ++f) run_feeder(f);
  }

  // feeder imports become loads at the linked transmission buses
  net::TransmissionNetwork trans = c.transmission;
  for (size_t l = 0; l < c.boundary.links.size(); ++l) {
    const auto& link = c.boundary.links[l];
    double p_sum = 0, q_sum = 0;
    for (int p = 0; p < net::kNumPhases; ++p) {
      p_sum += out.feeder_import_p[link.feeder_index][p];
      q_sum += out.feeder_import_q[link.feeder_index][p];
    }
    trans.buses[link.trans_bus_index].pd += p_sum * link.base_factor;
    trans.buses[link.trans_bus_index].qd += q_sum * link.base_factor;
  }

  net::ITDCase trans_only;
  trans_only.transmission = std::move(trans);
  const form::ItdModel tm = form::build_itd_model(trans_only, form);
  const nlp::Solution tsol = nlp::solve(tm.nlp, opts);
  out.transmission = {tsol.status, tsol.objective, tsol.iterations, tsol.wall_seconds};

  out.total_cost = out.transmission.objective;
  out.total_runtime = out.transmission.solve_seconds;
  out.total_iterations = out.transmission.iterations;
  out.all_optimal = out.transmission.status == nlp::SolveStatus::Optimal;
  for (const auto& f : out.feeders) {
    out.total_cost += f.objective;
    out.total_runtime += f.solve_seconds;
    out.total_iterations += f.iterations;
    if (f.status != nlp::SolveStatus::Optimal) out.all_optimal = false;
  }
  return out;
}

}  // namespace itdopf::prob
