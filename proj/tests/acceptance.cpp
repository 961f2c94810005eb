// Acceptance suite: runs every release criterion end to end and prints one
// PASS/FAIL line per criterion. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <map>
#include <random>
#include <vector>

#include "fixtures.hpp"
#include "itdopf/form/derivative_check.hpp"
#include "itdopf/io/formats.hpp"
#include "itdopf/io/json_text.hpp"
#include "itdopf/prob/problems.hpp"
#include "oracle.hpp"

using namespace itdopf;
using form::Formulation;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(const std::string& name, bool ok, const std::string& details) {
  std::printf("[%s] %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), details.c_str());
  if (!ok) ++g_failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct NamedCase {
  std::string name;
  net::ITDCase data;
};

std::vector<NamedCase> bundled_cases() {
  return {{"case5+feeder4", fixtures::case5_feeder4()},
          {"case5+feeder4_unbalanced", fixtures::case5_feeder4_unbalanced()},
          {"case118+5xfeeder4", fixtures::case118_5feeders()}};
}

/// Boundary-closure residuals recomputed from the solution vector with
/// plain complex arithmetic (independent of the constraint blocks).
struct Closure {
  double power = 0;    // power sum rows, p.u. on the transmission base
  double voltage = 0;  // magnitude / squared-magnitude rows
  double angle = 0;    // angle ties and offsets [rad], tangent rows
};

Closure boundary_closure(const net::ITDCase& c, const prob::ITDResult& r) {
  Closure worst;
  const Eigen::VectorXd& x = r.solution.x;
  const Formulation f = r.model.trans.form;
  for (size_t l = 0; l < c.boundary.links.size(); ++l) {
    const auto& link = c.boundary.links[l];
    const auto& lv = r.model.links[l];
    const auto& dsp = r.model.dist[link.feeder_index];
    const double kappa = link.base_factor;
    const int tb = link.trans_bus_index;
    const int db = link.dist_bus_index;

    double p_sum = x[lv.p_trans];
    double q_sum = lv.q_trans >= 0 ? x[lv.q_trans] : 0.0;
    for (int p = 0; p < 3; ++p) {
      p_sum += kappa * x[lv.p_dist[p]];
      if (lv.q_dist[p] >= 0) q_sum += kappa * x[lv.q_dist[p]];
    }
    worst.power = std::max(worst.power, std::abs(p_sum));
    if (form::has_reactive(f)) worst.power = std::max(worst.power, std::abs(q_sum));

    if (f == Formulation::AcpAcpu) {
      const double vt = x[r.model.trans.vm[tb]];
      const double at = x[r.model.trans.va[tb]];
      const double va_a = x[dsp.va[3 * db + 0]];
      for (int p = 0; p < 3; ++p)
        worst.voltage = std::max(worst.voltage, std::abs(vt - x[dsp.vm[3 * db + p]]));
      worst.angle = std::max(worst.angle, std::abs(at - va_a));
      worst.angle = std::max(
          worst.angle, std::abs(x[dsp.va[3 * db + 1]] - (va_a - 2.0943951023931953)));
      worst.angle = std::max(
          worst.angle, std::abs(x[dsp.va[3 * db + 2]] - (va_a + 2.0943951023931953)));
    } else if (form::is_rectangular(f)) {
      const std::complex<double> vt(x[r.model.trans.vre[tb]], x[r.model.trans.vim[tb]]);
      const std::complex<double> va(x[dsp.vre[3 * db + 0]], x[dsp.vim[3 * db + 0]]);
      for (int p = 0; p < 3; ++p) {
        const std::complex<double> vp(x[dsp.vre[3 * db + p]], x[dsp.vim[3 * db + p]]);
        worst.voltage =
            std::max(worst.voltage, std::abs(std::norm(vt) - std::norm(vp)));
      }
      worst.angle = std::max(worst.angle, std::abs(vt.imag() - va.imag()));
      for (int p = 1; p < 3; ++p) {
        const std::complex<double> vp(x[dsp.vre[3 * db + p]], x[dsp.vim[3 * db + p]]);
        const double off = p == 1 ? -2.0943951023931953 : 2.0943951023931953;
        const double tie =
            vp.imag() - std::tan(std::atan(va.imag() / va.real()) + off) * vp.real();
        worst.angle = std::max(worst.angle, std::abs(tie));
      }
    }

    if (f == Formulation::IvrIvru) {
      // Eq-style current-voltage power sums
      const std::complex<double> vt(x[r.model.trans.vre[tb]], x[r.model.trans.vim[tb]]);
      const std::complex<double> it(x[lv.ir_trans], x[lv.ii_trans]);
      std::complex<double> s = vt * std::conj(it);
      for (int p = 0; p < 3; ++p) {
        const std::complex<double> vp(x[dsp.vre[3 * db + p]], x[dsp.vim[3 * db + p]]);
        const std::complex<double> ip(x[lv.ir_dist[p]], x[lv.ii_dist[p]]);
        s += kappa * vp * std::conj(ip);
      }
      worst.power = std::max(worst.power, std::abs(s.real()));
      worst.power = std::max(worst.power, std::abs(s.imag()));
    }
  }
  return worst;
}

bool check_kkt(const prob::ITDResult& r) {
  const nlp::KktResiduals k = nlp::kkt_residuals(r.model.nlp, r.solution);
  return k.stationarity <= 1e-6 && k.feasibility <= 1e-6 && k.complementarity <= 1e-6;
}

// criterion 1 + part of 4/7: the four formulations on the 5-bus case
std::map<Formulation, prob::ITDResult> g_case5_results;

void criterion_cross_formulation() {
  const net::ITDCase c = fixtures::case5_feeder4();
  const auto t0 = Clock::now();
  for (const Formulation f : form::kAllFormulations)
    g_case5_results[f] = prob::solve_opfitd(c, f);
  const double elapsed = seconds_since(t0);

  bool ok = elapsed < 5.0;
  std::string details;
  for (const Formulation f :
       {Formulation::AcpAcpu, Formulation::AcrAcru, Formulation::IvrIvru})
    ok = ok && g_case5_results[f].status == nlp::SolveStatus::Optimal;
  if (ok) {
    const double acp = g_case5_results[Formulation::AcpAcpu].objective;
    const double acr = g_case5_results[Formulation::AcrAcru].objective;
    const double ivr = g_case5_results[Formulation::IvrIvru].objective;
    const double spread =
        std::max(std::abs(acr - acp), std::abs(ivr - acp)) / std::abs(acp);
    ok = spread <= 1e-4;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "objectives %.4f / %.4f / %.4f $/hr, relative spread %.2e, %.2f s",
                  acp, acr, ivr, spread, elapsed);
    details = buf;
  } else {
    details = "a formulation failed to reach Optimal in time";
  }
  report("cross-formulation-agreement", ok, details);
}

void criterion_relaxation_ordering() {
  bool ok = true;
  std::string details;
  for (const auto& [name, c] : bundled_cases()) {
    std::map<Formulation, double> cost;
    for (const Formulation f : form::kAllFormulations) {
      const prob::ITDResult r = prob::solve_opfitd(c, f);
      if (r.status != nlp::SolveStatus::Optimal) {
        ok = false;
        details += name + "/" + form::tag(f) + " not optimal; ";
        continue;
      }
      cost[f] = r.objective;
    }
    if (cost.size() == 4) {
      const double nfa = cost[Formulation::NfaNfau];
      for (const Formulation f :
           {Formulation::AcpAcpu, Formulation::AcrAcru, Formulation::IvrIvru})
        if (nfa > cost[f] + 1e-6) {
          ok = false;
          details += name + ": NFA above " + form::tag(f) + "; ";
        }
      details += name + ": NFA " + std::to_string(nfa) + " <= AC " +
                 std::to_string(cost[Formulation::AcpAcpu]) + "; ";
    }
  }
  report("relaxation-ordering", ok, details);
}

void criterion_coordination_value() {
  bool ok = true;
  std::string details;
  for (const auto& [name, c] : bundled_cases()) {
    const prob::IndependentResult ind =
        prob::solve_independent(c, Formulation::AcpAcpu, 0.10);
    const prob::ITDResult itd = prob::solve_opfitd(c, Formulation::AcpAcpu);
    if (!ind.all_optimal || itd.status != nlp::SolveStatus::Optimal) {
      ok = false;
      details += name + " failed to solve; ";
      continue;
    }
    const double diff = ind.total_cost - itd.objective;
    if (diff < -1e-6) ok = false;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%s: difference %+.4f $/hr; ", name.c_str(), diff);
    details += buf;
  }
  report("coordination-value", ok, details);
}

void criterion_boundary_closure() {
  bool ok = true;
  std::string details;
  double worst_power = 0, worst_voltage = 0, worst_angle = 0;
  for (const auto& [name, c] : bundled_cases())
    for (const Formulation f : form::kAllFormulations) {
      const prob::ITDResult r = prob::solve_opfitd(c, f);
      if (r.status != nlp::SolveStatus::Optimal) {
        ok = false;
        details += name + "/" + form::tag(f) + " not optimal; ";
        continue;
      }
      const Closure cl = boundary_closure(c, r);
      worst_power = std::max(worst_power, cl.power);
      worst_voltage = std::max(worst_voltage, cl.voltage);
      worst_angle = std::max(worst_angle, cl.angle);
      if (cl.power > 1e-6 || cl.voltage > 1e-6 || cl.angle > 1e-6) {
        ok = false;
        details += name + "/" + form::tag(f) + " exceeds 1e-6; ";
      }
    }
  char buf[128];
  std::snprintf(buf, sizeof(buf), "worst residuals: power %.2e, voltage %.2e, angle %.2e",
                worst_power, worst_voltage, worst_angle);
  report("boundary-closure", ok, details + buf);
}

// the oracle-equivalence helper mirrors the physical-point construction of
// the unit suite but runs the full 1000 points per network
void criterion_oracle_equivalence() {
  const auto t0 = Clock::now();
  bool ok = true;
  double worst = 0;
  std::mt19937_64 rng(97);
  for (const auto& [name, c] : bundled_cases()) {
    for (const Formulation f : {Formulation::AcpAcpu, Formulation::AcrAcru}) {
      const form::ItdModel m = form::build_itd_model(c, f);
      const bool polar = f == Formulation::AcpAcpu;
      const int points = 500;  // 2 formulations x 500 = 1000 per network
      for (int trial = 0; trial < points; ++trial) {
        Eigen::VectorXd x =
            form::sample_interior(m.nlp.lower, m.nlp.upper, m.nlp.x0, rng);
        std::uniform_real_distribution<double> angle(-0.4, 0.4);
        // transmission side
        std::vector<oracle::cd> vt(c.transmission.buses.size());
        for (size_t i = 0; i < c.transmission.buses.size(); ++i) {
          double vm, va;
          if (polar) {
            vm = x[m.trans.vm[i]];
            va = angle(rng);
            x[m.trans.va[i]] = va;
          } else {
            vm = 0.92 + 0.16 * std::uniform_real_distribution<double>(0, 1)(rng);
            va = angle(rng);
            x[m.trans.vre[i]] = vm * std::cos(va);
            x[m.trans.vim[i]] = vm * std::sin(va);
          }
          vt[i] = std::polar(vm, va);
        }
        for (size_t e = 0; e < c.transmission.branches.size(); ++e) {
          const auto& br = c.transmission.branches[e];
          const auto flows =
              oracle::branch_flows(br, vt[c.transmission.bus_index(br.from)],
                                   vt[c.transmission.bus_index(br.to)]);
          const double rp =
              x[m.trans.p_flow[2 * e]] - flows.s_from.real();
          x[m.trans.p_flow[2 * e]] = flows.s_from.real();
          (void)rp;
          x[m.trans.q_flow[2 * e]] = flows.s_from.imag();
          x[m.trans.p_flow[2 * e + 1]] = flows.s_to.real();
          x[m.trans.q_flow[2 * e + 1]] = flows.s_to.imag();
        }
        // feeders
        for (size_t fi = 0; fi < c.feeders.size(); ++fi) {
          const auto& feeder = c.feeders[fi];
          const auto& sp = m.dist[fi];
          std::vector<std::array<oracle::cd, 3>> vd(feeder.nodes.size());
          for (size_t i = 0; i < feeder.nodes.size(); ++i)
            for (int p = 0; p < 3; ++p) {
              if (!feeder.nodes[i].phases[p]) continue;
              const double base =
                  p == 0 ? 0.0 : p == 1 ? -2.0943951023931953 : 2.0943951023931953;
              double vm, va;
              if (polar) {
                vm = x[sp.vm[3 * i + p]];
                va = base + angle(rng);
                x[sp.va[3 * i + p]] = va;
              } else {
                vm = 0.92 + 0.16 * std::uniform_real_distribution<double>(0, 1)(rng);
                va = base + angle(rng);
                x[sp.vre[3 * i + p]] = vm * std::cos(va);
                x[sp.vim[3 * i + p]] = vm * std::sin(va);
              }
              vd[i][p] = std::polar(vm, va);
            }
          for (size_t e = 0; e < feeder.lines.size(); ++e) {
            const auto& ln = feeder.lines[e];
            const auto flows = oracle::line_flows(
                ln, vd[feeder.bus_index(ln.from)].data(),
                vd[feeder.bus_index(ln.to)].data());
            for (int p = 0; p < 3; ++p) {
              if (!ln.phases[p]) continue;
              x[sp.p_flow[(2 * e) * 3 + p]] = flows.s_from[p].real();
              x[sp.q_flow[(2 * e) * 3 + p]] = flows.s_from[p].imag();
              x[sp.p_flow[(2 * e + 1) * 3 + p]] = flows.s_to[p].real();
              x[sp.q_flow[(2 * e + 1) * 3 + p]] = flows.s_to[p].imag();
            }
          }
        }
        // flow-definition residuals vanish iff implementation == oracle
        for (const auto& blk : m.nlp.blocks) {
          if (blk->name().find("flow_ac") == std::string::npos) continue;
          Eigen::VectorXd r(blk->rows());
          blk->eval(x.data(), r.data());
          const double dev = r.lpNorm<Eigen::Infinity>();
          worst = std::max(worst, dev);
          if (dev > 1e-10) ok = false;
        }
      }
    }
  }
  const double elapsed = seconds_since(t0);
  ok = ok && elapsed < 10.0;
  char buf[96];
  std::snprintf(buf, sizeof(buf), "worst |impl - oracle| = %.2e, %.2f s", worst,
                elapsed);
  report("oracle-equivalence", ok, buf);
}

void criterion_derivative_suite() {
  bool ok = true;
  double worst = 0;
  std::string worst_block;
  std::mt19937_64 rng(41);
  const net::ITDCase c = fixtures::case5_feeder4();
  for (const Formulation f : form::kAllFormulations) {
    const form::ItdModel m = form::build_itd_model(c, f);
    for (int trial = 0; trial < 100; ++trial) {
      const Eigen::VectorXd x =
          form::sample_interior(m.nlp.lower, m.nlp.upper, m.nlp.x0, rng);
      const form::DerivativeReport rep = form::check_jacobians(m.nlp.blocks, x);
      for (const auto& b : rep.blocks) {
        if (!b.passed) ok = false;
        if (b.max_deviation > worst) {
          worst = b.max_deviation;
          worst_block = std::string(form::tag(f)) + "/" + b.name;
        }
      }
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "4 formulations x 100 points x all blocks; worst %s at %.2e",
                worst_block.c_str(), worst);
  report("derivative-suite", ok, buf);
}

void criterion_solver_correctness() {
  bool ok = true;
  std::string details;
  // independent KKT re-verification of every accepted solution
  for (const auto& [name, c] : bundled_cases())
    for (const Formulation f : form::kAllFormulations) {
      const prob::ITDResult r = prob::solve_opfitd(c, f);
      if (r.status != nlp::SolveStatus::Optimal) {
        ok = false;
        details += name + "/" + form::tag(f) + " not optimal; ";
        continue;
      }
      if (!check_kkt(r)) {
        ok = false;
        details += name + "/" + form::tag(f) + " KKT re-verification above 1e-6; ";
      }
    }
  // deterministic iterate logs
  const net::ITDCase c5 = fixtures::case5_feeder4();
  const prob::ITDResult a = prob::solve_opfitd(c5, Formulation::AcpAcpu);
  const prob::ITDResult b = prob::solve_opfitd(c5, Formulation::AcpAcpu);
  if (a.solution.iterate_log != b.solution.iterate_log) {
    ok = false;
    details += "iterate logs differ across repeated runs; ";
  }
  report("solver-correctness", ok,
         details.empty() ? "KKT <= 1e-6 re-verified on 12 solves; logs bit-identical"
                         : details);
}

void criterion_scalability_sweep() {
  const auto t0 = Clock::now();
  const net::TransmissionNetwork trans = io::parse_matpower(
      io::read_file(fixtures::data("transmission/case118_style.m")));
  const net::DistributionNetwork feeder = io::parse_distribution_json(
      io::read_file(fixtures::data("distribution/feeder4.json")));
  const std::vector<int> attach = {2, 7, 14, 28, 44};
  const prob::SweepReport rep =
      prob::scale_sweep(trans, feeder, attach, 1, 5, Formulation::AcpAcpu);
  const double elapsed = seconds_since(t0);

  bool ok = rep.rows.size() == 5 && elapsed < 120.0;
  for (const auto& row : rep.rows) {
    if (!row.ok) ok = false;
    const int expected =
        static_cast<int>(trans.buses.size()) + row.k * feeder.node_count();
    if (row.total_nodes != expected) ok = false;
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "k=1..5 all optimal, nodes 130..178 additive, %.2f s",
                elapsed);
  report("scalability-sweep", ok, buf);
}

void criterion_parser_golden() {
  bool ok = true;
  std::string details;
  const auto check = [&](const std::string& name, const std::string& dump) {
    const std::string path = std::string(ITDOPF_TEST_DATA_DIR) + "/golden/" + name;
    try {
      if (dump != io::read_file(path)) {
        ok = false;
        details += name + " differs; ";
      }
    } catch (const std::exception&) {
      ok = false;
      details += name + " missing; ";
    }
  };
  check("case5_withload.json",
        io::dump_transmission_json(io::parse_matpower(
            io::read_file(fixtures::data("transmission/case5_withload.m")))));
  check("feeder4.json", io::dump_distribution_json(io::parse_distribution_json(
                            io::read_file(fixtures::data("distribution/feeder4.json")))));
  check("boundary_case5.json",
        io::dump_boundary_json(io::parse_boundary_json(
            io::read_file(fixtures::data("boundary/case5_feeder4.json")))));
  report("parser-golden", ok, ok ? "three canonical dumps byte-identical" : details);
}

}  // namespace

int main() {
  criterion_cross_formulation();
  criterion_relaxation_ordering();
  criterion_coordination_value();
  criterion_boundary_closure();
  criterion_oracle_equivalence();
  criterion_derivative_suite();
  criterion_solver_correctness();
  criterion_scalability_sweep();
  criterion_parser_golden();
  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all acceptance criteria passed\n");
  return 0;
}
