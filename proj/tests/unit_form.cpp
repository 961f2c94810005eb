#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>
#include <random>

#include "fixtures.hpp"
#include "itdopf/form/blocks.hpp"
#include "itdopf/form/build.hpp"
#include "itdopf/form/derivative_check.hpp"
#include "oracle.hpp"

using namespace itdopf;
using form::Formulation;

namespace {

std::map<std::string, int> name_index(const form::VariablePool& pool) {
  std::map<std::string, int> out;
  for (int i = 0; i < pool.size(); ++i) out[pool.info(i).name] = i;
  return out;
}

/// Case copy with shunts switched on so the balance sign conventions get
/// exercised.
net::ITDCase shunted_case5() {
  net::ITDCase c = fixtures::case5_feeder4();
  c.transmission.buses[1].gs = 0.04;
  c.transmission.buses[1].bs = 0.25;
  c.transmission.buses[4].bs = -0.1;
  for (int p = 0; p < 3; ++p) {
    c.feeders[0].nodes[2].gs[p] = 0.01;
    c.feeders[0].nodes[2].bs[p] = 0.05;
  }
  return c;
}

/// Sample a physically-consistent random point: voltages random inside
/// bounds, flow variables overwritten with the complex-oracle flows.
Eigen::VectorXd physical_point(const net::ITDCase& c, const form::ItdModel& m,
                               std::mt19937_64& rng) {
  Eigen::VectorXd x =
      form::sample_interior(m.nlp.lower, m.nlp.upper, m.nlp.x0, rng);
  const bool polar = m.trans.form == Formulation::AcpAcpu;

  // voltage phasors: polar samples drive both representations
  std::uniform_real_distribution<double> angle(-0.4, 0.4);
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
    const auto f = oracle::branch_flows(br, vt[c.transmission.bus_index(br.from)],
                                        vt[c.transmission.bus_index(br.to)]);
    x[m.trans.p_flow[2 * e]] = f.s_from.real();
    x[m.trans.q_flow[2 * e]] = f.s_from.imag();
    x[m.trans.p_flow[2 * e + 1]] = f.s_to.real();
    x[m.trans.q_flow[2 * e + 1]] = f.s_to.imag();
  }

  for (size_t fi = 0; fi < c.feeders.size(); ++fi) {
    const auto& feeder = c.feeders[fi];
    const auto& sp = m.dist[fi];
    std::vector<std::array<oracle::cd, 3>> vd(feeder.nodes.size());
    for (size_t i = 0; i < feeder.nodes.size(); ++i)
      for (int p = 0; p < 3; ++p) {
        if (!feeder.nodes[i].phases[p]) continue;
        const double base = p == 0 ? 0.0 : p == 1 ? -2.0943951023931953 : 2.0943951023931953;
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
      const auto f = oracle::line_flows(ln, vd[feeder.bus_index(ln.from)].data(),
                                        vd[feeder.bus_index(ln.to)].data());
      for (int p = 0; p < 3; ++p) {
        if (!ln.phases[p]) continue;
        x[sp.p_flow[(2 * e) * 3 + p]] = f.s_from[p].real();
        x[sp.q_flow[(2 * e) * 3 + p]] = f.s_from[p].imag();
        x[sp.p_flow[(2 * e + 1) * 3 + p]] = f.s_to[p].real();
        x[sp.q_flow[(2 * e + 1) * 3 + p]] = f.s_to[p].imag();
      }
    }
  }
  return x;
}

/// Independent recomputation of a balance residual from the oracle.
void check_balance_against_oracle(const net::ITDCase& c, const form::ItdModel& m,
                                  const Eigen::VectorXd& x) {
  const bool polar = m.trans.form == Formulation::AcpAcpu;
  std::vector<oracle::cd> vt(c.transmission.buses.size());
  for (size_t i = 0; i < c.transmission.buses.size(); ++i)
    vt[i] = polar ? std::polar(x[m.trans.vm[i]], x[m.trans.va[i]])
                  : oracle::cd(x[m.trans.vre[i]], x[m.trans.vim[i]]);

  for (const auto& blk : m.nlp.blocks) {
    if (blk->name() != "trans_balance") continue;
    Eigen::VectorXd r(blk->rows());
    blk->eval(x.data(), r.data());
    int row = 0;
    for (size_t i = 0; i < c.transmission.buses.size(); ++i) {
      const auto& b = c.transmission.buses[i];
      oracle::cd inj(0, 0);
      for (size_t k = 0; k < c.transmission.generators.size(); ++k)
        if (c.transmission.generators[k].status &&
            c.transmission.bus_index(c.transmission.generators[k].bus) ==
                static_cast<int>(i))
          inj += oracle::cd(x[m.trans.pg[k]], x[m.trans.qg[k]]);
      inj -= oracle::cd(b.pd, b.qd);
      inj -= oracle::trans_bus_draw(c.transmission, vt, static_cast<int>(i));
      const int l = c.link_at_trans_bus(static_cast<int>(i));
      if (l >= 0) inj -= oracle::cd(x[m.links[l].p_trans], x[m.links[l].q_trans]);
      CHECK(std::abs(r[row] - inj.real()) <= 1e-10);
      CHECK(std::abs(r[row + 1] - inj.imag()) <= 1e-10);
      row += 2;
    }
  }

  for (size_t fi = 0; fi < c.feeders.size(); ++fi) {
    const auto& feeder = c.feeders[fi];
    const auto& sp = m.dist[fi];
    std::vector<std::array<oracle::cd, 3>> vd(feeder.nodes.size());
    for (size_t i = 0; i < feeder.nodes.size(); ++i)
      for (int p = 0; p < 3; ++p) {
        if (!feeder.nodes[i].phases[p]) continue;
        vd[i][p] = polar
                       ? std::polar(x[sp.vm[3 * i + p]], x[sp.va[3 * i + p]])
                       : oracle::cd(x[sp.vre[3 * i + p]], x[sp.vim[3 * i + p]]);
      }
    const std::string want = "dist" + std::to_string(fi) + "_balance";
    for (const auto& blk : m.nlp.blocks) {
      if (blk->name() != want) continue;
      Eigen::VectorXd r(blk->rows());
      blk->eval(x.data(), r.data());
      int row = 0;
      const int l = c.link_of_feeder(static_cast<int>(fi));
      for (size_t i = 0; i < feeder.nodes.size(); ++i)
        for (int p = 0; p < 3; ++p) {
          if (!feeder.nodes[i].phases[p]) continue;
          oracle::cd inj(0, 0);
          for (size_t k = 0; k < feeder.generators.size(); ++k)
            if (feeder.generators[k].status &&
                feeder.bus_index(feeder.generators[k].bus) == static_cast<int>(i) &&
                sp.pg[3 * k + p] >= 0)
              inj += oracle::cd(x[sp.pg[3 * k + p]], x[sp.qg[3 * k + p]]);
          for (const auto& ld : feeder.loads)
            if (feeder.bus_index(ld.bus) == static_cast<int>(i))
              inj -= oracle::cd(ld.pd[p], ld.qd[p]);
          inj -= oracle::dist_bus_draw(feeder, vd, static_cast<int>(i), p);
          if (l >= 0 &&
              static_cast<int>(i) == c.boundary.links[l].dist_bus_index)
            inj -= oracle::cd(x[m.links[l].p_dist[p]], x[m.links[l].q_dist[p]]);
          CHECK(std::abs(r[row] - inj.real()) <= 1e-10);
          CHECK(std::abs(r[row + 1] - inj.imag()) <= 1e-10);
          row += 2;
        }
    }
  }
}

}  // namespace

TEST_CASE("complex-oracle equivalence at random interior points") {
  const net::ITDCase c = shunted_case5();
  std::mt19937_64 rng(7);
  for (const Formulation f : {Formulation::AcpAcpu, Formulation::AcrAcru}) {
    const form::ItdModel m = form::build_itd_model(c, f);
    for (int trial = 0; trial < 50; ++trial) {
      const Eigen::VectorXd x = physical_point(c, m, rng);
      // flow-definition residuals vanish when the flow variables carry the
      // oracle values: the real-arithmetic expansion equals V conj(I)
      for (const auto& blk : m.nlp.blocks) {
        const std::string& n = blk->name();
        if (n.find("flow_ac") == std::string::npos) continue;
        Eigen::VectorXd r(blk->rows());
        blk->eval(x.data(), r.data());
        CHECK(r.lpNorm<Eigen::Infinity>() <= 1e-10);
      }
      check_balance_against_oracle(c, m, x);
    }
  }
}

TEST_CASE("cross-space consistency of boundary power residuals") {
  const net::ITDCase c = fixtures::case5_feeder4();
  const form::ItdModel ma = form::build_itd_model(c, Formulation::AcpAcpu);
  const form::ItdModel mr = form::build_itd_model(c, Formulation::AcrAcru);
  const auto ia = name_index(ma.pool);
  const auto ir = name_index(mr.pool);

  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd xa = form::sample_interior(ma.nlp.lower, ma.nlp.upper, ma.nlp.x0, rng);
    Eigen::VectorXd xr = Eigen::VectorXd::Zero(mr.pool.size());
    // shared variables copy by name; voltages map polar -> rectangular
    for (const auto& [name, idx] : ir) {
      auto it = ia.find(name);
      if (it != ia.end()) xr[idx] = xa[it->second];
    }
    for (size_t i = 0; i < c.transmission.buses.size(); ++i) {
      xr[mr.trans.vre[i]] = xa[ma.trans.vm[i]] * std::cos(xa[ma.trans.va[i]]);
      xr[mr.trans.vim[i]] = xa[ma.trans.vm[i]] * std::sin(xa[ma.trans.va[i]]);
    }
    for (int p = 0; p < 3; ++p)
      for (size_t i = 0; i < c.feeders[0].nodes.size(); ++i) {
        xr[mr.dist[0].vre[3 * i + p]] =
            xa[ma.dist[0].vm[3 * i + p]] * std::cos(xa[ma.dist[0].va[3 * i + p]]);
        xr[mr.dist[0].vim[3 * i + p]] =
            xa[ma.dist[0].vm[3 * i + p]] * std::sin(xa[ma.dist[0].va[3 * i + p]]);
      }
    for (const auto& blk_a : ma.nlp.blocks) {
      if (blk_a->name() != "link0_power") continue;
      for (const auto& blk_r : mr.nlp.blocks) {
        if (blk_r->name() != "link0_power") continue;
        Eigen::VectorXd ra(blk_a->rows()), rr(blk_r->rows());
        blk_a->eval(xa.data(), ra.data());
        blk_r->eval(xr.data(), rr.data());
        REQUIRE(ra.size() == rr.size());
        CHECK((ra - rr).lpNorm<Eigen::Infinity>() <= 1e-10);
      }
    }
  }
}

TEST_CASE("variable count formulas hold on every bundled case") {
  for (const auto& c : {fixtures::case5_feeder4(), fixtures::case5_feeder4_unbalanced(),
                        fixtures::case118_5feeders()}) {
    const form::ItdModel m = form::build_itd_model(c, Formulation::AcpAcpu);
    const int nb = static_cast<int>(c.transmission.buses.size());
    const int ng = static_cast<int>(c.transmission.generators.size());
    const int ne = static_cast<int>(c.transmission.branches.size());
    const int nl = static_cast<int>(c.boundary.links.size());
    const int trans_count = m.pool.count_owner(form::VarOwner::Trans) +
                            m.pool.count_owner(form::VarOwner::BoundaryTrans);
    CHECK(trans_count == 2 * nb + 2 * ng + 4 * ne + 2 * nl);
  }
}

TEST_CASE("transportation model has no voltage or reactive variables") {
  const form::ItdModel m =
      form::build_itd_model(fixtures::case5_feeder4(), Formulation::NfaNfau);
  CHECK(m.pool.count_kind(form::VarKind::Vm) == 0);
  CHECK(m.pool.count_kind(form::VarKind::Va) == 0);
  CHECK(m.pool.count_kind(form::VarKind::Vre) == 0);
  CHECK(m.pool.count_kind(form::VarKind::Vim) == 0);
  CHECK(m.pool.count_kind(form::VarKind::Qg) == 0);
  CHECK(m.pool.count_kind(form::VarKind::Qflow) == 0);
  for (const auto& blk : m.nlp.blocks) CHECK(blk->affine());
}

TEST_CASE("affine blocks are affine: interpolation property") {
  const form::ItdModel m =
      form::build_itd_model(fixtures::case5_feeder4(), Formulation::NfaNfau);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2, 2), ua(0, 1);
  const int n = m.pool.size();
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd x(n), y(n);
    for (int i = 0; i < n; ++i) {
      x[i] = u(rng);
      y[i] = u(rng);
    }
    const double a = ua(rng);
    const Eigen::VectorXd z = a * x + (1 - a) * y;
    for (const auto& blk : m.nlp.blocks) {
      Eigen::VectorXd rx(blk->rows()), ry(blk->rows()), rz(blk->rows());
      blk->eval(x.data(), rx.data());
      blk->eval(y.data(), ry.data());
      blk->eval(z.data(), rz.data());
      CHECK((rz - (a * rx + (1 - a) * ry)).lpNorm<Eigen::Infinity>() <= 1e-12);
    }
  }
}

TEST_CASE("single branch flow spot values") {
  // two-bus line with tau=1, no shift
  net::ITDCase c;
  c.transmission.base_mva = 100;
  c.transmission.buses.push_back({1, 0.9, 1.1, 0, 0, 0, 0, true, true});
  c.transmission.buses.push_back({2, 0.9, 1.1, 0, 0, 0, 0, false, true});
  net::TransBranch br;
  br.from = 1;
  br.to = 2;
  br.r = 0.02;
  br.x = 0.2;
  br.b_charge = 0.2;
  c.transmission.branches.push_back(br);
  net::derive_admittances(c.transmission);

  const form::ItdModel m = form::build_itd_model(c, Formulation::AcpAcpu);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(m.pool.size());
  x[m.trans.vm[0]] = 1.0;
  x[m.trans.vm[1]] = 1.0;

  for (const auto& blk : m.nlp.blocks) {
    if (blk->name() != "trans_flow_acp") continue;
    Eigen::VectorXd r(blk->rows());
    blk->eval(x.data(), r.data());
    // rows: P_from, P_to, Q_from, Q_to with all flow vars at 0.
    // flat voltages, equal angles: active flow is exactly 0
    CHECK(std::abs(r[0]) <= 1e-15);
    CHECK(std::abs(r[1]) <= 1e-15);
    // reactive from-side: -(b + bc/2) + b = -bc/2 = -0.1 charging injection
    CHECK(r[2] == doctest::Approx(0.1).epsilon(1e-12));  // r = 0 - (-0.1)
    CHECK(r[3] == doctest::Approx(0.1).epsilon(1e-12));
  }
}

TEST_CASE("diagonal three-phase line with balanced voltages carries no flow") {
  net::DistributionNetwork f;
  f.name = "diag";
  f.base_kva = 1000;
  f.base_kv = 4.16;
  f.source_bus = "s";
  f.nodes.push_back({"s"});
  f.nodes.push_back({"t"});
  net::DistLine ln;
  ln.from = "s";
  ln.to = "t";
  for (int p = 0; p < 3; ++p) ln.y_series[p][p] = std::complex<double>(2.0, -8.0);
  f.lines.push_back(ln);
  f.per_unit = true;

  form::VariablePool pool;
  const auto sp = form::add_distribution_variables(pool, Formulation::AcpAcpu, f, 0, false);
  const auto blocks = form::build_distribution(Formulation::AcpAcpu, f, sp, 0, nullptr);
  Eigen::VectorXd x(pool.size());
  for (int i = 0; i < pool.size(); ++i) x[i] = pool.info(i).x0;
  for (const auto& blk : blocks) {
    if (blk->name().find("flow") == std::string::npos) continue;
    Eigen::VectorXd r(blk->rows());
    blk->eval(x.data(), r.data());
    CHECK(r.lpNorm<Eigen::Infinity>() <= 1e-12);
  }
}

TEST_CASE("boundary couplers") {
  SUBCASE("power closure forces the transmission flow (kappa = 1)") {
    net::ITDCase c = fixtures::case5_feeder4();
    c.feeders[0].base_kva = 100000.0;  // same power base on both sides
    c.boundary.links[0].base_factor = 1.0;
    const form::ItdModel m = form::build_itd_model(c, Formulation::AcpAcpu);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(m.pool.size());
    for (int p = 0; p < 3; ++p) x[m.links[0].p_dist[p]] = -1.0;
    x[m.links[0].p_trans] = 3.0;
    for (const auto& blk : m.nlp.blocks) {
      if (blk->name() != "link0_power") continue;
      Eigen::VectorXd r(blk->rows());
      blk->eval(x.data(), r.data());
      CHECK(std::abs(r[0]) <= 1e-15);  // sum phi (-1) + 3 = 0
    }
  }
  SUBCASE("polar voltage mapping at 1.02 pu") {
    const net::ITDCase c = fixtures::case5_feeder4();
    const form::ItdModel m = form::build_itd_model(c, Formulation::AcpAcpu);
    const int tb = c.boundary.links[0].trans_bus_index;
    const int db = c.boundary.links[0].dist_bus_index;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(m.pool.size());
    x[m.trans.vm[tb]] = 1.02;
    x[m.trans.va[tb]] = 0.05;
    const double two_thirds_pi = 2.0943951023931953;
    for (int p = 0; p < 3; ++p) {
      x[m.dist[0].vm[3 * db + p]] = 1.02;
      x[m.dist[0].va[3 * db + p]] =
          0.05 + (p == 1 ? -two_thirds_pi : p == 2 ? two_thirds_pi : 0.0);
    }
    for (const auto& blk : m.nlp.blocks) {
      if (blk->name() != "link0_voltage") continue;
      Eigen::VectorXd r(blk->rows());
      blk->eval(x.data(), r.data());
      CHECK(r.lpNorm<Eigen::Infinity>() <= 1e-12);
    }
  }
  SUBCASE("rectangular rotation tie (derived by complex rotation oracle)") {
    // rotate the phasor 0.8 + 0.6j by -120 and +120 degrees
    const oracle::cd a(0.8, 0.6);
    const oracle::cd rot_b = a * std::polar(1.0, -2.0943951023931953);
    const oracle::cd rot_c = a * std::polar(1.0, 2.0943951023931953);

    const net::ITDCase c = fixtures::case5_feeder4();
    const form::ItdModel m = form::build_itd_model(c, Formulation::AcrAcru);
    const int tb = c.boundary.links[0].trans_bus_index;
    const int db = c.boundary.links[0].dist_bus_index;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(m.pool.size());
    x[m.trans.vre[tb]] = 0.8;
    x[m.trans.vim[tb]] = 0.6;
    x[m.dist[0].vre[3 * db + 0]] = a.real();
    x[m.dist[0].vim[3 * db + 0]] = a.imag();
    x[m.dist[0].vre[3 * db + 1]] = rot_b.real();
    x[m.dist[0].vim[3 * db + 1]] = rot_b.imag();
    x[m.dist[0].vre[3 * db + 2]] = rot_c.real();
    x[m.dist[0].vim[3 * db + 2]] = rot_c.imag();
    for (const auto& blk : m.nlp.blocks) {
      if (blk->name() == "link0_vmag" || blk->name() == "link0_vangle_a" ||
          blk->name() == "link0_vangle_bc") {
        Eigen::VectorXd r(blk->rows());
        blk->eval(x.data(), r.data());
        CHECK(r.lpNorm<Eigen::Infinity>() <= 1e-12);
      }
    }
  }
}

TEST_CASE("fuel cost objective") {
  net::ITDCase c = fixtures::case5_feeder4();
  const form::ItdModel m = form::build_itd_model(c, Formulation::AcpAcpu);

  SUBCASE("linear term: 0.1 pu at 14 $/MWh on a 100 MVA base") {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(m.pool.size());
    x[m.trans.pg[0]] = 0.1;  // gen 0 cost is (0, 14, 0)
    CHECK(m.nlp.obj_value(x) == doctest::Approx(140.0).epsilon(1e-12));
  }
  SUBCASE("distribution phase-sum rule") {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(m.pool.size());
    for (int p = 0; p < 3; ++p) x[m.dist[0].pg[p]] = 0.01;
    // feeder gen cost (0, 8, 0) on a 1 MVA feeder base: 8 * 0.03 MW
    CHECK(m.nlp.obj_value(x) == doctest::Approx(0.24).epsilon(1e-12));
  }
  SUBCASE("constant terms add up") {
    net::ITDCase zeroed = c;
    for (auto& g : zeroed.transmission.generators) g.cost = {0, 0, 5};
    for (auto& g : zeroed.feeders[0].generators) g.cost = {0, 0, 5};
    const form::ItdModel mz = form::build_itd_model(zeroed, Formulation::AcpAcpu);
    const Eigen::VectorXd x = Eigen::VectorXd::Zero(mz.pool.size());
    CHECK(mz.nlp.obj_value(x) == doctest::Approx(30.0));  // 5 trans + 1 dist gens
  }
  SUBCASE("gradient matches finite differences") {
    std::mt19937_64 rng(3);
    Eigen::VectorXd x = form::sample_interior(m.nlp.lower, m.nlp.upper, m.nlp.x0, rng);
    Eigen::VectorXd g(m.pool.size());
    m.nlp.obj_gradient(x, g);
    for (int i = 0; i < m.pool.size(); ++i) {
      const double h = 1e-6 * std::max(1.0, std::abs(x[i]));
      Eigen::VectorXd xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      const double fd = (m.nlp.obj_value(xp) - m.nlp.obj_value(xm)) / (2 * h);
      CHECK(g[i] == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("jacobians match central differences on every block") {
  std::mt19937_64 rng(11);
  for (const auto& c : {fixtures::case5_feeder4(), fixtures::case5_feeder4_unbalanced()})
    for (const Formulation f : form::kAllFormulations) {
      const form::ItdModel m = form::build_itd_model(c, f);
      for (int trial = 0; trial < 5; ++trial) {
        const Eigen::VectorXd x =
            form::sample_interior(m.nlp.lower, m.nlp.upper, m.nlp.x0, rng);
        const form::DerivativeReport rep = form::check_jacobians(m.nlp.blocks, x);
        for (const auto& b : rep.blocks)
          CHECK_MESSAGE(b.passed, form::tag(f), " block ", b.name, " deviation ",
                        b.max_deviation);
      }
    }
}

TEST_CASE("hessians match finite differences of the jacobian") {
  std::mt19937_64 rng(13);
  const net::ITDCase c = shunted_case5();
  for (const Formulation f : form::kAllFormulations) {
    const form::ItdModel m = form::build_itd_model(c, f);
    for (int trial = 0; trial < 3; ++trial) {
      const Eigen::VectorXd x =
          form::sample_interior(m.nlp.lower, m.nlp.upper, m.nlp.x0, rng);
      const form::DerivativeReport rep = form::check_hessians(m.nlp.blocks, x);
      for (const auto& b : rep.blocks)
        CHECK_MESSAGE(b.passed, form::tag(f), " block ", b.name, " deviation ",
                      b.max_deviation);
    }
  }
}

TEST_CASE("derivative checker classifications") {
  SUBCASE("linear blocks have zero deviation") {
    const form::ItdModel m =
        form::build_itd_model(fixtures::case5_feeder4(), Formulation::NfaNfau);
    std::mt19937_64 rng(17);
    const Eigen::VectorXd x =
        form::sample_interior(m.nlp.lower, m.nlp.upper, m.nlp.x0, rng);
    const form::DerivativeReport rep = form::check_jacobians(m.nlp.blocks, x);
    for (const auto& b : rep.blocks) {
      CHECK(b.passed);
      CHECK(b.max_deviation <= 1e-9);
    }
  }
  SUBCASE("tangent tie near its pole is ill-conditioned, not failed") {
    // the pole sits where atan(f_a/e_a) + offset hits pi/2
    std::vector<form::TangentRow> rows;
    rows.push_back({0, 1, 2, 3, -2.0943951023931953});
    auto blk = std::make_shared<form::TangentOffsetBlock>(
        "tangent_probe", nlp::BlockOwner::Boundary, std::move(rows));
    std::vector<nlp::BlockPtr> blocks{blk};
    Eigen::VectorXd x(4);
    x << 1.0, 0.5774, -0.5, -0.5;  // f_a/e_a just past tan(pi/2 + offset)
    const form::DerivativeReport rep = form::check_jacobians(blocks, x, 1e-6);
    REQUIRE(rep.blocks.size() == 1);
    CHECK(rep.blocks[0].passed);
    CHECK(rep.blocks[0].ill_conditioned);
  }
}
