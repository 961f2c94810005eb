#include <cmath>

#include "itdopf/io/formats.hpp"
#include "json_detail.hpp"

namespace itdopf::io {

namespace {

using detail::ojson;

ojson phase_array(const net::PhaseVec& v) {
  return ojson{v[0], v[1], v[2]};
}

ojson finite_or_null(double v) {
  if (std::isinf(v)) return nullptr;
  return v;
}

}  // namespace

std::string dump_transmission_json(const net::TransmissionNetwork& net) {
  ojson j;
  j["kind"] = "transmission";
  j["name"] = net.name;
  j["base_mva"] = net.base_mva;
  j["per_unit"] = net.per_unit;

  ojson buses = ojson::array();
  for (const auto& b : net.buses) {
    ojson bj;
    bj["id"] = b.id;
    bj["v_min"] = b.v_min;
    bj["v_max"] = b.v_max;
    bj["pd"] = b.pd;
    bj["qd"] = b.qd;
    bj["gs"] = b.gs;
    bj["bs"] = b.bs;
    bj["is_reference"] = b.is_reference;
    bj["in_service"] = b.in_service;
    buses.push_back(std::move(bj));
  }
  j["buses"] = std::move(buses);

  ojson branches = ojson::array();
  for (const auto& br : net.branches) {
    ojson bj;
    bj["from"] = br.from;
    bj["to"] = br.to;
    bj["r"] = br.r;
    bj["x"] = br.x;
    bj["b_charge"] = br.b_charge;
    bj["tau"] = br.tau;
    bj["shift"] = br.shift;
    bj["s_max"] = finite_or_null(br.s_max);
    bj["angmin"] = br.angmin;
    bj["angmax"] = br.angmax;
    bj["g"] = br.g;
    bj["b"] = br.b;
    branches.push_back(std::move(bj));
  }
  j["branches"] = std::move(branches);

  ojson gens = ojson::array();
  for (const auto& g : net.generators) {
    ojson gj;
    gj["bus"] = g.bus;
    gj["p_min"] = g.p_min;
    gj["p_max"] = g.p_max;
    gj["q_min"] = g.q_min;
    gj["q_max"] = g.q_max;
    gj["cost"] = ojson{g.cost.c2, g.cost.c1, g.cost.c0};
    gj["status"] = g.status;
    gens.push_back(std::move(gj));
  }
  j["generators"] = std::move(gens);
  return detail::dump_deterministic(j);
}

std::string dump_distribution_json(const net::DistributionNetwork& net) {
  ojson j;
  j["kind"] = "distribution";
  j["name"] = net.name;
  j["base_kva"] = net.base_kva;
  j["base_kv"] = net.base_kv;
  j["per_unit"] = net.per_unit;
  j["source_bus"] = net.source_bus;

  ojson buses = ojson::array();
  for (const auto& b : net.nodes) {
    ojson bj;
    bj["id"] = b.id;
    ojson phases = ojson::array();
    for (int p = 0; p < net::kNumPhases; ++p)
      if (b.phases[p]) phases.push_back(net::kPhaseNames[p]);
    bj["phases"] = std::move(phases);
    bj["v_min"] = phase_array(b.v_min);
    bj["v_max"] = phase_array(b.v_max);
    bj["gs"] = phase_array(b.gs);
    bj["bs"] = phase_array(b.bs);
    bj["in_service"] = b.in_service;
    buses.push_back(std::move(bj));
  }
  j["buses"] = std::move(buses);

  ojson lines = ojson::array();
  for (const auto& ln : net.lines) {
    ojson lj;
    lj["from"] = ln.from;
    lj["to"] = ln.to;
    ojson g = ojson::array(), b = ojson::array();
    for (int p = 0; p < net::kNumPhases; ++p) {
      ojson grow = ojson::array(), brow = ojson::array();
      for (int q = 0; q < net::kNumPhases; ++q) {
        grow.push_back(ln.y_series[p][q].real());
        brow.push_back(ln.y_series[p][q].imag());
      }
      g.push_back(std::move(grow));
      b.push_back(std::move(brow));
    }
    lj["y_series_g"] = std::move(g);
    lj["y_series_b"] = std::move(b);
    lj["b_shunt"] = phase_array(ln.b_shunt);
    lj["tau"] = phase_array(ln.tau);
    lj["shift"] = phase_array(ln.shift);
    lj["p_max"] = ojson{finite_or_null(ln.p_max[0]), finite_or_null(ln.p_max[1]),
                        finite_or_null(ln.p_max[2])};
    lj["q_max"] = ojson{finite_or_null(ln.q_max[0]), finite_or_null(ln.q_max[1]),
                        finite_or_null(ln.q_max[2])};
    lj["angmin"] = phase_array(ln.angmin);
    lj["angmax"] = phase_array(ln.angmax);
    lines.push_back(std::move(lj));
  }
  j["lines"] = std::move(lines);

  ojson loads = ojson::array();
  for (const auto& d : net.loads) {
    ojson dj;
    dj["bus"] = d.bus;
    dj["pd"] = phase_array(d.pd);
    dj["qd"] = phase_array(d.qd);
    loads.push_back(std::move(dj));
  }
  j["loads"] = std::move(loads);

  ojson gens = ojson::array();
  for (const auto& g : net.generators) {
    ojson gj;
    gj["bus"] = g.bus;
    gj["p_min"] = phase_array(g.p_min);
    gj["p_max"] = phase_array(g.p_max);
    gj["q_min"] = phase_array(g.q_min);
    gj["q_max"] = phase_array(g.q_max);
    gj["cost"] = ojson{g.cost.c2, g.cost.c1, g.cost.c0};
    gj["status"] = g.status;
    gens.push_back(std::move(gj));
  }
  j["generators"] = std::move(gens);
  return detail::dump_deterministic(j);
}

}  // namespace itdopf::io
