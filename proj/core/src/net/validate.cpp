#include "itdopf/net/case.hpp"

#include <cmath>
#include <complex>

namespace itdopf::net {

namespace {

void add(ValidationReport& rep, std::string component, std::string message) {
  rep.violations.push_back({std::move(component), std::move(message)});
}

bool finite(double v) { return std::isfinite(v); }

}  // namespace

ValidationReport validate_network(const TransmissionNetwork& net) {
  ValidationReport rep;
  const std::string tag = "transmission " + net.name;
  if (!(net.base_mva > 0)) add(rep, tag, "base_mva must be positive");
  int refs = 0;
  for (const auto& b : net.buses)
    if (b.is_reference) ++refs;
  if (refs < 1) add(rep, tag, "no reference bus");

  for (const auto& b : net.buses) {
    const std::string where = tag + ".bus " + std::to_string(b.id);
    if (!(b.v_min > 0)) add(rep, where, "v_min must be positive");
    if (!(b.v_min <= b.v_max)) add(rep, where, "v_min exceeds v_max");
    if (!finite(b.pd) || !finite(b.qd)) add(rep, where, "demand not finite");
  }
  for (size_t i = 0; i < net.branches.size(); ++i) {
    const auto& br = net.branches[i];
    const std::string where = tag + ".branch " + std::to_string(i);
    if (net.bus_index(br.from) < 0)
      add(rep, where, "from bus " + std::to_string(br.from) + " does not exist");
    if (net.bus_index(br.to) < 0)
      add(rep, where, "to bus " + std::to_string(br.to) + " does not exist");
    if (br.from == br.to) add(rep, where, "self loop");
    if (std::abs(br.r) + std::abs(br.x) < 1e-12) add(rep, where, "zero series impedance");
    if (!(br.tau > 0)) add(rep, where, "tap ratio must be positive");
    if (!(br.angmin <= 0 && 0 <= br.angmax))
      add(rep, where, "angle bounds must bracket zero");
    const std::complex<double> prod =
        std::complex<double>(br.g, br.b) * std::complex<double>(br.r, br.x);
    if (std::abs(prod - 1.0) > 1e-10)
      add(rep, where, "derived admittance inconsistent with impedance");
  }
  for (size_t i = 0; i < net.generators.size(); ++i) {
    const auto& g = net.generators[i];
    const std::string where = tag + ".gen " + std::to_string(i);
    if (net.bus_index(g.bus) < 0)
      add(rep, where, "bus " + std::to_string(g.bus) + " does not exist");
    if (!(g.p_min <= g.p_max)) add(rep, where, "p_min exceeds p_max");
    if (!(g.q_min <= g.q_max)) add(rep, where, "q_min exceeds q_max");
    if (!(g.cost.c2 >= 0)) add(rep, where, "c2 must be nonnegative");
    if (!finite(g.cost.c2) || !finite(g.cost.c1) || !finite(g.cost.c0))
      add(rep, where, "cost coefficients not finite");
  }
  return rep;
}

ValidationReport validate_network(const DistributionNetwork& net) {
  ValidationReport rep;
  const std::string tag = "feeder " + net.name;
  if (!(net.base_kva > 0)) add(rep, tag, "base_kva must be positive");
  if (!(net.base_kv > 0)) add(rep, tag, "base_kv must be positive");

  const DistBus* src = net.find_bus(net.source_bus);
  if (!src)
    add(rep, tag, "source bus '" + net.source_bus + "' does not exist");
  else if (!src->three_phase())
    add(rep, tag, "source bus '" + net.source_bus + "' must carry phases a, b, c");

  for (const auto& b : net.nodes) {
    const std::string where = tag + ".bus " + b.id;
    for (int p = 0; p < kNumPhases; ++p) {
      if (!b.phases[p]) continue;
      if (!(b.v_min[p] > 0)) add(rep, where, std::string("v_min not positive on phase ") + kPhaseNames[p]);
      if (!(b.v_min[p] <= b.v_max[p]))
        add(rep, where, std::string("v_min exceeds v_max on phase ") + kPhaseNames[p]);
    }
  }
  for (size_t i = 0; i < net.lines.size(); ++i) {
    const auto& ln = net.lines[i];
    const std::string where = tag + ".line " + std::to_string(i);
    const DistBus* fb = net.find_bus(ln.from);
    const DistBus* tb = net.find_bus(ln.to);
    if (!fb) add(rep, where, "from bus '" + ln.from + "' does not exist");
    if (!tb) add(rep, where, "to bus '" + ln.to + "' does not exist");
    if (ln.from == ln.to) add(rep, where, "self loop");
    for (int p = 0; p < kNumPhases; ++p) {
      if (!ln.phases[p]) continue;
      if (fb && !fb->phases[p])
        add(rep, where, std::string("phase ") + kPhaseNames[p] + " missing at from bus");
      if (tb && !tb->phases[p])
        add(rep, where, std::string("phase ") + kPhaseNames[p] + " missing at to bus");
      if (!(ln.tau[p] > 0)) add(rep, where, "tap ratio must be positive");
      if (!(ln.angmin[p] <= 0 && 0 <= ln.angmax[p]))
        add(rep, where, "angle bounds must bracket zero");
    }
    for (int p = 0; p < kNumPhases; ++p)
      for (int q = p + 1; q < kNumPhases; ++q)
        if (std::abs(ln.y_series[p][q] - ln.y_series[q][p]) > 1e-12) {
          add(rep, where, "series admittance block not symmetric");
          p = kNumPhases;
          break;
        }
  }
  for (size_t i = 0; i < net.loads.size(); ++i) {
    const auto& ld = net.loads[i];
    const std::string where = tag + ".load " + std::to_string(i);
    if (net.bus_index(ld.bus) < 0) add(rep, where, "bus '" + ld.bus + "' does not exist");
    for (int p = 0; p < kNumPhases; ++p)
      if (!finite(ld.pd[p]) || !finite(ld.qd[p])) add(rep, where, "demand not finite");
  }
  for (size_t i = 0; i < net.generators.size(); ++i) {
    const auto& g = net.generators[i];
    const std::string where = tag + ".gen " + std::to_string(i);
    if (net.bus_index(g.bus) < 0) add(rep, where, "bus '" + g.bus + "' does not exist");
    for (int p = 0; p < kNumPhases; ++p) {
      if (!(g.p_min[p] <= g.p_max[p]))
        add(rep, where, std::string("p_min exceeds p_max on phase ") + kPhaseNames[p]);
      if (!(g.q_min[p] <= g.q_max[p]))
        add(rep, where, std::string("q_min exceeds q_max on phase ") + kPhaseNames[p]);
    }
    if (!(g.cost.c2 >= 0)) add(rep, where, "c2 must be nonnegative");
    if (!finite(g.cost.c2) || !finite(g.cost.c1) || !finite(g.cost.c0))
      add(rep, where, "cost coefficients not finite");
  }
  return rep;
}

ValidationReport validate_case(const ITDCase& c) {
  ValidationReport rep = validate_network(c.transmission);
  for (const auto& f : c.feeders) {
    auto sub = validate_network(f);
    rep.violations.insert(rep.violations.end(), sub.violations.begin(),
                          sub.violations.end());
  }

  std::vector<int> refs(c.feeders.size(), 0);
  for (size_t l = 0; l < c.boundary.links.size(); ++l) {
    const auto& link = c.boundary.links[l];
    const std::string where = "boundary.link " + std::to_string(l);
    if (link.trans_bus_index < 0 ||
        link.trans_bus_index >= static_cast<int>(c.transmission.buses.size())) {
      add(rep, where, "transmission bus index out of range");
      continue;
    }
    if (link.feeder_index < 0 || link.feeder_index >= static_cast<int>(c.feeders.size())) {
      add(rep, where, "feeder index out of range");
      continue;
    }
    ++refs[link.feeder_index];
    const auto& feeder = c.feeders[link.feeder_index];
    if (link.dist_bus_index < 0 ||
        link.dist_bus_index >= static_cast<int>(feeder.nodes.size())) {
      add(rep, where, "distribution bus index out of range");
      continue;
    }
    const auto& bus = feeder.nodes[link.dist_bus_index];
    if (bus.id != feeder.source_bus)
      add(rep, where, "linked distribution bus is not the feeder source bus");
    if (!bus.three_phase()) add(rep, where, "linked distribution bus is not three-phase");
  }
  // A case with an empty boundary set is the degenerate "isolated feeders"
  // case; otherwise every feeder must be linked exactly once.
  if (!c.boundary.links.empty())
    for (size_t f = 0; f < refs.size(); ++f)
      if (refs[f] != 1)
        add(rep, "feeder " + c.feeders[f].name,
            "must be referenced by exactly one boundary link, got " +
                std::to_string(refs[f]));
  return rep;
}

}  // namespace itdopf::net
