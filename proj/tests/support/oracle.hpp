#pragma once

// Independent complex-arithmetic pi-model oracle used to cross-check the
// real-arithmetic constraint expansions. Everything here is derived from
// the raw network data with std::complex, deliberately not sharing code
// with the library's flow builders.

#include <complex>
#include <vector>

#include "itdopf/net/case.hpp"

namespace oracle {

using cd = std::complex<double>;

struct BranchFlows {
  cd s_from;  // V_f * conj(I_f)
  cd s_to;
};

// 2x2 block admittance of one transmission branch, rebuilt from r, x, tap,
// shift and charging from first principles.
inline void branch_blocks(const itdopf::net::TransBranch& br, cd& ff, cd& ft, cd& tf,
                          cd& tt) {
  const cd z(br.r, br.x);
  const cd y = 1.0 / z;
  const cd ysh(0.0, br.b_charge / 2.0);
  const cd t = std::polar(br.tau, br.shift);
  ff = (y + ysh) / (t * std::conj(t));
  ft = -y / std::conj(t);
  tf = -y / t;
  tt = y + ysh;
}

inline BranchFlows branch_flows(const itdopf::net::TransBranch& br, cd v_from, cd v_to) {
  cd ff, ft, tf, tt;
  branch_blocks(br, ff, ft, tf, tt);
  const cd i_from = ff * v_from + ft * v_to;
  const cd i_to = tf * v_from + tt * v_to;
  return {v_from * std::conj(i_from), v_to * std::conj(i_to)};
}

struct LineFlows {
  cd s_from[3];
  cd s_to[3];
};

// Three-phase pi model: I_f = (Y + j diag(bsh)/2) U_f - Y U_t with the
// per-phase complex tap folded in on the from side.
inline LineFlows line_flows(const itdopf::net::DistLine& ln, const cd v_from[3],
                            const cd v_to[3]) {
  LineFlows out;
  cd t[3];
  for (int p = 0; p < 3; ++p) t[p] = std::polar(ln.tau[p], ln.shift[p]);
  cd i_from[3] = {0, 0, 0}, i_to[3] = {0, 0, 0};
  for (int p = 0; p < 3; ++p) {
    if (!ln.phases[p]) continue;
    for (int q = 0; q < 3; ++q) {
      if (!ln.phases[q]) continue;
      const cd y = ln.y_series[p][q];
      const cd ysh = p == q ? cd(0.0, ln.b_shunt[p] / 2.0) : cd(0.0, 0.0);
      i_from[p] += (y + ysh) / (std::conj(t[p]) * t[q]) * v_from[q];
      i_from[p] += -y / std::conj(t[p]) * v_to[q];
      i_to[p] += -y / t[q] * v_from[q];
      i_to[p] += (y + ysh) * v_to[q];
    }
    out.s_from[p] = v_from[p] * std::conj(i_from[p]);
    out.s_to[p] = v_to[p] * std::conj(i_to[p]);
  }
  return out;
}

// Net complex injection a bus must supply given branch flows and shunt:
// sum of S over directions leaving the bus plus the shunt draw.
inline cd trans_bus_draw(const itdopf::net::TransmissionNetwork& net,
                         const std::vector<cd>& v, int bus_index) {
  cd total(0, 0);
  for (const auto& br : net.branches) {
    const int fi = net.bus_index(br.from), ti = net.bus_index(br.to);
    if (fi != bus_index && ti != bus_index) continue;
    const BranchFlows f = branch_flows(br, v[fi], v[ti]);
    total += fi == bus_index ? f.s_from : f.s_to;
  }
  const auto& b = net.buses[bus_index];
  const cd ysh(b.gs, b.bs);
  total += v[bus_index] * std::conj(ysh * v[bus_index]);
  return total;
}

inline cd dist_bus_draw(const itdopf::net::DistributionNetwork& net,
                        const std::vector<std::array<cd, 3>>& v, int bus_index,
                        int phase) {
  cd total(0, 0);
  for (const auto& ln : net.lines) {
    const int fi = net.bus_index(ln.from), ti = net.bus_index(ln.to);
    if (fi != bus_index && ti != bus_index) continue;
    if (!ln.phases[phase]) continue;
    const LineFlows f = line_flows(ln, v[fi].data(), v[ti].data());
    total += fi == bus_index ? f.s_from[phase] : f.s_to[phase];
  }
  const auto& b = net.nodes[bus_index];
  const cd ysh(b.gs[phase], b.bs[phase]);
  total += v[bus_index][phase] * std::conj(ysh * v[bus_index][phase]);
  return total;
}

}  // namespace oracle
