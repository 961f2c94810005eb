#pragma once

#include <complex>

#include "itdopf/net/distribution.hpp"
#include "itdopf/net/transmission.hpp"

namespace itdopf::form {

/// 2x2 block admittance of the pi-model branch with complex tap
/// t = tau * e^{j shift} on the from side:
///   I_f = ff V_f + ft V_t,  I_t = tf V_f + tt V_t.
struct BranchY {
  std::complex<double> ff, ft, tf, tt;
};

inline BranchY branch_admittance(const net::TransBranch& br) {
  const std::complex<double> y(br.g, br.b);
  const std::complex<double> t = std::polar(br.tau, br.shift);
  const std::complex<double> ysh(0.0, br.b_charge / 2.0);
  BranchY out;
  out.ff = (y + ysh) / (br.tau * br.tau);
  out.ft = -y / std::conj(t);
  out.tf = -y / t;
  out.tt = y + ysh;
  return out;
}

/// Per-phase block admittances of a multi-conductor line; rows/cols outside
/// the line's phases are zero. Generalizes the single-phase form with a
/// per-phase complex tap vector.
struct LineY {
  net::ComplexPhaseMat ff{}, ft{}, tf{}, tt{};
};

inline LineY line_admittance(const net::DistLine& ln) {
  LineY out;
  std::complex<double> t[net::kNumPhases];
  for (int p = 0; p < net::kNumPhases; ++p) t[p] = std::polar(ln.tau[p], ln.shift[p]);
  for (int p = 0; p < net::kNumPhases; ++p) {
    if (!ln.phases[p]) continue;
    for (int q = 0; q < net::kNumPhases; ++q) {
      if (!ln.phases[q]) continue;
      const std::complex<double> y = ln.y_series[p][q];
      const std::complex<double> ysh =
          p == q ? std::complex<double>(0.0, ln.b_shunt[p] / 2.0) : 0.0;
      out.ff[p][q] = (y + ysh) / (std::conj(t[p]) * t[q]);
      out.ft[p][q] = -y / std::conj(t[p]);
      out.tf[p][q] = -y / t[q];
      out.tt[p][q] = y + ysh;
    }
  }
  return out;
}

}  // namespace itdopf::form
