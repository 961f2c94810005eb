#include "itdopf/net/transmission.hpp"

namespace itdopf::net {

std::pair<double, double> derive_branch_admittance(const TransBranch& branch) {
  const double r = branch.r;
  const double x = branch.x;
  if (std::abs(r) + std::abs(x) < 1e-12)
    throw ZeroImpedance("branch " + std::to_string(branch.from) + "-" +
                        std::to_string(branch.to) + " has zero series impedance");
  const double d = r * r + x * x;
  return {r / d, -x / d};
}

void derive_admittances(TransmissionNetwork& net) {
  for (auto& br : net.branches) {
    auto [g, b] = derive_branch_admittance(br);
    br.g = g;
    br.b = b;
  }
}

}  // namespace itdopf::net
