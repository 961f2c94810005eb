#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace itdopf::net {

/// Positive-sequence bus of the single-phase transmission model.
struct TransBus {
  int id = 0;
  double v_min = 0.9;  ///< voltage magnitude lower bound [p.u.]
  double v_max = 1.1;  ///< voltage magnitude upper bound [p.u.]
  double pd = 0.0;     ///< active demand
  double qd = 0.0;     ///< reactive demand
  double gs = 0.0;     ///< shunt conductance
  double bs = 0.0;     ///< shunt susceptance
  bool is_reference = false;
  bool in_service = true;
};

/// Pi-model branch with tap and phase shift. `g`/`b` are the derived series
/// admittance components, kept in sync with (r, x) by derive_branch_admittance.
struct TransBranch {
  int from = 0;
  int to = 0;
  double r = 0.0;
  double x = 0.0;
  double b_charge = 0.0;  ///< total charging susceptance b^C
  double tau = 1.0;       ///< tap ratio, > 0
  double shift = 0.0;     ///< phase shift [rad]
  double s_max = std::numeric_limits<double>::infinity();  ///< |P| and |Q| flow bound
  double angmin = -1.0471975511965976;  ///< -60 deg default
  double angmax = 1.0471975511965976;
  double g = 0.0;  ///< derived series conductance
  double b = 0.0;  ///< derived series susceptance
};

struct GenCost {
  double c2 = 0.0;  ///< $/MW^2 h
  double c1 = 0.0;  ///< $/MWh
  double c0 = 0.0;  ///< $/h
};

struct TransGen {
  int bus = 0;
  double p_min = 0.0;
  double p_max = 0.0;
  double q_min = 0.0;
  double q_max = 0.0;
  GenCost cost;
  bool status = true;
};

/// In-memory transmission network. Numeric fields are in per-unit on
/// `base_mva` once `per_unit` is set (parsers always return p.u. networks).
struct TransmissionNetwork {
  std::string name;
  double base_mva = 100.0;
  bool per_unit = false;
  std::vector<TransBus> buses;
  std::vector<TransBranch> branches;
  std::vector<TransGen> generators;

  const TransBus* find_bus(int id) const {
    for (const auto& b : buses)
      if (b.id == id) return &b;
    return nullptr;
  }
  int bus_index(int id) const {
    for (size_t i = 0; i < buses.size(); ++i)
      if (buses[i].id == id) return static_cast<int>(i);
    return -1;
  }
  std::vector<int> reference_buses() const {
    std::vector<int> out;
    for (size_t i = 0; i < buses.size(); ++i)
      if (buses[i].is_reference) out.push_back(static_cast<int>(i));
    return out;
  }
};

/// Error raised when a branch has (numerically) zero series impedance.
class ZeroImpedance : public std::runtime_error {
 public:
  explicit ZeroImpedance(const std::string& what) : std::runtime_error(what) {}
};

/// Series admittance g + jb = 1/(r + jx).
/// Throws ZeroImpedance if |r| + |x| < 1e-12.
std::pair<double, double> derive_branch_admittance(const TransBranch& branch);

/// Derive and store (g, b) on every branch of `net`.
void derive_admittances(TransmissionNetwork& net);

}  // namespace itdopf::net
