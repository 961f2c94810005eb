#pragma once

#include <array>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "itdopf/net/transmission.hpp"

namespace itdopf::net {

/// Phases of a three-wire (Kron-reduced) feeder.
enum Phase : int { kPhaseA = 0, kPhaseB = 1, kPhaseC = 2 };
inline constexpr int kNumPhases = 3;
inline constexpr const char* kPhaseNames[kNumPhases] = {"a", "b", "c"};

using PhaseMask = std::array<bool, kNumPhases>;
using PhaseVec = std::array<double, kNumPhases>;
using PhaseMat = std::array<std::array<double, kNumPhases>, kNumPhases>;
using ComplexPhaseMat = std::array<std::array<std::complex<double>, kNumPhases>, kNumPhases>;

inline constexpr PhaseMask kAllPhases = {true, true, true};

struct DistBus {
  std::string id;
  PhaseMask phases = kAllPhases;
  PhaseVec v_min = {0.9, 0.9, 0.9};
  PhaseVec v_max = {1.1, 1.1, 1.1};
  PhaseVec gs = {0, 0, 0};
  PhaseVec bs = {0, 0, 0};
  bool in_service = true;

  bool three_phase() const { return phases[0] && phases[1] && phases[2]; }
  int phase_count() const {
    return (phases[0] ? 1 : 0) + (phases[1] ? 1 : 0) + (phases[2] ? 1 : 0);
  }
};

/// Multi-conductor line. `y_series` holds the 3x3 series admittance block
/// (entries g + jb); rows/cols outside `phases` are zero.
struct DistLine {
  std::string from;
  std::string to;
  PhaseMask phases = kAllPhases;
  ComplexPhaseMat y_series{};
  PhaseVec b_shunt = {0, 0, 0};  ///< total per-phase charging
  PhaseVec tau = {1, 1, 1};
  PhaseVec shift = {0, 0, 0};  ///< per-phase shift [rad]
  PhaseVec p_max = {std::numeric_limits<double>::infinity(),
                    std::numeric_limits<double>::infinity(),
                    std::numeric_limits<double>::infinity()};
  PhaseVec q_max = {std::numeric_limits<double>::infinity(),
                    std::numeric_limits<double>::infinity(),
                    std::numeric_limits<double>::infinity()};
  PhaseVec angmin = {-1.0471975511965976, -1.0471975511965976, -1.0471975511965976};
  PhaseVec angmax = {1.0471975511965976, 1.0471975511965976, 1.0471975511965976};
};

struct DistLoad {
  std::string bus;
  PhaseVec pd = {0, 0, 0};
  PhaseVec qd = {0, 0, 0};
};

struct DistGen {
  std::string bus;
  PhaseVec p_min = {0, 0, 0};
  PhaseVec p_max = {0, 0, 0};
  PhaseVec q_min = {0, 0, 0};
  PhaseVec q_max = {0, 0, 0};
  GenCost cost;
  bool status = true;
};

/// Three-wire distribution feeder. Power quantities are in per-unit on
/// `base_kva` (three-phase base) once `per_unit` is set; admittances on the
/// impedance base derived from `base_kv` (line-to-line).
struct DistributionNetwork {
  std::string name;
  double base_kva = 1000.0;
  double base_kv = 4.16;  ///< line-to-line voltage base [kV]
  bool per_unit = false;
  std::string source_bus;
  std::vector<DistBus> nodes;
  std::vector<DistLine> lines;
  std::vector<DistLoad> loads;
  std::vector<DistGen> generators;

  int bus_index(const std::string& id) const {
    for (size_t i = 0; i < nodes.size(); ++i)
      if (nodes[i].id == id) return static_cast<int>(i);
    return -1;
  }
  const DistBus* find_bus(const std::string& id) const {
    int i = bus_index(id);
    return i < 0 ? nullptr : &nodes[i];
  }
  double z_base_ohm() const { return 1000.0 * base_kv * base_kv / base_kva; }
  /// Total node count weighted by declared phases (a 3-phase bus is 3 nodes).
  int node_count() const {
    int n = 0;
    for (const auto& b : nodes) n += b.phase_count();
    return n;
  }
};

}  // namespace itdopf::net
