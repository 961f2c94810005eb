#pragma once

#include <array>
#include <string>
#include <vector>

#include "itdopf/io/parse_error.hpp"

namespace itdopf::io {

/// Solution document written by the solve workflows. Matches the JSON
/// result schema one-to-one; write -> parse -> write is byte-identical.
struct ResultDocument {
  struct TransGenDispatch {
    int bus = 0;
    double p_mw = 0;
    double q_mvar = 0;
  };
  struct TransBusVoltage {
    int id = 0;
    double vm_pu = 0;
    double va_rad = 0;
  };
  struct DistGenDispatch {
    std::string bus;
    std::array<double, 3> p_kw{};
    std::array<double, 3> q_kvar{};
  };
  struct DistBusVoltage {
    std::string id;
    std::array<double, 3> vm_pu{};
    std::array<double, 3> va_rad{};
  };
  struct FeederResult {
    std::string name;
    std::vector<DistGenDispatch> generators;
    std::vector<DistBusVoltage> buses;  ///< empty for voltage-free formulations
  };
  struct BoundaryFlow {
    int trans_bus = 0;
    std::string feeder;
    double p_mw = 0;       ///< transmission-side flow toward the feeder
    double q_mvar = 0;
    std::array<double, 3> p_dist_mw{};  ///< feeder-side per-phase flows toward transmission
    std::array<double, 3> q_dist_mvar{};
  };

  std::string formulation;
  std::string status;
  double objective_usd_per_hr = 0;
  int iterations = 0;
  double solve_seconds = 0;
  bool has_voltages = false;  ///< false for the transportation formulation

  std::vector<TransGenDispatch> trans_generators;
  std::vector<TransBusVoltage> trans_buses;
  std::vector<FeederResult> feeders;
  std::vector<BoundaryFlow> boundaries;
};

/// Deterministic serialization (stable key order, 17 significant digits).
std::string write_result_json(const ResultDocument& result);

ResultDocument parse_result_json(std::string_view text);

}  // namespace itdopf::io
