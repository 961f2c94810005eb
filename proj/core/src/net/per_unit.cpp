#include "itdopf/net/per_unit.hpp"

namespace itdopf::net {

namespace {

void check_base(double base, const char* what) {
  if (!(base > 0.0)) throw NonPositiveBase(std::string(what) + " must be positive");
}

TransmissionNetwork scale_trans(const TransmissionNetwork& in, double power_scale,
                                bool per_unit) {
  TransmissionNetwork out = in;
  out.per_unit = per_unit;
  for (auto& bus : out.buses) {
    bus.pd *= power_scale;
    bus.qd *= power_scale;
    bus.gs *= power_scale;
    bus.bs *= power_scale;
  }
  for (auto& gen : out.generators) {
    gen.p_min *= power_scale;
    gen.p_max *= power_scale;
    gen.q_min *= power_scale;
    gen.q_max *= power_scale;
  }
  for (auto& br : out.branches) {
    if (std::isfinite(br.s_max)) br.s_max *= power_scale;
  }
  return out;
}

DistributionNetwork scale_dist(const DistributionNetwork& in, double power_scale,
                               double admittance_scale, bool per_unit) {
  DistributionNetwork out = in;
  out.per_unit = per_unit;
  for (auto& bus : out.nodes)
    for (int p = 0; p < kNumPhases; ++p) {
      bus.gs[p] *= admittance_scale;
      bus.bs[p] *= admittance_scale;
    }
  for (auto& line : out.lines)
    for (int p = 0; p < kNumPhases; ++p) {
      for (int q = 0; q < kNumPhases; ++q) line.y_series[p][q] *= admittance_scale;
      line.b_shunt[p] *= admittance_scale;
      if (std::isfinite(line.p_max[p])) line.p_max[p] *= power_scale;
      if (std::isfinite(line.q_max[p])) line.q_max[p] *= power_scale;
    }
  for (auto& load : out.loads)
    for (int p = 0; p < kNumPhases; ++p) {
      load.pd[p] *= power_scale;
      load.qd[p] *= power_scale;
    }
  for (auto& gen : out.generators)
    for (int p = 0; p < kNumPhases; ++p) {
      gen.p_min[p] *= power_scale;
      gen.p_max[p] *= power_scale;
      gen.q_min[p] *= power_scale;
      gen.q_max[p] *= power_scale;
    }
  return out;
}

}  // namespace

TransmissionNetwork to_per_unit(const TransmissionNetwork& raw) {
  check_base(raw.base_mva, "base_mva");
  return scale_trans(raw, 1.0 / raw.base_mva, true);
}

TransmissionNetwork from_per_unit(const TransmissionNetwork& pu) {
  check_base(pu.base_mva, "base_mva");
  return scale_trans(pu, pu.base_mva, false);
}

DistributionNetwork to_per_unit(const DistributionNetwork& raw) {
  check_base(raw.base_kva, "base_kva");
  check_base(raw.base_kv, "base_kv");
  return scale_dist(raw, 1.0 / raw.base_kva, raw.z_base_ohm(), true);
}

DistributionNetwork from_per_unit(const DistributionNetwork& pu) {
  check_base(pu.base_kva, "base_kva");
  check_base(pu.base_kv, "base_kv");
  return scale_dist(pu, pu.base_kva, 1.0 / pu.z_base_ohm(), false);
}

}  // namespace itdopf::net
