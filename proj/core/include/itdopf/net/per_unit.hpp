#pragma once

#include <stdexcept>

#include "itdopf/net/distribution.hpp"
#include "itdopf/net/transmission.hpp"

namespace itdopf::net {

class NonPositiveBase : public std::runtime_error {
 public:
  explicit NonPositiveBase(const std::string& what) : std::runtime_error(what) {}
};

/// Transmission: raw units are MW / MVAr / MW-at-nominal-voltage shunts;
/// branch impedances are already dimensionless. Inverse of from_per_unit.
TransmissionNetwork to_per_unit(const TransmissionNetwork& raw);
TransmissionNetwork from_per_unit(const TransmissionNetwork& pu);

/// Distribution: raw units are kW / kvar for powers and siemens for
/// admittances (series blocks and shunts). Voltage bounds stay in p.u.
DistributionNetwork to_per_unit(const DistributionNetwork& raw);
DistributionNetwork from_per_unit(const DistributionNetwork& pu);

}  // namespace itdopf::net
