#pragma once

#include <string>
#include <vector>

#include "itdopf/net/boundary.hpp"
#include "itdopf/net/distribution.hpp"
#include "itdopf/net/transmission.hpp"

namespace itdopf::net {

/// A full ITD case: one transmission network, zero or more feeders, and the
/// resolved boundary links tying them together.
struct ITDCase {
  TransmissionNetwork transmission;
  std::vector<DistributionNetwork> feeders;
  ResolvedLinks boundary;

  /// Index of the link attached to transmission bus index, or -1.
  int link_at_trans_bus(int bus_index) const {
    for (size_t l = 0; l < boundary.links.size(); ++l)
      if (boundary.links[l].trans_bus_index == bus_index) return static_cast<int>(l);
    return -1;
  }
  /// Index of the link attached to feeder f, or -1 (isolated feeder).
  int link_of_feeder(int feeder_index) const {
    for (size_t l = 0; l < boundary.links.size(); ++l)
      if (boundary.links[l].feeder_index == feeder_index) return static_cast<int>(l);
    return -1;
  }
};

struct Violation {
  std::string component;  ///< e.g. "transmission.bus 3", "feeder f1.line 2"
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

/// Check every structural invariant of the case. Pure: violations are data.
ValidationReport validate_case(const ITDCase& c);
ValidationReport validate_network(const TransmissionNetwork& net);
ValidationReport validate_network(const DistributionNetwork& net);

}  // namespace itdopf::net
