#include "itdopf/net/boundary.hpp"

#include <set>

namespace itdopf::net {

ResolvedLinks resolve_boundaries(const TransmissionNetwork& trans,
                                 std::span<const DistributionNetwork> feeders,
                                 const BoundarySpec& spec) {
  ResolvedLinks out;
  std::set<int> seen_trans;
  std::set<int> seen_feeders;
  for (const auto& link : spec.links) {
    ResolvedLink r;
    r.trans_bus_index = trans.bus_index(link.trans_bus);
    if (r.trans_bus_index < 0)
      throw ResolveError(ResolveError::Kind::UnknownBus,
                         "transmission bus " + std::to_string(link.trans_bus) +
                             " referenced by a boundary link does not exist");
    if (!trans.buses[r.trans_bus_index].in_service)
      throw ResolveError(ResolveError::Kind::DisabledBus,
                         "transmission bus " + std::to_string(link.trans_bus) +
                             " referenced by a boundary link is out of service");
    if (!seen_trans.insert(link.trans_bus).second)
      throw ResolveError(ResolveError::Kind::DuplicateLink,
                         "transmission bus " + std::to_string(link.trans_bus) +
                             " appears in more than one boundary link");

    for (size_t f = 0; f < feeders.size(); ++f)
      if (feeders[f].name == link.dist_network) {
        r.feeder_index = static_cast<int>(f);
        break;
      }
    if (r.feeder_index < 0)
      throw ResolveError(ResolveError::Kind::UnknownFeeder,
                         "distribution network '" + link.dist_network +
                             "' referenced by a boundary link was not loaded");
    if (!seen_feeders.insert(r.feeder_index).second)
      throw ResolveError(ResolveError::Kind::DuplicateLink,
                         "distribution network '" + link.dist_network +
                             "' appears in more than one boundary link");

    const DistributionNetwork& feeder = feeders[r.feeder_index];
    r.dist_bus_index = feeder.bus_index(link.dist_bus);
    if (r.dist_bus_index < 0)
      throw ResolveError(ResolveError::Kind::UnknownBus,
                         "distribution bus '" + link.dist_bus + "' does not exist in '" +
                             link.dist_network + "'");
    const DistBus& bus = feeder.nodes[r.dist_bus_index];
    if (!bus.in_service)
      throw ResolveError(ResolveError::Kind::DisabledBus,
                         "distribution bus '" + link.dist_bus + "' is out of service");
    if (bus.id != feeder.source_bus)
      throw ResolveError(ResolveError::Kind::PhaseMismatch,
                         "distribution bus '" + link.dist_bus +
                             "' is not the source bus of '" + link.dist_network + "'");
    if (!bus.three_phase())
      throw ResolveError(ResolveError::Kind::PhaseMismatch,
                         "boundary bus '" + link.dist_bus + "' must carry phases a, b, c");

    r.base_factor = feeder.base_kva / (1000.0 * trans.base_mva);
    out.links.push_back(r);
  }
  return out;
}

}  // namespace itdopf::net
