#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "itdopf/net/distribution.hpp"
#include "itdopf/net/transmission.hpp"

namespace itdopf::net {

/// One entry of the boundary set: transmission bus <-> feeder source bus.
struct BoundaryLink {
  int trans_bus = 0;         ///< transmission bus id
  std::string dist_network;  ///< feeder identifier (the file it was loaded from)
  std::string dist_bus;      ///< feeder bus name, must be the source bus
};

struct BoundarySpec {
  std::vector<BoundaryLink> links;
};

/// A validated link with resolved indices and the power-base conversion
/// factor from feeder p.u. to transmission p.u.
struct ResolvedLink {
  int trans_bus_index = -1;
  int feeder_index = -1;
  int dist_bus_index = -1;
  double base_factor = 1.0;  ///< base_kva / (1000 * base_mva)
};

struct ResolvedLinks {
  std::vector<ResolvedLink> links;
  bool empty() const { return links.empty(); }
  size_t size() const { return links.size(); }
};

class ResolveError : public std::runtime_error {
 public:
  enum class Kind { UnknownBus, DisabledBus, DuplicateLink, PhaseMismatch, UnknownFeeder };
  ResolveError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Resolve a boundary spec against parsed networks. Link order follows the
/// spec order. Throws ResolveError on the first violated precondition.
ResolvedLinks resolve_boundaries(const TransmissionNetwork& trans,
                                 std::span<const DistributionNetwork> feeders,
                                 const BoundarySpec& spec);

}  // namespace itdopf::net
