#pragma once

#include <string>
#include <string_view>

#include "itdopf/io/parse_error.hpp"
#include "itdopf/net/boundary.hpp"
#include "itdopf/net/distribution.hpp"
#include "itdopf/net/transmission.hpp"

namespace itdopf::io {

/// Parse the MATPOWER-subset text format (sections baseMVA, bus, gen,
/// branch, gencost as bracketed numeric matrices). Returns a per-unit
/// network with derived branch admittances.
net::TransmissionNetwork parse_matpower(std::string_view text);

/// Parse the native distribution JSON schema (schema_version 1). Impedance
/// blocks are inverted per line and the network is returned in per-unit.
net::DistributionNetwork parse_distribution_json(std::string_view text);

/// Parse a boundary linking file: a JSON array of records with fields
/// transmission_boundary, distribution_boundary, distribution_file.
net::BoundarySpec parse_boundary_json(std::string_view text);

/// Canonical deterministic dumps of parsed networks. Numbers carry 17
/// significant digits; key order is fixed; output ends with a newline.
std::string dump_transmission_json(const net::TransmissionNetwork& net);
std::string dump_distribution_json(const net::DistributionNetwork& net);
std::string dump_boundary_json(const net::BoundarySpec& spec);

}  // namespace itdopf::io
