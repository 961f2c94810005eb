#pragma once

#include <string>

#include "json.hpp"

namespace itdopf::io::detail {

using ojson = nlohmann::ordered_json;

/// Serialize with stable key order, two-space indent and floating-point
/// numbers rendered with 17 significant digits ("%.17g"). Output is a total
/// function of the document, so equal documents produce equal bytes.
std::string dump_deterministic(const ojson& j);

/// %.17g rendering of one double (also used by the CSV writers).
std::string format_g17(double v);

}  // namespace itdopf::io::detail
