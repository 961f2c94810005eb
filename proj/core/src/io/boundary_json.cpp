#include <charconv>

#include "itdopf/io/formats.hpp"
#include "itdopf/io/json_text.hpp"
#include "json_detail.hpp"

namespace itdopf::io {

namespace {
using detail::ojson;
}

net::BoundarySpec parse_boundary_json(std::string_view text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    auto [line, col] = line_col_of_offset(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ParseError(ParseError::Kind::Syntax, e.what(), line, col);
  }
  if (!j.is_array())
    throw ParseError(ParseError::Kind::Syntax, "boundary file must be a JSON array");

  net::BoundarySpec spec;
  int idx = 0;
  for (const auto& rec : j) {
    const std::string where = "boundary record " + std::to_string(idx++);
    if (!rec.is_object())
      throw ParseError(ParseError::Kind::Syntax, where + " must be an object");
    for (const char* field :
         {"transmission_boundary", "distribution_boundary", "distribution_file"})
      if (!rec.contains(field))
        throw ParseError(ParseError::Kind::MissingField,
                         std::string("'") + field + "' in " + where);

    net::BoundaryLink link;
    const ojson& tb = rec.at("transmission_boundary");
    if (tb.is_number_integer()) {
      link.trans_bus = tb.get<int>();
    } else if (tb.is_string()) {
      const std::string s = tb.get<std::string>();
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), link.trans_bus);
      if (ec != std::errc() || p != s.data() + s.size())
        throw ParseError(ParseError::Kind::BadValue,
                         "'transmission_boundary' in " + where + " must be an integer bus id");
    } else {
      throw ParseError(ParseError::Kind::BadValue,
                       "'transmission_boundary' in " + where + " must be a string or integer");
    }
    link.dist_bus = rec.at("distribution_boundary").get<std::string>();
    link.dist_network = rec.at("distribution_file").get<std::string>();
    spec.links.push_back(std::move(link));
  }
  return spec;
}

std::string dump_boundary_json(const net::BoundarySpec& spec) {
  ojson arr = ojson::array();
  for (const auto& link : spec.links) {
    ojson rec;
    rec["transmission_boundary"] = std::to_string(link.trans_bus);
    rec["distribution_boundary"] = link.dist_bus;
    rec["distribution_file"] = link.dist_network;
    arr.push_back(std::move(rec));
  }
  return detail::dump_deterministic(arr);
}

}  // namespace itdopf::io
