#pragma once

#include <string>

#include "itdopf/io/load_case.hpp"

#ifndef ITDOPF_DATA_DIR
#error "ITDOPF_DATA_DIR must be defined by the build"
#endif

namespace fixtures {

inline std::string data(const std::string& rel) {
  return std::string(ITDOPF_DATA_DIR) + "/" + rel;
}

inline itdopf::net::ITDCase case5_feeder4() {
  return itdopf::io::load_case(data("transmission/case5_withload.m"), {},
                               data("boundary/case5_feeder4.json"));
}

inline itdopf::net::ITDCase case5_feeder4_unbalanced() {
  return itdopf::io::load_case(data("transmission/case5_withload.m"), {},
                               data("boundary/case5_feeder4_unbalanced.json"));
}

inline itdopf::net::ITDCase case118_5feeders() {
  return itdopf::io::load_case(data("transmission/case118_style.m"), {},
                               data("boundary/case118_5feeders.json"));
}

inline itdopf::net::ITDCase case5_pure() {
  return itdopf::io::load_case(data("transmission/case5.m"), {}, "");
}

}  // namespace fixtures
