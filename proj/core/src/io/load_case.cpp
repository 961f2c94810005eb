#include "itdopf/io/load_case.hpp"

#include <cctype>
#include <filesystem>

#include "itdopf/io/formats.hpp"
#include "itdopf/io/json_text.hpp"

namespace itdopf::io {

namespace {

// "path#3" -> "path" (instance suffix used when one file backs several links)
std::string strip_instance_suffix(const std::string& id) {
  const size_t hash = id.rfind('#');
  if (hash == std::string::npos || hash + 1 == id.size()) return id;
  for (size_t i = hash + 1; i < id.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(id[i]))) return id;
  return id.substr(0, hash);
}

}  // namespace

net::ITDCase load_case(const std::string& pm_path,
                       const std::vector<std::string>& pmd_paths,
                       const std::string& boundary_path) {
  namespace fs = std::filesystem;
  net::ITDCase c;
  c.transmission = parse_matpower(read_file(pm_path));

  if (boundary_path.empty()) {
    for (const auto& p : pmd_paths) {
      net::DistributionNetwork f = parse_distribution_json(read_file(p));
      f.name = p;
      c.feeders.push_back(std::move(f));
    }
    return c;
  }

  const net::BoundarySpec spec = parse_boundary_json(read_file(boundary_path));
  if (!pmd_paths.empty() && pmd_paths.size() != spec.links.size())
    throw std::invalid_argument(
        "got " + std::to_string(pmd_paths.size()) + " distribution files for " +
        std::to_string(spec.links.size()) + " boundary links");

  const fs::path base = fs::path(boundary_path).parent_path();
  for (size_t k = 0; k < spec.links.size(); ++k) {
    std::string path;
    if (!pmd_paths.empty()) {
      path = pmd_paths[k];
    } else {
      const fs::path rel = strip_instance_suffix(spec.links[k].dist_network);
      path = rel.is_absolute() ? rel.string() : (base / rel).string();
    }
    net::DistributionNetwork f = parse_distribution_json(read_file(path));
    f.name = spec.links[k].dist_network;
    c.feeders.push_back(std::move(f));
  }
  c.boundary = net::resolve_boundaries(c.transmission, c.feeders, spec);
  return c;
}

}  // namespace itdopf::io
