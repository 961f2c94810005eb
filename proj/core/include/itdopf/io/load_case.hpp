#pragma once

#include <string>
#include <vector>

#include "itdopf/net/case.hpp"

namespace itdopf::io {

/// Load and resolve a full ITD case from files.
///
/// The boundary file drives the feeder list: each record names a feeder by
/// its `distribution_file` string. A trailing `#k` makes one physical file
/// usable for several links (instance k of that feeder). When `pmd_paths`
/// is non-empty it overrides where each record's content is read from (one
/// path per record, in order); otherwise paths resolve relative to the
/// boundary file's directory.
///
/// With an empty `boundary_path` the feeders in `pmd_paths` are loaded
/// unlinked (isolated), which is the pure-transmission case when the list
/// is empty too.
net::ITDCase load_case(const std::string& pm_path,
                       const std::vector<std::string>& pmd_paths,
                       const std::string& boundary_path);

}  // namespace itdopf::io
