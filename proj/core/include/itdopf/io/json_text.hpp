#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace itdopf::io {

/// File could not be opened, read or replaced.
class FileError : public std::runtime_error {
 public:
  explicit FileError(const std::string& what) : std::runtime_error(what) {}
};

/// Read a whole file; throws FileError on failure.
std::string read_file(const std::string& path);

/// Write `text` to `path` atomically (temp file in the same directory,
/// fsync, rename). A crashed writer never leaves a truncated file.
void write_file_atomic(const std::string& path, std::string_view text);

/// 1-based (line, col) of a byte offset in `text`.
std::pair<int, int> line_col_of_offset(std::string_view text, size_t offset);

}  // namespace itdopf::io
