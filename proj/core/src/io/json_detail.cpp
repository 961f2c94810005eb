#include "json_detail.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace itdopf::io::detail {

std::string format_g17(double v) {
  if (!std::isfinite(v))
    throw std::runtime_error("non-finite number cannot be serialized to JSON");
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

void emit(const ojson& j, std::string& out, int depth) {
  const std::string pad(2 * static_cast<size_t>(depth), ' ');
  const std::string pad_in(2 * static_cast<size_t>(depth + 1), ' ');
  switch (j.type()) {
    case ojson::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      size_t i = 0;
      for (auto it = j.begin(); it != j.end(); ++it, ++i) {
        out += pad_in;
        out += ojson(it.key()).dump();
        out += ": ";
        emit(it.value(), out, depth + 1);
        if (i + 1 < j.size()) out += ',';
        out += '\n';
      }
      out += pad + "}";
      return;
    }
    case ojson::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line; arrays of composites get one
      // element per line.
      bool scalar_only = true;
      for (const auto& e : j)
        if (e.is_object() || e.is_array()) {
          scalar_only = false;
          break;
        }
      if (scalar_only) {
        out += '[';
        for (size_t i = 0; i < j.size(); ++i) {
          emit(j[i], out, depth);
          if (i + 1 < j.size()) out += ", ";
        }
        out += ']';
        return;
      }
      out += "[\n";
      for (size_t i = 0; i < j.size(); ++i) {
        out += pad_in;
        emit(j[i], out, depth + 1);
        if (i + 1 < j.size()) out += ',';
        out += '\n';
      }
      out += pad + "]";
      return;
    }
    case ojson::value_t::number_float:
      out += format_g17(j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

}  // namespace

std::string dump_deterministic(const ojson& j) {
  std::string out;
  emit(j, out, 0);
  out += '\n';
  return out;
}

}  // namespace itdopf::io::detail
