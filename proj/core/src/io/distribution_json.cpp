#include <Eigen/Dense>
#include <complex>

#include "itdopf/io/formats.hpp"
#include "itdopf/io/json_text.hpp"
#include "itdopf/net/per_unit.hpp"
#include "json_detail.hpp"

namespace itdopf::io {

namespace {

using detail::ojson;
constexpr double kPi = 3.14159265358979323846;

[[noreturn]] void missing(const std::string& field, const std::string& where) {
  throw ParseError(ParseError::Kind::MissingField, "'" + field + "' in " + where);
}

const ojson& get(const ojson& j, const std::string& field, const std::string& where) {
  auto it = j.find(field);
  if (it == j.end()) missing(field, where);
  return *it;
}

double get_num(const ojson& j, const std::string& field, const std::string& where) {
  const ojson& v = get(j, field, where);
  if (!v.is_number())
    throw ParseError(ParseError::Kind::BadValue, "'" + field + "' in " + where + " must be a number");
  return v.get<double>();
}

std::string get_str(const ojson& j, const std::string& field, const std::string& where) {
  const ojson& v = get(j, field, where);
  if (!v.is_string())
    throw ParseError(ParseError::Kind::BadValue, "'" + field + "' in " + where + " must be a string");
  return v.get<std::string>();
}

net::PhaseMask parse_phases(const ojson& j, const std::string& where) {
  if (!j.contains("phases")) return net::kAllPhases;
  net::PhaseMask mask = {false, false, false};
  for (const auto& p : j.at("phases")) {
    const std::string s = p.get<std::string>();
    if (s == "a")
      mask[0] = true;
    else if (s == "b")
      mask[1] = true;
    else if (s == "c")
      mask[2] = true;
    else
      throw ParseError(ParseError::Kind::BadValue, "unknown phase '" + s + "' in " + where);
  }
  if (!mask[0] && !mask[1] && !mask[2])
    throw ParseError(ParseError::Kind::BadValue, "empty phase list in " + where);
  return mask;
}

// Scalar -> same value on every declared phase; array -> one entry per
// declared phase in a,b,c order. Undeclared phases get `fill`.
net::PhaseVec per_phase(const ojson& j, const std::string& field, const net::PhaseMask& mask,
                        double fallback, double fill, const std::string& where) {
  net::PhaseVec out = {fill, fill, fill};
  if (!j.contains(field)) {
    for (int p = 0; p < net::kNumPhases; ++p)
      if (mask[p]) out[p] = fallback;
    return out;
  }
  const ojson& v = j.at(field);
  if (v.is_number()) {
    for (int p = 0; p < net::kNumPhases; ++p)
      if (mask[p]) out[p] = v.get<double>();
    return out;
  }
  if (!v.is_array())
    throw ParseError(ParseError::Kind::BadValue,
                     "'" + field + "' in " + where + " must be a number or an array");
  size_t i = 0;
  for (int p = 0; p < net::kNumPhases; ++p) {
    if (!mask[p]) continue;
    if (i >= v.size())
      throw ParseError(ParseError::Kind::BadValue,
                       "'" + field + "' in " + where + " has fewer entries than declared phases");
    out[p] = v[i++].get<double>();
  }
  if (i != v.size())
    throw ParseError(ParseError::Kind::BadValue,
                     "'" + field + "' in " + where + " has more entries than declared phases");
  return out;
}

net::PhaseVec require_per_phase(const ojson& j, const std::string& field,
                                const net::PhaseMask& mask, double fill,
                                const std::string& where) {
  if (!j.contains(field)) missing(field, where);
  return per_phase(j, field, mask, 0.0, fill, where);
}

// n x n matrix over the declared phases of a line.
Eigen::MatrixXd read_matrix(const ojson& j, const std::string& field, int n,
                            const std::string& where) {
  const ojson& v = get(j, field, where);
  if (!v.is_array() || static_cast<int>(v.size()) != n)
    throw ParseError(ParseError::Kind::BadValue,
                     "'" + field + "' in " + where + " must be a " + std::to_string(n) + "x" +
                         std::to_string(n) + " matrix");
  Eigen::MatrixXd m(n, n);
  for (int r = 0; r < n; ++r) {
    const ojson& row = v[r];
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      throw ParseError(ParseError::Kind::BadValue,
                       "'" + field + "' in " + where + " row " + std::to_string(r) +
                           " must have " + std::to_string(n) + " entries");
    for (int c = 0; c < n; ++c) m(r, c) = row[c].get<double>();
  }
  return m;
}

}  // namespace

net::DistributionNetwork parse_distribution_json(std::string_view text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    auto [line, col] = line_col_of_offset(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ParseError(ParseError::Kind::Syntax, e.what(), line, col);
  }

  try {
    if (!j.contains("schema_version")) missing("schema_version", "document");
    if (j.at("schema_version").get<int>() != 1)
      throw ParseError(ParseError::Kind::BadValue, "unsupported schema_version");

    net::DistributionNetwork raw;
    raw.name = j.value("name", std::string("feeder"));
    raw.base_kva = get_num(j, "base_kva", "document");
    raw.base_kv = get_num(j, "base_kv", "document");
    raw.source_bus = get_str(j, "source_bus", "document");

    for (const auto& bj : get(j, "buses", "document")) {
      net::DistBus b;
      b.id = get_str(bj, "id", "buses[]");
      const std::string where = "bus '" + b.id + "'";
      b.phases = parse_phases(bj, where);
      b.v_min = per_phase(bj, "v_min", b.phases, 0.9, 0.0, where);
      b.v_max = per_phase(bj, "v_max", b.phases, 1.1, 0.0, where);
      b.gs = per_phase(bj, "gs_siemens", b.phases, 0.0, 0.0, where);
      b.bs = per_phase(bj, "bs_siemens", b.phases, 0.0, 0.0, where);
      b.in_service = bj.value("status", 1) != 0;
      raw.nodes.push_back(std::move(b));
    }

    int line_no = 0;
    for (const auto& lj : get(j, "lines", "document")) {
      net::DistLine ln;
      ln.from = get_str(lj, "from", "lines[]");
      ln.to = get_str(lj, "to", "lines[]");
      const std::string where = "line " + ln.from + "-" + ln.to;
      if (raw.bus_index(ln.from) < 0)
        throw ParseError(ParseError::Kind::UnknownBusReference,
                         "'" + ln.from + "' referenced by " + where);
      if (raw.bus_index(ln.to) < 0)
        throw ParseError(ParseError::Kind::UnknownBusReference,
                         "'" + ln.to + "' referenced by " + where);
      ln.phases = parse_phases(lj, where);
      const int n = (ln.phases[0] ? 1 : 0) + (ln.phases[1] ? 1 : 0) + (ln.phases[2] ? 1 : 0);
      const double length = lj.value("length", 1.0);

      const Eigen::MatrixXd r = read_matrix(lj, "r_ohm_per_length", n, where);
      const Eigen::MatrixXd x = read_matrix(lj, "x_ohm_per_length", n, where);
      Eigen::MatrixXcd z(n, n);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) z(a, b) = std::complex<double>(r(a, b), x(a, b)) * length;
      const double scale = z.cwiseAbs().maxCoeff();
      Eigen::FullPivLU<Eigen::MatrixXcd> lu(z);
      if (scale < 1e-14 || std::abs(lu.determinant()) < 1e-12 * std::pow(scale, n))
        throw ParseError(ParseError::Kind::SingularImpedanceBlock,
                         "series impedance of " + where + " is not invertible");
      Eigen::MatrixXcd y = lu.inverse();  // siemens
      y = ((y + y.transpose()) / 2.0).eval();  // re-impose exact reciprocity

      int a_full = 0, a_sub = 0;
      for (a_full = 0, a_sub = 0; a_full < net::kNumPhases; ++a_full) {
        if (!ln.phases[a_full]) continue;
        int b_sub = 0;
        for (int b_full = 0; b_full < net::kNumPhases; ++b_full) {
          if (!ln.phases[b_full]) continue;
          ln.y_series[a_full][b_full] = y(a_sub, b_sub);
          ++b_sub;
        }
        ++a_sub;
      }

      ln.b_shunt = per_phase(lj, "b_shunt_siemens", ln.phases, 0.0, 0.0, where);
      ln.tau = per_phase(lj, "tau", ln.phases, 1.0, 1.0, where);
      ln.shift = per_phase(lj, "shift_deg", ln.phases, 0.0, 0.0, where);
      const double inf = std::numeric_limits<double>::infinity();
      ln.p_max = per_phase(lj, "p_max_kw", ln.phases, inf, inf, where);
      ln.q_max = per_phase(lj, "q_max_kvar", ln.phases, inf, inf, where);
      ln.angmin = per_phase(lj, "angmin_deg", ln.phases, -60.0, -60.0, where);
      ln.angmax = per_phase(lj, "angmax_deg", ln.phases, 60.0, 60.0, where);
      for (int p = 0; p < net::kNumPhases; ++p) {
        ln.shift[p] *= kPi / 180.0;
        ln.angmin[p] *= kPi / 180.0;
        ln.angmax[p] *= kPi / 180.0;
      }
      (void)line_no;
      ++line_no;
      raw.lines.push_back(std::move(ln));
    }

    if (j.contains("loads"))
      for (const auto& dj : j.at("loads")) {
        net::DistLoad d;
        d.bus = get_str(dj, "bus", "loads[]");
        const int bi = raw.bus_index(d.bus);
        if (bi < 0)
          throw ParseError(ParseError::Kind::UnknownBusReference,
                           "'" + d.bus + "' referenced by a load");
        const std::string where = "load at '" + d.bus + "'";
        const net::PhaseMask& mask = raw.nodes[bi].phases;
        d.pd = require_per_phase(dj, "pd_kw", mask, 0.0, where);
        d.qd = require_per_phase(dj, "qd_kvar", mask, 0.0, where);
        raw.loads.push_back(std::move(d));
      }

    if (j.contains("generators"))
      for (const auto& gj : j.at("generators")) {
        net::DistGen g;
        g.bus = get_str(gj, "bus", "generators[]");
        const int bi = raw.bus_index(g.bus);
        if (bi < 0)
          throw ParseError(ParseError::Kind::UnknownBusReference,
                           "'" + g.bus + "' referenced by a generator");
        const std::string where = "generator at '" + g.bus + "'";
        const net::PhaseMask& mask = raw.nodes[bi].phases;
        g.p_min = per_phase(gj, "p_min_kw", mask, 0.0, 0.0, where);
        g.p_max = require_per_phase(gj, "p_max_kw", mask, 0.0, where);
        g.q_min = per_phase(gj, "q_min_kvar", mask, 0.0, 0.0, where);
        g.q_max = per_phase(gj, "q_max_kvar", mask, 0.0, 0.0, where);
        g.status = gj.value("status", 1) != 0;
        const ojson& cost = get(gj, "cost", where);
        if (!cost.is_array() || cost.size() != 3)
          throw ParseError(ParseError::Kind::BadValue,
                           "'cost' in " + where + " must be [c2, c1, c0]");
        g.cost = {cost[0].get<double>(), cost[1].get<double>(), cost[2].get<double>()};
        raw.generators.push_back(std::move(g));
      }

    if (raw.bus_index(raw.source_bus) < 0)
      throw ParseError(ParseError::Kind::UnknownBusReference,
                       "source_bus '" + raw.source_bus + "' is not declared");

    return net::to_per_unit(raw);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(ParseError::Kind::BadValue, e.what());
  }
}

}  // namespace itdopf::io
