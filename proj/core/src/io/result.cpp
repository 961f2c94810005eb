#include "itdopf/io/result.hpp"

#include "itdopf/io/json_text.hpp"
#include "json_detail.hpp"

namespace itdopf::io {

namespace {

using detail::ojson;

ojson arr3(const std::array<double, 3>& a) { return ojson{a[0], a[1], a[2]}; }

std::array<double, 3> to_arr3(const ojson& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

}  // namespace

std::string write_result_json(const ResultDocument& r) {
  ojson j;
  j["schema_version"] = 1;
  j["formulation"] = r.formulation;
  j["status"] = r.status;
  j["objective_usd_per_hr"] = r.objective_usd_per_hr;
  j["iterations"] = r.iterations;
  j["solve_seconds"] = r.solve_seconds;
  j["has_voltages"] = r.has_voltages;

  ojson trans;
  ojson tg = ojson::array();
  for (const auto& g : r.trans_generators)
    tg.push_back(ojson{{"bus", g.bus}, {"p_mw", g.p_mw}, {"q_mvar", g.q_mvar}});
  trans["generators"] = std::move(tg);
  if (r.has_voltages) {
    ojson tb = ojson::array();
    for (const auto& b : r.trans_buses)
      tb.push_back(ojson{{"id", b.id}, {"vm_pu", b.vm_pu}, {"va_rad", b.va_rad}});
    trans["buses"] = std::move(tb);
  }
  j["transmission"] = std::move(trans);

  ojson feeders = ojson::array();
  for (const auto& f : r.feeders) {
    ojson fj;
    fj["name"] = f.name;
    ojson fg = ojson::array();
    for (const auto& g : f.generators)
      fg.push_back(ojson{{"bus", g.bus}, {"p_kw", arr3(g.p_kw)}, {"q_kvar", arr3(g.q_kvar)}});
    fj["generators"] = std::move(fg);
    if (r.has_voltages) {
      ojson fb = ojson::array();
      for (const auto& b : f.buses)
        fb.push_back(
            ojson{{"id", b.id}, {"vm_pu", arr3(b.vm_pu)}, {"va_rad", arr3(b.va_rad)}});
      fj["buses"] = std::move(fb);
    }
    feeders.push_back(std::move(fj));
  }
  j["feeders"] = std::move(feeders);

  ojson bounds = ojson::array();
  for (const auto& b : r.boundaries)
    bounds.push_back(ojson{{"trans_bus", b.trans_bus},
                           {"feeder", b.feeder},
                           {"p_mw", b.p_mw},
                           {"q_mvar", b.q_mvar},
                           {"p_dist_mw", arr3(b.p_dist_mw)},
                           {"q_dist_mvar", arr3(b.q_dist_mvar)}});
  j["boundaries"] = std::move(bounds);

  return detail::dump_deterministic(j);
}

ResultDocument parse_result_json(std::string_view text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    auto [line, col] = line_col_of_offset(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ParseError(ParseError::Kind::Syntax, e.what(), line, col);
  }
  try {
    ResultDocument r;
    r.formulation = j.at("formulation").get<std::string>();
    r.status = j.at("status").get<std::string>();
    r.objective_usd_per_hr = j.at("objective_usd_per_hr").get<double>();
    r.iterations = j.at("iterations").get<int>();
    r.solve_seconds = j.at("solve_seconds").get<double>();
    r.has_voltages = j.at("has_voltages").get<bool>();

    const ojson& trans = j.at("transmission");
    for (const auto& g : trans.at("generators"))
      r.trans_generators.push_back(
          {g.at("bus").get<int>(), g.at("p_mw").get<double>(), g.at("q_mvar").get<double>()});
    if (r.has_voltages)
      for (const auto& b : trans.at("buses"))
        r.trans_buses.push_back(
            {b.at("id").get<int>(), b.at("vm_pu").get<double>(), b.at("va_rad").get<double>()});

    for (const auto& fj : j.at("feeders")) {
      ResultDocument::FeederResult f;
      f.name = fj.at("name").get<std::string>();
      for (const auto& g : fj.at("generators"))
        f.generators.push_back({g.at("bus").get<std::string>(), to_arr3(g.at("p_kw")),
                                to_arr3(g.at("q_kvar"))});
      if (r.has_voltages)
        for (const auto& b : fj.at("buses"))
          f.buses.push_back({b.at("id").get<std::string>(), to_arr3(b.at("vm_pu")),
                             to_arr3(b.at("va_rad"))});
      r.feeders.push_back(std::move(f));
    }

    for (const auto& b : j.at("boundaries"))
      r.boundaries.push_back({b.at("trans_bus").get<int>(),
                              b.at("feeder").get<std::string>(), b.at("p_mw").get<double>(),
                              b.at("q_mvar").get<double>(), to_arr3(b.at("p_dist_mw")),
                              to_arr3(b.at("q_dist_mvar"))});
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(ParseError::Kind::MissingField, e.what());
  }
}

}  // namespace itdopf::io
