#include <thread>

#include "itdopf/prob/problems.hpp"
#include "../io/json_detail.hpp"

namespace itdopf::prob {

ComparisonTable compare(const net::ITDCase& c, std::span<const form::Formulation> forms,
                        double reserve_fraction, const nlp::SolverOptions& opts,
                        bool parallel) {
  ComparisonTable table;
  for (const form::Formulation f : forms) {
    ComparisonRow row;
    row.formulation = f;
    try {
      const IndependentResult ind = solve_independent(c, f, reserve_fraction, opts, parallel);
      row.independent_ok = ind.all_optimal;
      row.independent_cost = ind.total_cost;
      row.independent_time = ind.total_runtime;
      row.independent_iterations = ind.total_iterations;
    } catch (const std::exception&) {
      row.independent_ok = false;
    }
    try {
      const ITDResult itd = solve_opfitd(c, f, opts);
      row.itd_ok = itd.status == nlp::SolveStatus::Optimal;
      row.itd_cost = itd.objective;
      row.itd_time = itd.solve_seconds;
      row.itd_iterations = itd.iterations;
    } catch (const std::exception&) {
      row.itd_ok = false;
    }
    row.diff_cost = row.independent_cost - row.itd_cost;
    row.diff_time = row.independent_time - row.itd_time;
    row.diff_iterations = row.independent_iterations - row.itd_iterations;
    table.rows.push_back(row);
  }
  return table;
}

namespace {

using io::detail::format_g17;
using io::detail::ojson;

void csv_row(std::string& out, const std::string& formulation, const std::string& mode,
             bool ok, double cost, double time, int iterations) {
  out += formulation;
  out += ',';
  out += mode;
  out += ',';
  out += ok ? format_g17(cost) : "failed";
  out += ',';
  out += format_g17(time);
  out += ',';
  out += std::to_string(iterations);
  out += '\n';
}

}  // namespace

std::string comparison_csv(const ComparisonTable& t) {
  std::string out = "formulation,mode,cost_usd_per_hr,time_s,iterations\n";
  for (const auto& r : t.rows) {
    const std::string f = form::tag(r.formulation);
    csv_row(out, f, "independent", r.independent_ok, r.independent_cost,
            r.independent_time, r.independent_iterations);
    csv_row(out, f, "itd", r.itd_ok, r.itd_cost, r.itd_time, r.itd_iterations);
    csv_row(out, f, "difference", r.independent_ok && r.itd_ok, r.diff_cost, r.diff_time,
            r.diff_iterations);
  }
  return out;
}

std::string comparison_json(const ComparisonTable& t) {
  ojson rows = ojson::array();
  for (const auto& r : t.rows) {
    ojson j;
    j["formulation"] = form::tag(r.formulation);
    j["independent"] = ojson{{"ok", r.independent_ok},
                             {"cost_usd_per_hr", r.independent_cost},
                             {"time_s", r.independent_time},
                             {"iterations", r.independent_iterations}};
    j["itd"] = ojson{{"ok", r.itd_ok},
                     {"cost_usd_per_hr", r.itd_cost},
                     {"time_s", r.itd_time},
                     {"iterations", r.itd_iterations}};
    j["difference"] = ojson{{"cost_usd_per_hr", r.diff_cost},
                            {"time_s", r.diff_time},
                            {"iterations", r.diff_iterations}};
    rows.push_back(std::move(j));
  }
  return io::detail::dump_deterministic(rows);
}

// ---------------------------------------------------------------------- sweep

net::ITDCase clone_case(const net::TransmissionNetwork& trans,
                        const net::DistributionNetwork& feeder_template,
                        std::span<const int> attach_buses, int k) {
  if (k > static_cast<int>(attach_buses.size()))
    throw std::invalid_argument("not enough attach buses for the requested clone count");
  net::ITDCase c;
  c.transmission = trans;
  for (int i = 0; i < k; ++i) {
    net::DistributionNetwork f = feeder_template;
    const std::string suffix = "#" + std::to_string(i + 1);
    f.name += suffix;
    f.source_bus += suffix;
    for (auto& b : f.nodes) b.id += suffix;
    for (auto& ln : f.lines) {
      ln.from += suffix;
      ln.to += suffix;
    }
    for (auto& d : f.loads) d.bus += suffix;
    for (auto& g : f.generators) g.bus += suffix;
    c.feeders.push_back(std::move(f));

    net::ResolvedLink link;
    link.trans_bus_index = c.transmission.bus_index(attach_buses[i]);
    if (link.trans_bus_index < 0)
      throw std::invalid_argument("attach bus " + std::to_string(attach_buses[i]) +
                                  " does not exist");
    link.feeder_index = i;
    link.dist_bus_index = c.feeders[i].bus_index(c.feeders[i].source_bus);
    link.base_factor = c.feeders[i].base_kva / (1000.0 * c.transmission.base_mva);
    c.boundary.links.push_back(link);
  }
  return c;
}

SweepReport scale_sweep(const net::TransmissionNetwork& trans,
                        const net::DistributionNetwork& feeder_template,
                        std::span<const int> attach_buses, int k_from, int k_to,
                        form::Formulation form, const nlp::SolverOptions& opts,
                        bool parallel) {
  SweepReport report;
  report.rows.resize(static_cast<size_t>(std::max(0, k_to - k_from + 1)));
  auto run_k = [&](int k) {
    SweepRow row;
    row.k = k;
    row.total_nodes = static_cast<int>(trans.buses.size()) +
                      k * feeder_template.node_count();
    try {
      const net::ITDCase c = clone_case(trans, feeder_template, attach_buses, k);
      const ITDResult r = solve_opfitd(c, form, opts);
      row.ok = r.status == nlp::SolveStatus::Optimal;
      row.cost = r.objective;
      row.seconds = r.solve_seconds;
      row.iterations = r.iterations;
    } catch (const std::exception&) {
      row.ok = false;
    }
    report.rows[static_cast<size_t>(k - k_from)] = row;  // ordered by k
  };
  if (parallel && k_to > k_from) {
    std::vector<std::thread> threads;
    for (int k = k_from; k <= k_to; ++k) threads.emplace_back(run_k, k);
    for (auto& t : threads) t.join();
  } else {
    for (int k = k_from; k <= k_to; ++k) run_k(k);
  }
  return report;
}

std::string sweep_csv(const SweepReport& t) {
  std::string out = "k,total_nodes,status,cost_usd_per_hr,time_s,iterations\n";
  for (const auto& r : t.rows) {
    out += std::to_string(r.k);
    out += ',';
    out += std::to_string(r.total_nodes);
    out += ',';
    out += r.ok ? "optimal" : "failed";
    out += ',';
    out += io::detail::format_g17(r.cost);
    out += ',';
    out += io::detail::format_g17(r.seconds);
    out += ',';
    out += std::to_string(r.iterations);
    out += '\n';
  }
  return out;
}

std::string sweep_json(const SweepReport& t) {
  using io::detail::ojson;
  ojson rows = ojson::array();
  for (const auto& r : t.rows)
    rows.push_back(ojson{{"k", r.k},
                         {"total_nodes", r.total_nodes},
                         {"ok", r.ok},
                         {"cost_usd_per_hr", r.cost},
                         {"time_s", r.seconds},
                         {"iterations", r.iterations}});
  return io::detail::dump_deterministic(rows);
}

}  // namespace itdopf::prob
