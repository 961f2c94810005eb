// Command-line front end: solve / compare / validate / check-derivs / sweep.
//
// Exit codes: 0 success (solve: optimal), 1 input or validation error,
// 2 infeasible, 3 solver failure or failed rows. Results go to --out (or
// stdout); diagnostics go to stderr. ITDOPF_LOG=0..2 sets verbosity.

#include <cstdlib>
#include <iostream>
#include <random>

#include "CLI11.hpp"
#include "itdopf/form/derivative_check.hpp"
#include "itdopf/io/formats.hpp"
#include "itdopf/io/json_text.hpp"
#include "itdopf/io/load_case.hpp"
#include "itdopf/io/result.hpp"
#include "itdopf/prob/problems.hpp"
#include "json.hpp"

using namespace itdopf;

namespace {

int g_verbosity = 0;

void log_info(const std::string& msg) {
  if (g_verbosity >= 1) std::cerr << "itdopf: " << msg << "\n";
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty())
    std::cout << text;
  else
    io::write_file_atomic(out_path, text);
}

struct CommonArgs {
  std::string pm;
  std::vector<std::string> pmd;
  std::string boundary;
  std::string formulation = "acp-acpu";
  std::string out;
  double tol = 1e-6;
  int max_iter = 300;
  bool parallel = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_solver_opts = true) {
  cmd->add_option("--pm", args.pm, "transmission case file (MATPOWER subset)")
      ->required();
  cmd->add_option("--pmd", args.pmd,
                  "distribution feeder file(s), ordered to match the boundary records");
  cmd->add_option("--boundary", args.boundary, "boundary linking file (JSON)");
  if (with_solver_opts) {
    cmd->add_option("--formulation", args.formulation,
                    "acp-acpu | acr-acru | ivr-ivru | nfa-nfau");
    cmd->add_option("--tol", args.tol, "KKT tolerance (default 1e-6)");
    cmd->add_option("--max-iter", args.max_iter, "iteration limit (default 300)");
  }
  cmd->add_option("--out", args.out, "output path (stdout when omitted)");
}

nlp::SolverOptions solver_options(const CommonArgs& args) {
  nlp::SolverOptions opts;
  opts.kkt_tol = args.tol;
  opts.max_iter = args.max_iter;
  if (g_verbosity >= 2) opts.log_stream = &std::cerr;
  return opts;
}

form::Formulation parse_formulation(const std::string& tag) {
  const auto f = form::formulation_from_tag(tag);
  if (!f)
    throw CLI::ValidationError("--formulation",
                               "unknown formulation '" + tag + "'");
  return *f;
}

int status_exit_code(nlp::SolveStatus s) {
  switch (s) {
    case nlp::SolveStatus::Optimal: return 0;
    case nlp::SolveStatus::Infeasible: return 2;
    default: return 3;
  }
}

prob::Setpoints load_setpoints(const std::string& path, const net::ITDCase& c) {
  const auto j = nlohmann::json::parse(io::read_file(path));
  prob::Setpoints sp;
  if (j.contains("transmission"))
    for (const auto& g : j.at("transmission")) {
      prob::Setpoints::TransGenSetpoint s;
      s.gen = g.at("gen").get<int>();
      if (s.gen < 0 || s.gen >= static_cast<int>(c.transmission.generators.size()))
        throw std::invalid_argument("setpoint generator index out of range");
      s.p_pu = g.at("p_mw").get<double>() / c.transmission.base_mva;
      if (g.contains("v_pu")) s.v_pu = g.at("v_pu").get<double>();
      sp.trans.push_back(s);
    }
  if (j.contains("feeders"))
    for (const auto& g : j.at("feeders")) {
      prob::Setpoints::DistGenSetpoint s;
      s.feeder = g.at("feeder").get<int>();
      s.gen = g.at("gen").get<int>();
      if (s.feeder < 0 || s.feeder >= static_cast<int>(c.feeders.size()))
        throw std::invalid_argument("setpoint feeder index out of range");
      const double base = c.feeders[s.feeder].base_kva;
      for (int p = 0; p < 3; ++p) {
        s.p_pu[p] = g.at("p_kw").at(p).get<double>() / base;
        s.q_pu[p] = g.at("q_kvar").at(p).get<double>() / base;
      }
      sp.dist.push_back(s);
    }
  return sp;
}

std::string independent_json(const prob::IndependentResult& r,
                             const net::ITDCase& c) {
  nlohmann::ordered_json j;
  j["mode"] = "independent";
  j["status"] = r.all_optimal ? "optimal" : "failed";
  j["total_cost_usd_per_hr"] = r.total_cost;
  j["total_runtime_s"] = r.total_runtime;
  j["total_iterations"] = r.total_iterations;
  j["transmission"] = {{"status", nlp::to_string(r.transmission.status)},
                       {"cost_usd_per_hr", r.transmission.objective},
                       {"time_s", r.transmission.solve_seconds},
                       {"iterations", r.transmission.iterations}};
  nlohmann::ordered_json feeders = nlohmann::ordered_json::array();
  for (size_t f = 0; f < r.feeders.size(); ++f) {
    nlohmann::ordered_json fj;
    fj["name"] = c.feeders[f].name;
    fj["status"] = nlp::to_string(r.feeders[f].status);
    fj["cost_usd_per_hr"] = r.feeders[f].objective;
    fj["time_s"] = r.feeders[f].solve_seconds;
    fj["iterations"] = r.feeders[f].iterations;
    nlohmann::ordered_json pkw = nlohmann::ordered_json::array();
    nlohmann::ordered_json qkvar = nlohmann::ordered_json::array();
    for (int p = 0; p < 3; ++p) {
      pkw.push_back(r.feeder_import_p[f][p] * c.feeders[f].base_kva);
      qkvar.push_back(r.feeder_import_q[f][p] * c.feeders[f].base_kva);
    }
    fj["import_p_kw"] = pkw;
    fj["import_q_kvar"] = qkvar;
    feeders.push_back(fj);
  }
  j["feeders"] = feeders;
  return j.dump(2) + "\n";
}

int run_solve(const CommonArgs& args, const std::string& mode, double reserve,
              const std::string& problem, const std::string& setpoints_path) {
  const net::ITDCase c = io::load_case(args.pm, args.pmd, args.boundary);
  const auto rep = net::validate_case(c);
  if (!rep.ok()) {
    for (const auto& v : rep.violations)
      std::cerr << "itdopf: invalid case: " << v.component << ": " << v.message << "\n";
    return 1;
  }
  const form::Formulation f = parse_formulation(args.formulation);
  const nlp::SolverOptions opts = solver_options(args);

  if (mode == "independent") {
    log_info("independent coordination run, reserve " + std::to_string(reserve));
    const prob::IndependentResult r = prob::solve_independent(c, f, reserve, opts,
                                                              args.parallel);
    emit(args.out, independent_json(r, c));
    if (r.all_optimal) return 0;
    if (r.transmission.status == nlp::SolveStatus::Infeasible) return 2;
    for (const auto& fs : r.feeders)
      if (fs.status == nlp::SolveStatus::Infeasible) return 2;
    return 3;
  }

  prob::ITDResult r;
  if (problem == "pf") {
    prob::Setpoints sp;
    if (!setpoints_path.empty()) sp = load_setpoints(setpoints_path, c);
    log_info("solving PFITD (" + args.formulation + ")");
    r = prob::solve_pfitd(c, f, sp, opts);
  } else {
    log_info("solving OPFITD (" + args.formulation + ")");
    r = prob::solve_opfitd(c, f, opts);
  }
  emit(args.out, io::write_result_json(r.document));
  log_info("status " + std::string(nlp::to_string(r.status)) + ", objective " +
           std::to_string(r.objective) + " $/hr, " + std::to_string(r.iterations) +
           " iterations");
  return status_exit_code(r.status);
}

int run_compare(const CommonArgs& args, const std::vector<std::string>& tags,
                double reserve) {
  const net::ITDCase c = io::load_case(args.pm, args.pmd, args.boundary);
  const auto rep = net::validate_case(c);
  if (!rep.ok()) {
    for (const auto& v : rep.violations)
      std::cerr << "itdopf: invalid case: " << v.component << ": " << v.message << "\n";
    return 1;
  }
  std::vector<form::Formulation> forms;
  if (tags.empty())
    forms.assign(std::begin(form::kAllFormulations), std::end(form::kAllFormulations));
  else
    for (const auto& t : tags) forms.push_back(parse_formulation(t));

  const prob::ComparisonTable t =
      prob::compare(c, forms, reserve, solver_options(args), args.parallel);
  if (args.out.empty()) {
    std::cout << prob::comparison_csv(t);
  } else {
    io::write_file_atomic(args.out + ".csv", prob::comparison_csv(t));
    io::write_file_atomic(args.out + ".json", prob::comparison_json(t));
    log_info("wrote " + args.out + ".csv and " + args.out + ".json");
  }
  return t.all_ok() ? 0 : 3;
}

int run_validate(const CommonArgs& args) {
  const net::ITDCase c = io::load_case(args.pm, args.pmd, args.boundary);
  const auto rep = net::validate_case(c);
  for (const auto& v : rep.violations)
    std::cout << v.component << ": " << v.message << "\n";
  if (rep.ok()) std::cout << "case is valid\n";
  return rep.ok() ? 0 : 1;
}

int run_check_derivs(const CommonArgs& args, int points, unsigned seed) {
  const net::ITDCase c = io::load_case(args.pm, args.pmd, args.boundary);
  const form::Formulation f = parse_formulation(args.formulation);
  const form::ItdModel m = form::build_itd_model(c, f);
  std::mt19937_64 rng(seed);
  bool ok = true;
  double worst = 0;
  std::string worst_block;
  int ill = 0;
  for (int trial = 0; trial < points; ++trial) {
    const Eigen::VectorXd x =
        form::sample_interior(m.nlp.lower, m.nlp.upper, m.nlp.x0, rng);
    const form::DerivativeReport rep = form::check_jacobians(m.nlp.blocks, x);
    for (const auto& b : rep.blocks) {
      if (!b.passed) {
        ok = false;
        std::cout << "FAIL " << b.name << " deviation " << b.max_deviation << "\n";
      }
      if (b.ill_conditioned) ++ill;
      if (b.max_deviation > worst) {
        worst = b.max_deviation;
        worst_block = b.name;
      }
    }
  }
  std::cout << (ok ? "derivative check passed" : "derivative check FAILED") << " ("
            << points << " points, worst block " << worst_block << " at " << worst;
  if (ill > 0) std::cout << ", " << ill << " ill-conditioned block evaluations";
  std::cout << ")\n";
  return ok ? 0 : 1;
}

int run_sweep(const CommonArgs& args, const std::string& feeder_path,
              std::vector<int> attach, int k_from, int k_to) {
  const net::TransmissionNetwork trans = io::parse_matpower(io::read_file(args.pm));
  const net::DistributionNetwork feeder =
      io::parse_distribution_json(io::read_file(feeder_path));
  const form::Formulation f = parse_formulation(args.formulation);
  const prob::SweepReport rep =
      prob::scale_sweep(trans, feeder, attach, k_from, k_to, f, solver_options(args));
  if (args.out.empty()) {
    std::cout << prob::sweep_csv(rep);
  } else {
    io::write_file_atomic(args.out + ".csv", prob::sweep_csv(rep));
    io::write_file_atomic(args.out + ".json", prob::sweep_json(rep));
    log_info("wrote " + args.out + ".csv and " + args.out + ".json");
  }
  return rep.all_ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* env = std::getenv("ITDOPF_LOG")) g_verbosity = std::atoi(env);

  CLI::App app{
      "itdopf: integrated transmission-distribution optimal power flow\n"
      "Exit codes: 0 ok/optimal, 1 input or validation error, 2 infeasible,\n"
      "3 solver failure."};
  app.require_subcommand(1);

  CommonArgs solve_args;
  std::string mode = "itd", problem = "opf", setpoints_path;
  double reserve = 0.10;
  auto* solve_cmd = app.add_subcommand("solve", "build and solve one case");
  add_common(solve_cmd, solve_args);
  solve_cmd->add_option("--mode", mode, "itd | independent (default itd)")
      ->check(CLI::IsMember({"itd", "independent"}));
  solve_cmd->add_option("--reserve", reserve,
                        "independent mode: fraction of DG capacity held back (default 0.10)");
  solve_cmd->add_option("--problem", problem, "opf | pf (default opf)")
      ->check(CLI::IsMember({"opf", "pf"}));
  solve_cmd->add_option("--setpoints", setpoints_path,
                        "generator setpoints JSON for --problem pf");
  solve_cmd->add_flag("--parallel", solve_args.parallel,
                      "solve independent-mode feeders concurrently");

  CommonArgs compare_args;
  std::vector<std::string> compare_tags;
  double compare_reserve = 0.10;
  auto* compare_cmd =
      app.add_subcommand("compare", "independent vs ITD across formulations");
  add_common(compare_cmd, compare_args);
  compare_cmd->add_option("--formulations", compare_tags,
                          "formulations to run (default: all four)");
  compare_cmd->add_option("--reserve", compare_reserve, "DG reserve fraction");
  compare_cmd->add_flag("--parallel", compare_args.parallel,
                        "solve independent-mode feeders concurrently");

  CommonArgs validate_args;
  auto* validate_cmd = app.add_subcommand("validate", "check case invariants");
  add_common(validate_cmd, validate_args, false);

  CommonArgs derivs_args;
  int derivs_points = 100;
  unsigned derivs_seed = 1;
  auto* derivs_cmd = app.add_subcommand(
      "check-derivs", "compare analytic jacobians against finite differences");
  add_common(derivs_cmd, derivs_args);
  derivs_cmd->add_option("--points", derivs_points, "random interior points (default 100)");
  derivs_cmd->add_option("--seed", derivs_seed, "RNG seed");

  CommonArgs sweep_args;
  std::string sweep_feeder;
  std::vector<int> sweep_attach;
  int k_from = 1, k_to = 5;
  auto* sweep_cmd = app.add_subcommand("sweep", "feeder-count scalability sweep");
  add_common(sweep_cmd, sweep_args);
  sweep_cmd->add_option("--feeder", sweep_feeder, "feeder template JSON")->required();
  sweep_cmd->add_option("--attach", sweep_attach, "transmission bus ids to attach at")
      ->required();
  sweep_cmd->add_option("--k-from", k_from, "first clone count (default 1)");
  sweep_cmd->add_option("--k-to", k_to, "last clone count (default 5)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve_cmd->parsed())
      return run_solve(solve_args, mode, reserve, problem, setpoints_path);
    if (compare_cmd->parsed())
      return run_compare(compare_args, compare_tags, compare_reserve);
    if (validate_cmd->parsed()) return run_validate(validate_args);
    if (derivs_cmd->parsed())
      return run_check_derivs(derivs_args, derivs_points, derivs_seed);
    if (sweep_cmd->parsed())
      return run_sweep(sweep_args, sweep_feeder, sweep_attach, k_from, k_to);
  } catch (const io::ParseError& e) {
    std::cerr << "itdopf: " << e.what() << "\n";
    return 1;
  } catch (const io::FileError& e) {
    std::cerr << "itdopf: " << e.what() << "\n";
    return 1;
  } catch (const net::ResolveError& e) {
    std::cerr << "itdopf: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "itdopf: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "itdopf: error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
