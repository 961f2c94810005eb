#include <benchmark/benchmark.h>

#include <random>

#include "itdopf/form/build.hpp"
#include "itdopf/io/formats.hpp"
#include "itdopf/io/json_text.hpp"
#include "itdopf/io/load_case.hpp"
#include "itdopf/nlp/kkt.hpp"
#include "itdopf/prob/problems.hpp"

using namespace itdopf;

#ifndef ITDOPF_DATA_DIR
#error "ITDOPF_DATA_DIR must be defined by the build"
#endif

namespace {

std::string data(const std::string& rel) {
  return std::string(ITDOPF_DATA_DIR) + "/" + rel;
}

net::ITDCase case5() {
  return io::load_case(data("transmission/case5_withload.m"), {},
                       data("boundary/case5_feeder4.json"));
}

net::ITDCase case118() {
  return io::load_case(data("transmission/case118_style.m"), {},
                       data("boundary/case118_5feeders.json"));
}

void BM_ParseMatpower(benchmark::State& state) {
  const std::string text = io::read_file(data("transmission/case118_style.m"));
  for (auto _ : state) benchmark::DoNotOptimize(io::parse_matpower(text));
}
BENCHMARK(BM_ParseMatpower);

void BM_ParseFeederJson(benchmark::State& state) {
  const std::string text = io::read_file(data("distribution/feeder4.json"));
  for (auto _ : state) benchmark::DoNotOptimize(io::parse_distribution_json(text));
}
BENCHMARK(BM_ParseFeederJson);

void BM_BuildModel(benchmark::State& state) {
  const net::ITDCase c = case118();
  const auto f = static_cast<form::Formulation>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(form::build_itd_model(c, f));
}
BENCHMARK(BM_BuildModel)->DenseRange(0, 3)->ArgNames({"formulation"});

void BM_ResidualJacobian(benchmark::State& state) {
  const net::ITDCase c = case118();
  const form::ItdModel m = form::build_itd_model(c, form::Formulation::AcpAcpu);
  const Eigen::VectorXd x = m.nlp.x0;
  Eigen::VectorXd r;
  nlp::TripletSink sink;
  for (auto _ : state) {
    nlp::eval_residuals(m.nlp, x, r);
    sink.clear();
    nlp::eval_jacobian(m.nlp, x, sink);
    benchmark::DoNotOptimize(sink.entries.data());
  }
}
BENCHMARK(BM_ResidualJacobian);

void BM_KktFactorize(benchmark::State& state) {
  // representative quasi-definite system assembled from the 5-bus model
  const net::ITDCase c = case5();
  const form::ItdModel m = form::build_itd_model(c, form::Formulation::AcpAcpu);
  const int n = m.pool.size();
  const int rows = m.nlp.num_rows();
  nlp::TripletSink sink;
  nlp::eval_jacobian(m.nlp, m.nlp.x0, sink);
  std::vector<nlp::TripletSink::Entry> lower;
  for (int i = 0; i < n; ++i) lower.push_back({i, i, 1.0});
  for (const auto& e : sink.entries) lower.push_back({n + e.row, e.col, e.value});
  for (int i = 0; i < rows; ++i) lower.push_back({n + i, n + i, -1e-8});
  const bool dense = state.range(0) == 1;
  nlp::KktFactor kkt(n + rows, dense);
  for (auto _ : state) benchmark::DoNotOptimize(kkt.factorize(lower).factorized);
}
BENCHMARK(BM_KktFactorize)->Arg(0)->Arg(1)->ArgNames({"dense"});

void BM_SolveOpfitd(benchmark::State& state) {
  const net::ITDCase c = case5();
  const auto f = static_cast<form::Formulation>(state.range(0));
  nlp::SolverOptions opts;
  opts.collect_iterate_log = false;
  for (auto _ : state) {
    const prob::ITDResult r = prob::solve_opfitd(c, f, opts);
    benchmark::DoNotOptimize(r.objective);
  }
}
BENCHMARK(BM_SolveOpfitd)->DenseRange(0, 3)->ArgNames({"formulation"})
    ->Unit(benchmark::kMillisecond);

void BM_SolveOpfitd118(benchmark::State& state) {
  const net::ITDCase c = case118();
  nlp::SolverOptions opts;
  opts.collect_iterate_log = false;
  for (auto _ : state) {
    const prob::ITDResult r = prob::solve_opfitd(c, form::Formulation::AcpAcpu, opts);
    benchmark::DoNotOptimize(r.objective);
  }
}
BENCHMARK(BM_SolveOpfitd118)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
