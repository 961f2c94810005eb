#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "itdopf/form/blocks.hpp"
#include "itdopf/nlp/solver.hpp"

using namespace itdopf;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

nlp::NlpModel bounded_quadratic() {
  // min (x - 2)^2, 0 <= x <= 1
  nlp::NlpModel m;
  m.lower.resize(1);
  m.upper.resize(1);
  m.x0.resize(1);
  m.lower << 0.0;
  m.upper << 1.0;
  m.x0 << 0.5;
  m.obj_value = [](const Eigen::VectorXd& x) { return (x[0] - 2) * (x[0] - 2); };
  m.obj_gradient = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g.resize(1);
    g[0] = 2 * (x[0] - 2);
  };
  m.obj_hess_vec = [](const Eigen::VectorXd&, const Eigen::VectorXd& v,
                      Eigen::VectorXd& o) { o = 2 * v; };
  m.obj_hessian = [](const Eigen::VectorXd&, nlp::HessianSink& s) { s.diag(0, 2.0); };
  return m;
}

nlp::NlpModel simplex_lp() {
  // min x + y  s.t.  x + y >= 1, x, y >= 0
  nlp::NlpModel m;
  m.lower = Eigen::VectorXd::Zero(2);
  m.upper = Eigen::VectorXd::Constant(2, kInf);
  m.x0 = Eigen::VectorXd::Constant(2, 0.8);
  std::vector<form::LinearRow> rows{{{{0, 1.0}, {1, 1.0}}, 0.0}};
  Eigen::VectorXd lo(1), hi(1);
  lo << 1.0;
  hi << kInf;
  m.blocks.push_back(std::make_shared<form::LinearBlock>(
      "facet", nlp::BlockOwner::Transmission, std::move(rows), lo, hi));
  m.obj_value = [](const Eigen::VectorXd& x) { return x[0] + x[1]; };
  m.obj_gradient = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g.setOnes(x.size());
  };
  m.obj_hess_vec = [](const Eigen::VectorXd&, const Eigen::VectorXd& v,
                      Eigen::VectorXd& o) { o.setZero(v.size()); };
  m.obj_hessian = [](const Eigen::VectorXd&, nlp::HessianSink&) {};
  return m;
}

// min x s.t. x^2 + y^2 = 1
struct CircleBlock final : nlp::ConstraintBlock {
  CircleBlock()
      : ConstraintBlock("circle", nlp::BlockOwner::Transmission,
                        Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1), false) {}
  void eval(const double* x, double* r) const override {
    r[0] = x[0] * x[0] + x[1] * x[1];
  }
  void jacobian(const double* x, nlp::TripletSink& s) const override {
    s.add(0, 0, 2 * x[0]);
    s.add(0, 1, 2 * x[1]);
  }
  void hessian(const double*, const double* lam, nlp::HessianSink& s) const override {
    s.diag(0, 2 * lam[0]);
    s.diag(1, 2 * lam[0]);
  }
};

nlp::NlpModel circle_model() {
  nlp::NlpModel m;
  m.lower = Eigen::VectorXd::Constant(2, -kInf);
  m.upper = Eigen::VectorXd::Constant(2, kInf);
  m.x0.resize(2);
  m.x0 << -0.3, 0.8;
  m.blocks.push_back(std::make_shared<CircleBlock>());
  m.obj_value = [](const Eigen::VectorXd& x) { return x[0]; };
  m.obj_gradient = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g.setZero(x.size());
    g[0] = 1.0;
  };
  m.obj_hess_vec = [](const Eigen::VectorXd&, const Eigen::VectorXd& v,
                      Eigen::VectorXd& o) { o.setZero(v.size()); };
  m.obj_hessian = [](const Eigen::VectorXd&, nlp::HessianSink&) {};
  return m;
}

// 2-node transportation: one supplier (cost c1 = 7), one fixed demand of 1.
nlp::NlpModel transport_lp(double supply_cap, double demand) {
  nlp::NlpModel m;
  // vars: pg, p_fwd, p_rev
  m.lower.resize(3);
  m.upper.resize(3);
  m.x0 = Eigen::VectorXd::Zero(3);
  m.lower << 0.0, -kInf, -kInf;
  m.upper << supply_cap, kInf, kInf;
  std::vector<form::LinearRow> rows;
  rows.push_back({{{1, 1.0}, {2, 1.0}}, 0.0});            // lossless pairing
  rows.push_back({{{0, 1.0}, {1, -1.0}}, 0.0});           // supply bus balance
  rows.push_back({{{2, -1.0}}, -demand});                 // demand bus balance
  Eigen::VectorXd z = Eigen::VectorXd::Zero(3);
  m.blocks.push_back(std::make_shared<form::LinearBlock>(
      "transport", nlp::BlockOwner::Transmission, std::move(rows), z, z));
  m.obj_value = [](const Eigen::VectorXd& x) { return 7.0 * x[0]; };
  m.obj_gradient = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g.setZero(x.size());
    g[0] = 7.0;
  };
  m.obj_hess_vec = [](const Eigen::VectorXd&, const Eigen::VectorXd& v,
                      Eigen::VectorXd& o) { o.setZero(v.size()); };
  m.obj_hessian = [](const Eigen::VectorXd&, nlp::HessianSink&) {};
  return m;
}

}  // namespace

TEST_CASE("clipped unconstrained minimum") {
  const nlp::Solution s = nlp::solve(bounded_quadratic());
  REQUIRE(s.status == nlp::SolveStatus::Optimal);
  CHECK(s.x[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(s.objective == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("LP facet objective") {
  const nlp::Solution s = nlp::solve(simplex_lp());
  REQUIRE(s.status == nlp::SolveStatus::Optimal);
  CHECK(s.objective == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(s.x[0] + s.x[1] == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("equality-constrained circle") {
  // oracle: parameterize (cos t, sin t); min cos t = -1 at t = pi
  const nlp::Solution s = nlp::solve(circle_model());
  REQUIRE(s.status == nlp::SolveStatus::Optimal);
  CHECK(s.x[0] == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(std::abs(s.x[1]) < 1e-4);
}

TEST_CASE("kkt_residuals unit cases") {
  SUBCASE("unconstrained quadratic at its vertex") {
    nlp::NlpModel m;
    m.lower = Eigen::VectorXd::Constant(1, -kInf);
    m.upper = Eigen::VectorXd::Constant(1, kInf);
    m.x0 = Eigen::VectorXd::Zero(1);
    m.obj_value = [](const Eigen::VectorXd& x) { return x[0] * x[0]; };
    m.obj_gradient = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) { g = 2 * x; };
    m.obj_hess_vec = [](const Eigen::VectorXd&, const Eigen::VectorXd& v,
                        Eigen::VectorXd& o) { o = 2 * v; };
    nlp::Solution sol;
    sol.x = Eigen::VectorXd::Zero(1);
    sol.slack.resize(0);
    sol.lambda.resize(0);
    sol.z_lower = Eigen::VectorXd::Zero(1);
    sol.z_upper = Eigen::VectorXd::Zero(1);
    sol.slack_z_lower.resize(0);
    sol.slack_z_upper.resize(0);
    const nlp::KktResiduals r = nlp::kkt_residuals(m, sol);
    CHECK(r.stationarity == 0.0);
    CHECK(r.feasibility == 0.0);
    CHECK(r.complementarity == 0.0);
  }
  SUBCASE("feasible nonstationary point") {
    nlp::NlpModel m = circle_model();
    nlp::Solution sol;
    sol.x.resize(2);
    sol.x << 1.0, 0.0;  // on the circle, not optimal
    sol.slack.resize(0);
    sol.lambda = Eigen::VectorXd::Zero(1);
    sol.z_lower = Eigen::VectorXd::Zero(2);
    sol.z_upper = Eigen::VectorXd::Zero(2);
    sol.slack_z_lower.resize(0);
    sol.slack_z_upper.resize(0);
    const nlp::KktResiduals r = nlp::kkt_residuals(m, sol);
    CHECK(r.feasibility == doctest::Approx(0.0));
    CHECK(r.stationarity > 0.1);
  }
}

TEST_CASE("independent KKT re-verification of accepted solutions") {
  for (auto* make : {bounded_quadratic, simplex_lp, circle_model}) {
    const nlp::NlpModel m = make();
    const nlp::Solution s = nlp::solve(m);
    REQUIRE(s.status == nlp::SolveStatus::Optimal);
    const nlp::KktResiduals r = nlp::kkt_residuals(m, s);
    CHECK(r.stationarity <= 1e-6);
    CHECK(r.feasibility <= 1e-6);
    CHECK(r.complementarity <= 1e-6);
    // the recomputation agrees with the solver's own report
    CHECK(std::abs(r.stationarity - s.kkt.stationarity) <= 1e-10);
    CHECK(std::abs(r.feasibility - s.kkt.feasibility) <= 1e-10);
    CHECK(std::abs(r.complementarity - s.kkt.complementarity) <= 1e-10);
  }
}

TEST_CASE("solve_linear transportation examples") {
  SUBCASE("unit demand at unit cost") {
    const nlp::Solution s = nlp::solve_linear(transport_lp(2.0, 1.0));
    REQUIRE(s.status == nlp::SolveStatus::Optimal);
    CHECK(s.objective == doctest::Approx(7.0).epsilon(1e-6));
  }
  SUBCASE("demand exceeding supply bounds is infeasible") {
    const nlp::Solution s = nlp::solve_linear(transport_lp(2.0, 3.0));
    CHECK(s.status == nlp::SolveStatus::Infeasible);
  }
  SUBCASE("non-affine blocks are rejected") {
    CHECK_THROWS_AS(nlp::solve_linear(circle_model()), std::invalid_argument);
  }
}

TEST_CASE("deterministic iterate logs") {
  const nlp::Solution a = nlp::solve(circle_model());
  const nlp::Solution b = nlp::solve(circle_model());
  REQUIRE(a.iterate_log.size() == b.iterate_log.size());
  for (size_t i = 0; i < a.iterate_log.size(); ++i)
    CHECK(a.iterate_log[i] == b.iterate_log[i]);
}

TEST_CASE("monotone barrier") {
  const nlp::Solution s = nlp::solve(simplex_lp());
  double prev = kInf;
  for (const auto& line : s.iterate_log) {
    const size_t pos = line.find("mu=");
    REQUIRE(pos != std::string::npos);
    const double mu = std::stod(line.substr(pos + 3));
    CHECK(mu <= prev + 1e-15);
    prev = mu;
  }
}
