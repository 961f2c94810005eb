#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <complex>
#include <random>

#include "fixtures.hpp"
#include "itdopf/net/case.hpp"
#include "itdopf/net/per_unit.hpp"

using namespace itdopf;

TEST_CASE("series admittance derivation") {
  net::TransBranch br;
  SUBCASE("pure reactance") {
    br.r = 0.0;
    br.x = 0.1;
    auto [g, b] = net::derive_branch_admittance(br);
    CHECK(g == doctest::Approx(0.0));
    CHECK(b == doctest::Approx(-10.0));
  }
  SUBCASE("complex reciprocal oracle") {
    br.r = 0.01;
    br.x = 0.1;
    auto [g, b] = net::derive_branch_admittance(br);
    // oracle: (r - jx) / (r^2 + x^2)
    const double d = br.r * br.r + br.x * br.x;
    CHECK(g == doctest::Approx(br.r / d).epsilon(1e-12));
    CHECK(b == doctest::Approx(-br.x / d).epsilon(1e-12));
    CHECK(g == doctest::Approx(0.99009900990099).epsilon(1e-10));
    CHECK(b == doctest::Approx(-9.9009900990099).epsilon(1e-10));
  }
  SUBCASE("pure resistance") {
    br.r = 1.0;
    br.x = 0.0;
    auto [g, b] = net::derive_branch_admittance(br);
    CHECK(g == doctest::Approx(1.0));
    CHECK(b == doctest::Approx(0.0));
  }
  SUBCASE("zero impedance rejected") {
    br.r = 0.0;
    br.x = 0.0;
    CHECK_THROWS_AS(net::derive_branch_admittance(br), net::ZeroImpedance);
  }
}

TEST_CASE("admittance-impedance product invariant on bundled cases") {
  for (const auto& c : {fixtures::case5_feeder4(), fixtures::case118_5feeders()})
    for (const auto& br : c.transmission.branches) {
      const std::complex<double> prod =
          std::complex<double>(br.g, br.b) * std::complex<double>(br.r, br.x);
      CHECK(std::abs(prod - 1.0) <= 1e-10);
    }
}

TEST_CASE("per-unit scaling") {
  net::TransmissionNetwork raw;
  raw.base_mva = 100.0;
  raw.buses.push_back({1, 0.9, 1.1, 10.0, 3.0, 1.0, -2.0, true, true});
  net::TransGen g;
  g.bus = 1;
  g.p_min = 0;
  g.p_max = 50;
  raw.generators.push_back(g);
  const net::TransmissionNetwork pu = net::to_per_unit(raw);
  CHECK(pu.buses[0].pd == doctest::Approx(0.1));
  CHECK(pu.generators[0].p_max == doctest::Approx(0.5));
  CHECK(pu.per_unit);

  SUBCASE("non-positive base") {
    raw.base_mva = 0.0;
    CHECK_THROWS_AS(net::to_per_unit(raw), net::NonPositiveBase);
  }
}

TEST_CASE("distribution per-unit: 30 kW on 1000 kVA base") {
  net::DistributionNetwork raw;
  raw.base_kva = 1000.0;
  raw.base_kv = 4.16;
  raw.source_bus = "s";
  raw.nodes.push_back({"s"});
  raw.loads.push_back({"s", {30.0, 0.0, 0.0}, {0, 0, 0}});
  const auto pu = net::to_per_unit(raw);
  CHECK(pu.loads[0].pd[0] == doctest::Approx(0.03));
}

TEST_CASE("per-unit round trip is identity to 1e-12 relative") {
  const net::ITDCase c = fixtures::case5_feeder4();
  {
    const auto back = net::to_per_unit(net::from_per_unit(c.transmission));
    for (size_t i = 0; i < c.transmission.buses.size(); ++i) {
      CHECK(back.buses[i].pd ==
            doctest::Approx(c.transmission.buses[i].pd).epsilon(1e-12));
      CHECK(back.buses[i].qd ==
            doctest::Approx(c.transmission.buses[i].qd).epsilon(1e-12));
    }
    for (size_t i = 0; i < c.transmission.generators.size(); ++i)
      CHECK(back.generators[i].p_max ==
            doctest::Approx(c.transmission.generators[i].p_max).epsilon(1e-12));
  }
  {
    const auto back = net::to_per_unit(net::from_per_unit(c.feeders[0]));
    for (size_t i = 0; i < c.feeders[0].lines.size(); ++i)
      for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q) {
          CHECK(back.lines[i].y_series[p][q].real() ==
                doctest::Approx(c.feeders[0].lines[i].y_series[p][q].real())
                    .epsilon(1e-12));
          CHECK(back.lines[i].y_series[p][q].imag() ==
                doctest::Approx(c.feeders[0].lines[i].y_series[p][q].imag())
                    .epsilon(1e-12));
        }
    for (size_t i = 0; i < c.feeders[0].loads.size(); ++i)
      for (int p = 0; p < 3; ++p)
        CHECK(back.loads[i].pd[p] ==
              doctest::Approx(c.feeders[0].loads[i].pd[p]).epsilon(1e-12));
  }
}

TEST_CASE("resolve_boundaries") {
  net::ITDCase c = fixtures::case5_feeder4();
  net::BoundarySpec spec;

  SUBCASE("valid link with base factor") {
    spec.links.push_back({6, c.feeders[0].name, "sourcebus"});
    const auto links = net::resolve_boundaries(c.transmission, c.feeders, spec);
    REQUIRE(links.size() == 1);
    CHECK(links.links[0].trans_bus_index == 5);
    CHECK(links.links[0].base_factor ==
          doctest::Approx(c.feeders[0].base_kva / (1000.0 * c.transmission.base_mva)));
  }
  SUBCASE("unknown transmission bus") {
    spec.links.push_back({99, c.feeders[0].name, "sourcebus"});
    CHECK_THROWS_AS(net::resolve_boundaries(c.transmission, c.feeders, spec),
                    net::ResolveError);
    try {
      net::resolve_boundaries(c.transmission, c.feeders, spec);
    } catch (const net::ResolveError& e) {
      CHECK(e.kind() == net::ResolveError::Kind::UnknownBus);
      CHECK(std::string(e.what()).find("99") != std::string::npos);
    }
  }
  SUBCASE("duplicate transmission bus") {
    spec.links.push_back({6, c.feeders[0].name, "sourcebus"});
    spec.links.push_back({6, c.feeders[0].name, "sourcebus"});
    try {
      net::resolve_boundaries(c.transmission, c.feeders, spec);
      FAIL("expected DuplicateLink");
    } catch (const net::ResolveError& e) {
      CHECK(e.kind() == net::ResolveError::Kind::DuplicateLink);
    }
  }
  SUBCASE("non-source bus rejected") {
    spec.links.push_back({6, c.feeders[0].name, "b2"});
    try {
      net::resolve_boundaries(c.transmission, c.feeders, spec);
      FAIL("expected PhaseMismatch");
    } catch (const net::ResolveError& e) {
      CHECK(e.kind() == net::ResolveError::Kind::PhaseMismatch);
    }
  }
  SUBCASE("disabled bus rejected") {
    c.transmission.buses[5].in_service = false;
    spec.links.push_back({6, c.feeders[0].name, "sourcebus"});
    try {
      net::resolve_boundaries(c.transmission, c.feeders, spec);
      FAIL("expected DisabledBus");
    } catch (const net::ResolveError& e) {
      CHECK(e.kind() == net::ResolveError::Kind::DisabledBus);
    }
  }
  SUBCASE("deterministic ordering follows spec order") {
    net::ITDCase big = fixtures::case118_5feeders();
    CHECK(big.boundary.links.size() == 5);
    CHECK(big.transmission.buses[big.boundary.links[0].trans_bus_index].id == 2);
    CHECK(big.transmission.buses[big.boundary.links[4].trans_bus_index].id == 44);
  }
}

TEST_CASE("validate_case") {
  SUBCASE("bundled fixtures are clean") {
    CHECK(net::validate_case(fixtures::case5_feeder4()).ok());
    CHECK(net::validate_case(fixtures::case5_feeder4_unbalanced()).ok());
    CHECK(net::validate_case(fixtures::case118_5feeders()).ok());
  }
  SUBCASE("v_min above v_max is reported with the bus") {
    net::ITDCase c = fixtures::case5_feeder4();
    c.transmission.buses[2].v_min = 1.2;
    const auto rep = net::validate_case(c);
    REQUIRE(rep.violations.size() == 1);
    CHECK(rep.violations[0].component.find("bus 3") != std::string::npos);
  }
  SUBCASE("asymmetric series block is reported with the line") {
    net::ITDCase c = fixtures::case5_feeder4();
    c.feeders[0].lines[1].y_series[0][1] += std::complex<double>(1e-6, 0);
    const auto rep = net::validate_case(c);
    REQUIRE(rep.violations.size() == 1);
    CHECK(rep.violations[0].component.find("line 1") != std::string::npos);
    CHECK(rep.violations[0].message.find("symmetric") != std::string::npos);
  }
  SUBCASE("unlinked feeder in a linked case") {
    net::ITDCase c = fixtures::case5_feeder4();
    c.feeders.push_back(c.feeders[0]);
    c.feeders[1].name = "extra";
    CHECK_FALSE(net::validate_case(c).ok());
  }
}
