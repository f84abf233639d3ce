#include <catch2/catch_amalgamated.hpp>

#include "graywatch/topology.hpp"

using namespace graywatch;

TEST_CASE("radio range boundary is inclusive", "[topology]") {
  Topology t({{0, 0}, {50, 0}, {100.001, 0}}, 50.0);
  REQUIRE(t.adjacent(0, 1));
  REQUIRE(t.adjacent(1, 0));
  REQUIRE_FALSE(t.adjacent(1, 2));  // 50.001 apart
  REQUIRE_FALSE(t.adjacent(0, 2));
}

TEST_CASE("neighbor lists are sorted and symmetric", "[topology]") {
  Topology t({{0, 0}, {40, 0}, {80, 0}, {40, 40}}, 50.0);
  REQUIRE(t.neighbors(1) == std::vector<NodeId>{0, 2, 3});
  for (NodeId a = 0; a < t.size(); ++a)
    for (NodeId b : t.neighbors(a)) REQUIRE(t.adjacent(b, a));
  REQUIRE_THROWS_AS(t.neighbors(99), std::out_of_range);
}

TEST_CASE("connectivity check sees through multi-hop chains", "[topology]") {
  Topology line({{0, 0}, {40, 0}, {80, 0}, {120, 0}}, 50.0);
  REQUIRE(line.connected());
  Topology split({{0, 0}, {40, 0}, {200, 0}, {240, 0}}, 50.0);
  REQUIRE_FALSE(split.connected());
  REQUIRE(Topology({}, 50.0).connected());
  REQUIRE(Topology({{3, 3}}, 50.0).connected());
}

TEST_CASE("uniform placement is seed-deterministic and in bounds", "[topology]") {
  Rng r1(11, Stream::placement);
  Rng r2(11, Stream::placement);
  Topology a = Topology::uniform(30, 200, 150, 60, r1);
  Topology b = Topology::uniform(30, 200, 150, 60, r2);
  REQUIRE(a.size() == 30);
  for (NodeId n = 0; n < a.size(); ++n) {
    REQUIRE(a.position(n).x == b.position(n).x);
    REQUIRE(a.position(n).y == b.position(n).y);
    REQUIRE(a.position(n).x >= 0.0);
    REQUIRE(a.position(n).x <= 200.0);
    REQUIRE(a.position(n).y >= 0.0);
    REQUIRE(a.position(n).y <= 150.0);
    REQUIRE(a.neighbors(n) == b.neighbors(n));
  }
}

TEST_CASE("negative range is rejected", "[topology]") {
  REQUIRE_THROWS_AS(Topology({{0, 0}}, -1.0), std::invalid_argument);
}
