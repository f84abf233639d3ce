#include <catch2/catch_amalgamated.hpp>

#include "graywatch/pbh.hpp"

using namespace graywatch;

namespace {
RouteScore run_rounds(bool r1, bool r2, bool r3) {
  RouteScore s = RouteScore::initialize(r1);
  s.update(r2);
  s.update(r3);
  return s;
}
}  // namespace

TEST_CASE("all eight round outcomes land on the fixed scores", "[score]") {
  struct Case {
    bool r1, r2, r3;
    std::int64_t score;
    RouteVerdict verdict;
  };
  // One init round (0 or 100), two updates (-50 clamped at 0, or +20),
  // infected at 50 and above.
  const Case cases[] = {
      {true, true, true, 0, RouteVerdict::valid},
      {true, true, false, 20, RouteVerdict::valid},
      {true, false, true, 0, RouteVerdict::valid},    // 0 +20 -50 clamps to 0
      {true, false, false, 40, RouteVerdict::valid},  // short of the bar by design
      {false, true, true, 0, RouteVerdict::valid},    // 100 -50 -50
      {false, true, false, 70, RouteVerdict::infected},
      {false, false, true, 70, RouteVerdict::infected},  // 120 - 50
      {false, false, false, 140, RouteVerdict::infected},
  };
  for (const auto& c : cases) {
    CAPTURE(c.r1, c.r2, c.r3);
    RouteScore s = run_rounds(c.r1, c.r2, c.r3);
    REQUIRE(s.p_bh() == c.score);
    REQUIRE(s.verdict() == c.verdict);
  }
}

TEST_CASE("verdict stays pending until the schedule completes", "[score]") {
  RouteScore s = RouteScore::initialize(false);
  REQUIRE(s.p_bh() == 100);
  REQUIRE(s.rounds_done() == 1);
  REQUIRE(s.verdict() == RouteVerdict::pending);
  s.update(true);
  REQUIRE(s.p_bh() == 50);
  REQUIRE(s.verdict() == RouteVerdict::pending);
  s.update(true);
  REQUIRE(s.complete());
  REQUIRE(s.p_bh() == 0);
  REQUIRE(s.verdict() == RouteVerdict::valid);
}

TEST_CASE("the score never goes negative", "[score]") {
  RouteScore s = RouteScore::initialize(true);
  s.update(true);
  REQUIRE(s.p_bh() == 0);
  s.update(true);
  REQUIRE(s.p_bh() == 0);
}

TEST_CASE("updates outside the schedule are rejected", "[score]") {
  RouteScore fresh;
  REQUIRE_THROWS_AS(fresh.update(true), std::logic_error);
  RouteScore s = run_rounds(true, true, true);
  REQUIRE_THROWS_AS(s.update(true), std::logic_error);
}
