#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "graywatch/event_queue.hpp"

using namespace graywatch;

TEST_CASE("events dispatch in time order, ties in schedule order", "[kernel]") {
  EventQueue q;
  std::vector<int> order;
  q.schedule(10, 0, [&] { order.push_back(1); });
  q.schedule(5, 0, [&] { order.push_back(2); });
  q.schedule(10, 0, [&] { order.push_back(3); });
  q.schedule(7, 0, [&] { order.push_back(4); });
  q.run_until(20);
  REQUIRE(order == std::vector<int>{2, 4, 1, 3});
}

TEST_CASE("handlers can schedule follow-up work inside the horizon", "[kernel]") {
  EventQueue q;
  std::vector<Time> fired;
  q.schedule(5, 0, [&] {
    fired.push_back(q.now());
    q.schedule_in(5, 0, [&] { fired.push_back(q.now()); });
    q.schedule_in(100, 0, [&] { fired.push_back(q.now()); });
  });
  std::size_t n = q.run_until(12);
  REQUIRE(n == 2);
  REQUIRE(fired == std::vector<Time>{5, 10});
  REQUIRE(q.now() == 10);  // clock rests on the last dispatched event
  REQUIRE(q.pending() == 1);
}

TEST_CASE("an empty window advances the clock to the horizon", "[kernel]") {
  EventQueue q;
  REQUIRE(q.run_until(42) == 0);
  REQUIRE(q.now() == 42);
  REQUIRE(q.empty());
}

TEST_CASE("scheduling or running into the past is rejected", "[kernel]") {
  EventQueue q;
  q.schedule(8, 0, [] {});
  q.run_until(8);
  REQUIRE(q.now() == 8);
  REQUIRE_THROWS_AS(q.schedule(7, 0, [] {}), std::logic_error);
  REQUIRE_THROWS_AS(q.run_until(3), std::logic_error);
  q.schedule(8, 0, [] {});  // same instant is fine
  REQUIRE(q.run_until(8) == 1);
}

TEST_CASE("three-step relay chain lands on the expected clock", "[kernel]") {
  EventQueue q;
  int hops = 0;
  std::function<void()> hop = [&] {
    ++hops;
    if (hops < 3) q.schedule_in(2, 0, hop);
  };
  q.schedule(0, 0, hop);
  q.run_until(100);
  REQUIRE(hops == 3);
  REQUIRE(q.now() == 4);
}
