#pragma once

// Shared scripted scenarios for the test suite.

#include <memory>
#include <vector>

#include "graywatch/graywatch.hpp"

namespace testsup {

using namespace graywatch;

// Nine-node corridor. The source sits in a cluster of bystanders, the only
// path to the destination runs along the x axis, and the last relay before
// the destination swallows everything.
//
//   6  1
//   2  5  8  4  0  7       axis west to east: 5 -> 8 -> 4 -> 0 -> 7
//      3
//
// Node 0 is the gray hole: drops every request and every payload, answers
// route requests with a forged destination reply, and ignores hash
// challenges.
inline std::vector<Vec2> corridor_positions() {
  return {
      {120, 0},   // 0: gray hole
      {0, 40},    // 1
      {-40, 0},   // 2
      {0, -40},   // 3
      {80, 0},    // 4: the observer whose table convicts node 0
      {0, 0},     // 5: source
      {-40, 40},  // 6
      {160, 0},   // 7: destination
      {40, 0},    // 8
  };
}

inline std::vector<NodeBehavior> corridor_behaviors(bool attacker_active = true) {
  std::vector<NodeBehavior> b(9, NodeBehavior::honest_node());
  if (attacker_active)
    b[0] = NodeBehavior::simple(1.0, 1.0, ControlReaction::silent_drop, true);
  return b;
}

inline NetConfig quiet_config(bool defense = true) {
  NetConfig cfg;
  cfg.refresh_epoch_ms = 100000;  // longer than any scripted run
  cfg.defense = defense;
  return cfg;
}

inline std::unique_ptr<Network> make_corridor(bool defense = true, bool trace = false,
                                              std::uint64_t seed = 7) {
  NetConfig cfg = quiet_config(defense);
  cfg.trace_enabled = trace;
  auto net = std::make_unique<Network>(Topology(corridor_positions(), 50.0),
                                       corridor_behaviors(), cfg, seed);
  return net;
}

// Straight line of n nodes, 40m spacing, range 50: only consecutive nodes
// hear each other.
inline Topology line_topology(std::size_t n) {
  std::vector<Vec2> pos(n);
  for (std::size_t i = 0; i < n; ++i) pos[i] = {static_cast<double>(i) * 40.0, 0.0};
  return Topology(std::move(pos), 50.0);
}

inline std::unique_ptr<Network> make_line(std::size_t n, std::vector<NodeBehavior> behaviors,
                                          std::uint64_t seed = 7, bool trace = false,
                                          bool defense = true) {
  NetConfig cfg = quiet_config(defense);
  cfg.trace_enabled = trace;
  return std::make_unique<Network>(line_topology(n), std::move(behaviors), cfg, seed);
}

// Colluding pair on a line: source 0, relay 1, lead attacker 2, backer 3,
// relay 4, destination 5. The lead drops payloads and fakes replies; the
// backer keeps a spotless forwarding record.
inline std::unique_ptr<Network> make_colluding_pair(std::uint64_t seed, bool trace = false) {
  std::vector<NodeBehavior> b(6, NodeBehavior::honest_node());
  b[2] = NodeBehavior::cooperative_lead(3, 1.0);
  b[3] = NodeBehavior::cooperative_backer(2);
  return make_line(6, std::move(b), seed, trace);
}

// Caterpillar: a line of 3..6 nodes plus up to two pendant nodes hanging off
// distinct interior positions. The source-to-destination path along the line
// is unique; pendants only add bystander observers.
struct Caterpillar {
  std::unique_ptr<Network> net;
  NodeId src = 0;
  NodeId dst = 0;
  NodeId attacker = 0;
  std::size_t line_len = 0;
};

inline Caterpillar make_caterpillar(std::uint64_t seed) {
  Rng shape(seed, Stream::scratch);
  std::size_t line_len = 3 + shape.below(4);  // 3..6
  std::size_t interiors = line_len - 2;
  std::size_t pendants = shape.below(3);      // 0..2
  if (pendants > interiors) pendants = interiors;

  std::vector<Vec2> pos;
  for (std::size_t i = 0; i < line_len; ++i) pos.push_back({static_cast<double>(i) * 40.0, 0.0});
  auto hosts = shape.sample(interiors, pendants);  // distinct interior offsets
  for (std::size_t k = 0; k < pendants; ++k) {
    double x = static_cast<double>(hosts[k] + 1) * 40.0;
    double y = (k % 2 == 0) ? 40.0 : -40.0;
    pos.push_back({x, y});
  }

  NodeId attacker = static_cast<NodeId>(1 + shape.below(interiors));
  std::vector<NodeBehavior> b(pos.size(), NodeBehavior::honest_node());
  b[attacker] = NodeBehavior::simple(1.0, 1.0, ControlReaction::silent_drop, true);

  NetConfig cfg = quiet_config();
  cfg.trace_enabled = true;
  Caterpillar c;
  c.net = std::make_unique<Network>(Topology(std::move(pos), 50.0), std::move(b), cfg, seed);
  c.src = 0;
  c.dst = static_cast<NodeId>(line_len - 1);
  c.attacker = attacker;
  c.line_len = line_len;
  return c;
}

}  // namespace testsup
