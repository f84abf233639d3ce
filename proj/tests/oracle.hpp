#pragma once

// Trace replay oracle: where did payload-class packets die?
//
// A drop locus is a node that received a data packet or probe block addressed
// further down the route and never re-emitted it. Computed purely from the
// delivery trace, independent of any protocol state.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "graywatch/trace.hpp"
#include "graywatch/types.hpp"

namespace testsup {

inline graywatch::NodeId last_route_node(const std::string& route) {
  auto pos = route.rfind('|');
  std::string tail = pos == std::string::npos ? route : route.substr(pos + 1);
  return static_cast<graywatch::NodeId>(std::stoul(tail));
}

inline std::set<graywatch::NodeId> drop_loci(const std::vector<graywatch::TraceRecord>& trace) {
  struct PacketLife {
    std::set<graywatch::NodeId> received;
    std::set<graywatch::NodeId> emitted;
    graywatch::NodeId final_hop = graywatch::kNoNode;
  };
  std::map<std::string, PacketLife> lives;
  for (const auto& rec : trace) {
    if (rec.type != "block" && rec.type != "data") continue;
    PacketLife& life = lives[rec.type + "/" + rec.id];
    life.received.insert(rec.to);
    life.emitted.insert(rec.from);
    life.final_hop = last_route_node(rec.route);
  }
  std::set<graywatch::NodeId> loci;
  for (const auto& [key, life] : lives) {
    for (graywatch::NodeId n : life.received) {
      if (n == life.final_hop) continue;
      if (life.emitted.count(n)) continue;
      loci.insert(n);
    }
  }
  return loci;
}

}  // namespace testsup
