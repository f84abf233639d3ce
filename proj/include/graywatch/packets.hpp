#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "graywatch/monitoring.hpp"
#include "graywatch/sha256.hpp"
#include "graywatch/types.hpp"

namespace graywatch {

// ---- route discovery ----

struct Rreq {
  RreqId id;
  NodeId origin = kNoNode;
  NodeId destination = kNoNode;
  std::vector<NodeId> source_route;  // origin first, grows hop by hop
};

struct Rrep {
  RreqId rreq_id;
  NodeId responder = kNoNode;          // who claims to answer (forgeable)
  NodeId destination = kNoNode;        // flow destination the request named
  std::vector<NodeId> route;           // full origin -> destination path
  std::vector<TrustLevel> trust_annotations;  // appended on the return path
};

inline std::size_t low_count(const Rrep& r) {
  return static_cast<std::size_t>(
      std::count(r.trust_annotations.begin(), r.trust_annotations.end(), TrustLevel::Low));
}

// Windowed selection at the origin. Destination replies outrank intermediate
// ones, then fewer Low-trust hops, then shorter routes, then the
// lexicographically smallest route. Total order, so candidate order is moot.
inline bool route_preferred(const Rrep& a, const Rrep& b) {
  bool a_dest = a.responder == a.destination;
  bool b_dest = b.responder == b.destination;
  if (a_dest != b_dest) return a_dest;
  std::size_t a_low = low_count(a), b_low = low_count(b);
  if (a_low != b_low) return a_low < b_low;
  if (a.route.size() != b.route.size()) return a.route.size() < b.route.size();
  return a.route < b.route;
}

inline const Rrep* select_route(const std::vector<Rrep>& candidates) {
  const Rrep* best = nullptr;
  for (const auto& c : candidates) {
    if (!best || route_preferred(c, *best)) best = &c;
  }
  return best;
}

// ---- route table ----

enum class RouteState { candidate, tested_valid, infected, purged };

inline const char* to_string(RouteState s) {
  switch (s) {
    case RouteState::candidate: return "candidate";
    case RouteState::tested_valid: return "tested_valid";
    case RouteState::infected: return "infected";
    case RouteState::purged: return "purged";
  }
  return "?";
}

struct RouteEntry {
  NodeId destination = kNoNode;
  std::vector<NodeId> path;  // origin first
  std::size_t low_hops = 0;
  RouteState state = RouteState::candidate;

  void transition(RouteState next) {
    bool ok = false;
    switch (state) {
      case RouteState::candidate:
        ok = next == RouteState::tested_valid || next == RouteState::infected ||
             next == RouteState::purged;
        break;
      case RouteState::tested_valid:
      case RouteState::infected:
        ok = next == RouteState::purged;
        break;
      case RouteState::purged:
        ok = false;
        break;
    }
    if (!ok) throw std::logic_error("bad route state transition");
    state = next;
  }
};

// ---- data and probing ----

struct DataPacket {
  std::uint32_t flow = 0;
  std::uint64_t seq = 0;
  std::vector<NodeId> route;
  Time sent_at = 0;
  std::uint32_t size_bytes = 0;
  bool is_probe_block = false;  // probe traffic is data-shaped but not scored as traffic
};

struct TestBlock {
  std::uint64_t probe_id = 0;
  int round = 0;  // 1-based
  int index = 0;
  int n_blocks = 0;
  std::vector<NodeId> route;
};

struct ProbeAck {
  std::uint64_t probe_id = 0;
  int round = 0;
  int received = 0;
  std::vector<NodeId> route;  // forward route; ack travels the reverse
};

// ---- hash challenge ----

struct ControlPacket {
  std::uint64_t session = 0;
  NodeId node_id = kNoNode;  // creator of this hop's packet
  NodeId id_next = kNoNode;  // next node after the addressee
  std::size_t hop_index = 0; // 1-based position of the addressee
  std::vector<std::uint8_t> challenge;
  std::vector<NodeId> route;
};

struct HopResponse {
  std::uint64_t session = 0;
  NodeId responder = kNoNode;
  std::size_t hop_index = 0;
  Digest digest{};
  std::vector<NodeId> route;
};

struct TableRequest {
  std::uint64_t session = 0;
  NodeId subject = kNoNode;
  std::vector<NodeId> path;  // source .. subject
};

struct TableReply {
  std::uint64_t session = 0;
  NodeId subject = kNoNode;
  std::vector<std::pair<NodeId, MonitorEntry>> rows;
  std::vector<NodeId> path;
};

// ---- quarantine ----

struct BlacklistMsg {
  NodeId issuer = kNoNode;
  NodeId convicted = kNoNode;
  std::uint64_t session = 0;
};

inline std::string route_string(const std::vector<NodeId>& route) {
  std::string out;
  for (std::size_t i = 0; i < route.size(); ++i) {
    if (i) out.push_back('|');
    out += std::to_string(route[i]);
  }
  return out;
}

}  // namespace graywatch
