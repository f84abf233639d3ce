#pragma once

#include <string>
#include <vector>

#include "graywatch/types.hpp"

namespace graywatch {

// One record per delivered transmission.
struct TraceRecord {
  Time time = 0;
  std::string type;   // rreq, rrep, data, block, ack, ctrl, resp, treq, trep, bl
  NodeId from = kNoNode;
  NodeId to = kNoNode;
  std::string id;
  std::string route;
};

inline std::string to_line(const TraceRecord& r) {
  return std::to_string(r.time) + "," + r.type + "," + std::to_string(r.from) + "," +
         std::to_string(r.to) + "," + r.id + "," + r.route;
}

struct ProbeLogRow {
  Time time = 0;
  std::uint64_t probe_id = 0;
  std::string route;
  int round = 0;
  int ack_blocks = 0;  // -1 when the round timed out with no ack
  std::int64_t p_bh = 0;
  std::string verdict;
};

inline std::string to_line(const ProbeLogRow& r) {
  return std::to_string(r.time) + "," + std::to_string(r.probe_id) + "," + r.route + "," +
         std::to_string(r.round) + "," + std::to_string(r.ack_blocks) + "," +
         std::to_string(r.p_bh) + "," + r.verdict;
}

struct DetectLogRow {
  Time time = 0;
  std::uint64_t session = 0;
  std::string route;
  std::string event;  // hop_ok, hop_bad_digest, hop_timeout, table_refused, verdict, clean
  std::string detail;
  std::string challenge_hex;
};

inline std::string to_line(const DetectLogRow& r) {
  return std::to_string(r.time) + "," + std::to_string(r.session) + "," + r.route + "," +
         r.event + "," + r.detail + "," + r.challenge_hex;
}

struct QuarantineLogRow {
  Time time = 0;
  NodeId issuer = kNoNode;
  NodeId convicted = kNoNode;
  std::uint64_t session = 0;
};

inline std::string to_line(const QuarantineLogRow& r) {
  return std::to_string(r.time) + "," + std::to_string(r.issuer) + "," +
         std::to_string(r.convicted) + "," + std::to_string(r.session);
}

}  // namespace graywatch
