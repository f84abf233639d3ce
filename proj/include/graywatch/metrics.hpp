#pragma once

#include <cstdint>
#include <cstdio>
#include <optional>
#include <set>
#include <string>

#include "graywatch/types.hpp"

namespace graywatch {

// Scoring-side knowledge of who actually misbehaves. Protocol code never
// sees this; it exists to grade a finished run.
struct GroundTruth {
  std::set<NodeId> malicious;
  std::set<NodeId> exempt;  // flow endpoints: never suspects, never counted
};

struct ConfusionMatrix {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;
};

inline ConfusionMatrix score_nodes(std::size_t node_count, const GroundTruth& truth,
                                   const std::set<NodeId>& convicted) {
  ConfusionMatrix cm;
  for (NodeId n = 0; n < node_count; ++n) {
    if (truth.exempt.count(n)) continue;
    bool mal = truth.malicious.count(n) != 0;
    bool conv = convicted.count(n) != 0;
    if (mal && conv) cm.tp++;
    else if (mal && !conv) cm.fn++;
    else if (!mal && conv) cm.fp++;
    else cm.tn++;
  }
  return cm;
}

// Detection rate in percent. A run with nothing to detect counts as fully
// detected.
inline double detection_rate(const ConfusionMatrix& cm) {
  std::uint64_t denom = cm.tp + cm.fn;
  if (denom == 0) return 100.0;
  return 100.0 * static_cast<double>(cm.tp) / static_cast<double>(denom);
}

// Complement identity: dr + fnr == 100 by construction, not by re-division.
inline double false_negative_rate(const ConfusionMatrix& cm) {
  return 100.0 - detection_rate(cm);
}

inline double false_positive_rate(const ConfusionMatrix& cm) {
  std::uint64_t denom = cm.fp + cm.tn;
  if (denom == 0) return 0.0;
  return 100.0 * static_cast<double>(cm.fp) / static_cast<double>(denom);
}

struct TrafficStats {
  std::uint64_t sent = 0;
  std::uint64_t delivered = 0;
  std::int64_t delay_sum_ms = 0;
};

inline std::optional<double> packet_delivery_ratio(const TrafficStats& t) {
  if (t.sent == 0) return std::nullopt;
  return 100.0 * static_cast<double>(t.delivered) / static_cast<double>(t.sent);
}

inline std::optional<double> average_delay_ms(const TrafficStats& t) {
  if (t.delivered == 0) return std::nullopt;
  return static_cast<double>(t.delay_sum_ms) / static_cast<double>(t.delivered);
}

inline std::string format3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

inline std::string format3(const std::optional<double>& v) {
  return v ? format3(*v) : std::string{};
}

}  // namespace graywatch
