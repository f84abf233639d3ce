#pragma once

#include <optional>

#include "graywatch/monitoring.hpp"
#include "graywatch/types.hpp"

namespace graywatch {

// Two-node dispute after a challenge timeout at hop y, upstream hop x.
// Evidence: whether each side handed over its monitoring table, and x's
// recorded row for y.
enum class ArbVerdict { upstream, downstream, none };

enum class ArbReason {
  x_refused_table,
  y_refused_table,
  y_keeps_requests,      // x delivered, y never heard forwarding
  y_partial_drops,       // y forwards less than it is given
  x_blocks_exchange,     // y demonstrably forwards everything
  default_downstream,    // both tables consistent with innocence
  both_trusted,          // both sides are IDS endpoints, nobody to blame
};

inline const char* to_string(ArbReason r) {
  switch (r) {
    case ArbReason::x_refused_table: return "x_refused_table";
    case ArbReason::y_refused_table: return "y_refused_table";
    case ArbReason::y_keeps_requests: return "y_keeps_requests";
    case ArbReason::y_partial_drops: return "y_partial_drops";
    case ArbReason::x_blocks_exchange: return "x_blocks_exchange";
    case ArbReason::default_downstream: return "default_downstream";
    case ArbReason::both_trusted: return "both_trusted";
  }
  return "?";
}

struct ArbDecision {
  ArbVerdict verdict = ArbVerdict::none;
  ArbReason reason = ArbReason::default_downstream;
};

struct ArbEvidence {
  bool x_table_received = false;
  bool y_table_received = false;
  MonitorEntry x_view_of_y{};  // from x's table, zero row if absent
  bool x_is_trusted = false;   // IDS endpoint (session source or flow destination)
  bool y_is_trusted = false;
};

inline ArbDecision arbitrate(const ArbEvidence& ev) {
  if (ev.x_is_trusted && ev.y_is_trusted) return {ArbVerdict::none, ArbReason::both_trusted};
  if (ev.x_is_trusted) return {ArbVerdict::downstream, ArbReason::default_downstream};
  if (ev.y_is_trusted) return {ArbVerdict::upstream, ArbReason::x_blocks_exchange};

  if (!ev.y_table_received) return {ArbVerdict::downstream, ArbReason::y_refused_table};
  if (!ev.x_table_received) return {ArbVerdict::upstream, ArbReason::x_refused_table};

  const auto& e = ev.x_view_of_y;
  if (e.rreq_c == 0) {
    if (e.rreq_t >= 1) return {ArbVerdict::downstream, ArbReason::y_keeps_requests};
    return {ArbVerdict::downstream, ArbReason::default_downstream};
  }
  if (e.rreq_c >= e.rreq_t) return {ArbVerdict::upstream, ArbReason::x_blocks_exchange};
  return {ArbVerdict::downstream, ArbReason::y_partial_drops};
}

}  // namespace graywatch
