#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "graywatch/types.hpp"

namespace graywatch {

enum class TrustLevel { High, Low };

inline const char* to_string(TrustLevel t) { return t == TrustLevel::High ? "High" : "Low"; }

// Per-neighbor RREQ bookkeeping. rreq_t counts requests this table's owner
// handed to the neighbor, rreq_c counts requests the owner heard the neighbor
// forward. A neighbor that swallows requests accumulates rreq_t > rreq_c.
struct MonitorEntry {
  std::uint64_t rreq_t = 0;
  std::uint64_t rreq_c = 0;

  friend bool operator==(const MonitorEntry&, const MonitorEntry&) = default;
};

// Cooperation threshold: score above it means the neighbor keeps more
// requests than it passes on.
constexpr std::int64_t kTrustThreshold = 0;

class MonitoringTable {
 public:
  struct EpochRow {
    std::uint64_t epoch;
    NodeId neighbor;
    MonitorEntry entry;
  };

  explicit MonitoringTable(NodeId owner = kNoNode) : owner_(owner) {}

  NodeId owner() const { return owner_; }
  std::uint64_t epoch() const { return epoch_; }
  const std::map<NodeId, MonitorEntry>& entries() const { return entries_; }
  const std::vector<EpochRow>& history() const { return history_; }

  bool has_entry(NodeId neighbor) const { return entries_.count(neighbor) != 0; }

  MonitorEntry entry(NodeId neighbor) const {
    auto it = entries_.find(neighbor);
    return it == entries_.end() ? MonitorEntry{} : it->second;
  }

  // creates the row at zero if missing
  void ensure_entry(NodeId neighbor) { entries_[neighbor]; }

  void record_delivery(NodeId neighbor) { entries_[neighbor].rreq_t += 1; }

  void record_overheard_forward(NodeId neighbor) { entries_[neighbor].rreq_c += 1; }

  // a hop that proved itself gets credit in both columns, leaving its score alone
  void record_verified_relay(NodeId neighbor) {
    auto& e = entries_[neighbor];
    e.rreq_t += 1;
    e.rreq_c += 1;
  }

  std::int64_t trust_score(NodeId neighbor) const {
    auto e = entry(neighbor);
    return static_cast<std::int64_t>(e.rreq_t) - static_cast<std::int64_t>(e.rreq_c);
  }

  TrustLevel classify(NodeId neighbor) const {
    return trust_score(neighbor) > kTrustThreshold ? TrustLevel::Low : TrustLevel::High;
  }

  // Ends the observation cycle: rows are archived, counters restart at zero.
  void periodic_refresh() {
    for (const auto& [neighbor, e] : entries_) {
      history_.push_back(EpochRow{epoch_, neighbor, e});
    }
    for (auto& [neighbor, e] : entries_) e = MonitorEntry{};
    epoch_ += 1;
  }

 private:
  NodeId owner_;
  std::map<NodeId, MonitorEntry> entries_;
  std::uint64_t epoch_ = 0;
  std::vector<EpochRow> history_;
};

}  // namespace graywatch
