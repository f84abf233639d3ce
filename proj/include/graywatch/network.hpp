#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "graywatch/arbitration.hpp"
#include "graywatch/behavior.hpp"
#include "graywatch/event_queue.hpp"
#include "graywatch/monitoring.hpp"
#include "graywatch/packets.hpp"
#include "graywatch/pbh.hpp"
#include "graywatch/rng.hpp"
#include "graywatch/sha256.hpp"
#include "graywatch/topology.hpp"
#include "graywatch/trace.hpp"

namespace graywatch {

struct NetConfig {
  Time per_hop_delay_ms = 2;
  double link_loss = 0.0;        // per-transmission loss probability
  Time rrep_wait_ms = 200;       // reply collection window after originating a request
  Time refresh_epoch_ms = 1000;  // monitoring table refresh period
  int n_blocks = 10;             // test blocks per probe round
  Time block_gap_ms = 1;
  Time probe_margin_ms = 30;
  Time ack_collect_margin_ms = 10;
  Time hop_margin_ms = 20;
  Time table_margin_ms = 20;
  Time discovery_backoff_ms = 250;
  int max_discoveries_per_pair = 0;  // 0 = unlimited
  bool defense = true;
  bool intermediate_replies = false;
  bool trace_enabled = false;
};

struct Flow {
  std::uint32_t id = 0;
  NodeId src = kNoNode;
  NodeId dst = kNoNode;
  Time period_ms = 250;
  Time start_ms = 0;
  std::uint32_t packet_size = 512;
};

struct NetStats {
  std::uint64_t data_sent = 0;
  std::uint64_t data_delivered = 0;
  std::int64_t delay_sum_ms = 0;
  std::uint64_t rreq_tx = 0;  // delivered transmissions
  std::uint64_t rrep_tx = 0;
  std::uint64_t block_tx = 0;
  std::uint64_t ack_tx = 0;
  std::uint64_t control_tx = 0;
  std::uint64_t probes_started = 0;
  std::uint64_t sessions_started = 0;
  std::uint64_t convictions = 0;
};

class Network {
 public:
  Network(Topology topo, std::vector<NodeBehavior> behaviors, NetConfig cfg, std::uint64_t seed)
      : topo_(std::move(topo)), cfg_(cfg), seed_(seed),
        challenge_rng_(seed, Stream::challenge), loss_rng_(seed, Stream::loss) {
    if (behaviors.size() != topo_.size())
      throw std::invalid_argument("behavior list size does not match topology");
    validate_behaviors(behaviors);
    for (NodeId n = 0; n < topo_.size(); ++n) nodes_.emplace(n, NodeState{behaviors[n], MonitoringTable(n)});
  }

  Network(const Network&) = delete;
  Network& operator=(const Network&) = delete;

  void add_flow(NodeId src, NodeId dst, Time period_ms, Time start_ms, std::uint32_t size = 512) {
    if (src == dst) throw std::invalid_argument("flow endpoints must differ");
    if (node(src).behavior.role != Role::honest || node(dst).behavior.role != Role::honest)
      throw std::invalid_argument("flow endpoints must be honest");
    Flow f{next_flow_id_++, src, dst, period_ms, start_ms, size};
    flows_.push_back(f);
    ids_nodes_.insert(src);
    ids_nodes_.insert(dst);
  }

  // Runs the scenario: flow traffic plus periodic table refresh until t_end.
  void run(Time t_end) {
    for (const Flow& f : flows_) {
      std::uint32_t fid = f.id;
      queue_.schedule(f.start_ms, f.src, [this, fid, t_end] { data_tick(fid, t_end); });
    }
    if (cfg_.refresh_epoch_ms > 0 && cfg_.refresh_epoch_ms <= t_end)
      queue_.schedule(cfg_.refresh_epoch_ms, 0, [this, t_end] { refresh_tick(t_end); });
    queue_.run_until(t_end);
  }

  // Manual driver for scripted setups: originate a route request now.
  void start_discovery(NodeId src, NodeId dst) {
    ids_nodes_.insert(src);
    ids_nodes_.insert(dst);
    originate_request(src, dst);
  }

  EventQueue& queue() { return queue_; }
  const Topology& topology() const { return topo_; }
  const NetConfig& config() const { return cfg_; }

  const MonitoringTable& table(NodeId n) const { return node(n).table; }
  MonitoringTable& mutable_table(NodeId n) { return node(n).table; }
  const std::set<NodeId>& blacklist_of(NodeId n) const { return node(n).blacklist; }
  const NodeBehavior& behavior(NodeId n) const { return node(n).behavior; }
  bool is_ids(NodeId n) const { return ids_nodes_.count(n) != 0; }

  std::set<NodeId> convicted() const {
    std::set<NodeId> out;
    for (const auto& row : quarantine_log_) out.insert(row.convicted);
    return out;
  }

  // Worst observer wins: a node is Low if any table anywhere classifies it Low.
  std::map<NodeId, TrustLevel> trust_summary() const {
    std::map<NodeId, TrustLevel> out;
    for (const auto& [n, st] : nodes_) out[n] = TrustLevel::High;
    for (const auto& [obs, st] : nodes_)
      for (const auto& [peer, entry] : st.table.entries())
        if (st.table.classify(peer) == TrustLevel::Low) out[peer] = TrustLevel::Low;
    return out;
  }

  const RouteEntry* active_route(NodeId src, NodeId dst) const {
    auto it = node(src).dests.find(dst);
    if (it == node(src).dests.end() || it->second.active < 0) return nullptr;
    return &it->second.entries[static_cast<std::size_t>(it->second.active)];
  }

  const std::vector<TraceRecord>& trace() const { return trace_; }
  const std::vector<ProbeLogRow>& probe_log() const { return probe_log_; }
  const std::vector<DetectLogRow>& detect_log() const { return detect_log_; }
  const std::vector<QuarantineLogRow>& quarantine_log() const { return quarantine_log_; }
  const NetStats& stats() const { return stats_; }

  // owner,neighbor,rreq_t,rreq_c,epoch rows: archived history first, then live rows.
  std::vector<std::string> table_dump() const {
    std::vector<std::string> rows;
    rows.push_back("owner,neighbor,rreq_t,rreq_c,epoch");
    for (const auto& [n, st] : nodes_) {
      for (const auto& h : st.table.history())
        rows.push_back(std::to_string(n) + "," + std::to_string(h.neighbor) + "," +
                       std::to_string(h.entry.rreq_t) + "," + std::to_string(h.entry.rreq_c) + "," +
                       std::to_string(h.epoch));
      for (const auto& [peer, e] : st.table.entries())
        rows.push_back(std::to_string(n) + "," + std::to_string(peer) + "," +
                       std::to_string(e.rreq_t) + "," + std::to_string(e.rreq_c) + "," +
                       std::to_string(st.table.epoch()));
    }
    return rows;
  }

 private:
  struct DestState {
    bool window_open = false;
    bool busy = false;  // probe or verification in flight
    std::vector<Rrep> window;
    std::uint32_t next_seq = 0;
    int attempts = 0;
    Time backoff_until = 0;
    std::vector<RouteEntry> entries;
    int active = -1;
  };

  struct NodeState {
    NodeBehavior behavior;
    MonitoringTable table;
    std::set<RreqId> seen_rreq;
    std::map<RreqId, bool> rreq_forward_roll;
    std::set<RreqId> fast_replied;
    std::set<NodeId> blacklist;
    std::set<std::tuple<NodeId, NodeId, std::uint64_t>> blacklist_seen;
    std::map<RreqId, std::pair<std::size_t, std::size_t>> replied_rank;  // destination side
    std::map<NodeId, DestState> dests;                                   // origin side
    std::map<NodeId, std::vector<NodeId>> route_cache;  // dest -> suffix from self
    std::map<std::pair<std::uint64_t, int>, std::pair<int, bool>> probe_rx;  // dest side
    std::optional<Rng> attacker_rng;  // lazily built per node
  };

  struct ProbeSession {
    std::uint64_t id = 0;
    NodeId src = kNoNode;
    NodeId dst = kNoNode;
    std::vector<NodeId> route;
    std::size_t entry_index = 0;
    int round = 0;  // round currently awaited, 1-based
    bool round_resolved = false;
    std::optional<RouteScore> score;
    bool closed = false;
  };

  struct DetectSession {
    std::uint64_t id = 0;
    NodeId src = kNoNode;
    NodeId dst = kNoNode;
    std::vector<NodeId> route;
    std::size_t entry_index = 0;
    std::vector<std::uint8_t> challenge;
    Digest expected{};
    std::vector<bool> responded;  // index = hop position in route
    bool closed = false;
    bool arbitrating = false;
    std::size_t arb_x = 0, arb_y = 0;  // route positions
    bool x_resolved = false, y_resolved = false;
    bool x_received = false, y_received = false;
    MonitorEntry x_view_y{};
  };

  // ---- plumbing ----------------------------------------------------------

  NodeState& node(NodeId n) {
    auto it = nodes_.find(n);
    if (it == nodes_.end()) throw std::out_of_range("unknown node");
    return it->second;
  }
  const NodeState& node(NodeId n) const {
    auto it = nodes_.find(n);
    if (it == nodes_.end()) throw std::out_of_range("unknown node");
    return it->second;
  }

  Rng& attacker_rng(NodeId n) {
    NodeState& st = node(n);
    if (!st.attacker_rng) st.attacker_rng.emplace(seed_, Stream::attacker, n);
    return *st.attacker_rng;
  }

  bool transmission_lost() {
    if (cfg_.link_loss <= 0.0) return false;
    return loss_rng_.bernoulli(cfg_.link_loss);
  }

  void record(const char* type, NodeId from, NodeId to, std::string id, std::string route) {
    if (!cfg_.trace_enabled) return;
    trace_.push_back(TraceRecord{queue_.now(), type, from, to, std::move(id), std::move(route)});
  }

  static std::size_t position_of(const std::vector<NodeId>& route, NodeId n) {
    for (std::size_t i = 0; i < route.size(); ++i)
      if (route[i] == n) return i;
    throw std::logic_error("node not on route");
  }

  bool route_tainted(const NodeState& st, const std::vector<NodeId>& route) const {
    for (NodeId n : route)
      if (st.blacklist.count(n)) return true;
    return false;
  }

  // ---- traffic generation ------------------------------------------------

  void data_tick(std::uint32_t flow_id, Time t_end) {
    const Flow& f = flows_[flow_id];
    NodeState& src = node(f.src);
    DestState& ds = src.dests[f.dst];
    stats_.data_sent++;
    const RouteEntry* entry = usable_entry(ds);
    if (entry) {
      DataPacket pkt{flow_id, data_seq_[flow_id]++, entry->path, queue_.now(), f.packet_size, false};
      forward_data(f.src, pkt, 0);
    } else {
      maybe_discover(f.src, f.dst, ds);
    }
    Time next = queue_.now() + f.period_ms;
    if (next <= t_end)
      queue_.schedule(next, f.src, [this, flow_id, t_end] { data_tick(flow_id, t_end); });
  }

  const RouteEntry* usable_entry(const DestState& ds) const {
    if (ds.active < 0) return nullptr;
    const RouteEntry& e = ds.entries[static_cast<std::size_t>(ds.active)];
    return e.state == RouteState::tested_valid ? &e : nullptr;
  }

  void maybe_discover(NodeId src, NodeId dst, DestState& ds) {
    if (ds.window_open || ds.busy) return;
    if (queue_.now() < ds.backoff_until) return;
    if (cfg_.max_discoveries_per_pair > 0 && ds.attempts >= cfg_.max_discoveries_per_pair) return;
    originate_request(src, dst);
  }

  void refresh_tick(Time t_end) {
    for (auto& [n, st] : nodes_) st.table.periodic_refresh();
    Time next = queue_.now() + cfg_.refresh_epoch_ms;
    if (next <= t_end) queue_.schedule(next, 0, [this, t_end] { refresh_tick(t_end); });
  }

  // ---- route request flood -----------------------------------------------

  void originate_request(NodeId src, NodeId dst) {
    NodeState& st = node(src);
    DestState& ds = st.dests[dst];
    ds.attempts++;
    Rreq rreq{RreqId{src, ds.next_seq++}, src, dst, {src}};
    st.seen_rreq.insert(rreq.id);
    if (cfg_.defense) {
      ds.window_open = true;
      ds.window.clear();
      NodeId s = src;
      NodeId d = dst;
      queue_.schedule_in(cfg_.rrep_wait_ms, src, [this, s, d] { close_window(s, d); });
    }
    broadcast_rreq(src, rreq);
  }

  void broadcast_rreq(NodeId from, const Rreq& rreq) {
    for (NodeId nb : topo_.neighbors(from)) {
      if (transmission_lost()) continue;
      bool counted = std::find(rreq.source_route.begin(), rreq.source_route.end(), nb) ==
                     rreq.source_route.end();
      if (counted) node(from).table.record_delivery(nb);
      Rreq copy = rreq;
      queue_.schedule_in(cfg_.per_hop_delay_ms, nb,
                         [this, nb, from, copy] { on_rreq(nb, copy, from); });
    }
  }

  void on_rreq(NodeId self, const Rreq& rreq, NodeId from) {
    stats_.rreq_tx++;
    record("rreq", from, self, to_string(rreq.id), route_string(rreq.source_route));
    NodeState& st = node(self);
    if (route_tainted(st, rreq.source_route)) return;
    st.table.record_overheard_forward(from);
    if (self == rreq.destination) {
      destination_reply(self, rreq, from);
      return;
    }
    if (st.seen_rreq.count(rreq.id)) return;
    st.seen_rreq.insert(rreq.id);
    for (NodeId hop : rreq.source_route) st.table.ensure_entry(hop);

    const NodeBehavior& b = st.behavior;
    bool suppress = false;
    if (b.rreq_drop_prob > 0.0) {
      auto [it, fresh] = st.rreq_forward_roll.try_emplace(rreq.id, false);
      if (fresh) it->second = attacker_rng(self).bernoulli(b.rreq_drop_prob);
      suppress = it->second;  // sticky per request
    }
    if (!suppress) {
      bool answered = false;
      if (cfg_.intermediate_replies) {
        auto cached = st.route_cache.find(rreq.destination);
        if (cached != st.route_cache.end()) {
          std::vector<NodeId> full = rreq.source_route;
          full.insert(full.end(), cached->second.begin(), cached->second.end());
          Rrep rep{rreq.id, self, rreq.destination, std::move(full), {}};
          send_rrep_back(self, rep, from);
          answered = true;
        }
      }
      if (!answered) {
        Rreq fwd = rreq;
        fwd.source_route.push_back(self);
        broadcast_rreq(self, fwd);
      }
    }
    if (b.fast_reply && !st.fast_replied.count(rreq.id)) {
      st.fast_replied.insert(rreq.id);
      send_fake_reply(self, rreq, from);
    }
  }

  // Destination answers the first copy and any copy that improves on what it
  // last answered (fewer distrusted hops by its own table, then shorter).
  void destination_reply(NodeId self, const Rreq& rreq, NodeId from) {
    NodeState& st = node(self);
    std::size_t lows = 0;
    for (NodeId hop : rreq.source_route)
      if (hop != self && st.table.classify(hop) == TrustLevel::Low) ++lows;
    std::pair<std::size_t, std::size_t> rank{lows, rreq.source_route.size()};
    auto it = st.replied_rank.find(rreq.id);
    if (it != st.replied_rank.end() && !(rank < it->second)) return;
    st.replied_rank[rreq.id] = rank;
    std::vector<NodeId> route = rreq.source_route;
    route.push_back(self);
    Rrep rep{rreq.id, self, self, std::move(route), {}};
    send_rrep_back(self, rep, from);
  }

  void send_fake_reply(NodeId self, const Rreq& rreq, NodeId from) {
    const NodeBehavior& b = node(self).behavior;
    std::vector<NodeId> route = rreq.source_route;
    route.push_back(self);
    if (b.partner && *b.partner != rreq.destination) route.push_back(*b.partner);
    route.push_back(rreq.destination);
    // Claims to be the destination itself.
    Rrep rep{rreq.id, rreq.destination, rreq.destination, std::move(route), {}};
    send_rrep_back(self, rep, from);
  }

  void send_rrep_back(NodeId self, const Rrep& rep, NodeId prev_hop) {
    if (!topo_.adjacent(self, prev_hop)) return;
    if (transmission_lost()) return;
    Rrep copy = rep;
    queue_.schedule_in(cfg_.per_hop_delay_ms, prev_hop,
                       [this, prev_hop, self, copy] { on_rrep(prev_hop, copy, self); });
  }

  void on_rrep(NodeId self, const Rrep& rep, NodeId from) {
    stats_.rrep_tx++;
    record("rrep", from, self, to_string(rep.rreq_id), route_string(rep.route));
    NodeState& st = node(self);
    if (route_tainted(st, rep.route)) return;
    Rrep annotated = rep;
    TrustLevel lvl = is_ids(from) ? TrustLevel::High : st.table.classify(from);
    annotated.trust_annotations.push_back(lvl);
    std::size_t pos = position_of(rep.route, self);
    if (pos == 0) {
      origin_accept(self, annotated);
      return;
    }
    if (cfg_.intermediate_replies && st.behavior.role == Role::honest) {
      std::vector<NodeId> suffix(rep.route.begin() + static_cast<std::ptrdiff_t>(pos),
                                 rep.route.end());
      st.route_cache[rep.destination] = std::move(suffix);
    }
    send_rrep_back(self, annotated, rep.route[pos - 1]);
  }

  void origin_accept(NodeId self, const Rrep& rep) {
    NodeState& st = node(self);
    auto it = st.dests.find(rep.destination);
    if (it == st.dests.end()) return;  // no discovery in progress here
    DestState& ds = it->second;
    if (cfg_.defense) {
      if (!ds.window_open) return;  // late reply
      ds.window.push_back(rep);
      return;
    }
    if (usable_entry(ds)) return;  // first reply wins without the defense
    ds.entries.push_back(RouteEntry{rep.destination, rep.route, low_count(rep), RouteState::candidate});
    ds.entries.back().transition(RouteState::tested_valid);
    ds.active = static_cast<int>(ds.entries.size()) - 1;
  }

  void close_window(NodeId src, NodeId dst) {
    NodeState& st = node(src);
    DestState& ds = st.dests[dst];
    if (!ds.window_open) return;
    ds.window_open = false;
    std::vector<Rrep> usable;
    for (const Rrep& r : ds.window)
      if (!route_tainted(st, r.route)) usable.push_back(r);
    ds.window.clear();
    const Rrep* best = select_route(usable);
    if (!best) {
      ds.backoff_until = queue_.now() + cfg_.discovery_backoff_ms;
      return;
    }
    ds.entries.push_back(RouteEntry{dst, best->route, low_count(*best), RouteState::candidate});
    ds.active = static_cast<int>(ds.entries.size()) - 1;
    start_probe(src, dst, static_cast<std::size_t>(ds.active));
  }

  // ---- data plane ----------------------------------------------------------

  void forward_data(NodeId self, const DataPacket& pkt, std::size_t pos) {
    NodeId next = pkt.route[pos + 1];
    if (node(self).blacklist.count(next)) return;  // never hand data to a quarantined hop
    if (pos > 0) {  // relays may misbehave; the source trusts its own packet
      const NodeBehavior& b = node(self).behavior;
      if (b.data_drop_prob > 0.0 && attacker_rng(self).bernoulli(b.data_drop_prob)) return;
    }
    if (!topo_.adjacent(self, next)) return;  // forged routes may claim links that do not exist
    if (transmission_lost()) return;
    DataPacket copy = pkt;
    queue_.schedule_in(cfg_.per_hop_delay_ms, next,
                       [this, next, self, copy] { on_data(next, copy, self); });
  }

  void on_data(NodeId self, const DataPacket& pkt, NodeId from) {
    record("data", from, self,
           std::to_string(pkt.flow) + ":" + std::to_string(pkt.seq), route_string(pkt.route));
    std::size_t pos = position_of(pkt.route, self);
    if (pos + 1 == pkt.route.size()) {
      stats_.data_delivered++;
      stats_.delay_sum_ms += queue_.now() - pkt.sent_at;
      return;
    }
    forward_data(self, pkt, pos);
  }

  // ---- phase two: route testing -------------------------------------------

  void start_probe(NodeId src, NodeId dst, std::size_t entry_index) {
    NodeState& st = node(src);
    DestState& ds = st.dests[dst];
    ds.busy = true;
    std::uint64_t id = next_probe_id_++;
    ProbeSession ps;
    ps.id = id;
    ps.src = src;
    ps.dst = dst;
    ps.route = ds.entries[entry_index].path;
    ps.entry_index = entry_index;
    probes_.emplace(id, std::move(ps));
    stats_.probes_started++;
    send_probe_round(id, 1);
  }

  void send_probe_round(std::uint64_t id, int round) {
    auto it = probes_.find(id);
    if (it == probes_.end() || it->second.closed) return;
    ProbeSession& ps = it->second;
    ps.round = round;
    ps.round_resolved = false;
    const auto& route = ps.route;
    Time edges = static_cast<Time>(route.size()) - 1;
    for (int i = 0; i < cfg_.n_blocks; ++i) {
      TestBlock blk{id, round, i, cfg_.n_blocks, route};
      queue_.schedule_in(static_cast<Time>(i) * cfg_.block_gap_ms, ps.src,
                         [this, blk] { forward_block(blk.route[0], blk, 0); });
    }
    Time deadline = 2 * edges * cfg_.per_hop_delay_ms +
                    static_cast<Time>(cfg_.n_blocks) * cfg_.block_gap_ms + cfg_.probe_margin_ms;
    queue_.schedule_in(deadline, ps.src, [this, id, round] { probe_timeout(id, round); });
  }

  void forward_block(NodeId self, const TestBlock& blk, std::size_t pos) {
    NodeId next = blk.route[pos + 1];
    if (node(self).blacklist.count(next)) return;
    if (pos > 0) {
      const NodeBehavior& b = node(self).behavior;
      if (b.data_drop_prob > 0.0 && attacker_rng(self).bernoulli(b.data_drop_prob)) return;
    }
    if (!topo_.adjacent(self, next)) return;
    if (transmission_lost()) return;
    TestBlock copy = blk;
    queue_.schedule_in(cfg_.per_hop_delay_ms, next,
                       [this, next, self, copy] { on_block(next, copy, self); });
  }

  void on_block(NodeId self, const TestBlock& blk, NodeId from) {
    stats_.block_tx++;
    record("block", from, self,
           std::to_string(blk.probe_id) + ":" + std::to_string(blk.round) + ":" +
               std::to_string(blk.index),
           route_string(blk.route));
    std::size_t pos = position_of(blk.route, self);
    if (pos + 1 < blk.route.size()) {
      forward_block(self, blk, pos);
      return;
    }
    // Destination tallies the round and schedules one ack per round.
    NodeState& st = node(self);
    auto key = std::make_pair(blk.probe_id, blk.round);
    auto& [count, ack_scheduled] = st.probe_rx[key];
    count++;
    if (!ack_scheduled) {
      ack_scheduled = true;
      Time wait = static_cast<Time>(blk.n_blocks - 1) * cfg_.block_gap_ms + cfg_.ack_collect_margin_ms;
      NodeId dst = self;
      TestBlock probe = blk;
      queue_.schedule_in(wait, self, [this, dst, probe] {
        int received = node(dst).probe_rx[{probe.probe_id, probe.round}].first;
        ProbeAck ack{probe.probe_id, probe.round, received, probe.route};
        forward_ack(dst, ack, probe.route.size() - 1);
      });
    }
  }

  void forward_ack(NodeId self, const ProbeAck& ack, std::size_t pos) {
    if (pos == 0) return;
    NodeId next = ack.route[pos - 1];
    if (node(self).blacklist.count(next)) return;
    std::size_t last = ack.route.size() - 1;
    if (pos != last) {  // transit relays may drop acknowledgements like any data
      const NodeBehavior& b = node(self).behavior;
      if (b.data_drop_prob > 0.0 && attacker_rng(self).bernoulli(b.data_drop_prob)) return;
    }
    if (!topo_.adjacent(self, next)) return;
    if (transmission_lost()) return;
    ProbeAck copy = ack;
    queue_.schedule_in(cfg_.per_hop_delay_ms, next,
                       [this, next, self, copy] { on_ack(next, copy, self); });
  }

  void on_ack(NodeId self, const ProbeAck& ack, NodeId from) {
    stats_.ack_tx++;
    record("ack", from, self,
           std::to_string(ack.probe_id) + ":" + std::to_string(ack.round), route_string(ack.route));
    std::size_t pos = position_of(ack.route, self);
    if (pos > 0) {
      forward_ack(self, ack, pos);
      return;
    }
    auto it = probes_.find(ack.probe_id);
    if (it == probes_.end()) return;
    ProbeSession& ps = it->second;
    if (ps.closed || ps.round != ack.round || ps.round_resolved) return;
    settle_probe_round(ps, ack.received);
  }

  void probe_timeout(std::uint64_t id, int round) {
    auto it = probes_.find(id);
    if (it == probes_.end()) return;
    ProbeSession& ps = it->second;
    if (ps.closed || ps.round != round || ps.round_resolved) return;
    settle_probe_round(ps, -1);
  }

  void settle_probe_round(ProbeSession& ps, int ack_blocks) {
    ps.round_resolved = true;
    bool ok = ack_blocks == cfg_.n_blocks;
    if (ps.round == 1)
      ps.score = RouteScore::initialize(ok);
    else
      ps.score->update(ok);
    probe_log_.push_back(ProbeLogRow{queue_.now(), ps.id, route_string(ps.route), ps.round,
                                     ack_blocks, ps.score->p_bh(), to_string(ps.score->verdict())});
    if (!ps.score->complete()) {
      send_probe_round(ps.id, ps.round + 1);
      return;
    }
    ps.closed = true;
    NodeState& st = node(ps.src);
    DestState& ds = st.dests[ps.dst];
    RouteEntry& entry = ds.entries[ps.entry_index];
    if (ps.score->verdict() == RouteVerdict::valid) {
      if (entry.state == RouteState::candidate) entry.transition(RouteState::tested_valid);
      ds.busy = false;
      return;
    }
    if (entry.state == RouteState::candidate) entry.transition(RouteState::infected);
    start_detection(ps.src, ps.dst, ps.route, ps.entry_index);
  }

  // ---- phase three: malicious node discovery --------------------------------

  void start_detection(NodeId src, NodeId dst, std::vector<NodeId> route, std::size_t entry_index) {
    std::uint64_t id = next_session_id_++;
    DetectSession s;
    s.id = id;
    s.src = src;
    s.dst = dst;
    s.route = std::move(route);
    s.entry_index = entry_index;
    s.challenge = challenge_rng_.bytes(16);
    s.expected = sha256(s.challenge);
    s.responded.assign(s.route.size(), false);
    std::size_t hops = s.route.size() - 1;
    sessions_.emplace(id, std::move(s));
    stats_.sessions_started++;
    DetectSession& ses = sessions_.at(id);
    detect_log_.push_back(DetectLogRow{queue_.now(), id, route_string(ses.route), "start", "",
                                       hex_bytes(ses.challenge)});
    ControlPacket first{id, src, ses.route.size() > 2 ? ses.route[2] : kNoNode, 1,
                        ses.challenge, ses.route};
    send_control(src, first, ses.route[1]);
    for (std::size_t k = 1; k <= hops; ++k) {
      Time deadline = 2 * static_cast<Time>(k) * cfg_.per_hop_delay_ms + cfg_.hop_margin_ms;
      queue_.schedule_in(deadline, src, [this, id, k] { hop_timeout(id, k); });
    }
  }

  static std::string hex_bytes(const std::vector<std::uint8_t>& v) {
    static const char* d = "0123456789abcdef";
    std::string out;
    for (std::uint8_t b : v) {
      out.push_back(d[b >> 4]);
      out.push_back(d[b & 0xf]);
    }
    return out;
  }

  void send_control(NodeId self, const ControlPacket& cp, NodeId to) {
    if (!topo_.adjacent(self, to)) return;
    if (transmission_lost()) return;
    ControlPacket copy = cp;
    queue_.schedule_in(cfg_.per_hop_delay_ms, to,
                       [this, to, self, copy] { on_control(to, copy, self); });
  }

  void on_control(NodeId self, const ControlPacket& cp, NodeId from) {
    stats_.control_tx++;
    record("ctrl", from, self,
           std::to_string(cp.session) + ":" + std::to_string(cp.hop_index),
           route_string(cp.route));
    NodeState& st = node(self);
    auto reaction = st.behavior.control_reaction;
    if (reaction && *reaction == ControlReaction::silent_drop) return;
    Digest digest = sha256(cp.challenge);
    if (reaction && *reaction == ControlReaction::wrong_digest) digest[0] ^= 0xff;
    HopResponse resp{cp.session, self, cp.hop_index, digest, cp.route};
    relay_response(self, resp, cp.hop_index);
    std::size_t next_pos = static_cast<std::size_t>(cp.hop_index) + 1;
    if (next_pos < cp.route.size()) {
      ControlPacket fwd{cp.session, self,
                        next_pos + 1 < cp.route.size() ? cp.route[next_pos + 1] : kNoNode,
                        static_cast<std::uint32_t>(next_pos), cp.challenge, cp.route};
      send_control(self, fwd, cp.route[next_pos]);
    }
  }

  void relay_response(NodeId self, const HopResponse& resp, std::size_t pos) {
    if (pos == 0) return;
    NodeId next = resp.route[pos - 1];
    if (!topo_.adjacent(self, next)) return;
    if (transmission_lost()) return;
    HopResponse copy = resp;
    queue_.schedule_in(cfg_.per_hop_delay_ms, next,
                       [this, next, self, copy] { on_response(next, copy, self); });
  }

  void on_response(NodeId self, const HopResponse& resp, NodeId from) {
    record("resp", from, self,
           std::to_string(resp.session) + ":" + std::to_string(resp.hop_index),
           route_string(resp.route));
    std::size_t pos = position_of(resp.route, self);
    if (pos > 0) {
      const NodeBehavior& b = node(self).behavior;
      if (b.control_reaction &&
          (*b.control_reaction == ControlReaction::silent_drop ||
           *b.control_reaction == ControlReaction::forward_no_response))
        return;  // transit hash responses die here
      relay_response(self, resp, pos);
      return;
    }
    auto it = sessions_.find(resp.session);
    if (it == sessions_.end()) return;
    DetectSession& s = it->second;
    if (s.closed || s.arbitrating) return;
    std::size_t h = resp.hop_index;
    if (h >= s.route.size() || s.responded[h]) return;
    if (resp.digest != s.expected) {
      detect_log_.push_back(DetectLogRow{queue_.now(), s.id, route_string(s.route),
                                         "hop_bad_digest", std::to_string(s.route[h]), ""});
      conclude(s, s.route[h], "forged hash output");
      return;
    }
    s.responded[h] = true;
    node(s.src).table.record_verified_relay(s.route[h]);
    detect_log_.push_back(DetectLogRow{queue_.now(), s.id, route_string(s.route), "hop_ok",
                                       std::to_string(s.route[h]), ""});
    if (h + 1 == s.route.size()) {
      detect_log_.push_back(
          DetectLogRow{queue_.now(), s.id, route_string(s.route), "clean", "", ""});
      close_session(s, true);
    }
  }

  void hop_timeout(std::uint64_t id, std::size_t k) {
    auto it = sessions_.find(id);
    if (it == sessions_.end()) return;
    DetectSession& s = it->second;
    if (s.closed || s.arbitrating || s.responded[k]) return;
    detect_log_.push_back(DetectLogRow{queue_.now(), s.id, route_string(s.route), "hop_timeout",
                                       std::to_string(s.route[k]), ""});
    begin_arbitration(s, k);
  }

  // Timeout at hop k: decide between the silent node and its predecessor by
  // fetching both monitoring tables.
  void begin_arbitration(DetectSession& s, std::size_t k) {
    s.arbitrating = true;
    s.arb_x = k - 1;
    s.arb_y = k;
    NodeId x = s.route[s.arb_x];
    NodeId y = s.route[s.arb_y];
    if (x == s.src) {
      s.x_resolved = true;
      s.x_received = true;
      s.x_view_y = node(s.src).table.entry(y);
    } else {
      request_table(s, x, s.arb_x, true);
    }
    request_table(s, y, s.arb_y, false);
  }

  void request_table(DetectSession& s, NodeId subject, std::size_t subject_pos, bool is_x) {
    std::vector<NodeId> path(s.route.begin(),
                             s.route.begin() + static_cast<std::ptrdiff_t>(subject_pos) + 1);
    TableRequest req{s.id, subject, path};
    if (path.size() >= 2) send_table_request(s.src, req, path[1]);
    Time deadline = 2 * static_cast<Time>(subject_pos) * cfg_.per_hop_delay_ms + cfg_.table_margin_ms;
    std::uint64_t id = s.id;
    queue_.schedule_in(deadline, s.src, [this, id, is_x] { table_timeout(id, is_x); });
  }

  void send_table_request(NodeId self, const TableRequest& req, NodeId to) {
    if (!topo_.adjacent(self, to)) return;
    if (transmission_lost()) return;
    TableRequest copy = req;
    queue_.schedule_in(cfg_.per_hop_delay_ms, to,
                       [this, to, self, copy] { on_table_request(to, copy, self); });
  }

  void on_table_request(NodeId self, const TableRequest& req, NodeId from) {
    stats_.control_tx++;
    record("treq", from, self,
           std::to_string(req.session) + ":" + std::to_string(req.subject),
           route_string(req.path));
    NodeState& st = node(self);
    if (st.behavior.control_reaction &&
        *st.behavior.control_reaction == ControlReaction::silent_drop)
      return;  // refusal; the absence itself is evidence
    std::size_t pos = position_of(req.path, self);
    if (self != req.subject) {
      if (pos + 1 < req.path.size()) send_table_request(self, req, req.path[pos + 1]);
      return;
    }
    TableReply rep{req.session, self, {}, req.path};
    for (const auto& [peer, e] : st.table.entries()) rep.rows.emplace_back(peer, e);
    send_table_reply(self, rep, req.path[pos - 1]);
  }

  void send_table_reply(NodeId self, const TableReply& rep, NodeId to) {
    if (!topo_.adjacent(self, to)) return;
    if (transmission_lost()) return;
    TableReply copy = rep;
    queue_.schedule_in(cfg_.per_hop_delay_ms, to,
                       [this, to, self, copy] { on_table_reply(to, copy, self); });
  }

  void on_table_reply(NodeId self, const TableReply& rep, NodeId from) {
    record("trep", from, self,
           std::to_string(rep.session) + ":" + std::to_string(rep.subject),
           route_string(rep.path));
    std::size_t pos = position_of(rep.path, self);
    if (pos > 0) {
      const NodeBehavior& b = node(self).behavior;
      if (b.control_reaction && *b.control_reaction == ControlReaction::silent_drop) return;
      send_table_reply(self, rep, rep.path[pos - 1]);
      return;
    }
    auto it = sessions_.find(rep.session);
    if (it == sessions_.end()) return;
    DetectSession& s = it->second;
    if (s.closed || !s.arbitrating) return;
    if (rep.subject == s.route[s.arb_x] && !s.x_resolved) {
      s.x_resolved = true;
      s.x_received = true;
      NodeId y = s.route[s.arb_y];
      for (const auto& [peer, e] : rep.rows)
        if (peer == y) s.x_view_y = e;
    } else if (rep.subject == s.route[s.arb_y] && !s.y_resolved) {
      s.y_resolved = true;
      s.y_received = true;
    } else {
      return;
    }
    maybe_arbitrate(s);
  }

  void table_timeout(std::uint64_t id, bool is_x) {
    auto it = sessions_.find(id);
    if (it == sessions_.end()) return;
    DetectSession& s = it->second;
    if (s.closed || !s.arbitrating) return;
    if (is_x && !s.x_resolved) {
      s.x_resolved = true;
      detect_log_.push_back(DetectLogRow{queue_.now(), s.id, route_string(s.route),
                                         "table_refused", std::to_string(s.route[s.arb_x]), ""});
    } else if (!is_x && !s.y_resolved) {
      s.y_resolved = true;
      detect_log_.push_back(DetectLogRow{queue_.now(), s.id, route_string(s.route),
                                         "table_refused", std::to_string(s.route[s.arb_y]), ""});
    }
    maybe_arbitrate(s);
  }

  void maybe_arbitrate(DetectSession& s) {
    if (!s.x_resolved || !s.y_resolved) return;
    NodeId x = s.route[s.arb_x];
    NodeId y = s.route[s.arb_y];
    ArbEvidence ev;
    ev.x_table_received = s.x_received;
    ev.y_table_received = s.y_received;
    ev.x_view_of_y = s.x_view_y;
    ev.x_is_trusted = is_ids(x);
    ev.y_is_trusted = is_ids(y);
    ArbDecision d = arbitrate(ev);
    detect_log_.push_back(DetectLogRow{queue_.now(), s.id, route_string(s.route), "arbitrate",
                                       to_string(d.reason), ""});
    switch (d.verdict) {
      case ArbVerdict::upstream:
        conclude(s, x, to_string(d.reason));
        break;
      case ArbVerdict::downstream:
        conclude(s, y, to_string(d.reason));
        break;
      case ArbVerdict::none:
        close_session(s, true);
        break;
    }
  }

  void conclude(DetectSession& s, NodeId culprit, const std::string& why) {
    if (is_ids(culprit)) {  // endpoints are never convicted
      close_session(s, true);
      return;
    }
    detect_log_.push_back(DetectLogRow{queue_.now(), s.id, route_string(s.route), "verdict",
                                       std::to_string(culprit) + " " + why, ""});
    stats_.convictions++;
    quarantine(s.src, culprit, s.id);
    close_session(s, false);
  }

  // Closing with purge releases the flow to rediscover a fresh route.
  void close_session(DetectSession& s, bool purge_entry) {
    s.closed = true;
    NodeState& st = node(s.src);
    DestState& ds = st.dests[s.dst];
    if (purge_entry && s.entry_index < ds.entries.size()) {
      RouteEntry& e = ds.entries[s.entry_index];
      if (e.state != RouteState::purged) e.transition(RouteState::purged);
      if (ds.active == static_cast<int>(s.entry_index)) ds.active = -1;
    }
    ds.busy = false;
  }

  // ---- phase four: quarantine ----------------------------------------------

  void quarantine(NodeId issuer, NodeId convicted, std::uint64_t session) {
    quarantine_log_.push_back(QuarantineLogRow{queue_.now(), issuer, convicted, session});
    BlacklistMsg msg{issuer, convicted, session};
    apply_blacklist(issuer, msg);
    broadcast_blacklist(issuer, msg);
  }

  void apply_blacklist(NodeId self, const BlacklistMsg& msg) {
    NodeState& st = node(self);
    st.blacklist.insert(msg.convicted);
    for (auto& [dst, ds] : st.dests) {
      for (std::size_t i = 0; i < ds.entries.size(); ++i) {
        RouteEntry& e = ds.entries[i];
        if (e.state == RouteState::purged) continue;
        if (std::find(e.path.begin(), e.path.end(), msg.convicted) == e.path.end()) continue;
        if (e.state == RouteState::candidate) e.transition(RouteState::infected);
        e.transition(RouteState::purged);
        if (ds.active == static_cast<int>(i)) ds.active = -1;
      }
    }
    // Any in-flight verification over a now-tainted route is abandoned.
    for (auto& [id, ps] : probes_) {
      if (ps.closed || ps.src != self) continue;
      if (std::find(ps.route.begin(), ps.route.end(), msg.convicted) == ps.route.end()) continue;
      ps.closed = true;
      st.dests[ps.dst].busy = false;
    }
    for (auto& [id, s] : sessions_) {
      if (s.closed || s.src != self) continue;
      if (std::find(s.route.begin(), s.route.end(), msg.convicted) == s.route.end()) continue;
      if (s.id == msg.session) continue;
      s.closed = true;
      st.dests[s.dst].busy = false;
    }
  }

  void broadcast_blacklist(NodeId from, const BlacklistMsg& msg) {
    for (NodeId nb : topo_.neighbors(from)) {
      if (transmission_lost()) continue;
      BlacklistMsg copy = msg;
      queue_.schedule_in(cfg_.per_hop_delay_ms, nb,
                         [this, nb, from, copy] { on_blacklist(nb, copy, from); });
    }
  }

  void on_blacklist(NodeId self, const BlacklistMsg& msg, NodeId from) {
    record("bl", from, self,
           std::to_string(msg.issuer) + ">" + std::to_string(msg.convicted),
           std::to_string(msg.session));
    NodeState& st = node(self);
    if (msg.convicted == self) return;  // the accused does not spread its own notice
    auto key = std::make_tuple(msg.issuer, msg.convicted, msg.session);
    if (st.blacklist_seen.count(key)) return;
    st.blacklist_seen.insert(key);
    apply_blacklist(self, msg);
    broadcast_blacklist(self, msg);
  }

  // ---- members ---------------------------------------------------------------

  Topology topo_;
  NetConfig cfg_;
  std::uint64_t seed_;
  EventQueue queue_;
  Rng challenge_rng_;
  Rng loss_rng_;
  std::map<NodeId, NodeState> nodes_;
  std::vector<Flow> flows_;
  std::map<std::uint32_t, std::uint64_t> data_seq_;
  std::set<NodeId> ids_nodes_;
  std::map<std::uint64_t, ProbeSession> probes_;
  std::map<std::uint64_t, DetectSession> sessions_;
  std::uint32_t next_flow_id_ = 0;
  std::uint64_t next_probe_id_ = 1;
  std::uint64_t next_session_id_ = 1;
  std::vector<TraceRecord> trace_;
  std::vector<ProbeLogRow> probe_log_;
  std::vector<DetectLogRow> detect_log_;
  std::vector<QuarantineLogRow> quarantine_log_;
  NetStats stats_;
};

}  // namespace graywatch
