#pragma once

#include <cmath>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "graywatch/config.hpp"
#include "graywatch/metrics.hpp"
#include "graywatch/network.hpp"

namespace graywatch {

struct RunReport {
  double ratio = 0.0;
  std::uint64_t seed = 0;
  ConfusionMatrix cm;
  double fpr = 0.0;
  double fnr = 0.0;
  double dr = 0.0;
  std::optional<double> pdr;
  std::optional<double> avg_delay_ms;
  std::set<NodeId> convicted;
  std::set<NodeId> malicious;
  NetStats stats;
};

inline std::string report_header() { return "ratio,seed,fpr,fnr,dr,pdr,avg_delay_ms"; }

inline std::string report_row(const RunReport& r) {
  return format3(r.ratio) + "," + std::to_string(r.seed) + "," + format3(r.fpr) + "," +
         format3(r.fnr) + "," + format3(r.dr) + "," + format3(r.pdr) + "," +
         format3(r.avg_delay_ms);
}

// A constructed but not yet executed run.
struct ScenarioRun {
  std::unique_ptr<Network> net;
  GroundTruth truth;
  std::vector<std::pair<NodeId, NodeId>> flow_pairs;
};

inline Topology place_connected(const ScenarioConfig& cfg, Rng& rng) {
  for (int attempt = 0; attempt < 500; ++attempt) {
    Topology t = Topology::uniform(cfg.nodes, cfg.width, cfg.height, cfg.range, rng);
    if (t.connected()) return t;
  }
  throw std::runtime_error("could not place a connected topology; grow range or shrink the area");
}

inline ScenarioRun build_scenario(const ScenarioConfig& cfg, bool trace = false) {
  Rng placement_rng(cfg.seed, Stream::placement);
  Topology topo = place_connected(cfg, placement_rng);

  // Flow endpoints come first and are all distinct; attackers are then drawn
  // from the remaining nodes, so endpoints are honest by construction.
  Rng flow_rng(cfg.seed, Stream::flows);
  std::set<NodeId> endpoints;
  std::vector<std::pair<NodeId, NodeId>> pairs;
  std::size_t n = cfg.nodes;
  if (2 * static_cast<std::size_t>(cfg.flows) > n)
    throw std::runtime_error("not enough nodes for the requested flows");
  for (int f = 0; f < cfg.flows; ++f) {
    NodeId a = kNoNode, b = kNoNode;
    for (int tries = 0; tries < 2000; ++tries) {
      NodeId ca = static_cast<NodeId>(flow_rng.below(n));
      NodeId cb = static_cast<NodeId>(flow_rng.below(n));
      if (ca == cb || endpoints.count(ca) || endpoints.count(cb)) continue;
      bool far_enough = distance(topo.position(ca), topo.position(cb)) >= cfg.flow_min_dist;
      if (!far_enough && tries < 1500) continue;  // relax the spacing wish before giving up
      a = ca;
      b = cb;
      break;
    }
    if (a == kNoNode) throw std::runtime_error("could not sample flow endpoints");
    endpoints.insert(a);
    endpoints.insert(b);
    pairs.emplace_back(a, b);
  }

  std::size_t m = static_cast<std::size_t>(std::llround(cfg.attacker_ratio * static_cast<double>(n)));
  std::vector<NodeId> pool;
  for (NodeId i = 0; i < n; ++i)
    if (!endpoints.count(i)) pool.push_back(i);
  if (m > pool.size()) throw std::runtime_error("attacker ratio leaves no honest relays");

  std::vector<NodeBehavior> behaviors(n, NodeBehavior::honest_node());
  std::set<NodeId> malicious;
  Rng role_rng(cfg.seed, Stream::roles);
  std::vector<NodeId> order = pool;
  role_rng.shuffle(order);
  if (!cfg.cooperative) {
    for (std::size_t i = 0; i < m; ++i) {
      behaviors[order[i]] = NodeBehavior::simple(cfg.attacker_data_drop, cfg.attacker_rreq_drop,
                                                 cfg.reaction(), cfg.attacker_fake_replies);
      malicious.insert(order[i]);
    }
  } else {
    // Pair each lead with an adjacent accomplice when one is available.
    std::size_t next = 0;
    while (malicious.size() < m && next < order.size()) {
      NodeId lead = order[next++];
      if (malicious.count(lead)) continue;
      NodeId backer = kNoNode;
      if (malicious.size() + 1 < m) {
        std::vector<NodeId> cands;
        for (NodeId nb : topo.neighbors(lead))
          if (!endpoints.count(nb) && !malicious.count(nb) && nb != lead) cands.push_back(nb);
        if (!cands.empty()) backer = cands[role_rng.below(cands.size())];
      }
      if (backer == kNoNode) {
        behaviors[lead] = NodeBehavior::simple(cfg.attacker_data_drop, cfg.attacker_rreq_drop,
                                               cfg.reaction(), cfg.attacker_fake_replies);
        malicious.insert(lead);
      } else {
        behaviors[lead] = NodeBehavior::cooperative_lead(backer, cfg.attacker_data_drop);
        behaviors[backer] = NodeBehavior::cooperative_backer(lead);
        malicious.insert(lead);
        malicious.insert(backer);
      }
    }
    if (malicious.size() < m)
      throw std::runtime_error("could not seat the requested attacker count");
  }

  NetConfig nc = cfg.net_config();
  nc.trace_enabled = trace;
  ScenarioRun run;
  run.net = std::make_unique<Network>(std::move(topo), std::move(behaviors), nc, cfg.seed);
  for (std::size_t i = 0; i < pairs.size(); ++i)
    run.net->add_flow(pairs[i].first, pairs[i].second, cfg.flow_period_ms,
                      static_cast<Time>(i) * cfg.flow_start_stagger_ms, cfg.packet_size);
  run.truth.malicious = std::move(malicious);
  run.truth.exempt = std::move(endpoints);
  run.flow_pairs = std::move(pairs);
  return run;
}

inline RunReport score_run(const ScenarioConfig& cfg, const Network& net,
                           const GroundTruth& truth) {
  RunReport rep;
  rep.ratio = cfg.attacker_ratio;
  rep.seed = cfg.seed;
  rep.convicted = net.convicted();
  rep.malicious = truth.malicious;
  rep.cm = score_nodes(cfg.nodes, truth, rep.convicted);
  rep.dr = detection_rate(rep.cm);
  rep.fnr = false_negative_rate(rep.cm);
  rep.fpr = false_positive_rate(rep.cm);
  TrafficStats t{net.stats().data_sent, net.stats().data_delivered, net.stats().delay_sum_ms};
  rep.pdr = packet_delivery_ratio(t);
  rep.avg_delay_ms = average_delay_ms(t);
  rep.stats = net.stats();
  return rep;
}

inline RunReport run_scenario(const ScenarioConfig& cfg) {
  ScenarioRun run = build_scenario(cfg);
  run.net->run(cfg.sim_time_ms);
  return score_run(cfg, *run.net, run.truth);
}

}  // namespace graywatch
