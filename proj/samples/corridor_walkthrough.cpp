// Walks one scripted scenario through all four defense phases and prints what
// each phase saw: the monitoring tables, the failed probes, the hash-challenge
// session, and the final quarantine.

#include <cstdio>
#include <vector>

#include "graywatch/graywatch.hpp"

using namespace graywatch;

int main() {
  // Nine nodes. The source (5) reaches the destination (7) only along the
  // x axis, and the last relay before the destination is a gray hole: it
  // swallows requests and payloads and answers with a forged reply.
  std::vector<Vec2> pos = {
      {120, 0},   // 0: gray hole
      {0, 40},    {-40, 0}, {0, -40},
      {80, 0},    // 4: observer next to the gray hole
      {0, 0},     // 5: source
      {-40, 40},
      {160, 0},   // 7: destination
      {40, 0},    // 8
  };
  std::vector<NodeBehavior> behaviors(9, NodeBehavior::honest_node());
  behaviors[0] = NodeBehavior::simple(1.0, 1.0, ControlReaction::silent_drop, true);

  NetConfig cfg;
  cfg.refresh_epoch_ms = 100000;  // keep one epoch for the printout
  Network net(Topology(std::move(pos), 50.0), behaviors, cfg, 7);

  net.start_discovery(5, 7);
  net.queue().run_until(2000);

  std::printf("== monitoring table at the observer (node 4)\n");
  std::printf("neighbor  sent_to  heard_from  verdict\n");
  for (const auto& [peer, e] : net.table(4).entries()) {
    std::printf("%8u  %7llu  %10llu  %s\n", peer,
                static_cast<unsigned long long>(e.rreq_t),
                static_cast<unsigned long long>(e.rreq_c),
                net.table(4).classify(peer) == TrustLevel::Low ? "Low" : "High");
  }

  std::printf("\n== network-wide trust summary (worst case over observers)\n");
  for (const auto& [n, lvl] : net.trust_summary())
    std::printf("node %u: %s\n", n, lvl == TrustLevel::Low ? "Low" : "High");

  std::printf("\n== probe rounds on the chosen route\n");
  std::printf("time,probe,route,round,ack_blocks,p_bh,verdict\n");
  for (const auto& row : net.probe_log()) std::printf("%s\n", to_line(row).c_str());

  std::printf("\n== hash-challenge session\n");
  std::printf("time,session,route,event,detail,challenge\n");
  for (const auto& row : net.detect_log()) std::printf("%s\n", to_line(row).c_str());

  std::printf("\n== quarantine notices\n");
  std::printf("time,issuer,convicted,session\n");
  for (const auto& row : net.quarantine_log()) std::printf("%s\n", to_line(row).c_str());

  std::printf("\nconvicted:");
  for (NodeId n : net.convicted()) std::printf(" %u", n);
  std::printf("\n");
  return 0;
}
