#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "graywatch/behavior.hpp"
#include "graywatch/network.hpp"

namespace graywatch {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Everything a run needs, JSON-facing. Field names match the config keys.
struct ScenarioConfig {
  std::size_t nodes = 100;
  double width = 300.0;
  double height = 300.0;
  double range = 60.0;
  double attacker_ratio = 0.0;
  bool cooperative = false;
  double attacker_data_drop = 1.0;
  double attacker_rreq_drop = 1.0;
  std::string attacker_reaction = "silent_drop";
  bool attacker_fake_replies = true;
  int flows = 6;
  Time flow_period_ms = 250;
  Time flow_start_stagger_ms = 40;
  double flow_min_dist = 0.0;
  std::uint32_t packet_size = 512;
  Time sim_time_ms = 10000;
  std::uint64_t seed = 1;
  bool defense = true;
  double link_loss = 0.0;
  Time per_hop_delay_ms = 2;
  Time rrep_wait_ms = 200;
  Time refresh_epoch_ms = 1000;
  int n_blocks = 10;
  Time block_gap_ms = 1;
  Time probe_margin_ms = 30;
  Time ack_collect_margin_ms = 10;
  Time hop_margin_ms = 20;
  Time table_margin_ms = 20;
  Time discovery_backoff_ms = 250;
  int max_discoveries = 0;
  bool intermediate_replies = false;

  ControlReaction reaction() const {
    if (attacker_reaction == "silent_drop") return ControlReaction::silent_drop;
    if (attacker_reaction == "wrong_digest") return ControlReaction::wrong_digest;
    if (attacker_reaction == "forward_no_response") return ControlReaction::forward_no_response;
    throw ConfigError("unknown attacker_reaction: " + attacker_reaction);
  }

  NetConfig net_config() const {
    NetConfig nc;
    nc.per_hop_delay_ms = per_hop_delay_ms;
    nc.link_loss = link_loss;
    nc.rrep_wait_ms = rrep_wait_ms;
    nc.refresh_epoch_ms = refresh_epoch_ms;
    nc.n_blocks = n_blocks;
    nc.block_gap_ms = block_gap_ms;
    nc.probe_margin_ms = probe_margin_ms;
    nc.ack_collect_margin_ms = ack_collect_margin_ms;
    nc.hop_margin_ms = hop_margin_ms;
    nc.table_margin_ms = table_margin_ms;
    nc.discovery_backoff_ms = discovery_backoff_ms;
    nc.max_discoveries_per_pair = max_discoveries;
    nc.defense = defense;
    nc.intermediate_replies = intermediate_replies;
    return nc;
  }
};

inline ScenarioConfig parse_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be an object");
  ScenarioConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "nodes") c.nodes = value.get<std::size_t>();
      else if (key == "width") c.width = value.get<double>();
      else if (key == "height") c.height = value.get<double>();
      else if (key == "range") c.range = value.get<double>();
      else if (key == "attacker_ratio") c.attacker_ratio = value.get<double>();
      else if (key == "cooperative") c.cooperative = value.get<bool>();
      else if (key == "attacker_data_drop") c.attacker_data_drop = value.get<double>();
      else if (key == "attacker_rreq_drop") c.attacker_rreq_drop = value.get<double>();
      else if (key == "attacker_reaction") c.attacker_reaction = value.get<std::string>();
      else if (key == "attacker_fake_replies") c.attacker_fake_replies = value.get<bool>();
      else if (key == "flows") c.flows = value.get<int>();
      else if (key == "flow_period_ms") c.flow_period_ms = value.get<Time>();
      else if (key == "flow_start_stagger_ms") c.flow_start_stagger_ms = value.get<Time>();
      else if (key == "flow_min_dist") c.flow_min_dist = value.get<double>();
      else if (key == "packet_size") c.packet_size = value.get<std::uint32_t>();
      else if (key == "sim_time_ms") c.sim_time_ms = value.get<Time>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "defense") c.defense = value.get<bool>();
      else if (key == "link_loss") c.link_loss = value.get<double>();
      else if (key == "per_hop_delay_ms") c.per_hop_delay_ms = value.get<Time>();
      else if (key == "rrep_wait_ms") c.rrep_wait_ms = value.get<Time>();
      else if (key == "refresh_epoch_ms") c.refresh_epoch_ms = value.get<Time>();
      else if (key == "n_blocks") c.n_blocks = value.get<int>();
      else if (key == "block_gap_ms") c.block_gap_ms = value.get<Time>();
      else if (key == "probe_margin_ms") c.probe_margin_ms = value.get<Time>();
      else if (key == "ack_collect_margin_ms") c.ack_collect_margin_ms = value.get<Time>();
      else if (key == "hop_margin_ms") c.hop_margin_ms = value.get<Time>();
      else if (key == "table_margin_ms") c.table_margin_ms = value.get<Time>();
      else if (key == "discovery_backoff_ms") c.discovery_backoff_ms = value.get<Time>();
      else if (key == "max_discoveries") c.max_discoveries = value.get<int>();
      else if (key == "intermediate_replies") c.intermediate_replies = value.get<bool>();
      else throw ConfigError("unknown config key: " + key);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  if (c.nodes < 2) throw ConfigError("nodes must be at least 2");
  if (c.range <= 0.0) throw ConfigError("range must be positive");
  if (c.attacker_ratio < 0.0 || c.attacker_ratio >= 1.0)
    throw ConfigError("attacker_ratio must be in [0, 1)");
  if (c.link_loss < 0.0 || c.link_loss >= 1.0) throw ConfigError("link_loss must be in [0, 1)");
  if (c.attacker_data_drop < 0.0 || c.attacker_data_drop > 1.0 || c.attacker_rreq_drop < 0.0 ||
      c.attacker_rreq_drop > 1.0)
    throw ConfigError("drop probabilities must be in [0, 1]");
  if (c.flows < 1) throw ConfigError("flows must be at least 1");
  if (c.n_blocks < 1) throw ConfigError("n_blocks must be at least 1");
  if (c.sim_time_ms <= 0) throw ConfigError("sim_time_ms must be positive");
  c.reaction();  // validates the string
  return c;
}

}  // namespace graywatch
