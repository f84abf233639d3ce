#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "graywatch/types.hpp"

namespace graywatch {

enum class Role { honest, simple_grayhole, cooperative_grayhole };

inline const char* to_string(Role r) {
  switch (r) {
    case Role::honest: return "honest";
    case Role::simple_grayhole: return "simple_grayhole";
    case Role::cooperative_grayhole: return "cooperative_grayhole";
  }
  return "?";
}

// How an attacker treats the hash-challenge traffic aimed at it.
enum class ControlReaction { silent_drop, wrong_digest, forward_no_response };

inline const char* to_string(ControlReaction r) {
  switch (r) {
    case ControlReaction::silent_drop: return "silent_drop";
    case ControlReaction::wrong_digest: return "wrong_digest";
    case ControlReaction::forward_no_response: return "forward_no_response";
  }
  return "?";
}

struct NodeBehavior {
  Role role = Role::honest;
  std::optional<NodeId> partner;  // cooperative pairs reference each other
  double data_drop_prob = 0.0;
  double rreq_drop_prob = 0.0;
  std::optional<ControlReaction> control_reaction;
  bool fast_reply = false;

  bool malicious() const { return role != Role::honest; }

  static NodeBehavior honest_node() { return NodeBehavior{}; }

  static NodeBehavior simple(double data_drop = 0.5, double rreq_drop = 0.5,
                             ControlReaction reaction = ControlReaction::silent_drop,
                             bool fake_replies = true) {
    NodeBehavior b;
    b.role = Role::simple_grayhole;
    b.data_drop_prob = data_drop;
    b.rreq_drop_prob = rreq_drop;
    b.control_reaction = reaction;
    b.fast_reply = fake_replies;
    return b;
  }

  // the partner that intercepts and drops
  static NodeBehavior cooperative_lead(NodeId partner_id, double data_drop = 1.0) {
    NodeBehavior b;
    b.role = Role::cooperative_grayhole;
    b.partner = partner_id;
    b.data_drop_prob = data_drop;
    b.rreq_drop_prob = 0.0;
    b.control_reaction = ControlReaction::forward_no_response;
    b.fast_reply = true;
    return b;
  }

  // the partner that keeps a clean record and vouches
  static NodeBehavior cooperative_backer(NodeId partner_id) {
    NodeBehavior b;
    b.role = Role::cooperative_grayhole;
    b.partner = partner_id;
    b.data_drop_prob = 0.0;
    b.rreq_drop_prob = 0.0;
    b.control_reaction = ControlReaction::forward_no_response;
    b.fast_reply = false;
    return b;
  }
};

inline void validate_behaviors(const std::vector<NodeBehavior>& behaviors) {
  for (NodeId n = 0; n < behaviors.size(); ++n) {
    const auto& b = behaviors[n];
    if (b.role == Role::honest) {
      if (b.data_drop_prob != 0.0 || b.rreq_drop_prob != 0.0 || b.control_reaction ||
          b.fast_reply || b.partner) {
        throw std::invalid_argument("honest node with attacker knobs");
      }
    }
    if (b.data_drop_prob < 0.0 || b.data_drop_prob > 1.0 || b.rreq_drop_prob < 0.0 ||
        b.rreq_drop_prob > 1.0) {
      throw std::invalid_argument("drop probability out of [0,1]");
    }
    if (b.role == Role::cooperative_grayhole) {
      if (!b.partner) throw std::invalid_argument("cooperative node without partner");
      NodeId p = *b.partner;
      if (p >= behaviors.size() || p == n) throw std::invalid_argument("bad partner id");
      const auto& pb = behaviors[p];
      if (pb.role != Role::cooperative_grayhole || !pb.partner || *pb.partner != n) {
        throw std::invalid_argument("cooperative partners must be symmetric");
      }
    }
    if (b.role == Role::simple_grayhole && b.partner) {
      throw std::invalid_argument("simple attacker with partner");
    }
  }
}

}  // namespace graywatch
