#pragma once

#include <cstdint>
#include <string>

namespace graywatch {

using NodeId = std::uint32_t;
using Time = std::int64_t;  // simulation clock, integer milliseconds

constexpr NodeId kNoNode = static_cast<NodeId>(-1);

struct RreqId {
  NodeId origin = kNoNode;
  std::uint32_t seq = 0;

  friend bool operator==(const RreqId&, const RreqId&) = default;
  friend auto operator<=>(const RreqId&, const RreqId&) = default;
};

inline std::string to_string(const RreqId& id) {
  return std::to_string(id.origin) + ":" + std::to_string(id.seq);
}

}  // namespace graywatch
