#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <utility>
#include <vector>

#include "graywatch/types.hpp"

namespace graywatch {

// Scheduled unit of work. Equal fire times dispatch in schedule order, which
// is what keeps two runs of the same seed byte-identical.
struct Event {
  Time fire_time = 0;
  std::uint64_t sequence = 0;
  NodeId target = kNoNode;
  std::function<void()> action;
};

class EventQueue {
 public:
  Time now() const { return now_; }
  std::size_t pending() const { return heap_.size(); }
  bool empty() const { return heap_.empty(); }

  std::uint64_t schedule(Time fire_time, NodeId target, std::function<void()> action) {
    if (fire_time < now_) throw std::logic_error("schedule into the past");
    Event ev;
    ev.fire_time = fire_time;
    ev.sequence = next_seq_++;
    ev.target = target;
    ev.action = std::move(action);
    std::uint64_t id = ev.sequence;
    heap_.push(std::move(ev));
    return id;
  }

  std::uint64_t schedule_in(Time delay, NodeId target, std::function<void()> action) {
    return schedule(now_ + delay, target, std::move(action));
  }

  // Dispatches every event with fire_time <= t_end in (time, sequence) order.
  // Handlers may schedule more work; anything landing inside the horizon runs
  // in the same call. Returns the dispatch count.
  std::size_t run_until(Time t_end) {
    if (t_end < now_) throw std::logic_error("run_until into the past");
    std::size_t dispatched = 0;
    bool any = false;
    while (!heap_.empty() && heap_.top().fire_time <= t_end) {
      Event ev = heap_.top();
      heap_.pop();
      now_ = ev.fire_time;
      any = true;
      ++dispatched;
      if (ev.action) ev.action();
    }
    if (!any) now_ = t_end;
    return dispatched;
  }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.fire_time != b.fire_time) return a.fire_time > b.fire_time;
      return a.sequence > b.sequence;
    }
  };

  Time now_ = 0;
  std::uint64_t next_seq_ = 0;
  std::priority_queue<Event, std::vector<Event>, Later> heap_;
};

}  // namespace graywatch
