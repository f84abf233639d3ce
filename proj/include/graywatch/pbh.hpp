#pragma once

#include <cstdint>
#include <stdexcept>

namespace graywatch {

enum class RouteVerdict { pending, valid, infected };

inline const char* to_string(RouteVerdict v) {
  switch (v) {
    case RouteVerdict::pending: return "pending";
    case RouteVerdict::valid: return "valid";
    case RouteVerdict::infected: return "infected";
  }
  return "?";
}

// Per-route blackhole likelihood score. One initialization round fixes the
// score at 0 (complete ack) or 100 (missing or short ack); two update rounds
// then move it by -50 (floored at 0) or +20. Scores at or above 50 after the
// full schedule mark the route infected.
class RouteScore {
 public:
  static constexpr int kRounds = 3;
  static constexpr std::int64_t kInitBad = 100;
  static constexpr std::int64_t kPassStep = 50;
  static constexpr std::int64_t kFailStep = 20;
  static constexpr std::int64_t kInfected = 50;

  static RouteScore initialize(bool first_round_ok) {
    RouteScore s;
    s.p_bh_ = first_round_ok ? 0 : kInitBad;
    s.rounds_done_ = 1;
    return s;
  }

  void update(bool round_ok) {
    if (rounds_done_ < 1) throw std::logic_error("update before initialization");
    if (rounds_done_ >= kRounds) throw std::logic_error("update after verdict");
    if (round_ok) {
      p_bh_ -= kPassStep;
      if (p_bh_ < 0) p_bh_ = 0;
    } else {
      p_bh_ += kFailStep;
    }
    rounds_done_ += 1;
  }

  std::int64_t p_bh() const { return p_bh_; }
  int rounds_done() const { return rounds_done_; }
  bool complete() const { return rounds_done_ == kRounds; }

  RouteVerdict verdict() const {
    if (!complete()) return RouteVerdict::pending;
    return p_bh_ >= kInfected ? RouteVerdict::infected : RouteVerdict::valid;
  }

 private:
  std::int64_t p_bh_ = 0;
  int rounds_done_ = 0;
};

}  // namespace graywatch
