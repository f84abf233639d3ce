#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace graywatch {

// Named substreams. Every consumer of randomness owns a stream keyed by
// (master seed, stream kind, entity id), so reconfiguring one node never
// shifts the draws another node sees.
enum class Stream : std::uint64_t {
  placement = 1,
  roles = 2,
  flows = 3,
  attacker = 4,   // per node
  challenge = 5,  // per probing source
  loss = 6,       // per transmitting node
  scratch = 7,
};

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// mt19937_64 engine output is pinned by the standard; distributions are not,
// so all shaping of raw draws is done by hand here.
class Rng {
 public:
  Rng(std::uint64_t seed, Stream stream, std::uint64_t entity = 0)
      : engine_(mix64(seed) ^ mix64(static_cast<std::uint64_t>(stream) * 0x9e3779b97f4a7c15ULL) ^
                mix64(entity + 0x1234567) * 0x2545F4914F6CDD1DULL) {}

  std::uint64_t next() { return engine_(); }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // uniform integer in [0, n), unbiased
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) return 0;
    std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v = next();
    while (v >= limit) v = next();
    return v % n;
  }

  bool bernoulli(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return uniform() < p;
  }

  std::vector<std::uint8_t> bytes(std::size_t count) {
    std::vector<std::uint8_t> out(count);
    for (auto& b : out) b = static_cast<std::uint8_t>(next() & 0xff);
    return out;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // k distinct picks from [0, n), order of first pick preserved
  std::vector<std::size_t> sample(std::size_t n, std::size_t k) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    shuffle(idx);
    idx.resize(k < n ? k : n);
    return idx;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace graywatch
