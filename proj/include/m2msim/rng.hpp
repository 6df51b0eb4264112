#pragma once

#include <cmath>
#include <cstdint>

namespace m2msim {

// Generator algorithm is pinned by name so serialized traces stay reproducible
// across releases. Any change to the sampling path must bump this string and
// the golden-trace fixtures together.
inline constexpr const char* kRngAlgorithm = "xoshiro256++/splitmix64/inv-exp/v1";

struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
};

// Blackman & Vigna's xoshiro256++; 2^256-1 period, trivially seedable from
// splitmix64 as its authors recommend.
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& w : s_) w = sm.next();
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on (0, 1]; never returns 0 so -log(u) is finite.
  double uniform01() { return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53; }

  double exponential(double rate) { return -std::log(uniform01()) / rate; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t s_[4];
};

// Substream roles within one replication. Keeping roles on separate streams
// means e.g. changing the ED arrival rate does not perturb service draws.
enum class StreamRole : std::uint64_t {
  ED_ARRIVALS = 1,
  PU_SERVICE = 2,
  ED_SERVICE = 3,
};

// Derives an independent, reproducible stream for (seed, replication, role).
// Mixing through splitmix64 twice decorrelates nearby indices.
inline Xoshiro256pp derive_stream(std::uint64_t seed, std::uint64_t replication, StreamRole role) {
  SplitMix64 sm(seed);
  std::uint64_t k = sm.next() ^ (replication * 0xA24BAED4963EE407ULL);
  SplitMix64 sm2(k);
  std::uint64_t k2 = sm2.next() ^ (static_cast<std::uint64_t>(role) * 0x9FB21C651E98DF25ULL);
  return Xoshiro256pp(SplitMix64(k2).next());
}

}  // namespace m2msim
