#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string>

#include "ibf/hashing.hpp"

namespace ibf {

// xoshiro256** seeded through splitmix64 so any 64-bit seed gives a full,
// well-mixed state.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Unbiased uniform draw in [0, bound) by rejection.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = (*this)();
      if (r >= threshold) return r % bound;
    }
  }

  double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  static std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::array<std::uint64_t, 4> state_{};
};

// Deterministic per-task seed: hashing the label decouples trial streams from
// each other and from the master seed's raw value.
inline std::uint64_t derive_seed(std::uint64_t master, const std::string& label) {
  Bytes msg;
  msg.reserve(8 + label.size());
  for (int i = 7; i >= 0; --i) msg.push_back(static_cast<std::uint8_t>(master >> (8 * i)));
  msg.insert(msg.end(), label.begin(), label.end());
  const Bytes d = crypto_digest(HashAlgo::SHA256, msg);
  return be64_window(d, 0);
}

}  // namespace ibf
