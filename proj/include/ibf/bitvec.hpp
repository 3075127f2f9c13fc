#pragma once

#include <bit>
#include <cstdint>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ibf {

using Bytes = std::vector<std::uint8_t>;

// Fixed-size bit array. Bit 0 is the least significant bit of word 0, which
// is also the canonical serialization order (bit i -> byte i/8, bit i%8).
class BitVec {
 public:
  BitVec() = default;
  explicit BitVec(std::size_t nbits) : nbits_(nbits), words_((nbits + 63) / 64, 0) {}

  std::size_t size() const { return nbits_; }

  bool test(std::size_t i) const {
    check(i);
    return (words_[i >> 6] >> (i & 63)) & 1u;
  }

  void set(std::size_t i) {
    check(i);
    words_[i >> 6] |= (std::uint64_t{1} << (i & 63));
  }

  void reset(std::size_t i) {
    check(i);
    words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63));
  }

  std::size_t popcount() const {
    std::size_t total = 0;
    for (std::uint64_t w : words_) total += static_cast<std::size_t>(std::popcount(w));
    return total;
  }

  void clear() {
    for (auto& w : words_) w = 0;
  }

  bool operator==(const BitVec& o) const = default;

  const std::vector<std::uint64_t>& words() const { return words_; }

  BitVec operator^(const BitVec& o) const {
    if (nbits_ != o.nbits_) throw std::invalid_argument("BitVec xor: size mismatch");
    BitVec out(nbits_);
    for (std::size_t i = 0; i < words_.size(); ++i) out.words_[i] = words_[i] ^ o.words_[i];
    return out;
  }

  std::size_t hamming(const BitVec& o) const {
    if (nbits_ != o.nbits_) throw std::invalid_argument("BitVec hamming: size mismatch");
    std::size_t total = 0;
    for (std::size_t i = 0; i < words_.size(); ++i)
      total += static_cast<std::size_t>(std::popcount(words_[i] ^ o.words_[i]));
    return total;
  }

  std::vector<std::uint8_t> to_bytes() const {
    std::vector<std::uint8_t> out((nbits_ + 7) / 8, 0);
    for (std::size_t i = 0; i < out.size(); ++i) {
      std::size_t word = i >> 3, shift = (i & 7) * 8;
      if (word < words_.size()) out[i] = static_cast<std::uint8_t>(words_[word] >> shift);
    }
    return out;
  }

  static BitVec from_bytes(std::size_t nbits, const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < (nbits + 7) / 8) throw std::invalid_argument("BitVec: short byte buffer");
    BitVec v(nbits);
    for (std::size_t i = 0; i < nbits; ++i)
      if ((bytes[i >> 3] >> (i & 7)) & 1) v.set(i);
    return v;
  }

 private:
  void check(std::size_t i) const {
    if (i >= nbits_) throw std::out_of_range("BitVec: bit index out of range");
  }

  std::size_t nbits_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace ibf
