#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ibf/bitvec.hpp"
#include "ibf/params.hpp"

namespace ibf {

using Footprint = std::vector<std::uint32_t>;

class BloomFilter {
 public:
  explicit BloomFilter(std::size_t nbits) : bits_(nbits) {
    if (nbits == 0) throw std::invalid_argument("BloomFilter: zero size");
  }

  void insert(const Footprint& fp) {
    for (const auto i : fp) bits_.set(i);
    ++inserted_;
  }

  bool query(const Footprint& fp) const {
    for (const auto i : fp)
      if (!bits_.test(i)) return false;
    return true;
  }

  double fill_factor() const { return static_cast<double>(bits_.popcount()) / static_cast<double>(bits_.size()); }

  std::size_t size() const { return bits_.size(); }
  std::size_t set_bits() const { return bits_.popcount(); }
  std::size_t inserted_count() const { return inserted_; }
  const BitVec& bits() const { return bits_; }
  BitVec& bits() { return bits_; }

  bool operator==(const BloomFilter&) const = default;

 private:
  BitVec bits_;
  std::size_t inserted_ = 0;
};

struct FprReport {
  std::size_t queries = 0;
  std::size_t positives = 0;
  double rate = 0.0;
};

inline FprReport measure_fpr(const BloomFilter& filter, const std::vector<Footprint>& non_members) {
  if (non_members.empty()) throw std::invalid_argument("measure_fpr: empty test set");
  FprReport r;
  r.queries = non_members.size();
  for (const auto& fp : non_members)
    if (filter.query(fp)) ++r.positives;
  r.rate = static_cast<double>(r.positives) / static_cast<double>(r.queries);
  return r;
}

// Wire form of one in-packet filter: fixed 8-byte header (m, k, log2(d), r as
// big-endian u16) followed by exactly m bits. The m-bit body packs the
// candidate index (MSB first), then the region flags (region 0 first), then
// the m' filter bits.
struct Envelope {
  FilterParams params;
  std::uint32_t candidate = 0;
  std::vector<bool> region_flags;
  BitVec filter{1};
};

inline Bytes encode_envelope(const FilterParams& p, std::uint32_t candidate,
                             const std::vector<bool>& region_flags, const BitVec& filter) {
  p.validate();
  if (candidate >= p.d_choices) throw std::out_of_range("encode_envelope: candidate index out of range");
  if (region_flags.size() != p.r) throw std::invalid_argument("encode_envelope: region flag count mismatch");
  if (filter.size() != p.m_prime()) throw std::invalid_argument("encode_envelope: filter size mismatch");

  const std::size_t ld = p.log2_d();
  BitVec body(p.m);
  std::size_t pos = 0;
  for (std::size_t b = 0; b < ld; ++b, ++pos)
    if ((candidate >> (ld - 1 - b)) & 1) body.set(pos);
  for (std::size_t i = 0; i < p.r; ++i, ++pos)
    if (region_flags[i]) body.set(pos);
  for (std::size_t i = 0; i < filter.size(); ++i, ++pos)
    if (filter.test(i)) body.set(pos);

  Bytes out;
  for (const std::size_t v : {std::size_t{p.m}, std::size_t{p.k}, ld, std::size_t{p.r}}) {
    if (v > 0xffff) throw std::length_error("encode_envelope: header field exceeds 16 bits");
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
  }
  const Bytes body_bytes = body.to_bytes();
  out.insert(out.end(), body_bytes.begin(), body_bytes.end());
  return out;
}

inline Envelope decode_envelope(const Bytes& wire) {
  if (wire.size() < 8) throw std::invalid_argument("decode_envelope: truncated header");
  auto u16 = [&wire](std::size_t off) {
    return (static_cast<std::size_t>(wire[off]) << 8) | wire[off + 1];
  };
  Envelope e;
  e.params.m = static_cast<std::uint32_t>(u16(0));
  e.params.k = static_cast<std::uint32_t>(u16(2));
  const std::size_t ld = u16(4);
  if (ld >= 32) throw std::invalid_argument("decode_envelope: log2(d) out of range");
  e.params.d_choices = std::uint32_t{1} << ld;
  e.params.r = static_cast<std::uint32_t>(u16(6));
  e.params.validate();

  const std::size_t body_bytes = (e.params.m + 7) / 8;
  if (wire.size() != 8 + body_bytes) throw std::invalid_argument("decode_envelope: body length mismatch");
  const BitVec body = BitVec::from_bytes(e.params.m, Bytes(wire.begin() + 8, wire.end()));

  std::size_t pos = 0;
  e.candidate = 0;
  for (std::size_t b = 0; b < ld; ++b, ++pos) e.candidate = (e.candidate << 1) | (body.test(pos) ? 1u : 0u);
  e.region_flags.assign(e.params.r, false);
  for (std::size_t i = 0; i < e.params.r; ++i, ++pos) e.region_flags[i] = body.test(pos);
  e.filter = BitVec(e.params.m_prime());
  for (std::size_t i = 0; i < e.filter.size(); ++i, ++pos)
    if (body.test(pos)) e.filter.set(i);
  return e;
}

}  // namespace ibf
