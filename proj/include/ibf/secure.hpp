#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "ibf/bitvec.hpp"
#include "ibf/estimates.hpp"
#include "ibf/filter.hpp"
#include "ibf/hashing.hpp"
#include "ibf/rng.hpp"

namespace ibf {

// Full-width m-bit element name and per-packet invariant; the secure
// construction works on whole bit vectors, not k-index footprints.
using ElementNameK = BitVec;
using PacketId = BitVec;

inline ElementNameK element_name_k(const Bytes& element, std::uint32_t m) {
  return digest_to_bits(HashAlgo::SHA256, element, m);
}

inline PacketId packet_id_from(const Bytes& invariant, std::uint32_t m) {
  return digest_to_bits(HashAlgo::SHA256, invariant, m);
}

inline PacketId random_packet_id(Rng& rng, std::uint32_t m) {
  BitVec v(m);
  for (std::uint32_t i = 0; i < m; ++i)
    if (rng() & 1u) v.set(i);
  return v;
}

namespace detail {

// Folds the mixed vector O into k indices: k segments of ceil(m/k) bits,
// each segment read as c = ceil(m/(k*b)) rows of b = log2(m) bits (rows use
// BitVec order, so for b = 8 a row is one byte); incomplete rows wrap to the
// segment's leading bits, segments past the end of O wrap mod m. The XOR of
// a segment's rows, rotated left by d mod b, is that segment's index.
inline Footprint fold_indices(const BitVec& mixed, std::uint32_t d, std::uint32_t m, std::uint32_t k) {
  const unsigned b = static_cast<unsigned>(std::countr_zero(m));
  const std::uint32_t seg_bits = (m + k - 1) / k;
  const std::uint32_t rows = (m + k * b - 1) / (k * b);
  const std::uint32_t shift = d % b;

  Footprint f;
  f.reserve(k);
  for (std::uint32_t j = 0; j < k; ++j) {
    const std::uint32_t seg_start = j * seg_bits;
    std::uint32_t index = 0;
    for (std::uint32_t t = 0; t < rows; ++t) {
      std::uint32_t row = 0;
      for (unsigned u = 0; u < b; ++u) {
        const std::uint32_t p = (t * b + u) % seg_bits;
        if (mixed.test((seg_start + p) % m)) row |= (1u << u);
      }
      index ^= row;
    }
    if (shift != 0) index = ((index << shift) | (index >> (b - shift))) & (m - 1);
    f.push_back(index);
  }
  return f;
}

inline void check_secure_args(const BitVec& K, const BitVec& I, std::uint32_t m, std::uint32_t k) {
  if (m < 2 || !std::has_single_bit(m)) throw std::invalid_argument("secure_indices: m must be a power of two");
  if (k < 1) throw std::invalid_argument("secure_indices: k must be positive");
  if (K.size() != m || I.size() != m) throw std::invalid_argument("secure_indices: K and I must be m bits");
}

}  // namespace detail

inline Footprint secure_indices(const ElementNameK& K, const PacketId& I, std::uint32_t d, std::uint32_t m,
                                std::uint32_t k) {
  detail::check_secure_args(K, I, m, k);
  return detail::fold_indices(K ^ I, d, m, k);
}

// Epoch-indexed shared secrets: S_i is a keyed digest of the epoch number,
// counter-extended to m bits. Verifiers accept epochs i and i-1 only.
struct SecretSchedule {
  Bytes seed;
  std::uint64_t epoch_seconds = 60;
  std::uint64_t start_epoch = 0;

  std::uint64_t epoch_for_time(std::uint64_t unix_seconds) const {
    if (epoch_seconds == 0) throw std::invalid_argument("SecretSchedule: epoch length must be positive");
    return unix_seconds / epoch_seconds;
  }

  BitVec secret(std::uint64_t epoch, std::uint32_t m) const {
    if (epoch < start_epoch) throw std::invalid_argument("SecretSchedule: epoch before schedule start");
    Bytes msg;
    for (int i = 7; i >= 0; --i) msg.push_back(static_cast<std::uint8_t>(epoch >> (8 * i)));
    Bytes stream;
    std::uint32_t counter = 0;
    while (stream.size() * 8 < m) {
      const Bytes block = counter == 0 ? hmac_sha256(seed, msg) : hmac_sha256(seed, with_counter(msg, counter));
      stream.insert(stream.end(), block.begin(), block.end());
      ++counter;
    }
    return BitVec::from_bytes(m, stream);
  }

  bool accepts(std::uint64_t verifier_epoch, std::uint64_t filter_epoch) const {
    return filter_epoch == verifier_epoch || filter_epoch + 1 == verifier_epoch;
  }
};

inline Footprint keyed_secure_indices(const ElementNameK& K, const PacketId& I, const SecretSchedule& schedule,
                                      std::uint64_t epoch, std::uint32_t d, std::uint32_t m, std::uint32_t k) {
  detail::check_secure_args(K, I, m, k);
  return detail::fold_indices(K ^ I ^ schedule.secret(epoch, m), d, m, k);
}

inline double density_threshold(std::uint32_t k, std::uint32_t n_max, std::uint32_t m) {
  if (m == 0) throw std::invalid_argument("density_threshold: m must be positive");
  return static_cast<double>(k) * static_cast<double>(n_max) / static_cast<double>(m);
}

// True iff the filter respects the anti-forgery fill cap k*n_max/m; the
// matching guessing bound is density_threshold^k.
inline bool density_check(const BloomFilter& filter, std::uint32_t k, std::uint32_t n_max) {
  return filter.fill_factor() <= density_threshold(k, n_max, static_cast<std::uint32_t>(filter.size()));
}

// One secure packet build: the filter, the packet invariant, and the first
// element's mixed vector O = K ^ I kept as the per-packet randomness sample.
struct SecureBuild {
  BloomFilter filter{1};
  PacketId packet_id{1};
  BitVec mixed_sample{1};
};

inline SecureBuild build_secure_filter(const std::vector<ElementNameK>& names, const PacketId& I,
                                       std::uint32_t d, std::uint32_t m, std::uint32_t k) {
  if (names.empty()) throw std::invalid_argument("build_secure_filter: need at least one element");
  SecureBuild out;
  out.filter = BloomFilter(m);
  out.packet_id = I;
  out.mixed_sample = names[0] ^ I;
  for (const auto& K : names) out.filter.insert(secure_indices(K, I, d, m, k));
  return out;
}

struct RandomnessReport {
  double hamming_mixed_mean = 0.0;
  double hamming_mixed_stddev = 0.0;
  double hamming_filter_mean = 0.0;
  double hamming_filter_stddev = 0.0;
  double bits_set_mean = 0.0;
  double correlation_factor = 0.0;
};

namespace detail {

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
};

inline MeanSd mean_sd(const std::vector<double>& xs) {
  MeanSd out;
  if (xs.empty()) return out;
  out.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  if (xs.size() < 2) return out;
  double ss = 0.0;
  for (const double x : xs) ss += (x - out.mean) * (x - out.mean);
  out.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  return out;
}

}  // namespace detail

// Pairwise Hamming statistics over the per-packet mixed vectors and over the
// filters themselves, mean filter population, and the correlation factor:
// the share of the n*k most frequently set positions that the plain filter
// also has set.
inline RandomnessReport randomness_report(const std::vector<SecureBuild>& builds, const BloomFilter& plain,
                                          std::uint32_t n, std::uint32_t k) {
  if (builds.size() < 2) throw std::invalid_argument("randomness_report: need at least two builds");
  const std::size_t m = builds[0].filter.size();
  for (const auto& b : builds)
    if (b.filter.size() != m || b.mixed_sample.size() != m)
      throw std::invalid_argument("randomness_report: size mismatch across builds");
  if (plain.size() != m) throw std::invalid_argument("randomness_report: plain filter size mismatch");

  std::vector<double> hd_mixed, hd_filter;
  hd_mixed.reserve(builds.size() * (builds.size() - 1) / 2);
  hd_filter.reserve(hd_mixed.capacity());
  for (std::size_t a = 0; a < builds.size(); ++a)
    for (std::size_t b = a + 1; b < builds.size(); ++b) {
      hd_mixed.push_back(static_cast<double>(builds[a].mixed_sample.hamming(builds[b].mixed_sample)));
      hd_filter.push_back(static_cast<double>(builds[a].filter.bits().hamming(builds[b].filter.bits())));
    }

  std::vector<double> pops;
  pops.reserve(builds.size());
  std::vector<std::uint64_t> counts(m, 0);
  for (const auto& b : builds) {
    pops.push_back(static_cast<double>(b.filter.set_bits()));
    for (std::size_t i = 0; i < m; ++i)
      if (b.filter.bits().test(i)) ++counts[i];
  }

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&counts](std::size_t a, std::size_t b) { return counts[a] > counts[b]; });
  const std::size_t top = std::min<std::size_t>(static_cast<std::size_t>(n) * k, m);
  std::size_t overlap = 0;
  for (std::size_t i = 0; i < top; ++i)
    if (plain.bits().test(order[i])) ++overlap;

  RandomnessReport rep;
  const auto mx = detail::mean_sd(hd_mixed);
  const auto fl = detail::mean_sd(hd_filter);
  rep.hamming_mixed_mean = mx.mean;
  rep.hamming_mixed_stddev = mx.sd;
  rep.hamming_filter_mean = fl.mean;
  rep.hamming_filter_stddev = fl.sd;
  rep.bits_set_mean = detail::mean_sd(pops).mean;
  rep.correlation_factor = top == 0 ? 0.0 : static_cast<double>(overlap) / static_cast<double>(top);
  return rep;
}

// Per-element membership check of a packet's filter under its PacketId; the
// keyed variant accepts the verifier's epoch or the one before it.
inline std::vector<bool> verify_elements(const BloomFilter& filter, const std::vector<Bytes>& elements,
                                         const PacketId& I, std::uint32_t d, std::uint32_t k) {
  const auto m = static_cast<std::uint32_t>(filter.size());
  std::vector<bool> out;
  out.reserve(elements.size());
  for (const auto& e : elements)
    out.push_back(filter.query(secure_indices(element_name_k(e, m), I, d, m, k)));
  return out;
}

inline std::vector<bool> verify_elements_keyed(const BloomFilter& filter, const std::vector<Bytes>& elements,
                                               const PacketId& I, const SecretSchedule& schedule,
                                               std::uint64_t verifier_epoch, std::uint32_t d, std::uint32_t k) {
  const auto m = static_cast<std::uint32_t>(filter.size());
  std::vector<std::uint64_t> epochs{verifier_epoch};
  if (verifier_epoch > schedule.start_epoch) epochs.push_back(verifier_epoch - 1);
  std::vector<bool> out;
  out.reserve(elements.size());
  for (const auto& e : elements) {
    const ElementNameK K = element_name_k(e, m);
    bool ok = false;
    for (const auto epoch : epochs)
      if (filter.query(keyed_secure_indices(K, I, schedule, epoch, d, m, k))) {
        ok = true;
        break;
      }
    out.push_back(ok);
  }
  return out;
}

}  // namespace ibf
