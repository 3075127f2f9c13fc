#pragma once

#include <bit>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "ibf/filter.hpp"
#include "ibf/hashing.hpp"
#include "ibf/params.hpp"

namespace ibf {

struct HashSuite {
  HashAlgo algorithm = HashAlgo::SHA1;
};

// d alternative footprints for one element, candidate j holding
// k_per_candidate[j] indices.
struct ETagSet {
  Bytes element;
  std::vector<Footprint> candidates;
  std::vector<std::uint32_t> k_per_candidate;
};

inline Footprint double_hash_footprint(std::uint64_t h1, std::uint64_t h2, std::uint32_t k,
                                       std::uint32_t m, std::uint64_t i_offset) {
  if (m == 0) throw std::invalid_argument("double_hash_footprint: m must be positive");
  Footprint f;
  f.reserve(k);
  for (std::uint64_t i = i_offset; i < i_offset + k; ++i)
    f.push_back(static_cast<std::uint32_t>((h1 + i * h2) % m));
  return f;
}

// g_i(x) = (h1 + i*h2) mod m for i in [base*k, base*k + k).
inline Footprint double_hash_indices(const Bytes& element, std::uint32_t k, std::uint32_t m,
                                     std::uint32_t base = 0) {
  const auto [h1, h2] = element_h1h2(element);
  return double_hash_footprint(h1, h2, k, m, std::uint64_t{base} * k);
}

// Slices the digest stream into log2(m)-bit windows, big-endian within each
// digest block; windows never straddle blocks, trailing bits of a block that
// cannot fill a window are discarded and the stream continues in the next
// counter-extended block.
inline Footprint segmented_indices(const Bytes& element, std::uint32_t k, std::uint32_t m,
                                   const HashSuite& suite) {
  if (m == 0 || !std::has_single_bit(m)) throw std::invalid_argument("segmented_indices: m must be a power of two");
  const unsigned b = static_cast<unsigned>(std::countr_zero(m));
  Footprint f;
  f.reserve(k);
  std::uint32_t counter = 0;
  while (f.size() < k) {
    const Bytes block = digest_block(suite.algorithm, element, counter++);
    const std::size_t windows = (block.size() * 8) / b;
    for (std::size_t w = 0; w < windows && f.size() < k; ++w) {
      std::uint32_t v = 0;
      for (unsigned t = 0; t < b; ++t) {
        const std::size_t bit = w * b + t;
        v = (v << 1) | ((block[bit / 8] >> (7 - (bit % 8))) & 1u);
      }
      f.push_back(v);
    }
  }
  return f;
}

// Double hashing whose bases are the first two log2(m)-bit digest windows;
// one digest computation replaces the two independent hash functions.
inline std::pair<std::uint64_t, std::uint64_t> segment_sourced_h1h2(const Bytes& element, std::uint32_t m,
                                                                    const HashSuite& suite) {
  const Footprint w = segmented_indices(element, 2, m, suite);
  return {w[0], w[1]};
}

inline Footprint segment_double_hash_indices(const Bytes& element, std::uint32_t k, std::uint32_t m,
                                             const HashSuite& suite, std::uint32_t base = 0) {
  const auto [h1, h2] = segment_sourced_h1h2(element, m, suite);
  return double_hash_footprint(h1, h2, k, m, std::uint64_t{base} * k);
}

// Candidate j draws its indices from the disjoint multiplier range starting
// at sum(k_list[0..j)), so d candidates cost the same two base digests.
inline ETagSet generate_etags(const Bytes& element, const FilterParams& params,
                              const std::vector<std::uint32_t>& k_list) {
  params.validate();
  if (k_list.size() != params.d_choices) throw std::invalid_argument("generate_etags: k_list size must equal d_choices");
  const auto [h1, h2] = element_h1h2(element);
  ETagSet set;
  set.element = element;
  set.k_per_candidate = k_list;
  set.candidates.reserve(k_list.size());
  std::uint64_t offset = 0;
  for (const std::uint32_t kj : k_list) {
    if (kj < 1 || kj > params.m_prime()) throw std::invalid_argument("generate_etags: candidate k out of range");
    set.candidates.push_back(double_hash_footprint(h1, h2, kj, params.m_prime(), offset));
    offset += kj;
  }
  return set;
}

// Uniform k across all d candidates.
inline std::vector<std::uint32_t> uniform_k_list(std::uint32_t k, std::uint32_t d) {
  return std::vector<std::uint32_t>(d, k);
}

// Candidate sizes spread over [k_min, k_min + spread): with d=8 and base 4
// this yields [4,4,5,5,6,6,7,7].
inline std::vector<std::uint32_t> distributed_k_list(std::uint32_t k_min, std::uint32_t spread, std::uint32_t d) {
  std::vector<std::uint32_t> out(d);
  for (std::uint32_t j = 0; j < d; ++j) out[j] = k_min + (j * spread) / d;
  return out;
}

// All C(k+x, k) k-subsets of k+x base positions, in lexicographic order.
inline ETagSet combination_etags(const Bytes& element, std::uint32_t k, std::uint32_t x, std::uint32_t m) {
  if (k == 0) throw std::invalid_argument("combination_etags: k must be positive");
  const std::uint32_t total = k + x;
  double count = 1.0;
  for (std::uint32_t i = 0; i < k; ++i) count = count * (total - i) / (i + 1);
  constexpr double kMaxCandidates = 65536.0;
  if (count > kMaxCandidates) throw std::length_error("combination_etags: candidate count exceeds cap");

  const Footprint base = double_hash_indices(element, total, m);
  ETagSet set;
  set.element = element;
  std::vector<std::uint32_t> pick(k);
  std::iota(pick.begin(), pick.end(), 0);
  for (;;) {
    Footprint f(k);
    for (std::uint32_t i = 0; i < k; ++i) f[i] = base[pick[i]];
    set.candidates.push_back(std::move(f));
    set.k_per_candidate.push_back(k);
    // next lexicographic k-subset of [0, total)
    std::int64_t i = k - 1;
    while (i >= 0 && pick[static_cast<std::size_t>(i)] == total - k + static_cast<std::uint32_t>(i)) --i;
    if (i < 0) break;
    ++pick[static_cast<std::size_t>(i)];
    for (std::size_t j = static_cast<std::size_t>(i) + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
  return set;
}

struct BitHistogram {
  explicit BitHistogram(std::size_t bins) : counts(bins, 0) {}

  void add(std::size_t index) {
    if (index >= counts.size()) throw std::out_of_range("BitHistogram: index out of range");
    ++counts[index];
    ++total;
  }

  void add_footprint(const Footprint& f) {
    for (const auto i : f) add(i);
  }

  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;
};

// Sample variance of per-position counts divided by the mean count
// (coefficient of dispersion; ~1 for an ideal uniform hash).
inline double bit_distribution_variance(const BitHistogram& hist) {
  if (hist.total == 0) throw std::invalid_argument("bit_distribution_variance: empty histogram");
  const std::size_t m = hist.counts.size();
  if (m < 2) throw std::invalid_argument("bit_distribution_variance: need at least two bins");
  const double mean = static_cast<double>(hist.total) / static_cast<double>(m);
  double ss = 0.0;
  for (const auto c : hist.counts) {
    const double dlt = static_cast<double>(c) - mean;
    ss += dlt * dlt;
  }
  return ss / static_cast<double>(m - 1) / mean;
}

// Pearson chi-square statistic against the uniform distribution (df = bins-1).
inline double chi_square_uniform(const BitHistogram& hist) {
  if (hist.total == 0) throw std::invalid_argument("chi_square_uniform: empty histogram");
  const double expected = static_cast<double>(hist.total) / static_cast<double>(hist.counts.size());
  double chi = 0.0;
  for (const auto c : hist.counts) {
    const double dlt = static_cast<double>(c) - expected;
    chi += dlt * dlt / expected;
  }
  return chi;
}

}  // namespace ibf
