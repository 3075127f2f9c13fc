#include <gtest/gtest.h>

#include <stdexcept>

#include "ibf/naming.hpp"

using ibf::BitHistogram;
using ibf::bit_distribution_variance;
using ibf::Bytes;
using ibf::chi_square_uniform;
using ibf::combination_etags;
using ibf::distributed_k_list;
using ibf::double_hash_footprint;
using ibf::double_hash_indices;
using ibf::element_h1h2;
using ibf::ETagSet;
using ibf::FilterParams;
using ibf::Footprint;
using ibf::generate_etags;
using ibf::HashAlgo;
using ibf::HashSuite;
using ibf::segment_double_hash_indices;
using ibf::segment_sourced_h1h2;
using ibf::segmented_indices;
using ibf::uniform_k_list;

namespace {

Bytes bytes_of(const char* s) { return Bytes(s, s + std::char_traits<char>::length(s)); }

TEST(DoubleHash, ArithmeticProgression) {
  EXPECT_EQ(double_hash_footprint(3, 5, 3, 16, 0), (Footprint{3, 8, 13}));
  EXPECT_EQ(double_hash_footprint(3, 5, 3, 16, 6), (Footprint{1, 6, 11}));
  EXPECT_THROW(double_hash_footprint(3, 5, 3, 0, 0), std::invalid_argument);
}

// h1 is the leading 64 bits of SHA1, h2 of MD5, both big-endian; for "abc"
// those digests start a9993e364706816a... and 900150983cd24fb0..., so mod 256
// the progression starts at 0x6a with step 0xb0.
TEST(DoubleHash, PinnedDigestBases) {
  const Bytes abc = bytes_of("abc");
  EXPECT_EQ(double_hash_indices(abc, 3, 256), (Footprint{106, 26, 202}));
  const auto [h1, h2] = element_h1h2(abc);
  EXPECT_EQ(h1, 0xa9993e364706816aULL);
  EXPECT_EQ(h2, 0x900150983cd24fb0ULL);
}

TEST(DoubleHash, BaseOffsetsAreDisjointRanges) {
  const Bytes e = bytes_of("element");
  const auto [h1, h2] = element_h1h2(e);
  EXPECT_EQ(double_hash_indices(e, 5, 256, 0), double_hash_footprint(h1, h2, 5, 256, 0));
  EXPECT_EQ(double_hash_indices(e, 5, 256, 2), double_hash_footprint(h1, h2, 5, 256, 10));
  EXPECT_EQ(double_hash_indices(e, 5, 256, 0), double_hash_indices(e, 5, 256, 0));
}

// crc32("123456789") = 0xcbf43926; with 8-bit windows the first block yields
// its bytes directly, with 4-bit windows its nibbles.
TEST(Segmented, PinnedCrc32Windows) {
  const Bytes probe = bytes_of("123456789");
  const HashSuite crc{HashAlgo::CRC32};
  EXPECT_EQ(segmented_indices(probe, 4, 256, crc), (Footprint{0xCB, 0xF4, 0x39, 0x26}));
  EXPECT_EQ(segmented_indices(probe, 4, 16, crc), (Footprint{0xC, 0xB, 0xF, 0x4}));
}

TEST(Segmented, CounterExtensionKeepsProducingWindows) {
  const Bytes probe = bytes_of("123456789");
  const HashSuite crc{HashAlgo::CRC32};
  const Footprint f = segmented_indices(probe, 6, 256, crc);
  ASSERT_EQ(f.size(), 6u);
  // Windows 4 and 5 come from the next counter-extended block.
  const Bytes block1 = ibf::digest_block(HashAlgo::CRC32, probe, 1);
  EXPECT_EQ(f[4], block1[0]);
  EXPECT_EQ(f[5], block1[1]);
  EXPECT_EQ(segmented_indices(probe, 6, 256, crc), f);
}

TEST(Segmented, PinnedSha1Windows) {
  // sha1("abc") = a9993e36...
  const Footprint f = segmented_indices(bytes_of("abc"), 3, 256, HashSuite{HashAlgo::SHA1});
  EXPECT_EQ(f, (Footprint{0xa9, 0x99, 0x3e}));
}

TEST(Segmented, RequiresPowerOfTwoWidth) {
  EXPECT_THROW(segmented_indices(bytes_of("x"), 2, 100, HashSuite{}), std::invalid_argument);
  EXPECT_THROW(segmented_indices(bytes_of("x"), 2, 0, HashSuite{}), std::invalid_argument);
}

TEST(SegmentSourced, ReusesLeadingWindowsAsBases) {
  const Bytes probe = bytes_of("123456789");
  const HashSuite crc{HashAlgo::CRC32};
  const auto [h1, h2] = segment_sourced_h1h2(probe, 256, crc);
  EXPECT_EQ(h1, 0xCBu);
  EXPECT_EQ(h2, 0xF4u);
  EXPECT_EQ(segment_double_hash_indices(probe, 3, 256, crc), (Footprint{203, 191, 179}));
}

TEST(KLists, UniformAndDistributed) {
  EXPECT_EQ(uniform_k_list(5, 3), (std::vector<std::uint32_t>{5, 5, 5}));
  EXPECT_EQ(distributed_k_list(4, 4, 8), (std::vector<std::uint32_t>{4, 4, 5, 5, 6, 6, 7, 7}));
  EXPECT_EQ(distributed_k_list(4, 0, 4), uniform_k_list(4, 4));
}

TEST(GenerateEtags, SingleCandidateMatchesPlainNaming) {
  const Bytes e = bytes_of("element");
  const FilterParams p{256, 5, 1, 0};
  const ETagSet set = generate_etags(e, p, uniform_k_list(5, 1));
  ASSERT_EQ(set.candidates.size(), 1u);
  EXPECT_EQ(set.candidates[0], double_hash_indices(e, 5, 256));
}

TEST(GenerateEtags, UniformCandidatesWalkDisjointOffsets) {
  const Bytes e = bytes_of("element");
  const FilterParams p{256, 5, 16, 0};  // m_prime = 252
  const ETagSet set = generate_etags(e, p, uniform_k_list(5, 16));
  ASSERT_EQ(set.candidates.size(), 16u);
  for (std::uint32_t j = 0; j < 16; ++j) {
    EXPECT_EQ(set.candidates[j], double_hash_indices(e, 5, p.m_prime(), j));
    for (const auto i : set.candidates[j]) EXPECT_LT(i, p.m_prime());
  }
  EXPECT_EQ(set.k_per_candidate, uniform_k_list(5, 16));
}

TEST(GenerateEtags, MixedSizesAccumulateOffsets) {
  const Bytes e = bytes_of("element");
  const FilterParams p{256, 4, 4, 0};
  const std::vector<std::uint32_t> ks{4, 5, 6, 7};
  const ETagSet set = generate_etags(e, p, ks);
  const auto [h1, h2] = element_h1h2(e);
  EXPECT_EQ(set.candidates[0], double_hash_footprint(h1, h2, 4, p.m_prime(), 0));
  EXPECT_EQ(set.candidates[1], double_hash_footprint(h1, h2, 5, p.m_prime(), 4));
  EXPECT_EQ(set.candidates[2], double_hash_footprint(h1, h2, 6, p.m_prime(), 9));
  EXPECT_EQ(set.candidates[3], double_hash_footprint(h1, h2, 7, p.m_prime(), 15));
}

TEST(GenerateEtags, ValidatesKList) {
  const Bytes e = bytes_of("element");
  const FilterParams p{256, 5, 16, 0};
  EXPECT_THROW(generate_etags(e, p, uniform_k_list(5, 8)), std::invalid_argument);
  EXPECT_THROW(generate_etags(e, p, std::vector<std::uint32_t>(16, 0)), std::invalid_argument);
}

TEST(CombinationEtags, EnumeratesSubsetsLexicographically) {
  const Bytes e = bytes_of("element");
  const Footprint base = double_hash_indices(e, 4, 256);
  const ETagSet set = combination_etags(e, 2, 2, 256);
  ASSERT_EQ(set.candidates.size(), 6u);  // C(4,2)
  EXPECT_EQ(set.candidates[0], (Footprint{base[0], base[1]}));
  EXPECT_EQ(set.candidates[1], (Footprint{base[0], base[2]}));
  EXPECT_EQ(set.candidates[2], (Footprint{base[0], base[3]}));
  EXPECT_EQ(set.candidates[3], (Footprint{base[1], base[2]}));
  EXPECT_EQ(set.candidates[4], (Footprint{base[1], base[3]}));
  EXPECT_EQ(set.candidates[5], (Footprint{base[2], base[3]}));
  EXPECT_EQ(set.k_per_candidate, uniform_k_list(2, 6));
}

TEST(CombinationEtags, DegenerateAndCappedShapes) {
  const Bytes e = bytes_of("element");
  EXPECT_EQ(combination_etags(e, 5, 0, 256).candidates.size(), 1u);
  EXPECT_EQ(combination_etags(e, 5, 1, 256).candidates.size(), 6u);
  EXPECT_THROW(combination_etags(e, 0, 2, 256), std::invalid_argument);
  EXPECT_THROW(combination_etags(e, 10, 10, 256), std::length_error);  // C(20,10) = 184756
}

TEST(BitHistogram, AccumulatesAndValidates) {
  BitHistogram h(4);
  h.add_footprint({0, 1, 1, 3});
  EXPECT_EQ(h.total, 4u);
  EXPECT_EQ(h.counts[1], 2u);
  EXPECT_THROW(h.add(4), std::out_of_range);
}

TEST(BitDistributionVariance, DispersionOfCounts) {
  BitHistogram h(2);
  h.add(0);
  h.add(0);
  EXPECT_DOUBLE_EQ(bit_distribution_variance(h), 2.0);

  BitHistogram uniform(4);
  for (std::size_t i = 0; i < 4; ++i) uniform.add(i);
  EXPECT_DOUBLE_EQ(bit_distribution_variance(uniform), 0.0);

  EXPECT_THROW(bit_distribution_variance(BitHistogram(4)), std::invalid_argument);
  BitHistogram one(1);
  one.add(0);
  EXPECT_THROW(bit_distribution_variance(one), std::invalid_argument);
}

TEST(ChiSquareUniform, MatchesHandComputation) {
  BitHistogram h(2);
  h.add(0);
  h.add(0);
  h.add(0);
  h.add(1);
  EXPECT_DOUBLE_EQ(chi_square_uniform(h), 1.0);  // (3-2)^2/2 + (1-2)^2/2

  BitHistogram uniform(4);
  for (std::size_t i = 0; i < 4; ++i) uniform.add(i);
  EXPECT_DOUBLE_EQ(chi_square_uniform(uniform), 0.0);
  EXPECT_THROW(chi_square_uniform(BitHistogram(4)), std::invalid_argument);
}

}  // namespace
