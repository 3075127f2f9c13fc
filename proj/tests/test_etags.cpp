#include <gtest/gtest.h>

#include <set>
#include <stdexcept>
#include <vector>

#include "ibf/etags.hpp"

using ibf::BloomFilter;
using ibf::build_candidates;
using ibf::Bytes;
using ibf::CandidateSet;
using ibf::double_hash_indices;
using ibf::ETagSet;
using ibf::expected_set_bits_moments;
using ibf::FilterParams;
using ibf::fpb_estimate;
using ibf::generate_etags;
using ibf::min_fill_expectation;
using ibf::predicted_fp_after_choice;
using ibf::select;
using ibf::SelectionPolicy;
using ibf::uniform_k_list;

namespace {

Bytes bytes_of(const char* s) { return Bytes(s, s + std::char_traits<char>::length(s)); }

TEST(BuildCandidates, SingleCandidateEqualsPlainConstruction) {
  const FilterParams p{256, 5, 1, 0};
  const std::vector<Bytes> elements{bytes_of("alpha"), bytes_of("beta")};
  std::vector<ETagSet> etags;
  for (const auto& e : elements) etags.push_back(generate_etags(e, p, uniform_k_list(5, 1)));

  const CandidateSet cands = build_candidates(etags, p);
  ASSERT_EQ(cands.filters.size(), 1u);

  BloomFilter plain(256);
  for (const auto& e : elements) plain.insert(double_hash_indices(e, 5, 256));
  EXPECT_EQ(cands.filters[0], plain);
}

TEST(BuildCandidates, UnionsFootprintsPerCandidate) {
  const FilterParams p{256, 5, 4, 0};
  const std::vector<Bytes> elements{bytes_of("alpha"), bytes_of("beta"), bytes_of("gamma")};
  std::vector<ETagSet> etags;
  for (const auto& e : elements) etags.push_back(generate_etags(e, p, uniform_k_list(5, 4)));

  const CandidateSet cands = build_candidates(etags, p);
  ASSERT_EQ(cands.filters.size(), 4u);
  for (std::size_t j = 0; j < 4; ++j) {
    std::set<std::uint32_t> expected;
    for (const auto& e : etags) {
      EXPECT_TRUE(cands.filters[j].query(e.candidates[j]));
      expected.insert(e.candidates[j].begin(), e.candidates[j].end());
    }
    EXPECT_EQ(cands.filters[j].set_bits(), expected.size());
    EXPECT_EQ(cands.filters[j].inserted_count(), elements.size());
  }
  EXPECT_EQ(cands.k_list, uniform_k_list(5, 4));
  EXPECT_FALSE(cands.chosen.has_value());
}

TEST(BuildCandidates, RejectsMismatchedShapes) {
  const FilterParams p{256, 5, 4, 0};
  ETagSet narrow = generate_etags(bytes_of("alpha"), FilterParams{256, 5, 2, 0}, uniform_k_list(5, 2));
  EXPECT_THROW(build_candidates({narrow}, p), std::invalid_argument);

  ETagSet a = generate_etags(bytes_of("alpha"), p, uniform_k_list(5, 4));
  ETagSet b = generate_etags(bytes_of("beta"), p, std::vector<std::uint32_t>{4, 5, 6, 7});
  EXPECT_THROW(build_candidates({a, b}, p), std::invalid_argument);
}

CandidateSet two_filters_with_fills(std::size_t bits0, std::size_t bits1) {
  CandidateSet cs;
  cs.params = FilterParams{256, 5, 2, 0};
  cs.k_list = uniform_k_list(5, 2);
  cs.filters.push_back(BloomFilter(255));
  cs.filters.push_back(BloomFilter(255));
  ibf::Footprint f0, f1;
  for (std::uint32_t i = 0; i < bits0; ++i) f0.push_back(i);
  for (std::uint32_t i = 0; i < bits1; ++i) f1.push_back(i);
  if (!f0.empty()) cs.filters[0].insert(f0);
  if (!f1.empty()) cs.filters[1].insert(f1);
  return cs;
}

TEST(Select, FillPolicyPicksEmptiestCandidate) {
  const CandidateSet cs = two_filters_with_fills(128, 100);
  EXPECT_EQ(select(cs, SelectionPolicy{}), 1u);
  const CandidateSet tied = two_filters_with_fills(100, 100);
  EXPECT_EQ(select(tied, SelectionPolicy{}), 0u);  // ties go to the lowest index
}

TEST(Select, FillPolicyWeighsPerCandidateK) {
  // Equal fills but candidate 1 probes five bits to candidate 0's one, so its
  // estimated rate is fill^5 and it wins.
  CandidateSet cs = two_filters_with_fills(128, 128);
  cs.k_list = {1, 5};
  EXPECT_EQ(select(cs, SelectionPolicy{}), 1u);
}

TEST(Select, TrainingPolicyCountsObservedPositives) {
  CandidateSet cs = two_filters_with_fills(255, 0);  // candidate 0 fires on everything
  const FilterParams shape{256, 5, 2, 0};
  std::vector<ETagSet> training;
  for (const char* w : {"query-a", "query-b", "query-c"})
    training.push_back(generate_etags(bytes_of(w), shape, uniform_k_list(5, 2)));

  SelectionPolicy policy;
  policy.kind = SelectionPolicy::Kind::Fpr;
  policy.training = &training;
  EXPECT_EQ(select(cs, policy), 1u);

  policy.training = nullptr;
  EXPECT_THROW(select(cs, policy), std::invalid_argument);
  const std::vector<ETagSet> empty;
  policy.training = &empty;
  EXPECT_THROW(select(cs, policy), std::invalid_argument);
}

TEST(Select, AvoidancePolicyDodgesForbiddenHits) {
  CandidateSet cs = two_filters_with_fills(255, 0);
  const FilterParams shape{256, 5, 2, 0};
  std::vector<ETagSet> forbidden{generate_etags(bytes_of("forbidden"), shape, uniform_k_list(5, 2))};

  SelectionPolicy policy;
  policy.kind = SelectionPolicy::Kind::Avoidance;
  policy.forbidden = &forbidden;
  EXPECT_EQ(select(cs, policy), 1u);

  policy.forbidden = nullptr;
  EXPECT_THROW(select(cs, policy), std::invalid_argument);
}

TEST(Select, RejectsEmptyCandidateSet) {
  CandidateSet cs;
  EXPECT_THROW(select(cs, SelectionPolicy{}), std::invalid_argument);
}

// Moment references were computed independently and frozen.
TEST(SetBitsMoments, MatchesFrozenReferences) {
  const auto mom = expected_set_bits_moments(256, 24, 5);
  EXPECT_NEAR(mom.mean, 95.94627726935639, 1e-9);
  EXPECT_NEAR(mom.variance, 12.939190832290478, 1e-9);
}

TEST(SetBitsMoments, ExactForSingleDraw) {
  // One draw sets exactly one bit, so the count is deterministic.
  const auto mom = expected_set_bits_moments(256, 1, 1);
  EXPECT_DOUBLE_EQ(mom.mean, 1.0);
  EXPECT_DOUBLE_EQ(mom.variance, 0.0);
}

TEST(SetBitsMoments, EdgeCases) {
  const auto empty = expected_set_bits_moments(256, 0, 5);
  EXPECT_DOUBLE_EQ(empty.mean, 0.0);
  EXPECT_DOUBLE_EQ(empty.variance, 0.0);
  EXPECT_THROW(expected_set_bits_moments(1, 4, 2), std::invalid_argument);
  EXPECT_THROW(expected_set_bits_moments(256, 4, 0), std::invalid_argument);
}

TEST(MinFill, MatchesFrozenReferences) {
  EXPECT_NEAR(min_fill_expectation(256, 24, 5, 1), 95.94627726935639, 1e-9);
  EXPECT_NEAR(min_fill_expectation(256, 24, 5, 4) / 92.24350218349961, 1.0, 1e-9);
  EXPECT_NEAR(min_fill_expectation(256, 24, 5, 16) / 89.59381430634784, 1.0, 1e-9);
}

TEST(MinFill, MonotoneNonIncreasingInChoices) {
  double prev = min_fill_expectation(256, 24, 5, 1);
  for (std::size_t d = 2; d <= 64; d *= 2) {
    const double cur = min_fill_expectation(256, 24, 5, d);
    EXPECT_LE(cur, prev) << "d=" << d;
    prev = cur;
  }
  EXPECT_THROW(min_fill_expectation(256, 24, 5, 0), std::invalid_argument);
}

TEST(PredictedFp, SingleChoiceCollapsesToBaseline) {
  EXPECT_NEAR(predicted_fp_after_choice(256, 24, 5, 1) / fpb_estimate(256, 24, 5), 1.0, 1e-12);
  EXPECT_NEAR(predicted_fp_after_choice(256, 24, 5, 16), 0.005250374780279157, 1e-9);
}

TEST(PredictedFp, MoreChoicesNeverHurt) {
  double prev = predicted_fp_after_choice(256, 24, 5, 1);
  for (std::size_t d = 2; d <= 64; d *= 2) {
    const double cur = predicted_fp_after_choice(256, 24, 5, d);
    EXPECT_LE(cur, prev) << "d=" << d;
    prev = cur;
  }
}

TEST(PredictedFp, GainShrinksWithScale) {
  // Relative improvement from d=32 choices fades as the filter grows with its
  // load: the fill distribution tightens around its mean.
  const double small = predicted_fp_after_choice(128, 12, 5, 1) / predicted_fp_after_choice(128, 12, 5, 32);
  const double large = predicted_fp_after_choice(512, 48, 5, 1) / predicted_fp_after_choice(512, 48, 5, 32);
  EXPECT_NEAR(small, 1.7856729995778926, 1e-9);
  EXPECT_NEAR(large, 1.3264037812055558, 1e-9);
  EXPECT_GT(small, large);
}

}  // namespace
