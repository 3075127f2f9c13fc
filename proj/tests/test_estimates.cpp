#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "ibf/estimates.hpp"

using ibf::exact_fp_probability;
using ibf::fpa_estimate;
using ibf::fpb_estimate;

namespace {

// References below were computed with exact rational arithmetic and frozen.

TEST(FpbEstimate, MatchesClosedForm) {
  EXPECT_NEAR(fpb_estimate(256, 12, 5), 0.00040162807995011186, 1e-15);
  EXPECT_NEAR(fpb_estimate(256, 24, 5), 0.007395044929697599, 1e-15);
  EXPECT_NEAR(fpb_estimate(256, 36, 5), 0.03305442507123916, 1e-15);
  EXPECT_NEAR(fpb_estimate(64, 8, 4), 0.024556216427164077, 1e-15);
  EXPECT_NEAR(fpb_estimate(128, 18, 5), 0.03327851995129898, 1e-15);
}

TEST(FpbEstimate, EdgeBehaviour) {
  EXPECT_DOUBLE_EQ(fpb_estimate(256, 0, 5), 0.0);
  double prev = 0.0;
  for (std::size_t n = 1; n <= 64; ++n) {
    const double cur = fpb_estimate(256, n, 5);
    EXPECT_GT(cur, prev) << "n=" << n;
    prev = cur;
  }
  EXPECT_THROW(fpb_estimate(0, 10, 5), std::invalid_argument);
  EXPECT_THROW(fpb_estimate(256, 10, 0), std::invalid_argument);
}

TEST(FpaEstimate, PowersTheFillFactor) {
  EXPECT_DOUBLE_EQ(fpa_estimate(0.5, 5), 0.03125);
  EXPECT_DOUBLE_EQ(fpa_estimate(0.0, 3), 0.0);
  EXPECT_DOUBLE_EQ(fpa_estimate(1.0, 3), 1.0);
  EXPECT_THROW(fpa_estimate(-0.1, 3), std::invalid_argument);
  EXPECT_THROW(fpa_estimate(1.1, 3), std::invalid_argument);
  EXPECT_THROW(fpa_estimate(0.5, 0), std::invalid_argument);
}

TEST(ExactFp, MatchesRationalReferences) {
  // (m=2, n=1, k=1): the single inserted bit is hit with probability 1/2.
  EXPECT_DOUBLE_EQ(exact_fp_probability(2, 1, 1), 0.5);
  // (m=4, n=2, k=2) = 505/1024.
  EXPECT_NEAR(exact_fp_probability(4, 2, 2), 0.4931640625, 1e-12);
  // (m=16, n=3, k=2) = 28269121/268435456.
  EXPECT_NEAR(exact_fp_probability(16, 3, 2) / 0.10531068220734596, 1.0, 1e-12);
}

TEST(ExactFp, ExceedsIndependenceApproximation) {
  // p^k with p = 1-(1-1/16)^6 underestimates the true rate because the k
  // probes land in the same realized filter, not in independent ones.
  const double p = 1.0 - std::pow(1.0 - 1.0 / 16.0, 6.0);
  const double approx = p * p;
  EXPECT_NEAR(approx, 0.1030832756089275, 1e-15);
  EXPECT_GT(exact_fp_probability(16, 3, 2), approx);
}

TEST(ExactFp, EnforcesSizeCaps) {
  EXPECT_THROW(exact_fp_probability(128, 3, 2), std::length_error);
  EXPECT_THROW(exact_fp_probability(64, 200, 3), std::length_error);  // k*n > 512
  EXPECT_THROW(exact_fp_probability(0, 3, 2), std::invalid_argument);
  EXPECT_THROW(exact_fp_probability(16, 3, 0), std::invalid_argument);
  // Largest admissible shape still finishes and stays a probability.
  const double v = exact_fp_probability(64, 128, 4);
  EXPECT_GT(v, 0.0);
  EXPECT_LE(v, 1.0);
}

TEST(ExactFp, ZeroElementsMeansNoFalsePositives) {
  EXPECT_DOUBLE_EQ(exact_fp_probability(16, 0, 2), 0.0);
}

}  // namespace
