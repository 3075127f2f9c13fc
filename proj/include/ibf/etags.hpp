#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ibf/estimates.hpp"
#include "ibf/filter.hpp"
#include "ibf/naming.hpp"
#include "ibf/params.hpp"

namespace ibf {

// d filters over the same element set, one per candidate naming; the chosen
// index travels in the envelope's candidate-index bits.
struct CandidateSet {
  FilterParams params;
  std::vector<std::uint32_t> k_list;
  std::vector<BloomFilter> filters;
  std::optional<std::uint32_t> chosen;
};

inline CandidateSet build_candidates(const std::vector<ETagSet>& etags, const FilterParams& params) {
  params.validate();
  CandidateSet set;
  set.params = params;
  set.filters.assign(params.d_choices, BloomFilter(params.m_prime()));
  for (const auto& e : etags) {
    if (e.candidates.size() != params.d_choices)
      throw std::invalid_argument("build_candidates: element candidate count does not match d_choices");
    if (set.k_list.empty())
      set.k_list = e.k_per_candidate;
    else if (e.k_per_candidate != set.k_list)
      throw std::invalid_argument("build_candidates: k distribution differs across elements");
    for (std::size_t j = 0; j < e.candidates.size(); ++j) set.filters[j].insert(e.candidates[j]);
  }
  if (set.k_list.empty()) set.k_list = uniform_k_list(params.k, params.d_choices);
  return set;
}

struct SelectionPolicy {
  enum class Kind { Fpa, Fpr, Avoidance } kind = Kind::Fpa;
  // Non-member etags: Fpr scores candidates by observed rate on `training`,
  // Avoidance by how many `forbidden` etags test positive.
  const std::vector<ETagSet>* training = nullptr;
  const std::vector<ETagSet>* forbidden = nullptr;
};

namespace detail {

inline std::size_t count_positive(const BloomFilter& filter, const std::vector<ETagSet>& etags, std::size_t j) {
  std::size_t hits = 0;
  for (const auto& e : etags)
    if (filter.query(e.candidates[j])) ++hits;
  return hits;
}

}  // namespace detail

// Returns the best candidate index under the policy; ties go to the lowest
// index.
inline std::uint32_t select(const CandidateSet& cands, const SelectionPolicy& policy) {
  const std::size_t d = cands.filters.size();
  if (d == 0) throw std::invalid_argument("select: empty candidate set");
  std::uint32_t best = 0;
  double best_score = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < d; ++j) {
    double score = 0.0;
    switch (policy.kind) {
      case SelectionPolicy::Kind::Fpa:
        score = fpa_estimate(cands.filters[j].fill_factor(), cands.k_list[j]);
        break;
      case SelectionPolicy::Kind::Fpr:
        if (policy.training == nullptr || policy.training->empty())
          throw std::invalid_argument("select: fpr policy requires a training set");
        score = static_cast<double>(detail::count_positive(cands.filters[j], *policy.training, j));
        break;
      case SelectionPolicy::Kind::Avoidance:
        if (policy.forbidden == nullptr || policy.forbidden->empty())
          throw std::invalid_argument("select: avoidance policy requires a forbidden set");
        score = static_cast<double>(detail::count_positive(cands.filters[j], *policy.forbidden, j));
        break;
    }
    if (score < best_score) {
      best_score = score;
      best = static_cast<std::uint32_t>(j);
    }
  }
  return best;
}

struct SetBitsMoments {
  double mean = 0.0;
  double variance = 0.0;
};

// First two moments of the number of distinct bits set by k*n uniform index
// draws into m positions.
inline SetBitsMoments expected_set_bits_moments(std::size_t m, std::size_t n, std::size_t k) {
  if (m < 2 || k == 0) throw std::invalid_argument("expected_set_bits_moments: need m >= 2, k >= 1");
  const double md = static_cast<double>(m);
  const double x = static_cast<double>(k) * static_cast<double>(n);
  const double q = std::pow(1.0 - 1.0 / md, x);
  const double q2 = std::pow(1.0 - 2.0 / md, x);
  SetBitsMoments out;
  out.mean = md * (1.0 - q);
  out.variance = md * q + (md * md - md) * q2 - md * md * q * q;
  if (out.variance < 0.0) out.variance = 0.0;  // guard tiny negative rounding
  return out;
}

// Expected minimum bits set across d independent candidate constructions:
// Gaussian approximation of s, minimum-of-d order-statistic density
// d * Q(z)^{d-1} * phi(s), integrated by trapezoid over mu +/- 10 sigma
// clipped to [0, m]. d=1 short-circuits to the exact mean.
inline double min_fill_expectation(std::size_t m, std::size_t n, std::size_t k, std::size_t d) {
  if (d < 1) throw std::invalid_argument("min_fill_expectation: d must be >= 1");
  const SetBitsMoments mom = expected_set_bits_moments(m, n, k);
  if (d == 1) return mom.mean;
  const double sigma = std::sqrt(mom.variance);
  if (sigma == 0.0) return mom.mean;

  const double lo = std::max(0.0, mom.mean - 10.0 * sigma);
  const double hi = std::min(static_cast<double>(m), mom.mean + 10.0 * sigma);
  constexpr std::size_t kPoints = 20001;
  const double step = (hi - lo) / static_cast<double>(kPoints - 1);
  const double dd = static_cast<double>(d);

  double acc = 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i < kPoints; ++i) {
    const double s = lo + step * static_cast<double>(i);
    const double z = (s - mom.mean) / sigma;
    const double tail = 0.5 * std::erfc(z / std::numbers::sqrt2);
    const double density = dd * std::pow(tail, dd - 1.0) *
                           std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
    const double f = s * density;
    if (i > 0) acc += 0.5 * (prev + f) * step;
    prev = f;
  }
  if (!std::isfinite(acc)) throw std::runtime_error("min_fill_expectation: non-finite integral");
  return acc;
}

// (E[s_min]/m)^k: the model's false-positive probability after picking the
// emptiest of d candidates.
inline double predicted_fp_after_choice(std::size_t m, std::size_t n, std::size_t k, std::size_t d) {
  return std::pow(min_fill_expectation(m, n, k, d) / static_cast<double>(m), static_cast<double>(k));
}

}  // namespace ibf
