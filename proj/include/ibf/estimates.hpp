#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace ibf {

// Classic a-priori false-positive estimate for n elements, k hashes, m bits.
inline double fpb_estimate(std::size_t m, std::size_t n, std::size_t k) {
  if (m == 0 || k == 0) throw std::invalid_argument("fpb_estimate: m and k must be positive");
  const double p = 1.0 - std::pow(1.0 - 1.0 / static_cast<double>(m), static_cast<double>(k) * n);
  return std::pow(p, static_cast<double>(k));
}

// A-posteriori estimate from the observed fill factor.
inline double fpa_estimate(double fill_factor, std::size_t k) {
  if (fill_factor < 0.0 || fill_factor > 1.0) throw std::invalid_argument("fpa_estimate: fill factor out of [0,1]");
  if (k == 0) throw std::invalid_argument("fpa_estimate: k must be positive");
  return std::pow(fill_factor, static_cast<double>(k));
}

namespace detail {

inline double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

}  // namespace detail

// Exact false-positive probability, averaging (i/m)^k over the distribution
// of the number of set bits i. The set-bit distribution uses Stirling numbers
// of the second kind; the positive recurrence is evaluated in log space so no
// alternating-sign cancellation occurs. Cost is O(k*n*m) table cells, hence
// the size caps.
inline double exact_fp_probability(std::size_t m, std::size_t n, std::size_t k) {
  if (m == 0 || k == 0) throw std::invalid_argument("exact_fp_probability: m and k must be positive");
  if (m > 64) throw std::length_error("exact_fp_probability: m capped at 64");
  const std::size_t kn = k * n;
  if (kn > 512) throw std::length_error("exact_fp_probability: k*n capped at 512");
  if (kn == 0) return 0.0;

  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  const std::size_t imax = std::min(m, kn);

  // log S(row, i) for row = 0..kn, i = 0..imax, rolling one row at a time.
  std::vector<double> prev(imax + 1, kNegInf), cur(imax + 1, kNegInf);
  prev[0] = 0.0;  // S(0,0) = 1
  for (std::size_t row = 1; row <= kn; ++row) {
    cur[0] = kNegInf;  // S(row, 0) = 0 for row >= 1
    for (std::size_t i = 1; i <= imax; ++i)
      cur[i] = detail::log_add_exp(std::log(static_cast<double>(i)) + prev[i], prev[i - 1]);
    std::swap(prev, cur);
  }

  const double log_m = std::log(static_cast<double>(m));
  double fp = 0.0;
  double log_binom = 0.0;  // log C(m, 0)
  for (std::size_t i = 1; i <= imax; ++i) {
    log_binom += std::log(static_cast<double>(m - i + 1)) - std::log(static_cast<double>(i));
    const double log_p_i = log_binom + std::lgamma(static_cast<double>(i) + 1.0) + prev[i] -
                           static_cast<double>(kn) * log_m;
    fp += std::exp(log_p_i + static_cast<double>(k) * (std::log(static_cast<double>(i)) - log_m));
  }
  return fp;
}

}  // namespace ibf
