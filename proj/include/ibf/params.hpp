#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace ibf {

// One iBF family: m total header bits, k indices per element, d_choices
// candidate names, r deletable regions. The usable filter width is
// m_prime = m - log2(d_choices) - r; the remaining bits carry the chosen
// candidate index and the region flags on the wire.
struct FilterParams {
  std::uint32_t m = 0;
  std::uint32_t k = 0;
  std::uint32_t d_choices = 1;
  std::uint32_t r = 0;

  std::uint32_t log2_d() const {
    return static_cast<std::uint32_t>(std::countr_zero(d_choices));
  }

  std::uint32_t m_prime() const { return m - log2_d() - r; }

  void validate() const {
    if (m == 0 || !std::has_single_bit(m)) throw std::invalid_argument("params: m must be a power of two");
    if (d_choices == 0 || !std::has_single_bit(d_choices))
      throw std::invalid_argument("params: d_choices must be a power of two");
    if (log2_d() + r >= m) throw std::invalid_argument("params: header bits exhaust m");
    const std::uint32_t mp = m_prime();
    if (k < 1 || k > mp) throw std::invalid_argument("params: need m_prime >= k >= 1");
    if (r >= mp) throw std::invalid_argument("params: need r < m_prime");
  }
};

// round(ln2 * m / n), floored at 1 for degenerate m/n ratios.
inline std::uint32_t optimal_k(std::uint32_t m, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("optimal_k: n must be positive");
  const double v = std::log(2.0) * static_cast<double>(m) / static_cast<double>(n);
  const auto rounded = static_cast<std::uint64_t>(std::llround(v));
  return rounded < 1 ? 1u : static_cast<std::uint32_t>(rounded);
}

}  // namespace ibf
