#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ibf/filter.hpp"
#include "ibf/naming.hpp"
#include "ibf/params.hpp"

namespace ibf {

// Filter whose m' bits are split into r regions of ceil(m'/r) bits (last one
// takes the remainder). A region's flag latches to 1 when two elements
// collide inside it; bits in flag-0 regions are safe to clear.
class DeletableFilter {
 public:
  explicit DeletableFilter(const FilterParams& params)
      : params_(validated(params)), filter_(params.m_prime()), flags_(params.r, false) {
    width_ = (params.m_prime() + params.r - 1) / params.r;
  }

  std::uint32_t region_of(std::uint32_t index) const {
    if (index >= params_.m_prime()) throw std::out_of_range("DeletableFilter: index out of range");
    return std::min(index / width_, params_.r - 1);
  }

  // Sets f's bits; flags the region of every bit that a previous element had
  // already set. Duplicate indices inside f itself are not collisions: the
  // bit still belongs to this element alone, so clearing it stays safe.
  void insert_tracking(const Footprint& f) {
    if (any_deleted_) throw std::logic_error("DeletableFilter: insertion after deletion is not supported");
    Footprint unique = f;
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
    for (const auto i : unique)
      if (filter_.bits().test(i)) flags_[region_of(i)] = true;
    filter_.insert(unique);
  }

  bool query(const Footprint& f) const { return filter_.query(f); }

  bool is_deletable(const Footprint& f) const {
    for (const auto i : f)
      if (!flags_[region_of(i)]) return true;
    return false;
  }

  enum class DeleteResult { Deleted, NotDeletable };

  // Clears exactly those bits of f lying in collision-free regions; the
  // flags themselves are never touched by deletion.
  DeleteResult delete_element(const Footprint& f) {
    if (!is_deletable(f)) return DeleteResult::NotDeletable;
    for (const auto i : f)
      if (!flags_[region_of(i)]) filter_.bits().reset(i);
    any_deleted_ = true;
    return DeleteResult::Deleted;
  }

  double fill_factor() const { return filter_.fill_factor(); }
  const BloomFilter& filter() const { return filter_; }
  const std::vector<bool>& region_flags() const { return flags_; }
  const FilterParams& params() const { return params_; }
  std::uint32_t region_width() const { return width_; }

 private:
  static const FilterParams& validated(const FilterParams& p) {
    p.validate();
    if (p.r < 1) throw std::invalid_argument("DeletableFilter: r must be >= 1");
    return p;
  }

  FilterParams params_;
  BloomFilter filter_;
  std::vector<bool> flags_;
  std::uint32_t width_ = 0;
  bool any_deleted_ = false;
};

// Closed-form probability that an inserted element keeps at least one bit in
// a collision-free region: (1 - C(n,2) * k / (m-r)^2)^((m-r)/r), clamped to
// [0, 1].
inline double deletability_probability(std::size_t m, std::size_t n, std::size_t k, std::size_t r) {
  if (r < 1 || m <= r) throw std::invalid_argument("deletability_probability: need 1 <= r < m");
  if (n < 2) return 1.0;
  const double mr = static_cast<double>(m - r);
  const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  const double base = 1.0 - pairs * static_cast<double>(k) / (mr * mr);
  if (base <= 0.0) return 0.0;
  const double pdr = std::pow(base, mr / static_cast<double>(r));
  return std::clamp(pdr, 0.0, 1.0);
}

// Share of inserted elements that are deletable and share of set bits lying
// in collision-free regions.
inline std::pair<double, double> deletable_fraction(const DeletableFilter& filter,
                                                    const std::vector<Footprint>& inserted) {
  double elements = 0.0;
  if (!inserted.empty()) {
    std::size_t deletable = 0;
    for (const auto& f : inserted)
      if (filter.is_deletable(f)) ++deletable;
    elements = static_cast<double>(deletable) / static_cast<double>(inserted.size());
  }

  std::size_t set_total = 0, set_free = 0;
  for (std::uint32_t i = 0; i < filter.params().m_prime(); ++i) {
    if (!filter.filter().bits().test(i)) continue;
    ++set_total;
    if (!filter.region_flags()[filter.region_of(i)]) ++set_free;
  }
  const double bits = set_total == 0 ? 0.0 : static_cast<double>(set_free) / static_cast<double>(set_total);
  return {elements, bits};
}

inline std::vector<DeletableFilter> build_deletable_candidates(const std::vector<ETagSet>& etags,
                                                               const FilterParams& params) {
  params.validate();
  std::vector<DeletableFilter> out(params.d_choices, DeletableFilter(params));
  for (const auto& e : etags) {
    if (e.candidates.size() != params.d_choices)
      throw std::invalid_argument("build_deletable_candidates: candidate count mismatch");
    for (std::size_t j = 0; j < out.size(); ++j) out[j].insert_tracking(e.candidates[j]);
  }
  return out;
}

enum class DeletabilityGoal { Bits, Elements };

// Picks the candidate maximizing deletable bits or deletable elements; ties
// go to the lowest index.
inline std::uint32_t select_deletable(const std::vector<DeletableFilter>& candidates,
                                      const std::vector<ETagSet>& etags, DeletabilityGoal goal) {
  if (candidates.empty()) throw std::invalid_argument("select_deletable: empty candidate set");
  std::uint32_t best = 0;
  double best_score = -1.0;
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    double score = 0.0;
    if (goal == DeletabilityGoal::Bits) {
      for (std::uint32_t i = 0; i < candidates[j].params().m_prime(); ++i)
        if (candidates[j].filter().bits().test(i) && !candidates[j].region_flags()[candidates[j].region_of(i)])
          score += 1.0;
    } else {
      for (const auto& e : etags)
        if (candidates[j].is_deletable(e.candidates[j])) score += 1.0;
    }
    if (score > best_score) {
      best_score = score;
      best = static_cast<std::uint32_t>(j);
    }
  }
  return best;
}

}  // namespace ibf
