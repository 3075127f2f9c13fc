#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ibf/hashing.hpp"
#include "ibf/rng.hpp"

namespace ibf {

// count unique random byte strings of the given bit length, reproducible
// from the seed.
inline std::vector<Bytes> gen_random_labels(std::size_t count, std::size_t bits, std::uint64_t seed) {
  if (bits == 0 || bits % 8 != 0) throw std::invalid_argument("gen_random_labels: bits must be a positive multiple of 8");
  if (bits < 64 && count > (std::uint64_t{1} << bits))
    throw std::invalid_argument("gen_random_labels: count exceeds the value space");
  Rng rng(seed);
  std::vector<Bytes> out;
  out.reserve(count);
  std::unordered_set<std::string> seen;
  seen.reserve(count * 2);
  while (out.size() < count) {
    Bytes label(bits / 8);
    for (std::size_t i = 0; i < label.size(); i += 8) {
      const std::uint64_t w = rng();
      for (std::size_t j = 0; j < 8 && i + j < label.size(); ++j)
        label[i + j] = static_cast<std::uint8_t>(w >> (8 * j));
    }
    if (seen.emplace(label.begin(), label.end()).second) out.push_back(std::move(label));
  }
  return out;
}

struct IpPrefix {
  std::uint32_t address = 0;
  int mask_len = 0;
};

// "a.b.c.d/len"; throws std::invalid_argument naming the line on bad input.
inline IpPrefix parse_ip_prefix(const std::string& text, std::size_t line_number = 0) {
  const auto fail = [&](const char* why) {
    throw std::invalid_argument("prefix line " + std::to_string(line_number) + ": " + why + ": " + text);
  };
  std::uint32_t addr = 0;
  std::size_t pos = 0;
  for (int octet = 0; octet < 4; ++octet) {
    if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos]))) fail("expected octet");
    std::uint32_t v = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      v = v * 10 + static_cast<std::uint32_t>(text[pos] - '0');
      if (v > 255) fail("octet out of range");
      ++pos;
    }
    addr = (addr << 8) | v;
    if (octet < 3) {
      if (pos >= text.size() || text[pos] != '.') fail("expected '.'");
      ++pos;
    }
  }
  if (pos >= text.size() || text[pos] != '/') fail("expected '/'");
  ++pos;
  if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos]))) fail("expected mask length");
  int len = 0;
  while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
    len = len * 10 + (text[pos] - '0');
    if (len > 32) fail("mask length out of range");
    ++pos;
  }
  if (pos != text.size()) fail("trailing characters");
  return {addr, len};
}

// Every address of every prefix exactly once (overlaps deduplicated), as
// 4-byte big-endian elements. Expansion is capped at desk scale.
inline std::vector<Bytes> expand_ip_prefixes(const std::vector<IpPrefix>& prefixes) {
  constexpr std::uint64_t kMaxAddresses = std::uint64_t{1} << 22;
  std::uint64_t total = 0;
  for (const auto& p : prefixes) {
    if (p.mask_len < 0 || p.mask_len > 32) throw std::invalid_argument("expand_ip_prefixes: mask length out of range");
    total += std::uint64_t{1} << (32 - p.mask_len);
    if (total > kMaxAddresses) throw std::length_error("expand_ip_prefixes: expansion exceeds desk-scale cap");
  }
  std::vector<Bytes> out;
  out.reserve(total);
  std::unordered_set<std::uint32_t> seen;
  seen.reserve(total * 2);
  for (const auto& p : prefixes) {
    const std::uint32_t span = p.mask_len == 32 ? 1u : (std::uint32_t{1} << (32 - p.mask_len));
    const std::uint32_t base = p.mask_len == 0 ? 0u : (p.address & ~(span - 1));
    for (std::uint32_t offset = 0; offset < span; ++offset) {
      const std::uint32_t a = base + offset;
      if (!seen.insert(a).second) continue;
      out.push_back({static_cast<std::uint8_t>(a >> 24), static_cast<std::uint8_t>(a >> 16),
                     static_cast<std::uint8_t>(a >> 8), static_cast<std::uint8_t>(a)});
    }
  }
  return out;
}

namespace detail {

inline std::string trim_copy(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace detail

// Prefix file: one "a.b.c.d/len" per line, '#' comments allowed.
inline std::vector<IpPrefix> load_ip_prefixes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_ip_prefixes: cannot open " + path);
  std::vector<IpPrefix> out;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim_copy(line);
    if (line.empty()) continue;
    out.push_back(parse_ip_prefix(line, line_number));
  }
  return out;
}

// One word per line, trimmed, blanks skipped, duplicates removed with the
// first occurrence kept in order.
inline std::vector<Bytes> load_dictionary(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_dictionary: cannot open " + path);
  std::vector<Bytes> out;
  std::unordered_set<std::string> seen;
  std::string line;
  while (std::getline(in, line)) {
    const std::string word = detail::trim_copy(line);
    if (word.empty()) continue;
    if (seen.insert(word).second) out.emplace_back(word.begin(), word.end());
  }
  return out;
}

}  // namespace ibf
