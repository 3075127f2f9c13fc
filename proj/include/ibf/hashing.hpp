#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <openssl/evp.h>
#include <openssl/params.h>
#include <zlib.h>

#include "ibf/bitvec.hpp"

namespace ibf {

enum class HashAlgo { MD5, SHA1, SHA256, CRC32, BOB };

inline const char* algo_name(HashAlgo a) {
  switch (a) {
    case HashAlgo::MD5: return "MD5";
    case HashAlgo::SHA1: return "SHA1";
    case HashAlgo::SHA256: return "SHA256";
    case HashAlgo::CRC32: return "CRC32";
    case HashAlgo::BOB: return "BOB";
  }
  return "?";
}

inline HashAlgo algo_from_name(std::string_view s) {
  if (s == "MD5" || s == "md5") return HashAlgo::MD5;
  if (s == "SHA1" || s == "sha1") return HashAlgo::SHA1;
  if (s == "SHA256" || s == "sha256") return HashAlgo::SHA256;
  if (s == "CRC32" || s == "crc32") return HashAlgo::CRC32;
  if (s == "BOB" || s == "bob") return HashAlgo::BOB;
  throw std::invalid_argument("unknown hash algorithm: " + std::string(s));
}

namespace detail {

inline const EVP_MD* fetched_md(HashAlgo a) {
  static const EVP_MD* md5 = EVP_MD_fetch(nullptr, "MD5", nullptr);
  static const EVP_MD* sha1 = EVP_MD_fetch(nullptr, "SHA1", nullptr);
  static const EVP_MD* sha256 = EVP_MD_fetch(nullptr, "SHA256", nullptr);
  switch (a) {
    case HashAlgo::MD5: return md5;
    case HashAlgo::SHA1: return sha1;
    case HashAlgo::SHA256: return sha256;
    default: throw std::invalid_argument("not an EVP digest");
  }
}

inline EVP_MD_CTX* tls_ctx() {
  thread_local EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  return ctx;
}

constexpr std::uint32_t rot32(std::uint32_t x, int k) { return (x << k) | (x >> (32 - k)); }

}  // namespace detail

// One-shot cryptographic digest; ctx reuse keeps the per-call cost low enough
// for the Monte Carlo loops.
inline Bytes crypto_digest(HashAlgo a, const std::uint8_t* data, std::size_t len) {
  EVP_MD_CTX* ctx = detail::tls_ctx();
  if (EVP_DigestInit_ex2(ctx, detail::fetched_md(a), nullptr) != 1)
    throw std::runtime_error("digest init failed");
  if (len > 0 && EVP_DigestUpdate(ctx, data, len) != 1) throw std::runtime_error("digest update failed");
  unsigned int out_len = 0;
  Bytes out(EVP_MAX_MD_SIZE);
  if (EVP_DigestFinal_ex(ctx, out.data(), &out_len) != 1) throw std::runtime_error("digest final failed");
  out.resize(out_len);
  return out;
}

inline Bytes crypto_digest(HashAlgo a, const Bytes& data) {
  return crypto_digest(a, data.data(), data.size());
}

inline std::uint32_t crc32_digest(const std::uint8_t* data, std::size_t len) {
  return static_cast<std::uint32_t>(::crc32(0L, data, static_cast<uInt>(len)));
}

inline std::uint32_t crc32_digest(const Bytes& data) { return crc32_digest(data.data(), data.size()); }

// Jenkins lookup3 hashlittle2: two 32-bit outputs from one pass.
inline std::pair<std::uint32_t, std::uint32_t> bob_hash(const std::uint8_t* key, std::size_t length) {
  using detail::rot32;
  std::uint32_t a, b, c;
  a = b = c = 0xdeadbeef + static_cast<std::uint32_t>(length);

  auto u32le = [](const std::uint8_t* p) {
    std::uint32_t v;
    std::memcpy(&v, p, 4);
    return v;  // little-endian host assumed, matching the reference behavior on x86
  };

  const std::uint8_t* k = key;
  std::size_t len = length;
  while (len > 12) {
    a += u32le(k);
    b += u32le(k + 4);
    c += u32le(k + 8);
    a -= c; a ^= rot32(c, 4); c += b;
    b -= a; b ^= rot32(a, 6); a += c;
    c -= b; c ^= rot32(b, 8); b += a;
    a -= c; a ^= rot32(c, 16); c += b;
    b -= a; b ^= rot32(a, 19); a += c;
    c -= b; c ^= rot32(b, 4); b += a;
    len -= 12;
    k += 12;
  }
  switch (len) {
    case 12: c += static_cast<std::uint32_t>(k[11]) << 24; [[fallthrough]];
    case 11: c += static_cast<std::uint32_t>(k[10]) << 16; [[fallthrough]];
    case 10: c += static_cast<std::uint32_t>(k[9]) << 8; [[fallthrough]];
    case 9: c += k[8]; [[fallthrough]];
    case 8: b += static_cast<std::uint32_t>(k[7]) << 24; [[fallthrough]];
    case 7: b += static_cast<std::uint32_t>(k[6]) << 16; [[fallthrough]];
    case 6: b += static_cast<std::uint32_t>(k[5]) << 8; [[fallthrough]];
    case 5: b += k[4]; [[fallthrough]];
    case 4: a += static_cast<std::uint32_t>(k[3]) << 24; [[fallthrough]];
    case 3: a += static_cast<std::uint32_t>(k[2]) << 16; [[fallthrough]];
    case 2: a += static_cast<std::uint32_t>(k[1]) << 8; [[fallthrough]];
    case 1: a += k[0]; break;
    case 0: return {c, b};
  }
  c ^= b; c -= rot32(b, 14);
  a ^= c; a -= rot32(c, 11);
  b ^= a; b -= rot32(a, 25);
  c ^= b; c -= rot32(b, 16);
  a ^= c; a -= rot32(c, 4);
  b ^= a; b -= rot32(a, 14);
  c ^= b; c -= rot32(b, 24);
  return {c, b};
}

inline std::pair<std::uint32_t, std::uint32_t> bob_hash(const Bytes& data) {
  return bob_hash(data.data(), data.size());
}

inline std::uint64_t be64_window(const Bytes& digest, std::size_t byte_offset) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < 8; ++i) v = (v << 8) | digest.at(byte_offset + i);
  return v;
}

// System-wide double hashing bases: h1 = leading 64 bits of SHA1, h2 = leading
// 64 bits of MD5, both big-endian.
inline std::pair<std::uint64_t, std::uint64_t> element_h1h2(const std::uint8_t* data, std::size_t len) {
  const Bytes s = crypto_digest(HashAlgo::SHA1, data, len);
  const Bytes m = crypto_digest(HashAlgo::MD5, data, len);
  return {be64_window(s, 0), be64_window(m, 0)};
}

inline std::pair<std::uint64_t, std::uint64_t> element_h1h2(const Bytes& data) {
  return element_h1h2(data.data(), data.size());
}

inline Bytes with_counter(const Bytes& data, std::uint32_t counter) {
  Bytes out = data;
  out.push_back(static_cast<std::uint8_t>(counter >> 24));
  out.push_back(static_cast<std::uint8_t>(counter >> 16));
  out.push_back(static_cast<std::uint8_t>(counter >> 8));
  out.push_back(static_cast<std::uint8_t>(counter));
  return out;
}

// Digest block c of the counter-extension chain: block 0 hashes the element
// itself, block c >= 1 hashes element || 32-bit big-endian counter c.
inline Bytes digest_block(HashAlgo a, const Bytes& data, std::uint32_t counter) {
  const Bytes& input = counter == 0 ? data : with_counter(data, counter);
  switch (a) {
    case HashAlgo::CRC32: {
      const std::uint32_t v = counter == 0 ? crc32_digest(data) : crc32_digest(with_counter(data, counter));
      return {static_cast<std::uint8_t>(v >> 24), static_cast<std::uint8_t>(v >> 16),
              static_cast<std::uint8_t>(v >> 8), static_cast<std::uint8_t>(v)};
    }
    case HashAlgo::BOB: {
      auto [pc, pb] = bob_hash(input);
      return {static_cast<std::uint8_t>(pc >> 24), static_cast<std::uint8_t>(pc >> 16),
              static_cast<std::uint8_t>(pc >> 8), static_cast<std::uint8_t>(pc),
              static_cast<std::uint8_t>(pb >> 24), static_cast<std::uint8_t>(pb >> 16),
              static_cast<std::uint8_t>(pb >> 8), static_cast<std::uint8_t>(pb)};
    }
    default: return crypto_digest(a, input);
  }
}

// Expands an element to nbits of hash output via counter extension; the bit
// array shares BitVec's byte convention, so to_bytes() of the result equals
// the concatenated digest bytes trimmed to length.
inline BitVec digest_to_bits(HashAlgo a, const Bytes& data, std::size_t nbits) {
  Bytes stream;
  std::uint32_t counter = 0;
  while (stream.size() * 8 < nbits) {
    const Bytes block = digest_block(a, data, counter++);
    stream.insert(stream.end(), block.begin(), block.end());
  }
  return BitVec::from_bytes(nbits, stream);
}

inline Bytes hmac_sha256(const Bytes& key, const Bytes& msg) {
  EVP_MAC* mac = EVP_MAC_fetch(nullptr, "HMAC", nullptr);
  if (mac == nullptr) throw std::runtime_error("HMAC fetch failed");
  EVP_MAC_CTX* ctx = EVP_MAC_CTX_new(mac);
  EVP_MAC_free(mac);
  if (ctx == nullptr) throw std::runtime_error("HMAC ctx failed");
  char digest_name[] = "SHA256";
  OSSL_PARAM params[] = {OSSL_PARAM_construct_utf8_string("digest", digest_name, 0),
                         OSSL_PARAM_construct_end()};
  Bytes out(EVP_MAX_MD_SIZE);
  std::size_t out_len = 0;
  const int ok = EVP_MAC_init(ctx, key.data(), key.size(), params) &&
                 EVP_MAC_update(ctx, msg.data(), msg.size()) &&
                 EVP_MAC_final(ctx, out.data(), &out_len, out.size());
  EVP_MAC_CTX_free(ctx);
  if (!ok) throw std::runtime_error("HMAC computation failed");
  out.resize(out_len);
  return out;
}

}  // namespace ibf
