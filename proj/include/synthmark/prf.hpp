// Copyright 2026 The Synthmark Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <sodium.h>

#include <array>
#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "synthmark/error.hpp"

namespace synthmark {

using Bytes = std::vector<std::uint8_t>;

inline Bytes bytes_from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) {
    throw ValidationError("salt: hex string has odd length");
  }
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  Bytes out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    const int hi = nibble(hex[i]);
    const int lo = nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) throw ValidationError("salt: invalid hex digit");
    out.push_back(static_cast<std::uint8_t>(hi * 16 + lo));
  }
  return out;
}

inline std::string hex_string(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xf]);
  }
  return out;
}

namespace detail {

inline void ensure_sodium() {
  static const int status = sodium_init();
  if (status < 0) throw std::runtime_error("libsodium failed to initialize");
}

}  // namespace detail

// Unkeyed BLAKE2b-256 digest.
inline std::array<std::uint8_t, 32> digest256(
    std::span<const std::uint8_t> data) {
  detail::ensure_sodium();
  std::array<std::uint8_t, 32> out{};
  crypto_generichash(out.data(), out.size(), data.data(), data.size(),
                     nullptr, 0);
  return out;
}

inline std::array<std::uint8_t, 32> digest256(std::string_view data) {
  return digest256(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

// Appends fixed-width little-endian fields so that hashed messages are
// identical on every platform.
class KeyWriter {
 public:
  KeyWriter& u8(std::uint8_t v) {
    bytes_.push_back(v);
    return *this;
  }
  KeyWriter& u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes_.push_back(std::uint8_t(v >> (8 * i)));
    return *this;
  }
  KeyWriter& i64(std::int64_t v) { return u64(static_cast<std::uint64_t>(v)); }
  KeyWriter& f64(double v) {
    if (v == 0) v = 0;  // +0 and -0 hash alike
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    return u64(bits);
  }
  KeyWriter& str(std::string_view s) {
    u64(s.size());
    bytes_.insert(bytes_.end(), s.begin(), s.end());
    return *this;
  }
  KeyWriter& raw(std::span<const std::uint8_t> data) {
    bytes_.insert(bytes_.end(), data.begin(), data.end());
    return *this;
  }
  const Bytes& bytes() const { return bytes_; }

 private:
  Bytes bytes_;
};

// Keyed pseudo-random function over byte messages (keyed BLAKE2b). The key
// is the digest of the salt, so any salt length is accepted. Every output
// is a pure function of (salt, domain, message).
class Prf {
 public:
  explicit Prf(std::span<const std::uint8_t> salt) : key_(digest256(salt)) {}

  std::array<std::uint8_t, 16> eval(std::string_view domain,
                                    std::span<const std::uint8_t> message)
      const {
    detail::ensure_sodium();
    crypto_generichash_state state;
    crypto_generichash_init(&state, key_.data(), key_.size(), 16);
    const std::uint8_t len = static_cast<std::uint8_t>(domain.size());
    crypto_generichash_update(&state, &len, 1);
    crypto_generichash_update(
        &state, reinterpret_cast<const std::uint8_t*>(domain.data()),
        domain.size());
    crypto_generichash_update(&state, message.data(), message.size());
    std::array<std::uint8_t, 16> out{};
    crypto_generichash_final(&state, out.data(), out.size());
    return out;
  }

  std::uint64_t u64(std::string_view domain,
                    std::span<const std::uint8_t> message) const {
    const auto d = eval(domain, message);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(d[i]) << (8 * i);
    return v;
  }

  // Uniform on the open interval (0, 1).
  double unit(std::string_view domain,
              std::span<const std::uint8_t> message) const {
    return ((u64(domain, message) >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal through the inverse CDF of unit().
  double normal(std::string_view domain,
                std::span<const std::uint8_t> message) const {
    const double u = unit(domain, message);
    return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * u);
  }

  const std::array<std::uint8_t, 32>& key() const { return key_; }

 private:
  std::array<std::uint8_t, 32> key_;
};

// Seeded generator with platform-independent helpers. std::mt19937_64 has
// a fully specified output sequence; the standard distributions do not, so
// draws are derived by hand.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1).
  double uniform() { return (engine_() >> 11) * 0x1.0p-53; }

  // Uniform on {0, ..., n-1}, n > 0, without modulo bias.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = (~std::uint64_t{0} / n) * n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  template <class T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace synthmark
