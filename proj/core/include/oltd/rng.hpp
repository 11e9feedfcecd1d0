#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace oltd {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to derive independent child seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Seed for trial `index` of scenario `id`; independent of execution order.
constexpr std::uint64_t child_seed(std::uint64_t master, std::string_view id,
                                   std::uint64_t index) noexcept {
  return mix64(mix64(master ^ fnv1a(id)) + index);
}

/// Named sub-stream of a seed, so that different consumers of one trial do
/// not share draws.
constexpr std::uint64_t substream(std::uint64_t seed, std::uint64_t salt) noexcept {
  return mix64(seed ^ mix64(salt));
}

}  // namespace oltd
