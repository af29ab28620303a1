// Copyright 2026 The hdwv Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace hdwv {

using Engine = std::mt19937_64;

/*!
 * Derive an independent child seed from a parent seed and a list of stream
 * tags.
 *
 * Streams are split hierarchically (master -> trial/column -> purpose) by
 * folding each tag through the SplitMix64 finalizer. The result depends only
 * on the tag path, never on call order, so serial and parallel drivers see
 * identical streams.
 */
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t parent,
                                    std::initializer_list<std::uint64_t> tags) noexcept {
  std::uint64_t s = splitmix64(parent);
  for (auto t : tags) s = splitmix64(s ^ splitmix64(t + 0x632BE59BD9B4E019ull));
  return s;
}

inline Engine make_engine(std::uint64_t parent, std::initializer_list<std::uint64_t> tags) {
  return Engine(derive_seed(parent, tags));
}

// Stream purpose tags.
namespace stream {
inline constexpr std::uint64_t kDevice = 0xD2D;
inline constexpr std::uint64_t kWrite = 0x3417E;
inline constexpr std::uint64_t kRead = 0x4EAD;
inline constexpr std::uint64_t kTargets = 0x7A46;
}  // namespace stream

inline double standard_normal(Engine& rng) {
  return std::normal_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace hdwv
