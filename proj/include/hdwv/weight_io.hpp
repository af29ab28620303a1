// Copyright 2026 The hdwv Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include <nlohmann/json.hpp>

#include "hdwv/weight_mapper.hpp"

namespace hdwv {

inline constexpr int kLayoutVersion = 1;

/*!
 * Weight container.
 *
 * Line 1 is a one-line JSON header
 *   {"B":6,"layout_version":1,"scale":...,"seed":...,"shape":[...]}
 * optionally with a "provenance" object on exported results. Each following
 * line holds one value in row-major order, printed as the shortest decimal
 * that parses back to the same double, so write/read round-trips bit-exactly.
 */
struct WeightFile {
  WeightTensor tensor;
  int b = 6;
  double scale = 1.0;
  std::uint64_t seed = 0;
  nlohmann::json provenance;  // null when absent

  bool operator==(const WeightFile&) const = default;
};

void write_weights(std::ostream& os, const WeightFile& file);
/// Throws ParseError on a malformed header, value or count mismatch.
WeightFile read_weights(std::istream& is);

/// Throws OutputUnwritable.
void save_weights(const std::filesystem::path& path, const WeightFile& file);
/// Throws InvalidSpec when the file cannot be opened, ParseError when malformed.
WeightFile load_weights(const std::filesystem::path& path);

}  // namespace hdwv
