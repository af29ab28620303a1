// Copyright 2026 The hdwv Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>

namespace hdwv {

enum class SchemeKind { CwSc, MultiRead, HdPv, Harp };

/// Verification scheme. reads_per_cell is the averaging depth M (MultiRead only).
struct Scheme {
  SchemeKind kind = SchemeKind::HdPv;
  int reads_per_cell = 1;

  static Scheme cwsc() { return {SchemeKind::CwSc, 1}; }
  static Scheme multiread(int m) { return {SchemeKind::MultiRead, m}; }
  static Scheme hdpv() { return {SchemeKind::HdPv, 1}; }
  static Scheme harp() { return {SchemeKind::Harp, 1}; }

  bool uses_hadamard() const noexcept { return kind == SchemeKind::HdPv || kind == SchemeKind::Harp; }
  bool compare_only() const noexcept { return kind == SchemeKind::CwSc || kind == SchemeKind::Harp; }
  bool operator==(const Scheme&) const = default;
};

/// "cwsc", "hdpv", "harp", "multiread5" / "multiread:5".
std::string to_string(const Scheme& s);
Scheme parse_scheme(std::string_view name);

}  // namespace hdwv
