// Copyright 2026 The hdwv Authors.
// SPDX-License-Identifier: Apache-2.0
#include "hdwv/scheme.hpp"

#include <cctype>
#include <charconv>

#include "hdwv/error.hpp"

namespace hdwv {

std::string to_string(const Scheme& s) {
  switch (s.kind) {
    case SchemeKind::CwSc: return "cwsc";
    case SchemeKind::HdPv: return "hdpv";
    case SchemeKind::Harp: return "harp";
    case SchemeKind::MultiRead: return "multiread" + std::to_string(s.reads_per_cell);
  }
  return "unknown";
}

Scheme parse_scheme(std::string_view name) {
  std::string lower;
  for (char c : name)
    if (c != '-' && c != '_') lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "cwsc") return Scheme::cwsc();
  if (lower == "hdpv") return Scheme::hdpv();
  if (lower == "harp") return Scheme::harp();
  constexpr std::string_view prefix = "multiread";
  if (lower.starts_with(prefix)) {
    std::string_view rest(lower);
    rest.remove_prefix(prefix.size());
    if (rest.starts_with(':')) rest.remove_prefix(1);
    int m = 0;
    auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), m);
    if (ec == std::errc() && ptr == rest.data() + rest.size() && m >= 1) return Scheme::multiread(m);
  }
  throw Error(ErrorCode::ParseError, "unknown scheme '" + std::string(name) + "'");
}

}  // namespace hdwv
