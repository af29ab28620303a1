// Copyright 2026 The hdwv Authors.
// SPDX-License-Identifier: Apache-2.0
#include "hdwv/weight_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "hdwv/error.hpp"

namespace hdwv {

void write_weights(std::ostream& os, const WeightFile& file) {
  if (file.tensor.size() != file.tensor.values.size())
    throw Error(ErrorCode::DimensionMismatch, "tensor shape does not match its value count");
  nlohmann::json h;
  h["B"] = file.b;
  h["layout_version"] = kLayoutVersion;
  h["scale"] = file.scale;
  h["seed"] = file.seed;
  h["shape"] = file.tensor.shape;
  if (!file.provenance.is_null()) h["provenance"] = file.provenance;
  os << h.dump() << '\n';
  char buf[64];
  for (Eigen::Index i = 0; i < file.tensor.values.size(); ++i) {
    const auto r = std::to_chars(buf, buf + sizeof buf, file.tensor.values[i]);
    os.write(buf, r.ptr - buf);
    os.put('\n');
  }
}

WeightFile read_weights(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorCode::ParseError, "missing container header");
  WeightFile f;
  try {
    const auto h = nlohmann::json::parse(line);
    if (h.at("layout_version").get<int>() != kLayoutVersion)
      throw Error(ErrorCode::ParseError, "unsupported layout_version");
    f.b = h.at("B").get<int>();
    f.scale = h.at("scale").get<double>();
    f.seed = h.at("seed").get<std::uint64_t>();
    f.tensor.shape = h.at("shape").get<std::vector<std::int64_t>>();
    if (h.contains("provenance")) f.provenance = h["provenance"];
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("bad container header: ") + e.what());
  }
  for (auto d : f.tensor.shape)
    if (d < 0) throw Error(ErrorCode::ParseError, "negative dimension in shape");

  const std::int64_t count = f.tensor.size();
  f.tensor.values.resize(count);
  for (std::int64_t i = 0; i < count; ++i) {
    if (!std::getline(is, line))
      throw Error(ErrorCode::ParseError, "expected " + std::to_string(count) + " values, got " + std::to_string(i));
    double v = 0.0;
    const auto r = std::from_chars(line.data(), line.data() + line.size(), v);
    if (r.ec != std::errc() || r.ptr != line.data() + line.size())
      throw Error(ErrorCode::ParseError, "bad value on line " + std::to_string(i + 2) + ": '" + line + "'");
    f.tensor.values[i] = v;
  }
  while (std::getline(is, line))
    if (!line.empty()) throw Error(ErrorCode::ParseError, "trailing data after " + std::to_string(count) + " values");
  return f;
}

void save_weights(const std::filesystem::path& path, const WeightFile& file) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::OutputUnwritable, "cannot open " + path.string() + " for writing");
  write_weights(os, file);
  if (!os.flush()) throw Error(ErrorCode::OutputUnwritable, "write failed: " + path.string());
}

WeightFile load_weights(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::InvalidSpec, "cannot open weight file " + path.string());
  return read_weights(is);
}

}  // namespace hdwv
