#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "bsdb/dbsdb.hpp"
#include "bsdb/errors.hpp"
#include "bsdb/mat.hpp"

namespace bsdb {

/// Model file: 8-byte magic "DBGMODEL", then version, rows, cols as
/// little-endian uint32, then four [0, 255] matrices (gray, R, G, B) as
/// little-endian float64, row-major.
inline constexpr char kModelMagic[8] = {'D', 'B', 'G', 'M', 'O', 'D', 'E', 'L'};
inline constexpr std::uint32_t kModelVersion = 1;

namespace detail {

inline void write_u32(std::ostream& out, std::uint32_t v) {
  const char bytes[4] = {
      static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
      static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(bytes, 4);
}

inline std::uint32_t read_u32(std::istream& in, const std::string& path) {
  unsigned char bytes[4];
  in.read(reinterpret_cast<char*>(bytes), 4);
  if (!in) throw IoError("truncated model file " + path);
  return static_cast<std::uint32_t>(bytes[0]) |
         (static_cast<std::uint32_t>(bytes[1]) << 8) |
         (static_cast<std::uint32_t>(bytes[2]) << 16) |
         (static_cast<std::uint32_t>(bytes[3]) << 24);
}

inline void write_f64_matrix(std::ostream& out, const Mat& m) {
  for (double x : m.data()) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof(bits));
    char bytes[8];
    for (int k = 0; k < 8; ++k)
      bytes[k] = static_cast<char>((bits >> (8 * k)) & 0xff);
    out.write(bytes, 8);
  }
}

inline Mat read_f64_matrix(std::istream& in, int rows, int cols,
                           const std::string& path) {
  Mat m(rows, cols);
  for (double& x : m.data()) {
    unsigned char bytes[8];
    in.read(reinterpret_cast<char*>(bytes), 8);
    if (!in) throw IoError("truncated model file " + path);
    std::uint64_t bits = 0;
    for (int k = 0; k < 8; ++k)
      bits |= static_cast<std::uint64_t>(bytes[k]) << (8 * k);
    std::memcpy(&x, &bits, sizeof(x));
  }
  return m;
}

} // namespace detail

inline void save_model(const std::string& path,
                       const DynamicBackground& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(kModelMagic, sizeof(kModelMagic));
  detail::write_u32(out, kModelVersion);
  detail::write_u32(out,
                    static_cast<std::uint32_t>(model.gray.normalized.rows()));
  detail::write_u32(out,
                    static_cast<std::uint32_t>(model.gray.normalized.cols()));
  detail::write_f64_matrix(out, model.gray.normalized);
  for (int c = 0; c < 3; ++c)
    detail::write_f64_matrix(out, model.rgb[c].normalized);
  if (!out) throw IoError("short write to " + path);
}

/// The stored matrices are the normalized backgrounds, the only ones the
/// classification phase reads; raw fields are set to the same values.
inline DynamicBackground load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kModelMagic, 8) != 0)
    throw IoError("not a background model file: " + path);
  const std::uint32_t version = detail::read_u32(in, path);
  if (version != kModelVersion)
    throw IoError("unsupported model version " + std::to_string(version) +
                  " in " + path);
  const int rows = static_cast<int>(detail::read_u32(in, path));
  const int cols = static_cast<int>(detail::read_u32(in, path));
  if (rows < 1 || cols < 1)
    throw IoError("bad model dimensions in " + path);

  DynamicBackground model;
  model.gray.normalized = detail::read_f64_matrix(in, rows, cols, path);
  model.gray.raw = model.gray.normalized;
  for (int c = 0; c < 3; ++c) {
    model.rgb[c].normalized = detail::read_f64_matrix(in, rows, cols, path);
    model.rgb[c].raw = model.rgb[c].normalized;
  }
  return model;
}

} // namespace bsdb
