#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "contournet/io.hpp"

namespace contournet {

namespace {

constexpr char kMagic[4] = {'C', 'T', 'H', 'M'};
constexpr std::size_t kHeaderBytes = 12;

void put_u32(std::string& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xffu));
}

std::uint32_t get_u32(std::string_view bytes, std::size_t at) {
  std::uint32_t v = 0;
  for (int b = 0; b < 4; ++b) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[at + b])) << (8 * b);
  }
  return v;
}

}  // namespace

std::string encode_heatmap(const FloatGrid& grid) {
  if (grid.empty()) throw InvalidGrid("encode_heatmap: empty grid");
  std::string out(kMagic, 4);
  put_u32(out, static_cast<std::uint32_t>(grid.height()));
  put_u32(out, static_cast<std::uint32_t>(grid.width()));
  out.reserve(kHeaderBytes + 4 * grid.size());
  for (double v : grid.values()) {
    const auto f = static_cast<float>(v);
    if (!std::isfinite(f)) throw InvalidGrid("encode_heatmap: non-finite value");
    put_u32(out, std::bit_cast<std::uint32_t>(f));
  }
  return out;
}

FloatGrid decode_heatmap(std::string_view bytes) {
  if (bytes.size() < kHeaderBytes) throw FormatError("heatmap: truncated header");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("heatmap: bad magic");
  const std::uint64_t h = get_u32(bytes, 4);
  const std::uint64_t w = get_u32(bytes, 8);
  if (h == 0 || w == 0) throw FormatError("heatmap: zero dimension");
  if (h > (1u << 20) || w > (1u << 20)) throw FormatError("heatmap: implausible dimensions");
  const std::uint64_t expected = kHeaderBytes + 4 * h * w;
  if (bytes.size() != expected) {
    throw FormatError("heatmap: header says " + std::to_string(h) + "x" + std::to_string(w) +
                      " (" + std::to_string(expected) + " bytes) but file has " +
                      std::to_string(bytes.size()) + " bytes");
  }
  std::vector<double> values(h * w);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const float f = std::bit_cast<float>(get_u32(bytes, kHeaderBytes + 4 * i));
    if (!std::isfinite(f)) throw FormatError("heatmap: non-finite value at index " + std::to_string(i));
    values[i] = f;
  }
  return FloatGrid(static_cast<int>(h), static_cast<int>(w), std::move(values));
}

void write_heatmap(const std::filesystem::path& path, const FloatGrid& grid) {
  write_file_atomic(path, encode_heatmap(grid));
}

FloatGrid read_heatmap(const std::filesystem::path& path) {
  return decode_heatmap(read_file(path));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInput("cannot write '" + tmp.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw InvalidInput("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace contournet
