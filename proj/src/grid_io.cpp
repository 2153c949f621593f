#include "topoloss/grid_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "topoloss/error.hpp"

namespace topoloss {

namespace {

constexpr std::array<char, 4> kMagic{'G', 'R', 'D', 'F'};

void put_u32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> b{char(v & 0xFF), char((v >> 8) & 0xFF), char((v >> 16) & 0xFF),
                              char((v >> 24) & 0xFF)};
  out.write(b.data(), 4);
}

std::uint32_t get_u32(const unsigned char* b) {
  return std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 | std::uint32_t(b[2]) << 16 |
         std::uint32_t(b[3]) << 24;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot create " + path);
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace

void write_grid(std::ostream& out, const ScalarGrid& grid) {
  out.write(kMagic.data(), 4);
  put_u32(out, grid.width());
  put_u32(out, grid.height());
  for (float f : grid.values()) put_u32(out, std::bit_cast<std::uint32_t>(f));
}

ScalarGrid read_grid(std::istream& in) {
  std::array<unsigned char, 12> head{};
  in.read(reinterpret_cast<char*>(head.data()), 12);
  if (in.gcount() != 12) throw FormatError("grid file: truncated header");
  if (std::memcmp(head.data(), kMagic.data(), 4) != 0) throw FormatError("grid file: bad magic");
  const std::uint32_t w = get_u32(head.data() + 4);
  const std::uint32_t h = get_u32(head.data() + 8);
  const std::uint64_t n = std::uint64_t(w) * h;
  if (n > (std::uint64_t(1) << 32)) throw FormatError("grid file: extent too large");
  std::vector<unsigned char> payload(n * 4);
  in.read(reinterpret_cast<char*>(payload.data()), std::streamsize(payload.size()));
  if (std::uint64_t(in.gcount()) != payload.size()) throw FormatError("grid file: truncated payload");
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("grid file: trailing bytes");
  ScalarGrid grid(w, h);
  for (std::size_t i = 0; i < n; ++i) grid[i] = std::bit_cast<float>(get_u32(payload.data() + 4 * i));
  return grid;
}

void save_grid(const std::string& path, const ScalarGrid& grid) {
  auto out = open_out(path);
  write_grid(out, grid);
  finish(out, path);
}

ScalarGrid load_grid(const std::string& path) {
  auto in = open_in(path);
  return read_grid(in);
}

void save_mask(const std::string& path, const BinaryMask& mask) {
  ScalarGrid g(mask.width(), mask.height());
  for (std::size_t i = 0; i < mask.size(); ++i) g[i] = mask[i] ? 1.0f : 0.0f;
  save_grid(path, g);
}

BinaryMask load_mask(const std::string& path) {
  const ScalarGrid g = load_grid(path);
  BinaryMask m(g.width(), g.height());
  for (std::size_t i = 0; i < g.size(); ++i) m[i] = g[i] != 0.0f;
  return m;
}

void save_graph(const std::string& path, const GeoGraph& graph) {
  auto out = open_out(path);
  write_graph(out, graph);
  finish(out, path);
}

GeoGraph load_graph(const std::string& path) {
  auto in = open_in(path);
  return parse_graph(in);
}

}  // namespace topoloss
