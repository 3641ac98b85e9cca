#pragma once
// PathGrid on-disk formats.
//
// CSV: header "t_0,...,t_n", one row per path, '.' decimal, LF line endings.
// Binary: magic "GGBM", version u8 (=1), n_steps u32, n_paths u32, then
// row-major 64-bit floats (n_paths rows of n_steps+1 values), little-endian.

#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

#include "ggbm/pathgen.hpp"

namespace ggbm {

// Shortest decimal representation that round-trips; locale-independent.
inline std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string grid_to_csv(const PathGrid& grid) {
  std::string out;
  out.reserve(grid.n_paths() * grid.n_points() * 12 + 16 * grid.n_points());
  for (std::size_t j = 0; j < grid.n_points(); ++j) {
    if (j) out += ',';
    out += "t_" + std::to_string(j);
  }
  out += '\n';
  for (std::size_t i = 0; i < grid.n_paths(); ++i) {
    const auto row = grid.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out += ',';
      out += format_double(row[j]);
    }
    out += '\n';
  }
  return out;
}

inline constexpr char grid_magic[4] = {'G', 'G', 'B', 'M'};
inline constexpr std::uint8_t grid_format_version = 1;

inline void write_grid_binary(std::ostream& os, const PathGrid& grid) {
  os.write(grid_magic, 4);
  const std::uint8_t ver = grid_format_version;
  os.write(reinterpret_cast<const char*>(&ver), 1);
  const std::uint32_t n_steps = static_cast<std::uint32_t>(grid.n_steps());
  const std::uint32_t n_paths = static_cast<std::uint32_t>(grid.n_paths());
  os.write(reinterpret_cast<const char*>(&n_steps), 4);
  os.write(reinterpret_cast<const char*>(&n_paths), 4);
  os.write(reinterpret_cast<const char*>(grid.values().data()),
           static_cast<std::streamsize>(grid.values().size() * sizeof(double)));
}

inline PathGrid read_grid_binary(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, grid_magic, 4) != 0)
    throw std::runtime_error("read_grid_binary: bad magic");
  std::uint8_t ver = 0;
  is.read(reinterpret_cast<char*>(&ver), 1);
  if (ver != grid_format_version)
    throw std::runtime_error("read_grid_binary: unsupported version " +
                             std::to_string(ver));
  std::uint32_t n_steps = 0, n_paths = 0;
  is.read(reinterpret_cast<char*>(&n_steps), 4);
  is.read(reinterpret_cast<char*>(&n_paths), 4);
  if (!is || n_steps == 0 || n_paths == 0)
    throw std::runtime_error("read_grid_binary: bad header");
  PathGrid grid(n_steps, n_paths);
  for (std::size_t i = 0; i < grid.n_paths(); ++i) {
    auto row = grid.row(i);
    is.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(row.size() * sizeof(double)));
  }
  if (!is) throw std::runtime_error("read_grid_binary: truncated payload");
  return grid;
}

}  // namespace ggbm
