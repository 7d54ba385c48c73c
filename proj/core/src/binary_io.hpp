#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <vector>

#include "elastic2d/error.hpp"

namespace elastic2d {

inline void write_le(std::ostream& os, const std::vector<double>& v) {
  static_assert(sizeof(double) == 8);
  for (double d : v) {
    std::uint64_t u;
    std::memcpy(&u, &d, 8);
    if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap64(u);
    os.write(reinterpret_cast<const char*>(&u), 8);
  }
}

inline void read_le(std::istream& is, std::vector<double>& v) {
  for (double& d : v) {
    std::uint64_t u;
    if (!is.read(reinterpret_cast<char*>(&u), 8)) throw ConfigError("binary file truncated");
    if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap64(u);
    std::memcpy(&d, &u, 8);
  }
}

}  // namespace elastic2d
