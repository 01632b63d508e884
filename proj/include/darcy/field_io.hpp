#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "darcy/field.hpp"

namespace darcy {

// Field file layout (little-endian, no padding):
//   bytes 0..3   magic "ELFD"
//   bytes 4..7   u32 version = 1
//   bytes 8..11  u32 dimension d
//   bytes 12..15 u32 points per axis n
//   bytes 16..   n^d IEEE-754 float64 values, row-major
namespace detail {

static_assert(std::endian::native == std::endian::little,
              "field file I/O assumes a little-endian host");

inline void put_u32(std::ostream& os, std::uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), 4);
}

inline std::uint32_t get_u32(std::istream& is, std::size_t offset, const std::string& what) {
    std::uint32_t v = 0;
    if (!is.read(reinterpret_cast<char*>(&v), 4))
        throw DecodeError("field file truncated at byte offset " + std::to_string(offset) + " while reading " + what);
    return v;
}

}  // namespace detail

inline void field_write(const Field& f, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DecodeError("cannot open field file for writing: " + path);
    os.write("ELFD", 4);
    detail::put_u32(os, 1u);
    detail::put_u32(os, static_cast<std::uint32_t>(f.grid.d));
    detail::put_u32(os, static_cast<std::uint32_t>(f.grid.n));
    os.write(reinterpret_cast<const char*>(f.values.data()),
             static_cast<std::streamsize>(f.values.size() * sizeof(double)));
    if (!os) throw DecodeError("short write on field file: " + path);
}

inline Field field_read(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DecodeError("cannot open field file: " + path);

    char magic[4] = {0, 0, 0, 0};
    if (!is.read(magic, 4)) throw DecodeError(path + ": truncated at byte offset 0 while reading magic");
    if (std::memcmp(magic, "ELFD", 4) != 0)
        throw DecodeError(path + ": bad magic at byte offset 0, expected \"ELFD\"");

    const std::uint32_t version = detail::get_u32(is, 4, "version");
    if (version != 1) throw DecodeError(path + ": unsupported version at byte offset 4");
    const std::uint32_t d = detail::get_u32(is, 8, "dimension");
    const std::uint32_t n = detail::get_u32(is, 12, "points per axis");

    GridSpec grid;
    try {
        grid = GridSpec(static_cast<int>(d), static_cast<int>(n));
    } catch (const ValidationError& e) {
        throw DecodeError(path + ": bad grid header at byte offset 8: " + e.what());
    }

    Field out(grid);
    const std::streamsize bytes = static_cast<std::streamsize>(out.values.size() * sizeof(double));
    if (!is.read(reinterpret_cast<char*>(out.values.data()), bytes))
        throw DecodeError(path + ": truncated payload at byte offset " +
                          std::to_string(16 + is.gcount()) + ", expected " + std::to_string(bytes) +
                          " payload bytes");
    return out;
}

}  // namespace darcy
