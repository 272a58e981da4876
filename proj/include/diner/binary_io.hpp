#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <type_traits>

#include "diner/errors.hpp"

namespace diner::binio {

// Little-endian scalar I/O shared by the binary file formats.

template <typename T>
void write_le(std::ostream& os, T value) {
    static_assert(std::is_arithmetic_v<T>);
    std::array<char, sizeof(T)> bytes{};
    std::memcpy(bytes.data(), &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
        std::reverse(bytes.begin(), bytes.end());
    }
    os.write(bytes.data(), sizeof(T));
}

template <typename T>
[[nodiscard]] T read_le(std::istream& is, std::string_view what) {
    static_assert(std::is_arithmetic_v<T>);
    std::array<char, sizeof(T)> bytes{};
    if (!is.read(bytes.data(), sizeof(T))) {
        throw FormatError("truncated stream while reading " + std::string(what));
    }
    if constexpr (std::endian::native == std::endian::big) {
        std::reverse(bytes.begin(), bytes.end());
    }
    T value;
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
}

inline void write_magic(std::ostream& os, std::string_view magic) {
    os.write(magic.data(), static_cast<std::streamsize>(magic.size()));
}

inline void expect_magic(std::istream& is, std::string_view magic) {
    std::string got(magic.size(), '\0');
    if (!is.read(got.data(), static_cast<std::streamsize>(got.size())) || got != magic) {
        throw FormatError("bad magic: expected '" + std::string(magic) + "', found '" + got + "'");
    }
}

inline void write_string(std::ostream& os, std::string_view s) {
    write_le<std::uint32_t>(os, static_cast<std::uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

[[nodiscard]] inline std::string read_string(std::istream& is, std::string_view what) {
    const auto n = read_le<std::uint32_t>(is, what);
    std::string s(n, '\0');
    if (n > 0 && !is.read(s.data(), n)) {
        throw FormatError("truncated stream while reading " + std::string(what));
    }
    return s;
}

// dtype tags shared by every binary format.
inline constexpr std::uint8_t dtype_f32 = 1;
inline constexpr std::uint8_t dtype_f64 = 2;

template <typename Real>
[[nodiscard]] constexpr std::uint8_t dtype_tag() {
    return std::is_same_v<Real, float> ? dtype_f32 : dtype_f64;
}

} // namespace diner::binio
