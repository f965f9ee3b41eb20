#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <system_error>

#include "vibroute/errors.hpp"

namespace vibroute {

// Locale-independent number <-> text helpers. Doubles use the shortest
// representation that round-trips exactly, so serialize/parse is lossless.

inline std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string format_int(std::int64_t v) {
    char buf[24];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text, const std::string& field, std::size_t line = 0) {
    double v = 0.0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw ParseError("invalid number for field '" + field + "': '" + std::string(text) + "'", line);
    }
    return v;
}

inline std::int64_t parse_int(std::string_view text, const std::string& field, std::size_t line = 0) {
    std::int64_t v = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw ParseError("invalid integer for field '" + field + "': '" + std::string(text) + "'", line);
    }
    return v;
}

}  // namespace vibroute
