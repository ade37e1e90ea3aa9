#pragma once

#include <charconv>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bicoid {

/// Shortest decimal string that parses back to exactly the same double.
inline std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text, const std::string& key) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last)
        throw std::invalid_argument("config: key " + key + " has a malformed numeric value '" + std::string(text) +
                                    "'");
    return v;
}

inline std::int64_t parse_int(std::string_view text, const std::string& key) {
    std::int64_t v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw std::invalid_argument("config: key " + key + " has a malformed integer value '" + std::string(text) +
                                    "'");
    return v;
}

inline std::uint64_t parse_uint(std::string_view text, const std::string& key) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw std::invalid_argument("config: key " + key + " has a malformed unsigned value '" + std::string(text) +
                                    "'");
    return v;
}

} // namespace bicoid
