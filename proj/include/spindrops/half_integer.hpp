#pragma once

#include <compare>
#include <cstdlib>
#include <string>
#include <string_view>

#include "spindrops/error.hpp"

namespace spindrops {

/// Exact half-integer stored as twice its value.
class HalfInteger {
  public:
    constexpr HalfInteger() = default;
    static constexpr HalfInteger from_twice(int twice) { return HalfInteger(twice); }
    static constexpr HalfInteger from_int(int value) { return HalfInteger(2 * value); }

    /// Accepts "3", "-1", "1/2", "-3/2".
    static HalfInteger parse(std::string_view text);

    constexpr int twice() const { return twice_; }
    constexpr bool is_integer() const { return twice_ % 2 == 0; }
    constexpr double value() const { return twice_ / 2.0; }
    /// Only valid when is_integer().
    constexpr int as_int() const { return twice_ / 2; }

    constexpr HalfInteger operator+(HalfInteger o) const { return HalfInteger(twice_ + o.twice_); }
    constexpr HalfInteger operator-(HalfInteger o) const { return HalfInteger(twice_ - o.twice_); }
    constexpr HalfInteger operator-() const { return HalfInteger(-twice_); }
    constexpr auto operator<=>(const HalfInteger &) const = default;

    std::string to_string() const {
        if (is_integer())
            return std::to_string(twice_ / 2);
        return std::to_string(twice_) + "/2";
    }

  private:
    explicit constexpr HalfInteger(int twice) : twice_(twice) {}
    int twice_ = 0;
};

constexpr HalfInteger operator""_hi(unsigned long long twice) {
    return HalfInteger::from_twice(static_cast<int>(twice));
}

inline HalfInteger HalfInteger::parse(std::string_view text) {
    auto parse_int = [&](std::string_view s) {
        if (s.empty())
            throw ParseError("empty number in half-integer '" + std::string(text) + "'", 0);
        std::size_t i = 0;
        bool neg = false;
        if (s[0] == '-' || s[0] == '+') {
            neg = s[0] == '-';
            i = 1;
        }
        if (i == s.size())
            throw ParseError("missing digits in half-integer '" + std::string(text) + "'", i);
        int v = 0;
        for (; i < s.size(); ++i) {
            if (s[i] < '0' || s[i] > '9')
                throw ParseError("invalid character in half-integer '" + std::string(text) + "'", i);
            v = v * 10 + (s[i] - '0');
        }
        return neg ? -v : v;
    };
    while (!text.empty() && text.front() == ' ')
        text.remove_prefix(1);
    while (!text.empty() && text.back() == ' ')
        text.remove_suffix(1);
    auto slash = text.find('/');
    if (slash == std::string_view::npos)
        return from_int(parse_int(text));
    int num = parse_int(text.substr(0, slash));
    int den = parse_int(text.substr(slash + 1));
    if (den == 2)
        return from_twice(num);
    if (den == 1)
        return from_int(num);
    throw ParseError("half-integer denominator must be 1 or 2 in '" + std::string(text) + "'", slash + 1);
}

} // namespace spindrops
