#pragma once

#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>

#include "forkgame/errors.hpp"

namespace forkgame {

// All monetary amounts are integer satoshi. 1 BTC = 1e8 sat.
using Sat = std::int64_t;

inline constexpr Sat kSatPerBtc = 100'000'000;

// Exact decimal parser: no binary-float round trip. Accepts an optional
// sign, up to 8 fractional digits, and underscores as digit separators.
inline Sat parse_btc_to_sat(std::string_view text, long line = -1) {
    std::size_t i = 0;
    bool negative = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
        negative = text[i] == '-';
        ++i;
    }
    if (i == text.size()) throw ParseError("empty decimal amount", line);

    auto overflow = [&] { throw ParseError("decimal amount out of range", line); };
    std::int64_t whole = 0;
    bool any_digit = false;
    for (; i < text.size() && text[i] != '.'; ++i) {
        if (text[i] == '_') continue;
        if (!std::isdigit(static_cast<unsigned char>(text[i])))
            throw ParseError("bad character in decimal amount", line);
        any_digit = true;
        if (whole > (INT64_MAX - 9) / 10) overflow();
        whole = whole * 10 + (text[i] - '0');
    }
    std::int64_t frac = 0;
    int frac_digits = 0;
    if (i < text.size() && text[i] == '.') {
        ++i;
        for (; i < text.size(); ++i) {
            if (text[i] == '_') continue;
            if (!std::isdigit(static_cast<unsigned char>(text[i])))
                throw ParseError("bad character in decimal amount", line);
            any_digit = true;
            if (++frac_digits > 8)
                throw ParseError("more than 8 fractional digits; not representable in satoshi", line);
            frac = frac * 10 + (text[i] - '0');
        }
    }
    if (!any_digit) throw ParseError("no digits in decimal amount", line);
    for (int d = frac_digits; d < 8; ++d) frac *= 10;
    if (whole > (INT64_MAX - frac) / kSatPerBtc) overflow();
    Sat value = whole * kSatPerBtc + frac;
    return negative ? -value : value;
}

inline std::string format_btc(Sat amount) {
    bool negative = amount < 0;
    if (negative) amount = -amount;
    std::string whole = std::to_string(amount / kSatPerBtc);
    std::string frac = std::to_string(amount % kSatPerBtc);
    frac.insert(frac.begin(), 8 - frac.size(), '0');
    while (frac.size() > 2 && frac.back() == '0') frac.pop_back();
    return (negative ? "-" : "") + whole + "." + frac;
}

// Small exact decimal: value = mantissa / 10^scale. Used where threshold
// arithmetic must not pick up binary-float noise (mining-power fractions
// fed to the closed-form bounds).
struct Dec {
    std::int64_t mantissa = 0;
    int scale = 0;  // value = mantissa * 10^-scale

    double to_double() const {
        double v = static_cast<double>(mantissa);
        for (int i = 0; i < scale; ++i) v /= 10.0;
        return v;
    }
};

inline Dec parse_dec(std::string_view text) {
    std::size_t i = 0;
    bool negative = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
        negative = text[i] == '-';
        ++i;
    }
    std::int64_t mant = 0;
    int scale = 0;
    bool seen_dot = false, any = false;
    for (; i < text.size(); ++i) {
        char c = text[i];
        if (c == '.') {
            if (seen_dot) throw DomainError("malformed decimal: " + std::string(text));
            seen_dot = true;
            continue;
        }
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw DomainError("malformed decimal: " + std::string(text));
        any = true;
        if (mant > (INT64_MAX - 9) / 10) throw DomainError("decimal out of range: " + std::string(text));
        mant = mant * 10 + (c - '0');
        if (seen_dot) ++scale;
    }
    if (!any) throw DomainError("malformed decimal: " + std::string(text));
    return Dec{negative ? -mant : mant, scale};
}

}  // namespace forkgame
