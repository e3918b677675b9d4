#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "forkgame/errors.hpp"
#include "forkgame/money.hpp"

#include <nlohmann/json.hpp>

namespace forkgame {

namespace detail {

using i128 = __int128;

inline i128 pow10_128(int e) {
    i128 v = 1;
    while (e-- > 0) v *= 10;
    return v;
}

inline i128 ceil_div(i128 num, i128 den) { return (num + den - 1) / den; }

inline Sat to_sat_checked(i128 v, const char* what) {
    if (v > static_cast<i128>(INT64_MAX) || v < static_cast<i128>(INT64_MIN))
        throw DomainError(std::string(what) + " overflows the satoshi range");
    return static_cast<Sat>(v);
}

inline void require_fraction(const Dec& lambda, const char* name) {
    if (lambda.scale < 0 || lambda.scale > 18)
        throw DomainError(std::string(name) + " has an unsupported scale");
    i128 one = pow10_128(lambda.scale);
    if (lambda.mantissa <= 0 || static_cast<i128>(lambda.mantissa) > one)
        throw DomainError(std::string(name) + " must lie in (0, 1]");
}

}  // namespace detail

// Bribe required when every miner must be persuaded individually: the
// weakest miner sets the price. Exact; rounds up.
inline Sat legacy_bribe_bound(Sat f1, Sat f, const Dec& lambda_min) {
    if (f1 <= f) throw DomainError("revocation block fee must exceed the average block fee");
    detail::require_fraction(lambda_min, "lambda_min");
    detail::i128 num = static_cast<detail::i128>(f1 - f) * detail::pow10_128(lambda_min.scale);
    return detail::to_sat_checked(detail::ceil_div(num, lambda_min.mantissa), "legacy bound");
}

// Bribe sufficient under the forking threat, before the small-constant
// substitution: (c_p1*fbar_p1 + c_p1*fbar + c_p2*fbar_p2 + (f1-f)) /
// (lambda_s - 0.05^(T/2)) + c_p2*fbar, rounded up. Exact when T is even and
// the 0.05^(T/2) term fits the integer grid; the term is dropped once it
// falls below 1e-18 (far beyond satoshi resolution), and odd T falls back to
// long-double evaluation.
inline Sat bf_bribe_bound_general(Sat f_bar, Sat f1, Sat f, const Dec& lambda_s, int T,
                                  std::int64_t c_p1, std::int64_t c_p2, Sat f_bar_p1,
                                  Sat f_bar_p2) {
    if (f1 <= f) throw DomainError("revocation block fee must exceed the average block fee");
    if (T < 1) throw DomainError("timelock must be positive");
    if (c_p1 < 0 || c_p2 < 0 || f_bar < 0 || f_bar_p1 < 0 || f_bar_p2 < 0)
        throw DomainError("fee inputs must be non-negative");
    detail::require_fraction(lambda_s, "lambda_s");

    const Sat numer = c_p1 * f_bar_p1 + c_p1 * f_bar + c_p2 * f_bar_p2 + (f1 - f);
    const double shallow = std::pow(0.05, static_cast<double>(T) / 2.0);
    if (lambda_s.to_double() <= shallow)
        throw DomainError("lambda_s must exceed 0.05^(T/2)");

    if (T % 2 == 0) {
        // 0.05^(T/2) = 1 / 20^(T/2): exact as long as 20^(T/2) fits.
        int h = T / 2;
        if (shallow < 1e-18) {
            detail::i128 num = static_cast<detail::i128>(numer) * detail::pow10_128(lambda_s.scale);
            detail::i128 q = detail::ceil_div(num, lambda_s.mantissa);
            return detail::to_sat_checked(q + c_p2 * f_bar, "forking-threat bound");
        }
        detail::i128 twenty_h = 1;
        bool fits = true;
        for (int i = 0; i < h; ++i) {
            if (twenty_h > (static_cast<detail::i128>(1) << 115) / 20) {
                fits = false;
                break;
            }
            twenty_h *= 20;
        }
        if (fits) {
            detail::i128 scale = detail::pow10_128(lambda_s.scale);
            detail::i128 den = static_cast<detail::i128>(lambda_s.mantissa) * twenty_h - scale;
            if (den <= 0) throw DomainError("lambda_s must exceed 0.05^(T/2)");
            detail::i128 num = static_cast<detail::i128>(numer) * scale * twenty_h;
            detail::i128 q = detail::ceil_div(num, den);
            return detail::to_sat_checked(q + c_p2 * f_bar, "forking-threat bound");
        }
    }
    long double denom = static_cast<long double>(lambda_s.to_double()) -
                        std::pow(0.05L, static_cast<long double>(T) / 2.0L);
    long double value = static_cast<long double>(numer) / denom +
                        static_cast<long double>(c_p2 * f_bar);
    return static_cast<Sat>(std::ceil(value - 1e-9L));
}

// The headline form: (2*fbar + 2*(f1-f)) / lambda_s + fbar, rounded up.
inline Sat bf_bribe_bound_simplified(Sat f_bar, Sat f1, Sat f, const Dec& lambda_s) {
    if (f1 < f) throw DomainError("revocation block fee must be at least the average block fee");
    if (f_bar < 0) throw DomainError("average tx fee must be non-negative");
    detail::require_fraction(lambda_s, "lambda_s");
    detail::i128 num = static_cast<detail::i128>(2 * f_bar + 2 * (f1 - f)) *
                       detail::pow10_128(lambda_s.scale);
    detail::i128 q = detail::ceil_div(num, lambda_s.mantissa);
    return detail::to_sat_checked(q + f_bar, "simplified bound");
}

// Ceiling above which a 1-2% miner would rather mine the revocation block
// itself: (f1-f)/lambda_j, rounded down.
inline Sat feasibility_ceiling(Sat f1, Sat f, const Dec& lambda_j) {
    if (f1 <= f) throw DomainError("revocation block fee must exceed the average block fee");
    detail::require_fraction(lambda_j, "lambda_j");
    detail::i128 num = static_cast<detail::i128>(f1 - f) * detail::pow10_128(lambda_j.scale);
    return detail::to_sat_checked(num / lambda_j.mantissa, "feasibility ceiling");
}

// Smallest deposit that makes the fork threat credible: strictly above
// lambda_s * (f + B).
inline Sat penalty_floor(const Dec& lambda_s, Sat f, Sat B) {
    if (f < 0 || B < 0 || f + B <= 0) throw DomainError("block value must be positive");
    detail::require_fraction(lambda_s, "lambda_s");
    detail::i128 num = static_cast<detail::i128>(lambda_s.mantissa) * (f + B);
    detail::i128 fl = num / detail::pow10_128(lambda_s.scale);
    return detail::to_sat_checked(fl + 1, "penalty floor");
}

// Exact conversion to fiat cents, half-up.
inline std::int64_t to_fiat_cents(Sat amount, const Dec& price_per_btc) {
    if (price_per_btc.mantissa <= 0) throw DomainError("price must be positive");
    if (price_per_btc.scale < 0 || price_per_btc.scale > 18)
        throw DomainError("price has an unsupported scale");
    detail::i128 num = static_cast<detail::i128>(amount) * price_per_btc.mantissa * 100;
    detail::i128 den = detail::pow10_128(price_per_btc.scale) * kSatPerBtc;
    detail::i128 cents = (2 * num + den) / (2 * den);  // round half up
    return static_cast<std::int64_t>(cents);
}

inline double to_fiat(Sat amount, const Dec& price_per_btc) {
    return static_cast<double>(to_fiat_cents(amount, price_per_btc)) / 100.0;
}

enum class BoundKind { Legacy, BF_General, BF_Simplified, FeasibilityCeiling, PenaltyFloor };

inline const char* to_string(BoundKind k) {
    switch (k) {
        case BoundKind::Legacy: return "legacy";
        case BoundKind::BF_General: return "bf-general";
        case BoundKind::BF_Simplified: return "bf-simplified";
        case BoundKind::FeasibilityCeiling: return "feasibility-ceiling";
        case BoundKind::PenaltyFloor: return "penalty-floor";
    }
    return "?";
}

struct CostQuote {
    BoundKind kind = BoundKind::Legacy;
    Sat value_sat = 0;
    nlohmann::json inputs;
    std::optional<std::int64_t> fiat_cents;
};

}  // namespace forkgame
