#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace scrn {

// Exact rational with int64 numerator/denominator. Arithmetic goes through
// __int128 and reports overflow instead of wrapping; callers fall back to
// doubles when exactness is lost. Invariant: den > 0, gcd(|num|, den) == 1.
struct rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    static rational from_int(std::int64_t n) { return rational{n, 1}; }

    // normalizes sign and gcd; nullopt when den == 0 or the reduced parts
    // do not fit in int64
    static std::optional<rational> make(std::int64_t num, std::int64_t den);

    bool is_integer() const { return den == 1; }
    bool is_zero() const { return num == 0; }
    bool negative() const { return num < 0; }

    double to_double() const;
    std::string str() const;

    friend bool operator==(const rational& a, const rational& b) {
        return a.num == b.num && a.den == b.den;
    }
};

// each returns nullopt on overflow
std::optional<rational> rat_add(const rational& a, const rational& b);
std::optional<rational> rat_sub(const rational& a, const rational& b);
std::optional<rational> rat_mul(const rational& a, const rational& b);
std::optional<rational> rat_div(const rational& a, const rational& b); // nullopt also when b == 0
std::optional<rational> rat_pow(const rational& a, std::int64_t e);    // nullopt when a == 0 and e < 0

// exact comparisons; cross-multiplication cannot overflow in __int128
int rat_cmp(const rational& a, const rational& b); // -1, 0, +1

// exact value of a decimal literal such as "12", "0.25", "3e-2";
// nullopt when the value does not fit
std::optional<rational> rat_from_decimal(const std::string& text);

} // namespace scrn
