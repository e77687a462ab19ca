#include "scrn/rational.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>

namespace scrn {

namespace {

using i128 = __int128;

constexpr std::int64_t i64_min = std::numeric_limits<std::int64_t>::min();
constexpr std::int64_t i64_max = std::numeric_limits<std::int64_t>::max();

bool fits_i64(i128 v) { return v >= i64_min && v <= i64_max; }

i128 gcd128(i128 a, i128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        i128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

std::optional<rational> reduce(i128 num, i128 den) {
    if (den == 0) return std::nullopt;
    if (num == 0) return rational{0, 1};
    if (den < 0) {
        num = -num;
        den = -den;
    }
    i128 g = gcd128(num, den);
    num /= g;
    den /= g;
    if (!fits_i64(num) || !fits_i64(den)) return std::nullopt;
    return rational{static_cast<std::int64_t>(num), static_cast<std::int64_t>(den)};
}

} // namespace

std::optional<rational> rational::make(std::int64_t num, std::int64_t den) {
    return reduce(num, den);
}

double rational::to_double() const {
    return static_cast<double>(num) / static_cast<double>(den);
}

std::string rational::str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
}

std::optional<rational> rat_add(const rational& a, const rational& b) {
    i128 num = i128(a.num) * b.den + i128(b.num) * a.den;
    i128 den = i128(a.den) * b.den;
    return reduce(num, den);
}

std::optional<rational> rat_sub(const rational& a, const rational& b) {
    i128 num = i128(a.num) * b.den - i128(b.num) * a.den;
    i128 den = i128(a.den) * b.den;
    return reduce(num, den);
}

std::optional<rational> rat_mul(const rational& a, const rational& b) {
    return reduce(i128(a.num) * b.num, i128(a.den) * b.den);
}

std::optional<rational> rat_div(const rational& a, const rational& b) {
    if (b.num == 0) return std::nullopt;
    return reduce(i128(a.num) * b.den, i128(a.den) * b.num);
}

std::optional<rational> rat_pow(const rational& a, std::int64_t e) {
    if (e < 0) {
        if (a.num == 0) return std::nullopt;
        auto inv = rat_div(rational{1, 1}, a);
        if (!inv) return std::nullopt;
        return rat_pow(*inv, -e);
    }
    rational acc{1, 1};
    rational base = a;
    while (e > 0) {
        if (e & 1) {
            auto r = rat_mul(acc, base);
            if (!r) return std::nullopt;
            acc = *r;
        }
        e >>= 1;
        if (e > 0) {
            auto r = rat_mul(base, base);
            if (!r) return std::nullopt;
            base = *r;
        }
    }
    return acc;
}

int rat_cmp(const rational& a, const rational& b) {
    i128 lhs = i128(a.num) * b.den;
    i128 rhs = i128(b.num) * a.den;
    if (lhs < rhs) return -1;
    if (lhs > rhs) return 1;
    return 0;
}

std::optional<rational> rat_from_decimal(const std::string& text) {
    // [+-]? digits [. digits] [eE [+-] digits]
    const char* p = text.c_str();
    bool neg = false;
    if (*p == '+' || *p == '-') {
        neg = (*p == '-');
        ++p;
    }
    if (!std::isdigit(static_cast<unsigned char>(*p))) return std::nullopt;

    i128 mant = 0;
    int frac_digits = 0;
    bool overflow = false;
    auto push_digit = [&](char c) {
        if (overflow) return;
        mant = mant * 10 + (c - '0');
        if (mant > (i128(1) << 100)) overflow = true;
    };
    while (std::isdigit(static_cast<unsigned char>(*p))) push_digit(*p++);
    if (*p == '.') {
        ++p;
        if (!std::isdigit(static_cast<unsigned char>(*p))) return std::nullopt;
        while (std::isdigit(static_cast<unsigned char>(*p))) {
            push_digit(*p++);
            ++frac_digits;
        }
    }
    long exp10 = 0;
    if (*p == 'e' || *p == 'E') {
        ++p;
        char* end = nullptr;
        exp10 = std::strtol(p, &end, 10);
        if (end == p) return std::nullopt;
        p = end;
    }
    if (*p != '\0' || overflow) return std::nullopt;

    long shift = exp10 - frac_digits;
    i128 num = neg ? -mant : mant;
    i128 den = 1;
    if (shift > 38 || shift < -38) return std::nullopt;
    const i128 limit = i128(1) << 123;
    for (long i = 0; i < shift; ++i) {
        num *= 10;
        if (num > limit || num < -limit) return std::nullopt;
    }
    for (long i = 0; i < -shift; ++i) den *= 10;
    return reduce(num, den);
}

} // namespace scrn
