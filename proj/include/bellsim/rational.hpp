// Copyright (c) 2026 bellsim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

#include "bellsim/errors.hpp"

namespace bellsim {

// Exact rational scalars for the certified arm of the global-section LP.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

/// Canonical text form: "n/d", or just "n" when the denominator is 1.
inline std::string rational_to_string(const Rational& q) {
    BigInt n = numerator(q), d = denominator(q);
    if (d == 1) return n.str();
    return n.str() + "/" + d.str();
}

namespace detail {

inline bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

/// cpp_int's string constructor reads a leading '0' as an octal prefix, so
/// plain decimal digit runs must be trimmed first.
inline BigInt digits_to_int(std::string_view s) {
    std::size_t k = 0;
    while (k + 1 < s.size() && s[k] == '0') ++k;
    return BigInt{std::string(s.substr(k))};
}

}  // namespace detail

/// Parse "n/d", an integer, or a decimal with optional exponent
/// ("0.25", "-1", "2.5e-3", "3/8") into an exact rational.
/// Returns false on malformed input instead of throwing, so callers can
/// attach file positions.
inline bool parse_rational(std::string_view s, Rational& out) {
    if (s.empty()) return false;
    auto slash = s.find('/');
    if (slash != std::string_view::npos) {
        std::string_view ns = s.substr(0, slash), ds = s.substr(slash + 1);
        bool neg = false;
        if (!ns.empty() && (ns[0] == '+' || ns[0] == '-')) {
            neg = ns[0] == '-';
            ns.remove_prefix(1);
        }
        if (!detail::all_digits(ns) || !detail::all_digits(ds)) return false;
        BigInt n = detail::digits_to_int(ns);
        BigInt d = detail::digits_to_int(ds);
        if (d == 0) return false;
        out = Rational(neg ? -n : n, d);
        return true;
    }

    bool neg = false;
    if (s[0] == '+' || s[0] == '-') {
        neg = s[0] == '-';
        s.remove_prefix(1);
    }
    auto epos = s.find_first_of("eE");
    long long exp10 = 0;
    if (epos != std::string_view::npos) {
        std::string_view es = s.substr(epos + 1);
        bool eneg = false;
        if (!es.empty() && (es[0] == '+' || es[0] == '-')) {
            eneg = es[0] == '-';
            es.remove_prefix(1);
        }
        if (!detail::all_digits(es) || es.size() > 6) return false;
        exp10 = std::stoll(std::string(es));
        if (eneg) exp10 = -exp10;
        s = s.substr(0, epos);
    }
    auto dot = s.find('.');
    std::string digits;
    if (dot != std::string_view::npos) {
        std::string_view ip = s.substr(0, dot), fp = s.substr(dot + 1);
        if (ip.empty() && fp.empty()) return false;
        if (!ip.empty() && !detail::all_digits(ip)) return false;
        if (!fp.empty() && !detail::all_digits(fp)) return false;
        digits = std::string(ip) + std::string(fp);
        exp10 -= static_cast<long long>(fp.size());
    } else {
        if (!detail::all_digits(s)) return false;
        digits = std::string(s);
    }
    if (digits.empty()) return false;
    BigInt n = detail::digits_to_int(digits);
    if (neg) n = -n;
    if (exp10 >= 0) {
        out = Rational(n * boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(exp10)), 1);
    } else {
        out = Rational(n, boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(-exp10)));
    }
    return true;
}

inline Rational rational_from_string(std::string_view s) {
    Rational q;
    if (!parse_rational(s, q)) throw Error("malformed rational '" + std::string(s) + "'");
    return q;
}

inline constexpr std::int64_t kRoundingDenominator = 1'000'000'000'000ll;  // 1e12 grid

/// Nearest grid rational round(x * den)/den. Inputs here are probabilities,
/// well inside the representable range.
inline Rational round_to_grid(double x, std::int64_t den = kRoundingDenominator) {
    if (!std::isfinite(x)) throw OutOfRange("round_to_grid: non-finite value");
    double scaled = x * static_cast<double>(den);
    if (std::abs(scaled) > 9.0e18) throw OutOfRange("round_to_grid: value too large for the grid");
    return Rational(BigInt(std::llround(scaled)), BigInt(den));
}

}  // namespace bellsim
