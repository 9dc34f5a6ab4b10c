// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace scpir {

using BigInt = boost::multiprecision::cpp_int;

// Exact fraction with arbitrary-precision integers. boost::rational keeps the
// canonical reduced form (gcd-reduced, positive denominator) for us.
using Rat = boost::rational<BigInt>;

inline BigInt rat_floor(const Rat& r) {
    BigInt q = r.numerator() / r.denominator();
    if (r.numerator() < 0 && q * r.denominator() != r.numerator()) --q;
    return q;
}

inline BigInt rat_ceil(const Rat& r) { return -rat_floor(-r); }

inline bool is_integer(const Rat& r) { return r.denominator() == 1; }

inline double to_double(const Rat& r) {
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

inline std::string to_string(const Rat& r) {
    std::string s = r.numerator().str();
    if (r.denominator() != 1) s += "/" + r.denominator().str();
    return s;
}

// Parses "3", "-4/7" or an exact decimal like "0.25" (= 1/4, no rounding).
inline Rat parse_rational(std::string_view text) {
    auto bad = [&] { throw std::invalid_argument("invalid fraction: '" + std::string(text) + "'"); };
    if (text.empty()) bad();
    auto slash = text.find('/');
    if (slash != std::string_view::npos) {
        std::string num(text.substr(0, slash)), den(text.substr(slash + 1));
        if (num.empty() || den.empty()) bad();
        BigInt n(num), d(den);
        if (d == 0) bad();
        return Rat(n, d);
    }
    auto dot = text.find('.');
    if (dot != std::string_view::npos) {
        std::string whole(text.substr(0, dot)), frac(text.substr(dot + 1));
        if (frac.empty()) bad();
        bool neg = !whole.empty() && whole[0] == '-';
        if (whole.empty() || whole == "-") whole += "0";
        BigInt scale = 1;
        for (size_t i = 0; i < frac.size(); ++i) scale *= 10;
        BigInt n = BigInt(whole) * scale;
        BigInt f(frac);
        n += neg ? -f : f;
        return Rat(n, scale);
    }
    return Rat(BigInt(std::string(text)), 1);
}

inline BigInt int_lcm(const BigInt& a, const BigInt& b) {
    if (a == 0 || b == 0) return 0;
    return a / boost::multiprecision::gcd(a, b) * b;
}

inline Rat rat_sum(const std::vector<Rat>& v) {
    Rat s(0);
    for (const auto& x : v) s += x;
    return s;
}

// t^e for rational t, non-negative integer e.
inline Rat rat_pow(const Rat& t, unsigned e) {
    Rat r(1);
    for (unsigned i = 0; i < e; ++i) r *= t;
    return r;
}

}  // namespace scpir
