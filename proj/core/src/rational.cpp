// Copyright 2026 The finfuzz Authors
// SPDX-License-Identifier: Apache-2.0

#include "finfuzz/rational.hpp"

#include <cctype>
#include <cstdlib>

namespace finfuzz {

namespace {

bool is_integer_text(const std::string& s) {
    if (s.empty()) return false;
    size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

Rat parse_decimal(const std::string& s) {
    // [sign] digits [. digits] with at least one digit overall
    std::string t = s;
    bool neg = false;
    if (!t.empty() && (t[0] == '-' || t[0] == '+')) {
        neg = t[0] == '-';
        t = t.substr(1);
    }
    auto dot = t.find('.');
    std::string ip = dot == std::string::npos ? t : t.substr(0, dot);
    std::string fp = dot == std::string::npos ? "" : t.substr(dot + 1);
    if (ip.empty() && fp.empty()) throw ParseError("empty number: '" + s + "'");
    for (char c : ip + fp)
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw ParseError("bad number: '" + s + "'");
    mpz_class num(ip.empty() ? "0" : ip);
    mpz_class den = 1;
    for (char c : fp) {
        num = num * 10 + (c - '0');
        den *= 10;
    }
    Rat r(num, den);
    r.canonicalize();
    return neg ? Rat(-r) : r;
}

}  // namespace

Rat rat_parse(const std::string& text) {
    if (text.empty()) throw ParseError("empty rational");
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        std::string n = text.substr(0, slash);
        std::string d = text.substr(slash + 1);
        if (!is_integer_text(n) || !is_integer_text(d))
            throw ParseError("bad rational: '" + text + "'");
        Rat r{mpz_class(n), mpz_class(d)};
        if (r.get_den() == 0) throw ParseError("zero denominator: '" + text + "'");
        r.canonicalize();
        return r;
    }
    auto e = text.find_first_of("eE");
    if (e != std::string::npos) {
        Rat mant = parse_decimal(text.substr(0, e));
        std::string es = text.substr(e + 1);
        if (!is_integer_text(es)) throw ParseError("bad exponent: '" + text + "'");
        long exp = std::strtol(es.c_str(), nullptr, 10);
        mpz_class pow10 = 1;
        for (long i = 0; i < (exp < 0 ? -exp : exp); ++i) pow10 *= 10;
        Rat r = exp >= 0 ? Rat(mant * pow10) : Rat(mant / Rat(pow10));
        r.canonicalize();
        return r;
    }
    return parse_decimal(text);
}

std::string rat_str(const Rat& r) {
    if (r.get_den() == 1) return r.get_num().get_str();
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

std::string rat_decimal(const Rat& r, int max_digits) {
    mpz_class num = r.get_num();
    mpz_class den = r.get_den();
    bool neg = num < 0;
    if (neg) num = -num;
    mpz_class ip = num / den;
    mpz_class rem = num % den;
    std::string out = (neg ? "-" : "") + ip.get_str();
    if (rem == 0) return out;
    out += ".";
    for (int i = 0; i < max_digits && rem != 0; ++i) {
        rem *= 10;
        mpz_class digit = rem / den;
        rem %= den;
        out += digit.get_str();
    }
    if (rem != 0) out += "...";
    return out;
}

}  // namespace finfuzz
