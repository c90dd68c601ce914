#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ultranorm {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline int sign(const Rat& r) { return r.sign(); }
inline int sign(const Int& n) { return n.sign(); }

inline Int rat_num(const Rat& r) { return numerator(r); }
inline Int rat_den(const Rat& r) { return denominator(r); }

/// Largest integer n with n <= r.
inline Int rat_floor(const Rat& r) {
    Int q = rat_num(r) / rat_den(r);
    if (r < 0 && q * rat_den(r) != rat_num(r)) --q;
    return q;
}

/// Exact base-cases raised to a non-negative integer power.
inline Int int_pow(Int base, unsigned long e) {
    Int out = 1;
    while (e) {
        if (e & 1) out *= base;
        base *= base;
        e >>= 1;
    }
    return out;
}

struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct unresolved_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parses "p", "-p" or "p/q" into an exact rational.
inline Rat parse_rat(std::string s) {
    if (!s.empty() && s.front() == '+') s.erase(0, 1);
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rat(Int(s));
        Int p(s.substr(0, slash));
        Int q(s.substr(slash + 1));
        if (q == 0) throw parse_error("zero denominator in rational: " + s);
        return Rat(p, q);
    } catch (const std::runtime_error&) {
        throw parse_error("bad rational literal: '" + s + "'");
    }
}

inline std::string rat_str(const Rat& r) {
    std::ostringstream os;
    os << rat_num(r);
    if (rat_den(r) != 1) os << "/" << rat_den(r);
    return os.str();
}

}  // namespace ultranorm
