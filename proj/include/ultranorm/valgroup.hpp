#pragma once

// Exact arithmetic for norm magnitudes e^{-(a + b*theta)}, theta = sqrt(2).
//
// The two-generator exponent group Q + Z*theta gives a decidable total order
// (sign analysis plus squaring) and hosts both regimes every hypothesis in
// this library needs: values inside the valuation group V_K = e^{-Q} and
// values outside it.

#include <compare>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

#include "rational.hpp"

namespace ultranorm {

/// The real number a + b*theta with theta = sqrt(2), represented exactly.
struct Exponent {
    Rat a;
    Int b;

    Exponent() : a(0), b(0) {}
    Exponent(Rat a_, Int b_ = 0) : a(std::move(a_)), b(std::move(b_)) {}
    Exponent(int a_) : a(a_), b(0) {}

    bool is_rational() const { return b == 0; }
    bool is_zero() const { return a == 0 && b == 0; }

    Exponent operator+(const Exponent& o) const { return Exponent(a + o.a, b + o.b); }
    Exponent operator-(const Exponent& o) const { return Exponent(a - o.a, b - o.b); }
    Exponent operator-() const { return Exponent(-a, -b); }

    Exponent& operator+=(const Exponent& o) {
        a += o.a;
        b += o.b;
        return *this;
    }

    // sign of a + b*sqrt(2), exactly.
    int sgn() const {
        if (b == 0) return sign(a);
        if (b > 0) {
            if (a >= 0) return 1;
            // a < 0: compare |a| with b*sqrt(2), i.e. a^2 with 2 b^2
            Rat a2 = a * a;
            Rat b2 = Rat(2 * b * b);
            if (a2 == b2) return 0;  // impossible (theta irrational), kept for clarity
            return a2 < b2 ? 1 : -1;
        }
        // b < 0: negate
        return -Exponent(-a, -b).sgn();
    }

    bool operator==(const Exponent& o) const { return a == o.a && b == o.b; }
    bool operator<(const Exponent& o) const { return (*this - o).sgn() < 0; }
    bool operator<=(const Exponent& o) const { return (*this - o).sgn() <= 0; }
    bool operator>(const Exponent& o) const { return (*this - o).sgn() > 0; }
    bool operator>=(const Exponent& o) const { return (*this - o).sgn() >= 0; }

    /// "a", "a+b*theta", "b*theta", with rationals as "p/q".
    std::string str() const {
        if (b == 0) return rat_str(a);
        std::string tpart;
        if (b == 1) tpart = "theta";
        else if (b == -1) tpart = "-theta";
        else tpart = b.str() + "*theta";
        if (a == 0) return tpart;
        if (b > 0) return rat_str(a) + "+" + tpart;
        return rat_str(a) + tpart;  // tpart carries the minus sign
    }
};

/// Parses the exponent grammar "a", "a+b*theta", "a-b*theta", "b*theta",
/// "theta", "-theta" with a, b integer fractions.
inline Exponent parse_exponent(std::string s) {
    // strip spaces
    std::string t;
    for (char c : s)
        if (c != ' ') t += c;
    if (t.empty()) throw parse_error("empty exponent");
    auto pos = t.find("theta");
    if (pos == std::string::npos) return Exponent(parse_rat(t), 0);
    if (pos + 5 != t.size()) throw parse_error("bad exponent: '" + s + "'");
    std::string head = t.substr(0, pos);  // e.g. "1/2+3*", "-", "", "2*"
    // split off the b-coefficient: the part after the last '+' or '-' that is
    // not the leading sign.
    size_t cut = std::string::npos;
    for (size_t i = head.size(); i-- > 1;) {
        if (head[i] == '+' || head[i] == '-') {
            // exclude '/' contexts; exponents carry no e-notation so this is safe
            cut = i;
            break;
        }
    }
    std::string apart, bpart;
    if (cut == std::string::npos) {
        apart = "";
        bpart = head;
    } else {
        apart = head.substr(0, cut);
        bpart = head.substr(cut);  // includes sign
    }
    Int b;
    if (bpart.empty() || bpart == "+") b = 1;
    else if (bpart == "-") b = -1;
    else {
        if (bpart.back() != '*') throw parse_error("expected '*theta' in exponent: '" + s + "'");
        bpart.pop_back();
        if (bpart.empty() || bpart == "+") b = 1;
        else if (bpart == "-") b = -1;
        else {
            if (bpart.front() == '+') bpart.erase(0, 1);
            try {
                b = Int(bpart);
            } catch (const std::runtime_error&) {
                throw parse_error("bad theta coefficient in exponent: '" + s + "'");
            }
        }
    }
    Rat a = apart.empty() ? Rat(0) : parse_rat(apart);
    return Exponent(a, b);
}

enum class Cmp { LT = -1, EQ = 0, GT = 1 };

/// A norm magnitude: zero or e^{-exponent}.  Total order: Zero is minimum,
/// larger exponents are smaller values.
class NormValue {
    std::optional<Exponent> exp_;

  public:
    NormValue() : exp_(std::nullopt) {}  // zero
    static NormValue zero() { return NormValue(); }
    static NormValue one() { return from_exponent(Exponent(0)); }
    static NormValue from_exponent(Exponent e) {
        NormValue v;
        v.exp_ = std::move(e);
        return v;
    }
    /// e^{-q} for rational q.
    static NormValue from_rat_exponent(Rat q) { return from_exponent(Exponent(std::move(q), 0)); }

    bool is_zero() const { return !exp_.has_value(); }
    const Exponent& exponent() const {
        if (!exp_) throw std::domain_error("NormValue: zero has no exponent");
        return *exp_;
    }

    NormValue operator*(const NormValue& o) const {
        if (is_zero() || o.is_zero()) return zero();
        return from_exponent(*exp_ + *o.exp_);
    }
    NormValue operator/(const NormValue& o) const {
        if (o.is_zero()) throw std::domain_error("NormValue: division by zero");
        if (is_zero()) return zero();
        return from_exponent(*exp_ - *o.exp_);
    }
    NormValue inverse() const { return one() / *this; }

    friend Cmp cmp(const NormValue& x, const NormValue& y) {
        if (x.is_zero() && y.is_zero()) return Cmp::EQ;
        if (x.is_zero()) return Cmp::LT;
        if (y.is_zero()) return Cmp::GT;
        // e^{-e1} < e^{-e2}  iff  e1 > e2
        int s = (*x.exp_ - *y.exp_).sgn();
        return s > 0 ? Cmp::LT : (s < 0 ? Cmp::GT : Cmp::EQ);
    }
    bool operator==(const NormValue& o) const { return cmp(*this, o) == Cmp::EQ; }
    bool operator<(const NormValue& o) const { return cmp(*this, o) == Cmp::LT; }
    bool operator<=(const NormValue& o) const { return cmp(*this, o) != Cmp::GT; }
    bool operator>(const NormValue& o) const { return cmp(*this, o) == Cmp::GT; }
    bool operator>=(const NormValue& o) const { return cmp(*this, o) != Cmp::LT; }

    /// Membership in V_K = e^{-Q}.  Errors on zero: 0 is not the norm of a
    /// nonzero element.
    bool in_VK() const {
        if (is_zero()) throw std::domain_error("in_VK: zero is not in the valuation group");
        return exp_->is_rational();
    }

    /// theta-coefficient of the exponent; labels the coset of this value
    /// modulo V_K.  Errors on zero.
    Int vk_coset() const {
        if (is_zero()) throw std::domain_error("vk_coset: zero value");
        return exp_->b;
    }

    std::string str() const {
        if (is_zero()) return "0";
        if (exp_->is_zero()) return "1";
        return "e^-(" + exp_->str() + ")";
    }
};

inline NormValue max(const NormValue& x, const NormValue& y) { return x < y ? y : x; }
inline NormValue min(const NormValue& x, const NormValue& y) { return x < y ? x : y; }

}  // namespace ultranorm
