#pragma once

// Exact truncated series arithmetic over Q with rational exponents.
//
// A TruncSeries is a finite list of terms c*t^e with strictly increasing
// exponents, plus a precision bound: every stored exponent is below the
// bound, and nothing is known at or beyond it.  Unbounded precision means
// the element is exact (finite support), i.e. a genuine element of K.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "rational.hpp"
#include "valgroup.hpp"

namespace ultranorm {

struct Term {
    Rat exponent;
    Rat coeff;
};

struct Valuation {
    enum Kind { Finite, AboveBound, PlusInfinity } kind;
    Rat value;  // exponent for Finite, bound for AboveBound

    static Valuation finite(Rat v) { return {Finite, std::move(v)}; }
    static Valuation above(Rat b) { return {AboveBound, std::move(b)}; }
    static Valuation infinite() { return {PlusInfinity, Rat(0)}; }
};

class TruncSeries {
    std::vector<Term> terms_;        // sorted by exponent, nonzero coeffs
    std::optional<Rat> precision_;   // nullopt: exact (+infinity)

    void normalize() {
        std::sort(terms_.begin(), terms_.end(),
                  [](const Term& x, const Term& y) { return x.exponent < y.exponent; });
        std::vector<Term> out;
        for (auto& t : terms_) {
            if (!out.empty() && out.back().exponent == t.exponent) out.back().coeff += t.coeff;
            else out.push_back(t);
        }
        terms_.clear();
        for (auto& t : out) {
            if (t.coeff == 0) continue;
            if (precision_ && t.exponent >= *precision_) continue;
            terms_.push_back(t);
        }
    }

  public:
    TruncSeries() = default;
    TruncSeries(std::vector<Term> terms, std::optional<Rat> precision = std::nullopt)
        : terms_(std::move(terms)), precision_(std::move(precision)) {
        normalize();
    }

    static TruncSeries zero() { return TruncSeries(); }
    static TruncSeries one() { return monomial(1, 0); }
    static TruncSeries monomial(Rat coeff, Rat exponent) {
        return TruncSeries({Term{std::move(exponent), std::move(coeff)}});
    }
    static TruncSeries constant(Rat c) { return monomial(std::move(c), 0); }

    const std::vector<Term>& terms() const { return terms_; }
    bool is_exact() const { return !precision_.has_value(); }
    const std::optional<Rat>& precision() const { return precision_; }

    /// Exact zero.  An empty series with finite precision is merely
    /// "zero as far as we can see".
    bool is_zero() const { return terms_.empty() && is_exact(); }
    bool empty() const { return terms_.empty(); }

    Valuation valuation() const {
        if (!terms_.empty()) return Valuation::finite(terms_.front().exponent);
        if (is_exact()) return Valuation::infinite();
        return Valuation::above(*precision_);
    }

    /// |x| = e^{-v(x)}.  Throws unresolved_error if only a bound is known.
    NormValue norm() const {
        auto v = valuation();
        switch (v.kind) {
            case Valuation::Finite: return NormValue::from_rat_exponent(v.value);
            case Valuation::PlusInfinity: return NormValue::zero();
            default:
                throw unresolved_error("norm of truncated series known only below e^-(" +
                                       rat_str(v.value) + ")");
        }
    }

    TruncSeries operator-() const {
        TruncSeries r = *this;
        for (auto& t : r.terms_) t.coeff = -t.coeff;
        return r;
    }

    friend TruncSeries operator+(const TruncSeries& x, const TruncSeries& y) {
        std::optional<Rat> prec;
        if (x.precision_ && y.precision_) prec = std::min(*x.precision_, *y.precision_);
        else if (x.precision_) prec = x.precision_;
        else if (y.precision_) prec = y.precision_;
        std::vector<Term> ts = x.terms_;
        ts.insert(ts.end(), y.terms_.begin(), y.terms_.end());
        return TruncSeries(std::move(ts), std::move(prec));
    }
    friend TruncSeries operator-(const TruncSeries& x, const TruncSeries& y) { return x + (-y); }

    friend TruncSeries operator*(const TruncSeries& x, const TruncSeries& y) {
        // precision = min(v(x)+prec(y), v(y)+prec(x)); the ultrametric law
        // |xy| = |x||y| needs no care beyond exactness of coefficients.
        std::optional<Rat> prec;
        auto bump = [&prec](const Rat& p) {
            if (!prec || p < *prec) prec = p;
        };
        auto vx = x.valuation(), vy = y.valuation();
        auto vlow = [](const Valuation& v) -> std::optional<Rat> {
            if (v.kind == Valuation::PlusInfinity) return std::nullopt;
            return v.value;  // finite valuation or its lower bound
        };
        if (y.precision_) {
            auto lx = vlow(vx);
            if (lx) bump(*lx + *y.precision_);
        }
        if (x.precision_) {
            auto ly = vlow(vy);
            if (ly) bump(*ly + *x.precision_);
        }
        // exact zero times anything is exact zero
        if (x.is_zero() || y.is_zero()) return TruncSeries::zero();
        std::vector<Term> ts;
        ts.reserve(x.terms_.size() * y.terms_.size());
        for (const auto& a : x.terms_)
            for (const auto& b : y.terms_)
                ts.push_back(Term{a.exponent + b.exponent, a.coeff * b.coeff});
        return TruncSeries(std::move(ts), std::move(prec));
    }

    TruncSeries scaled(const Rat& c) const {
        if (c == 0) return is_exact() ? zero() : TruncSeries({}, precision_);
        TruncSeries r = *this;
        for (auto& t : r.terms_) t.coeff *= c;
        return r;
    }

    /// Monomial shift: x * c*t^e.
    TruncSeries shifted(const Rat& e, const Rat& c = 1) const {
        TruncSeries r = scaled(c);
        for (auto& t : r.terms_) t.exponent += e;
        if (r.precision_) *r.precision_ += e;
        return r;
    }

    TruncSeries truncated(const Rat& prec) const {
        std::optional<Rat> p = prec;
        if (precision_ && *precision_ < prec) p = precision_;
        return TruncSeries(terms_, p);
    }

    /// Multiplicative inverse modulo t^target_precision.
    /// Requires a known leading term; throws on exact zero.
    TruncSeries inverted(const Rat& target_precision) const {
        if (terms_.empty()) {
            if (is_zero()) throw std::domain_error("TruncSeries: cannot invert zero");
            throw unresolved_error("TruncSeries: leading term unknown, cannot invert");
        }
        const Rat v = terms_.front().exponent;
        const Rat c = terms_.front().coeff;
        // x = c t^v (1 + u); 1/x = c^{-1} t^{-v} sum (-u)^k
        TruncSeries u = (*this).shifted(-v, Rat(1) / c) - one();
        // relative working precision
        Rat relprec = target_precision + v;
        if (precision_) relprec = std::min(relprec, *precision_ - v);
        TruncSeries acc = one();
        TruncSeries pw = one();
        if (!u.empty()) {
            const Rat step = u.terms().front().exponent;  // > 0
            for (Rat reached(0); reached < relprec;) {
                pw = (pw * (-u)).truncated(relprec);
                if (pw.empty()) break;
                acc = acc + pw;
                reached += step;
            }
        }
        return acc.truncated(relprec).shifted(-v, Rat(1) / c).truncated(target_precision);
    }

    bool operator==(const TruncSeries& o) const {
        if (precision_ != o.precision_) return false;
        if (terms_.size() != o.terms_.size()) return false;
        for (size_t i = 0; i < terms_.size(); ++i)
            if (terms_[i].exponent != o.terms_[i].exponent || terms_[i].coeff != o.terms_[i].coeff)
                return false;
        return true;
    }

    std::string str() const {
        std::string out;
        for (const auto& t : terms_) {
            std::string cs = rat_str(t.coeff < 0 ? Rat(-t.coeff) : t.coeff);
            std::string piece;
            if (t.exponent == 0) piece = cs;
            else {
                piece = (cs == "1" ? "" : cs + "*");
                piece += "t^(" + rat_str(t.exponent) + ")";
            }
            if (out.empty()) out = (t.coeff < 0 ? "-" : "") + piece;
            else out += (t.coeff < 0 ? " - " : " + ") + piece;
        }
        if (out.empty()) out = "0";
        if (precision_) out += " + O(t^(" + rat_str(*precision_) + "))";
        return out;
    }
};

/// Parses the K-element grammar: sum of "c*t^(p/q)" terms, e.g.
/// "3*t^(1/2) + t^2 - 1/5*t^(7/3)", optionally "+ O(t^(p/q))".
TruncSeries parse_series(const std::string& src);

namespace detail {

struct SeriesLexer {
    std::string s;
    size_t i = 0;
    explicit SeriesLexer(std::string in) {
        for (char c : in)
            if (c != ' ' && c != '\t') s += c;
    }
    bool done() const { return i >= s.size(); }
    char peek() const { return i < s.size() ? s[i] : '\0'; }
    bool eat(char c) {
        if (peek() == c) {
            ++i;
            return true;
        }
        return false;
    }
    bool eat(const std::string& w) {
        if (s.compare(i, w.size(), w) == 0) {
            i += w.size();
            return true;
        }
        return false;
    }
    Rat number() {
        size_t j = i;
        if (j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
        size_t k = j;
        while (k < s.size() && (std::isdigit(static_cast<unsigned char>(s[k])) || s[k] == '/')) ++k;
        if (k == j) throw parse_error("expected number at '" + s.substr(i) + "'");
        Rat r = parse_rat(s.substr(i, k - i));
        i = k;
        return r;
    }
    /// t-exponent: "t" [^ ( "(" rat ")" | rat )]
    Rat t_power() {
        if (!eat('t')) throw parse_error("expected 't' at '" + s.substr(i) + "'");
        if (!eat('^')) return Rat(1);
        if (eat('(')) {
            Rat e = number();
            if (!eat(')')) throw parse_error("missing ')' in t-power");
            return e;
        }
        return number();
    }
};

}  // namespace detail

inline TruncSeries parse_series(const std::string& src) {
    detail::SeriesLexer lx(src);
    std::vector<Term> terms;
    std::optional<Rat> prec;
    bool first = true;
    while (!lx.done()) {
        int sgn = 1;
        if (lx.eat('+')) sgn = 1;
        else if (lx.eat('-')) sgn = -1;
        else if (!first) throw parse_error("expected '+' or '-' in series: '" + src + "'");
        first = false;
        if (lx.eat(std::string("O(t^"))) {
            bool paren = lx.eat('(');
            Rat e = lx.number();
            if (paren && !lx.eat(')')) throw parse_error("missing ')' in O(..)");
            if (!lx.eat(')')) throw parse_error("missing ')' closing O(..)");
            if (sgn < 0) throw parse_error("negative O(..) term");
            prec = prec ? std::min(*prec, e) : e;
            continue;
        }
        Rat coeff(1), expo(0);
        if (lx.peek() == 't') {
            expo = lx.t_power();
        } else {
            coeff = lx.number();
            if (lx.eat('*')) expo = lx.t_power();
        }
        terms.push_back(Term{expo, sgn < 0 ? Rat(-coeff) : coeff});
    }
    return TruncSeries(std::move(terms), std::move(prec));
}

}  // namespace ultranorm
