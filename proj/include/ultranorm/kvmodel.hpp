#pragma once

// Concrete model of the spherical completion K^v of K = completed Puiseux
// field over Q.  Elements of K^v \ K are realized by a catalog of generators
// with explicitly enumerable support:
//
//   Basic(level l, family j):   g = sum_{n>=1} t^{eps_n},
//       eps_n = a + b*dyadic_n - 1/(n^2 + p_j)  for level l = a + b*theta,
//       p_j the j-th prime, dyadic_n a binary lower approximation of theta
//       (omitted when b = 0).  The support strictly increases to l, so
//       d(g, K) = e^{-l}, never attained.
//
//   Nested(outer g, inner y):   z = sum_m c_m t^{s_m} * tail_m(g),
//       where (c_m, s_m) enumerates the expansion of y and tail_m(g) drops
//       the first m schedule terms of g.  z realizes the image of y under a
//       linear isometry (K^v, |.|_{d(g,K)}) -> K^v/K sending 1 to the coset
//       of g; the least accumulation point of its support is s_1 + l(g).
//
// Distinct prime offsets make tails of distinct basic families impossible to
// match by any K-shift, which is what keeps catalog directions residue-
// orthogonal across families.

#include <map>
#include <memory>
#include <mutex>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "series.hpp"

namespace ultranorm {

using GenId = std::string;

struct BasicDecl {
    Exponent level;
    int family = 1;
};

struct NestedDecl {
    GenId outer;  // must be Basic
    GenId inner;  // Basic or Nested
};

struct GeneratorDecl {
    GenId id;
    bool is_basic = true;
    BasicDecl basic;
    NestedDecl nested;
};

namespace detail {

inline const std::vector<int>& small_primes() {
    static const std::vector<int> ps = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29,
                                        31, 37, 41, 43, 47, 53, 59, 61, 67, 71};
    return ps;
}

/// floor(theta * 4^k) / 4^k, theta = sqrt(2): a non-decreasing rational
/// lower approximation with error < 4^{-k}.
inline Rat dyadic_theta(unsigned long k) {
    Int pow4 = int_pow(4, k);
    Int root = boost::multiprecision::sqrt(Int(2) * pow4 * pow4);
    return Rat(root, pow4);
}

}  // namespace detail

class Catalog;

/// Lazily merged, memoized expansion stream of one generator: the terms of
/// its Hahn-series realization, in strictly increasing exponent order.
class Schedule {
  public:
    virtual ~Schedule() = default;
    /// n-th term, 0-indexed.  Extends the memo as needed.
    virtual Term term(size_t n) const = 0;
};

class Catalog {
    std::map<GenId, GeneratorDecl> decls_;
    mutable std::map<GenId, std::shared_ptr<const Schedule>> schedules_;
    mutable std::mutex mu_;

    class BasicSchedule final : public Schedule {
        Exponent level_;
        int prime_;
        unsigned long kappa_;
        mutable std::vector<Term> memo_;
        mutable std::mutex mu_;

        Rat eps(size_t n1) const {  // n1 >= 1
            Rat e = level_.a - Rat(1, Int(n1) * Int(n1) + prime_);
            if (level_.b != 0) e += Rat(level_.b) * detail::dyadic_theta(kappa_ + n1);
            return e;
        }

      public:
        BasicSchedule(Exponent level, int prime) : level_(std::move(level)), prime_(prime) {
            // Offset for the dyadic theta approximation: large enough that the
            // -1/(n^2+p) part dominates the approximation error, keeping the
            // schedule strictly increasing and strictly below the level.
            kappa_ = 8;
            if (level_.b != 0) {
                Int ab = level_.b < 0 ? Int(-level_.b) : level_.b;
                while (ab > 0) {
                    ++kappa_;
                    ab >>= 1;
                }
                // verify monotonicity on a long prefix; the gap ratio only
                // improves afterwards (4^{-n} shrinks faster than n^{-3})
                for (size_t n = 1; n <= 160; ++n) {
                    if (!(eps(n) < eps(n + 1)) || !(Exponent(eps(n)) < level_))
                        throw std::logic_error("basic schedule failed monotonicity check");
                }
            }
        }
        Term term(size_t n) const override {
            std::lock_guard<std::mutex> lk(mu_);
            while (memo_.size() <= n) memo_.push_back(Term{eps(memo_.size() + 1), Rat(1)});
            return memo_[n];
        }
    };

    class NestedSchedule final : public Schedule {
        std::shared_ptr<const Schedule> outer_, inner_;
        // heap entry: next exponent of block m at tail position j (>= m+1)
        struct Head {
            Rat exponent;
            Rat coeff;
            size_t block;
            size_t pos;
        };
        struct HeadGt {
            bool operator()(const Head& x, const Head& y) const { return y.exponent < x.exponent; }
        };
        mutable std::vector<Term> memo_;
        mutable std::priority_queue<Head, std::vector<Head>, HeadGt> heap_;
        mutable size_t next_block_ = 0;
        mutable std::mutex mu_;

        Head head_of(size_t block, size_t pos) const {
            Term in = inner_->term(block);
            Term out = outer_->term(pos);
            return Head{in.exponent + out.exponent, in.coeff * out.coeff, block, pos};
        }
        // Block m starts at inner[m].e + outer[m+1].e, strictly increasing in
        // m, so all blocks starting at or below `bound` can be admitted ahead
        // of any pop at that level.
        void admit_blocks_upto(const Rat& bound) const {
            while (true) {
                Head h = head_of(next_block_, next_block_ + 1);
                if (!(h.exponent <= bound)) break;
                heap_.push(h);
                ++next_block_;
            }
        }
        void produce() const {
            if (heap_.empty()) {
                heap_.push(head_of(next_block_, next_block_ + 1));
                ++next_block_;
            }
            for (size_t guard = 0; guard < 1u << 20; ++guard) {
                admit_blocks_upto(heap_.top().exponent);
                Head h = heap_.top();
                heap_.pop();
                Rat coeff = h.coeff;
                Rat expo = h.exponent;
                heap_.push(head_of(h.block, h.pos + 1));
                while (heap_.top().exponent == expo) {
                    Head g = heap_.top();
                    heap_.pop();
                    coeff += g.coeff;
                    heap_.push(head_of(g.block, g.pos + 1));
                }
                if (coeff != 0) {
                    memo_.push_back(Term{expo, coeff});
                    return;
                }
            }
            throw unresolved_error("nested schedule: cancellation cascade exceeded guard");
        }

      public:
        NestedSchedule(std::shared_ptr<const Schedule> outer, std::shared_ptr<const Schedule> inner)
            : outer_(std::move(outer)), inner_(std::move(inner)) {}
        Term term(size_t n) const override {
            std::lock_guard<std::mutex> lk(mu_);
            while (memo_.size() <= n) produce();
            return memo_[n];
        }
    };

  public:
    Catalog() = default;

    bool has(const GenId& id) const { return decls_.count(id) != 0; }

    const GeneratorDecl& decl(const GenId& id) const {
        auto it = decls_.find(id);
        if (it == decls_.end()) throw std::domain_error("unknown generator: " + id);
        return it->second;
    }

    std::vector<GenId> ids() const {
        std::vector<GenId> out;
        for (auto& [k, v] : decls_) out.push_back(k);
        return out;
    }

    void declare_basic(const GenId& id, Exponent level, int family) {
        if (has(id)) throw std::domain_error("duplicate generator id: " + id);
        if (family < 1 || family > static_cast<int>(detail::small_primes().size()))
            throw std::domain_error("family index out of range");
        for (auto& [k, d] : decls_)
            if (d.is_basic && d.basic.family == family && d.basic.level == level)
                throw std::domain_error("duplicate (level, family) basic generator");
        GeneratorDecl d;
        d.id = id;
        d.is_basic = true;
        d.basic = BasicDecl{std::move(level), family};
        decls_[id] = std::move(d);
    }

    void declare_nested(const GenId& id, const GenId& outer, const GenId& inner) {
        if (has(id)) throw std::domain_error("duplicate generator id: " + id);
        if (!decl(outer).is_basic) throw std::domain_error("nested outer must be basic: " + outer);
        (void)decl(inner);
        if (nesting_depth(inner) >= 3) throw std::domain_error("nesting depth limit exceeded");
        for (auto& [k, d] : decls_)
            if (!d.is_basic && d.nested.outer == outer && d.nested.inner == inner)
                throw std::domain_error("duplicate nested generator (outer, inner)");
        GeneratorDecl d;
        d.id = id;
        d.is_basic = false;
        d.nested = NestedDecl{outer, inner};
        decls_[id] = std::move(d);
    }

    int nesting_depth(const GenId& id) const {
        const auto& d = decl(id);
        return d.is_basic ? 1 : 1 + nesting_depth(d.nested.inner);
    }

    /// Root basic family of a generator (outer chain ends at a Basic).
    GenId root(const GenId& id) const {
        const auto& d = decl(id);
        return d.is_basic ? id : d.nested.outer;
    }

    /// For a nested generator, the inner hole it lifts.
    GenId inner_of(const GenId& id) const {
        const auto& d = decl(id);
        if (d.is_basic) throw std::domain_error("inner_of on basic generator " + id);
        return d.nested.inner;
    }

    /// Least accumulation point of the support: the exponent of d(g, K).
    Exponent accumulation_level(const GenId& id) const {
        const auto& d = decl(id);
        if (d.is_basic) return d.basic.level;
        return Exponent(schedule(d.nested.inner)->term(0).exponent) +
               accumulation_level(d.nested.outer);
    }

    /// d(g, K) as a norm value (never attained).
    NormValue gen_distance(const GenId& id) const {
        return NormValue::from_exponent(accumulation_level(id));
    }

    std::shared_ptr<const Schedule> schedule(const GenId& id) const {
        {
            std::lock_guard<std::mutex> lk(mu_);
            auto it = schedules_.find(id);
            if (it != schedules_.end()) return it->second;
        }
        const auto& d = decl(id);
        std::shared_ptr<const Schedule> s;
        if (d.is_basic) {
            s = std::make_shared<BasicSchedule>(d.basic.level,
                                                detail::small_primes()[d.basic.family - 1]);
        } else {
            auto out = schedule(d.nested.outer);
            auto in = schedule(d.nested.inner);
            s = std::make_shared<NestedSchedule>(std::move(out), std::move(in));
        }
        std::lock_guard<std::mutex> lk(mu_);
        return schedules_.emplace(id, std::move(s)).first->second;
    }
};

/// An element of K^v: exact K-part plus a K-linear combination of catalog
/// generators with exact finite-support coefficients.
class KvElement {
    TruncSeries kpart_;                   // exact
    std::map<GenId, TruncSeries> combo_;  // exact, nonzero coefficients
    const Catalog* cat_ = nullptr;

    void normalize() {
        for (auto it = combo_.begin(); it != combo_.end();) {
            if (!it->second.is_exact())
                throw std::domain_error("combo coefficients must be exact K elements");
            if (it->second.is_zero()) it = combo_.erase(it);
            else ++it;
        }
        if (!kpart_.is_exact()) throw std::domain_error("kpart must be exact");
    }

  public:
    KvElement() = default;
    explicit KvElement(const Catalog& cat) : cat_(&cat) {}
    KvElement(const Catalog& cat, TruncSeries kpart, std::map<GenId, TruncSeries> combo = {})
        : kpart_(std::move(kpart)), combo_(std::move(combo)), cat_(&cat) {
        normalize();
    }

    static KvElement from_k(const Catalog& cat, TruncSeries k) {
        return KvElement(cat, std::move(k));
    }
    static KvElement generator(const Catalog& cat, const GenId& id) {
        (void)cat.decl(id);
        std::map<GenId, TruncSeries> c;
        c[id] = TruncSeries::one();
        return KvElement(cat, TruncSeries::zero(), std::move(c));
    }
    static KvElement zero(const Catalog& cat) { return KvElement(cat); }

    const Catalog& catalog() const {
        if (!cat_) throw std::logic_error("KvElement without catalog");
        return *cat_;
    }
    const TruncSeries& kpart() const { return kpart_; }
    const std::map<GenId, TruncSeries>& combo() const { return combo_; }

    bool in_K() const { return combo_.empty(); }
    bool is_zero() const { return combo_.empty() && kpart_.is_zero(); }

    KvElement operator+(const KvElement& o) const {
        KvElement r = *this;
        if (!r.cat_) r.cat_ = o.cat_;
        r.kpart_ = r.kpart_ + o.kpart_;
        for (auto& [id, c] : o.combo_) {
            auto it = r.combo_.find(id);
            if (it == r.combo_.end()) r.combo_[id] = c;
            else it->second = it->second + c;
        }
        r.normalize();
        return r;
    }
    KvElement operator-() const {
        KvElement r = *this;
        r.kpart_ = -r.kpart_;
        for (auto& [id, c] : r.combo_) c = -c;
        return r;
    }
    KvElement operator-(const KvElement& o) const { return *this + (-o); }

    /// Scale by an exact K element.
    KvElement scaled(const TruncSeries& s) const {
        if (!s.is_exact()) throw std::domain_error("KvElement: scale must be exact");
        KvElement r(*cat_);
        r.kpart_ = kpart_ * s;
        for (auto& [id, c] : combo_) {
            TruncSeries p = c * s;
            if (!p.is_zero()) r.combo_[id] = p;
        }
        return r;
    }
    KvElement scaled(const Rat& c) const { return scaled(TruncSeries::constant(c)); }

    bool operator==(const KvElement& o) const {
        return kpart_ == o.kpart_ && combo_ == o.combo_;
    }

    /// Finite expansion: `depth` schedule terms per generator occurrence.
    /// The precision marker reports exactly how far the expansion is valid.
    TruncSeries expand(size_t depth) const {
        TruncSeries acc = kpart_;
        std::optional<Rat> prec;
        for (auto& [id, coeff] : combo_) {
            auto sch = catalog().schedule(id);
            std::vector<Term> terms;
            for (size_t n = 0; n < depth; ++n) terms.push_back(sch->term(n));
            TruncSeries gpart(std::move(terms));
            acc = acc + coeff * gpart;
            Rat occ_prec = coeff.valuation().value + sch->term(depth).exponent;
            prec = prec ? std::min(*prec, occ_prec) : occ_prec;
        }
        if (prec) acc = acc.truncated(*prec);
        return acc;
    }

    /// Split the hole content by root basic family.  The inner element of
    /// family g collects: the coefficient of g itself as inner K-part, and
    /// the coefficient of each nested generator N(g, y) on the inner hole y.
    std::map<GenId, KvElement> family_split() const {
        std::map<GenId, KvElement> out;
        for (auto& [id, coeff] : combo_) {
            GenId r = catalog().root(id);
            auto it = out.find(r);
            if (it == out.end()) it = out.emplace(r, KvElement(catalog())).first;
            if (catalog().decl(id).is_basic) it->second.kpart_ = it->second.kpart_ + coeff;
            else {
                GenId y = catalog().inner_of(id);
                auto jt = it->second.combo_.find(y);
                if (jt == it->second.combo_.end()) it->second.combo_[y] = coeff;
                else jt->second = jt->second + coeff;
            }
        }
        for (auto it = out.begin(); it != out.end();) {
            it->second.normalize();
            if (it->second.is_zero()) it = out.erase(it);
            else ++it;
        }
        return out;
    }

    /// |x|: exact leading-exponent search over the merged expansion.
    NormValue norm(size_t term_cap = 4096) const;

    /// (d(x, K), attained): exact via the family decomposition.
    std::pair<NormValue, bool> dist_to_K() const;
};

inline NormValue KvElement::norm(size_t term_cap) const {
    if (is_zero()) return NormValue::zero();
    // merged enumeration of all support contributions in increasing exponent
    // order, accumulating exact coefficients until one survives
    struct Source {
        // kind 0: kpart term list; kind 1: generator occurrence (coeff term x schedule)
        const std::vector<Term>* kterms = nullptr;
        std::shared_ptr<const Schedule> sch;
        Rat shift;       // coefficient-term exponent
        Rat cscale;      // coefficient-term coefficient
        size_t pos = 0;  // next index
        bool k_source = false;
        Term current() const {
            if (k_source) return (*kterms)[pos];
            Term t = sch->term(pos);
            return Term{t.exponent + shift, t.coeff * cscale};
        }
        bool exhausted() const { return k_source && pos >= kterms->size(); }
    };
    std::vector<Source> sources;
    if (!kpart_.terms().empty()) {
        Source s;
        s.k_source = true;
        s.kterms = &kpart_.terms();
        sources.push_back(std::move(s));
    }
    for (auto& [id, coeff] : combo_) {
        auto sch = catalog().schedule(id);
        for (auto& ct : coeff.terms()) {
            Source s;
            s.sch = sch;
            s.shift = ct.exponent;
            s.cscale = ct.coeff;
            sources.push_back(std::move(s));
        }
    }
    for (size_t steps = 0; steps < term_cap; ++steps) {
        // find the least current exponent among non-exhausted sources
        bool any = false;
        Rat lead;
        for (auto& s : sources) {
            if (s.exhausted()) continue;
            Term t = s.current();
            if (!any || t.exponent < lead) {
                lead = t.exponent;
                any = true;
            }
        }
        if (!any) return NormValue::zero();  // only possible for pure-K elements
        Rat coeff(0);
        for (auto& s : sources) {
            if (s.exhausted()) continue;
            Term t = s.current();
            if (t.exponent == lead) {
                coeff += t.coeff;
                ++s.pos;
            }
        }
        if (coeff != 0) return NormValue::from_rat_exponent(lead);
    }
    throw unresolved_error("KvElement::norm: leading-term cancellation not resolved within cap");
}

inline std::pair<NormValue, bool> KvElement::dist_to_K() const {
    if (in_K()) return {NormValue::zero(), true};
    NormValue best = NormValue::zero();
    for (auto& [g, inner] : family_split()) {
        NormValue r = catalog().gen_distance(g);
        best = max(best, r * inner.norm());
    }
    return {best, false};
}

}  // namespace ultranorm
