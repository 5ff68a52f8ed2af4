#pragma once

// Exact multivariate polynomials over arbitrary-precision rationals.
//
// Monomials are compared in graded lexicographic order with a fixed global
// variable priority: k, p, n, nu, eps, a, kappa, mu, beta come first (in that
// order), and any further variable ranks by first registration.  Because the
// order is global, every Poly in the process lives in one common ring and
// mixed-variable arithmetic needs no alignment step.  All values are
// immutable after construction; operations return fresh objects.

#include <algorithm>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "hypersum/errors.hpp"

namespace hypersum {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int rat_num(const Rat& q) { return boost::multiprecision::numerator(q); }
inline Int rat_den(const Rat& q) { return boost::multiprecision::denominator(q); }

// Returns q as an integer when it is one.
inline std::optional<Int> rat_to_int(const Rat& q) {
    if (rat_den(q) == 1) return rat_num(q);
    return std::nullopt;
}

inline std::string rat_str(const Rat& q) { return q.str(); }

// ---------------------------------------------------------------------------
// Variable registry

using VarId = std::uint32_t;

class VarTable {
public:
    static VarTable& get() {
        static VarTable table;
        return table;
    }

    VarId intern(std::string_view name) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = ids_.find(name);
        if (it != ids_.end()) return it->second;
        VarId id = static_cast<VarId>(names_.size());
        names_.emplace_back(name);
        ids_.emplace(names_.back(), id);
        return id;
    }

    std::string name(VarId id) const {
        std::lock_guard<std::mutex> lock(mutex_);
        return names_.at(id);
    }

private:
    VarTable() {
        // Fixed priority prefix; everything else ranks after these.
        for (const char* v : {"k", "p", "n", "nu", "eps", "a", "kappa", "mu", "beta"})
            intern_unlocked(v);
    }

    void intern_unlocked(std::string_view name) {
        names_.emplace_back(name);
        ids_.emplace(names_.back(), static_cast<VarId>(names_.size() - 1));
    }

    mutable std::mutex mutex_;
    std::vector<std::string> names_;
    std::map<std::string, VarId, std::less<>> ids_;
};

inline VarId var(std::string_view name) { return VarTable::get().intern(name); }
inline std::string var_name(VarId id) { return VarTable::get().name(id); }

// ---------------------------------------------------------------------------
// Monomials: sparse exponent vectors, sorted by VarId, no zero exponents.

struct Monomial {
    std::vector<std::pair<VarId, std::uint32_t>> exps;

    bool operator==(const Monomial& o) const = default;

    long degree() const {
        long d = 0;
        for (auto& [v, e] : exps) d += e;
        return d;
    }

    std::uint32_t exp_of(VarId v) const {
        for (auto& [w, e] : exps)
            if (w == v) return e;
        return 0;
    }

    bool is_one() const { return exps.empty(); }

    Monomial operator*(const Monomial& o) const {
        Monomial r;
        r.exps.reserve(exps.size() + o.exps.size());
        std::size_t i = 0, j = 0;
        while (i < exps.size() || j < o.exps.size()) {
            if (j == o.exps.size() || (i < exps.size() && exps[i].first < o.exps[j].first))
                r.exps.push_back(exps[i++]);
            else if (i == exps.size() || o.exps[j].first < exps[i].first)
                r.exps.push_back(o.exps[j++]);
            else {
                r.exps.emplace_back(exps[i].first, exps[i].second + o.exps[j].second);
                ++i, ++j;
            }
        }
        return r;
    }

    // Componentwise quotient, or nullopt when some exponent would go negative.
    std::optional<Monomial> divide(const Monomial& o) const {
        Monomial r;
        std::size_t i = 0;
        for (auto& [v, e] : o.exps) {
            while (i < exps.size() && exps[i].first < v) r.exps.push_back(exps[i++]);
            if (i == exps.size() || exps[i].first != v || exps[i].second < e) return std::nullopt;
            if (exps[i].second > e) r.exps.emplace_back(v, exps[i].second - e);
            ++i;
        }
        while (i < exps.size()) r.exps.push_back(exps[i++]);
        return r;
    }
};

// Graded lex: higher total degree wins; ties break lexicographically with
// lower VarId = higher priority (larger exponent on the senior variable wins).
inline bool mono_greater(const Monomial& a, const Monomial& b) {
    long da = a.degree(), db = b.degree();
    if (da != db) return da > db;
    std::size_t i = 0, j = 0;
    while (i < a.exps.size() && j < b.exps.size()) {
        if (a.exps[i].first != b.exps[j].first)
            return a.exps[i].first < b.exps[j].first; // senior var present only in a
        if (a.exps[i].second != b.exps[j].second)
            return a.exps[i].second > b.exps[j].second;
        ++i, ++j;
    }
    return i < a.exps.size();
}

struct MonoOrder {
    bool operator()(const Monomial& a, const Monomial& b) const { return mono_greater(a, b); }
};

// ---------------------------------------------------------------------------
// Poly

class Poly {
public:
    using TermMap = std::map<Monomial, Rat, MonoOrder>;

    Poly() = default;
    Poly(const Rat& c) { if (c != 0) terms_.emplace(Monomial{}, c); }
    Poly(long c) : Poly(Rat(c)) {}
    Poly(int c) : Poly(Rat(c)) {}

    static Poly variable(std::string_view name) { return from_var(var(name)); }

    static Poly from_var(VarId v, std::uint32_t exp = 1) {
        Poly p;
        if (exp == 0) return Poly(1);
        Monomial m;
        m.exps.emplace_back(v, exp);
        p.terms_.emplace(std::move(m), Rat(1));
        return p;
    }

    static Poly from_term(Monomial m, Rat c) {
        Poly p;
        if (c != 0) p.terms_.emplace(std::move(m), std::move(c));
        return p;
    }

    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    bool is_constant() const {
        return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one());
    }

    // Value of a constant polynomial (zero polynomial gives 0).
    Rat constant_value() const {
        if (terms_.empty()) return Rat(0);
        if (!is_constant()) throw DomainViolation("polynomial is not constant");
        return terms_.begin()->second;
    }

    // Leading monomial / coefficient under the global graded-lex order.
    const Monomial& lm() const {
        if (terms_.empty()) throw DomainViolation("leading monomial of zero polynomial");
        return terms_.begin()->first;
    }
    const Rat& lc() const {
        if (terms_.empty()) throw DomainViolation("leading coefficient of zero polynomial");
        return terms_.begin()->second;
    }

    long total_degree() const { return terms_.empty() ? -1 : terms_.begin()->first.degree(); }

    long degree(VarId v) const {
        long d = -1;
        for (auto& [m, c] : terms_) d = std::max(d, static_cast<long>(m.exp_of(v)));
        return terms_.empty() ? -1 : d;
    }

    bool contains(VarId v) const {
        for (auto& [m, c] : terms_)
            if (m.exp_of(v) > 0) return true;
        return false;
    }

    std::vector<VarId> variables() const {
        std::vector<VarId> vs;
        for (auto& [m, c] : terms_)
            for (auto& [v, e] : m.exps)
                if (std::find(vs.begin(), vs.end(), v) == vs.end()) vs.push_back(v);
        std::sort(vs.begin(), vs.end());
        return vs;
    }

    Poly operator-() const {
        Poly r(*this);
        for (auto& [m, c] : r.terms_) c = -c;
        return r;
    }

    Poly& operator+=(const Poly& o) {
        for (auto& [m, c] : o.terms_) add_term(m, c);
        return *this;
    }
    Poly& operator-=(const Poly& o) {
        for (auto& [m, c] : o.terms_) add_term(m, -c);
        return *this;
    }

    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }

    friend Poly operator*(const Poly& a, const Poly& b) {
        Poly r;
        for (auto& [ma, ca] : a.terms_)
            for (auto& [mb, cb] : b.terms_) r.add_term(ma * mb, ca * cb);
        return r;
    }
    Poly& operator*=(const Poly& o) { return *this = *this * o; }

    // Integer mixes, spelled out so that overloads taking RatFun cannot make
    // `poly + 1` ambiguous.
    friend Poly operator+(Poly a, long b) { return a += Poly(b); }
    friend Poly operator+(long a, Poly b) { return b += Poly(a); }
    friend Poly operator-(Poly a, long b) { return a -= Poly(b); }
    friend Poly operator-(long a, Poly b) { return Poly(a) - b; }
    friend Poly operator*(const Poly& a, long b) { return a.mul_rat(Rat(b)); }

    Poly mul_rat(const Rat& q) const {
        if (q == 0) return Poly();
        Poly r(*this);
        for (auto& [m, c] : r.terms_) c *= q;
        return r;
    }

    Poly pow(unsigned e) const {
        Poly r(1), base(*this);
        while (e) {
            if (e & 1) r *= base;
            base = (e >>= 1) ? base * base : base;
        }
        return r;
    }

    bool operator==(const Poly& o) const { return terms_ == o.terms_; }

    // Coefficient of v^i, a polynomial in the remaining variables.
    Poly coeff_of(VarId v, std::uint32_t i) const {
        Poly r;
        for (auto& [m, c] : terms_) {
            if (m.exp_of(v) != i) continue;
            Monomial rest;
            for (auto& [w, e] : m.exps)
                if (w != v) rest.exps.emplace_back(w, e);
            r.add_term(rest, c);
        }
        return r;
    }

    // Dense coefficient list in v, ascending from v^0 to v^deg.
    std::vector<Poly> coeffs_in(VarId v) const {
        long d = std::max<long>(degree(v), 0);
        std::vector<Poly> cs(static_cast<std::size_t>(d) + 1);
        for (auto& [m, c] : terms_) {
            Monomial rest;
            std::uint32_t i = 0;
            for (auto& [w, e] : m.exps) {
                if (w == v) i = e;
                else rest.exps.emplace_back(w, e);
            }
            cs[i].add_term(rest, c);
        }
        return cs;
    }

    static Poly from_coeffs(const std::vector<Poly>& cs, VarId v) {
        Poly r;
        for (std::size_t i = 0; i < cs.size(); ++i)
            r += cs[i] * Poly::from_var(v, static_cast<std::uint32_t>(i));
        return r;
    }

    // Substitute v := value (Horner over the dense coefficient list).
    Poly subst(VarId v, const Poly& value) const {
        if (!contains(v)) return *this;
        auto cs = coeffs_in(v);
        Poly r;
        for (std::size_t i = cs.size(); i-- > 0;) r = r * value + cs[i];
        return r;
    }

    // v := v + offset, expanded exactly.
    Poly shift(VarId v, const Rat& offset) const {
        if (offset == 0 || !contains(v)) return *this;
        return subst(v, Poly::from_var(v) + Poly(offset));
    }

    // Full evaluation; every variable present must be assigned.
    Rat eval(const std::map<VarId, Rat>& point) const {
        Rat total = 0;
        for (auto& [m, c] : terms_) {
            Rat t = c;
            for (auto& [v, e] : m.exps) {
                auto it = point.find(v);
                if (it == point.end())
                    throw DomainViolation("unassigned variable in eval: " + var_name(v));
                for (std::uint32_t i = 0; i < e; ++i) t *= it->second;
            }
            total += t;
        }
        return total;
    }

    // Evaluation into any field with Rat-convertible scalars (numeric shadow).
    template <class F>
    F eval_as(const std::map<VarId, F>& point) const {
        F total(0);
        for (auto& [m, c] : terms_) {
            F t(rat_num(c).template convert_to<F>());
            t /= rat_den(c).template convert_to<F>();
            for (auto& [v, e] : m.exps) {
                auto it = point.find(v);
                if (it == point.end())
                    throw DomainViolation("unassigned variable in eval: " + var_name(v));
                for (std::uint32_t i = 0; i < e; ++i) t *= it->second;
            }
            total += t;
        }
        return total;
    }

    // gcd of numerators / lcm of denominators, sign of the leading
    // coefficient.  Dividing by it yields a primitive integer polynomial
    // whose leading coefficient is positive.
    Rat int_content() const {
        if (terms_.empty()) return Rat(0);
        Int g = 0, l = 1;
        for (auto& [m, c] : terms_) {
            g = boost::multiprecision::gcd(g, rat_num(c) < 0 ? Int(-rat_num(c)) : rat_num(c));
            l = boost::multiprecision::lcm(l, rat_den(c));
        }
        Rat content(g, l);
        return lc() < 0 ? -content : content;
    }

    Poly primitive() const {
        if (terms_.empty()) return *this;
        Rat c = int_content();
        return mul_rat(Rat(1) / c); // divide by content (sign included)
    }

    // Exact division; nullopt when d does not divide *this in the ring.
    std::optional<Poly> divide_exact(const Poly& d) const {
        if (d.is_zero()) throw DomainViolation("division by zero polynomial");
        Poly rem(*this), quot;
        while (!rem.is_zero()) {
            auto qm = rem.lm().divide(d.lm());
            if (!qm) return std::nullopt;
            Rat qc = rem.lc() / d.lc();
            Poly t = Poly::from_term(*qm, qc);
            quot += t;
            rem -= t * d;
        }
        return quot;
    }

    std::string str() const {
        if (terms_.empty()) return "0";
        std::ostringstream out;
        bool first = true;
        for (auto& [m, c] : terms_) {
            Rat ac = c < 0 ? Rat(-c) : c;
            if (first) {
                if (c < 0) out << "-";
                first = false;
            } else {
                out << (c < 0 ? " - " : " + ");
            }
            bool coeff_shown = (ac != 1) || m.is_one();
            if (coeff_shown) out << rat_str(ac);
            bool need_star = coeff_shown;
            for (auto& [v, e] : m.exps) {
                if (need_star) out << "*";
                out << var_name(v);
                if (e > 1) out << "^" << e;
                need_star = true;
            }
        }
        return out.str();
    }

private:
    void add_term(const Monomial& m, const Rat& c) {
        if (c == 0) return;
        auto [it, inserted] = terms_.try_emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    TermMap terms_;
};

inline Poly operator*(const Rat& q, const Poly& p) { return p.mul_rat(q); }
inline Poly operator*(long q, const Poly& p) { return p.mul_rat(Rat(q)); }

} // namespace hypersum
