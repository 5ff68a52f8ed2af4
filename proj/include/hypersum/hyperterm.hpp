#pragma once

// Hypergeometric terms t(k), represented as a product of atoms:
//
//   Poch(arg, k)^e      rising factorial (arg)_k, arg linear in k with
//                       k-coefficient 0 or +-1 (series terms all use k-free
//                       args; the +-1 forms still have rational ratios)
//   fact(k + s)^e       factorial, s a nonnegative integer
//   pow(base, k)        geometric factor, base a k-free rational function
//   pow(base, q)        parameter power, q a non-summation variable
//   gammaf(arg)^e       k-free Gamma-function prefactor (arises when a whole
//                       normalized integral summand, prefactor included, is
//                       treated as one term)
//   prefactor           one rational function of k and parameters; k-free
//                       prefactors are plain constants, k-dependent ones fold
//                       several similar series into a single term
//
// The invariant that makes everything downstream work: t(k+1)/t(k) is a
// rational function of k, and the quotient of two similar terms is too.
// Terms are canonicalized lazily (atoms merged and sorted), so structural
// equality is value equality.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hypersum/ratfun.hpp"

namespace hypersum {

// Total order on polynomials (graded-lex on monomials, then coefficient),
// used only to sort atoms into canonical positions.
inline int compare_poly(const Poly& a, const Poly& b) {
    auto ia = a.terms().begin(), ib = b.terms().begin();
    for (; ia != a.terms().end() && ib != b.terms().end(); ++ia, ++ib) {
        if (ia->first != ib->first) return mono_greater(ia->first, ib->first) ? -1 : 1;
        if (ia->second != ib->second) return ia->second < ib->second ? -1 : 1;
    }
    if (ia != a.terms().end()) return -1;
    if (ib != b.terms().end()) return 1;
    return 0;
}

inline RatFun rf_pow(const RatFun& f, long e) {
    if (e == 0) return RatFun(1);
    RatFun base = e < 0 ? f.inverse() : f;
    unsigned long m = static_cast<unsigned long>(e < 0 ? -e : e);
    RatFun r(1);
    while (m) {
        if (m & 1) r *= base;
        if (m >>= 1) base *= base;
    }
    return r;
}

inline Rat int_factorial(const Int& m) {
    if (m < 0) throw DomainViolation("factorial of a negative integer");
    Rat r(1);
    for (Int i = 2; i <= m; ++i) r *= Rat(i);
    return r;
}

// Gamma(v + d) / Gamma(v) as a rational function (d an exact integer).
inline RatFun gamma_quotient(const Poly& v, const Rat& d) {
    auto di = rat_to_int(d);
    if (!di) throw DomainViolation("gamma_quotient: non-integer shift");
    RatFun r(1);
    if (*di >= 0) {
        for (Int i = 0; i < *di; ++i) r *= RatFun(v + Poly(Rat(i)));
    } else {
        for (Int i = 1; i <= -*di; ++i) r /= RatFun(v - Poly(Rat(i)));
    }
    return r;
}

struct PochAtom {
    Poly arg;
    int power;
};

struct FactAtom {
    long shift; // (k + shift)!
    int power;
};

struct GammaAtom {
    Poly arg; // k-free
    int power;
};

class HyperTerm {
public:
    explicit HyperTerm(VarId sumvar = var("k")) : sumvar_(sumvar) {}

    VarId sumvar() const { return sumvar_; }

    // --- builders (all return *this for chaining) ---------------------------

    HyperTerm& mul_poch(const Poly& arg, int power = 1) {
        if (power == 0) return *this;
        if (arg.degree(sumvar_) > 1)
            throw DomainViolation("Poch argument nonlinear in summation variable: " + arg.str());
        Poly c = arg.coeff_of(sumvar_, 1);
        if (!c.is_constant() ||
            (c.constant_value() != 0 && c.constant_value() != 1 && c.constant_value() != -1))
            throw DomainViolation(
                "Poch argument must have summation-variable coefficient 0 or +-1: " + arg.str());
        poch_.push_back({arg, power});
        dirty_ = true;
        return *this;
    }

    HyperTerm& mul_fact(long shift, int power = 1) {
        if (shift < 0) throw DomainViolation("factorial shift must be nonnegative");
        if (power != 0) {
            fact_.push_back({shift, power});
            dirty_ = true;
        }
        return *this;
    }

    HyperTerm& mul_geo(const RatFun& base) {
        if (base.is_zero()) throw DomainViolation("geometric factor with zero base");
        if (base.contains(sumvar_))
            throw DomainViolation("geometric base depends on the summation variable");
        geo_ = geo_ * base;
        return *this;
    }

    HyperTerm& mul_param_pow(const RatFun& base, VarId param) {
        if (param == sumvar_) return mul_geo(base);
        if (base.is_zero()) throw DomainViolation("parameter power with zero base");
        if (base.contains(sumvar_) || base.contains(param))
            throw DomainViolation(
                "parameter-power base must be free of the summation variable and its exponent");
        auto [it, inserted] = ppow_.try_emplace(param, base);
        if (!inserted) it->second = it->second * base;
        if (ppow_.at(param) == RatFun(1)) ppow_.erase(param);
        return *this;
    }

    HyperTerm& mul_gamma(const Poly& arg, int power = 1) {
        if (arg.contains(sumvar_))
            throw DomainViolation("gammaf argument depends on the summation variable");
        if (power != 0) {
            gamma_.push_back({arg, power});
            dirty_ = true;
        }
        return *this;
    }

    HyperTerm& mul_rational(const RatFun& value) {
        if (value.is_zero()) throw DomainViolation("zero prefactor annihilates the term");
        pref_ = pref_ * value;
        return *this;
    }

    HyperTerm& operator*=(const HyperTerm& o) {
        if (o.sumvar_ != sumvar_) throw DomainViolation("mixed summation variables");
        for (auto& a : o.poch_) poch_.push_back(a);
        for (auto& a : o.fact_) fact_.push_back(a);
        for (auto& a : o.gamma_) gamma_.push_back(a);
        for (auto& [q, b] : o.ppow_) mul_param_pow(b, q);
        geo_ = geo_ * o.geo_;
        pref_ = pref_ * o.pref_;
        dirty_ = true;
        return *this;
    }

    // Reciprocal term: every atom's power flips.
    HyperTerm inverse() const {
        HyperTerm r(sumvar_);
        for (auto& a : poch_) r.poch_.push_back({a.arg, -a.power});
        for (auto& a : fact_) r.fact_.push_back({a.shift, -a.power});
        for (auto& a : gamma_) r.gamma_.push_back({a.arg, -a.power});
        for (auto& [q, b] : ppow_) r.ppow_.emplace(q, b.inverse());
        r.geo_ = geo_.inverse();
        r.pref_ = pref_.inverse();
        r.dirty_ = true;
        return r;
    }

    // --- canonical accessors -------------------------------------------------

    const std::vector<PochAtom>& pochs() const { canonicalize(); return poch_; }
    const std::vector<FactAtom>& facts() const { canonicalize(); return fact_; }
    const std::vector<GammaAtom>& gammas() const { canonicalize(); return gamma_; }
    const std::map<VarId, RatFun>& param_pows() const { return ppow_; }
    const RatFun& geo_base() const { return geo_; }
    const RatFun& prefactor() const { return pref_; }

    bool is_pure_rational() const {
        canonicalize();
        return poch_.empty() && fact_.empty() && gamma_.empty() && ppow_.empty() &&
               geo_ == RatFun(1);
    }

    bool operator==(const HyperTerm& o) const {
        canonicalize();
        o.canonicalize();
        if (sumvar_ != o.sumvar_ || poch_.size() != o.poch_.size() ||
            fact_.size() != o.fact_.size() || gamma_.size() != o.gamma_.size())
            return false;
        for (std::size_t i = 0; i < poch_.size(); ++i)
            if (poch_[i].power != o.poch_[i].power || !(poch_[i].arg == o.poch_[i].arg))
                return false;
        for (std::size_t i = 0; i < fact_.size(); ++i)
            if (fact_[i].power != o.fact_[i].power || fact_[i].shift != o.fact_[i].shift)
                return false;
        for (std::size_t i = 0; i < gamma_.size(); ++i)
            if (gamma_[i].power != o.gamma_[i].power || !(gamma_[i].arg == o.gamma_[i].arg))
                return false;
        return ppow_ == o.ppow_ && geo_ == o.geo_ && pref_ == o.pref_;
    }

    // --- the structural operations -------------------------------------------

    // t(k+1) / t(k), always a rational function of k.
    RatFun ratio() const {
        canonicalize();
        Poly K = Poly::from_var(sumvar_);
        RatFun r(1);
        for (auto& a : poch_) {
            Rat c = a.arg.coeff_of(sumvar_, 1).constant_value();
            if (c == 0) {
                r *= rf_pow(RatFun(a.arg + K), a.power);
            } else if (c == 1) {
                // (arg(k))_k = Gamma(arg+k)/Gamma(arg): the argument advances
                // along with k, so one k-step is two rising steps over one.
                RatFun step = RatFun((a.arg + K) * (a.arg + K + Poly(1)), a.arg);
                r *= rf_pow(step, a.power);
            } else { // c == -1
                r *= rf_pow(RatFun(a.arg - Poly(1)), a.power);
            }
        }
        for (auto& a : fact_) r *= rf_pow(RatFun(K + Poly(a.shift + 1)), a.power);
        r *= geo_;
        if (pref_.contains(sumvar_)) r *= pref_.shift(sumvar_, 1) / pref_;
        return r;
    }

    // t with param := param + offset everywhere it appears.
    HyperTerm shift_param(VarId param, long offset) const {
        if (param == sumvar_) throw DomainViolation("cannot shift the summation variable");
        canonicalize();
        HyperTerm r(sumvar_);
        Rat off(offset);
        for (auto& a : poch_) r.mul_poch(a.arg.shift(param, off), a.power);
        for (auto& a : fact_) r.mul_fact(a.shift, a.power);
        for (auto& a : gamma_) r.mul_gamma(a.arg.shift(param, off), a.power);
        for (auto& [q, b] : ppow_) {
            r.mul_param_pow(b.shift(param, off), q);
            if (q == param) r.mul_rational(rf_pow(b, offset)); // base^(q+offset)
        }
        if (!(geo_ == RatFun(1))) r.mul_geo(geo_.shift(param, off));
        if (!(pref_ == RatFun(1))) r.mul_rational(pref_.shift(param, off));
        return r;
    }

    std::string str() const {
        canonicalize();
        std::vector<std::string> pos, neg;
        auto push = [&](const std::string& s, int power) {
            auto& v = power > 0 ? pos : neg;
            int ap = power > 0 ? power : -power;
            v.push_back(ap == 1 ? s : s + "^" + std::to_string(ap));
        };
        std::string kn = var_name(sumvar_);
        for (auto& a : poch_) push("Poch(" + a.arg.str() + ", " + kn + ")", a.power);
        for (auto& a : fact_)
            push("fact(" + (a.shift ? kn + " + " + std::to_string(a.shift) : kn) + ")", a.power);
        for (auto& a : gamma_) push("gammaf(" + a.arg.str() + ")", a.power);
        if (!(geo_ == RatFun(1))) pos.push_back("pow(" + geo_.str() + ", " + kn + ")");
        for (auto& [q, b] : ppow_) pos.push_back("pow(" + b.str() + ", " + var_name(q) + ")");
        if (!(pref_ == RatFun(1)) || (pos.empty() && neg.empty()))
            pos.push_back("(" + pref_.str() + ")");
        auto join = [](const std::vector<std::string>& v) {
            std::string s;
            for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "*" : "") + v[i];
            return s;
        };
        std::string out = pos.empty() ? "1" : join(pos);
        if (!neg.empty())
            out += "/" + (neg.size() == 1 ? neg[0] : "(" + join(neg) + ")");
        return out;
    }

private:
    void canonicalize() const {
        if (!dirty_) return;
        std::sort(poch_.begin(), poch_.end(), [](const PochAtom& x, const PochAtom& y) {
            return compare_poly(x.arg, y.arg) < 0;
        });
        std::vector<PochAtom> pm;
        for (auto& a : poch_) {
            if (!pm.empty() && pm.back().arg == a.arg) pm.back().power += a.power;
            else pm.push_back(a);
        }
        std::erase_if(pm, [](const PochAtom& a) { return a.power == 0; });
        poch_ = std::move(pm);

        std::sort(fact_.begin(), fact_.end(),
                  [](const FactAtom& x, const FactAtom& y) { return x.shift < y.shift; });
        std::vector<FactAtom> fm;
        for (auto& a : fact_) {
            if (!fm.empty() && fm.back().shift == a.shift) fm.back().power += a.power;
            else fm.push_back(a);
        }
        std::erase_if(fm, [](const FactAtom& a) { return a.power == 0; });
        fact_ = std::move(fm);

        std::sort(gamma_.begin(), gamma_.end(), [](const GammaAtom& x, const GammaAtom& y) {
            return compare_poly(x.arg, y.arg) < 0;
        });
        std::vector<GammaAtom> gm;
        for (auto& a : gamma_) {
            if (!gm.empty() && gm.back().arg == a.arg) gm.back().power += a.power;
            else gm.push_back(a);
        }
        std::erase_if(gm, [](const GammaAtom& a) { return a.power == 0; });
        gamma_ = std::move(gm);
        dirty_ = false;
    }

    VarId sumvar_;
    mutable std::vector<PochAtom> poch_;
    mutable std::vector<FactAtom> fact_;
    mutable std::vector<GammaAtom> gamma_;
    std::map<VarId, RatFun> ppow_;
    RatFun geo_{1};
    RatFun pref_{1};
    mutable bool dirty_ = false;
};

// t1(k) / t2(k) as a rational function of k; throws NotSimilar when the
// quotient is not rational (mismatched geometric bases, uncancelled Gamma
// prefactors, Pochhammer args that do not differ by integers, ...).
inline RatFun cross_ratio(const HyperTerm& t1, const HyperTerm& t2) {
    if (t1.sumvar() != t2.sumvar()) throw NotSimilar("terms use different summation variables");
    const VarId k = t1.sumvar();
    if (!(t1.geo_base() == t2.geo_base()))
        throw NotSimilar("geometric bases differ: " + t1.geo_base().str() + " vs " +
                         t2.geo_base().str());
    {
        auto &p1 = t1.param_pows(), &p2 = t2.param_pows();
        if (p1.size() != p2.size()) throw NotSimilar("parameter powers differ");
        for (auto& [q, b] : p1) {
            auto it = p2.find(q);
            if (it == p2.end() || !(it->second == b)) throw NotSimilar("parameter powers differ");
        }
    }

    // Ledger of Gamma factors: Poch(a,k)^e = Gamma(a+k)^e / Gamma(a)^e,
    // (k+s)!^e = Gamma(k+s+1)^e, gammaf(a)^e = Gamma(a)^e.  Pochhammer atoms
    // with k-coefficient +-1 have no such split, so they must cancel exactly.
    struct Entry {
        Poly base;
        long power;
        bool with_k;
    };
    std::vector<Entry> ledger;
    auto add = [&](const Poly& base, long power, bool with_k) {
        if (power) ledger.push_back({base, power, with_k});
    };
    std::map<std::string, long> sloped;
    for (int side = 0; side < 2; ++side) {
        const HyperTerm& t = side == 0 ? t1 : t2;
        long sgn = side == 0 ? 1 : -1;
        for (auto& a : t.pochs()) {
            Rat c = a.arg.coeff_of(k, 1).constant_value();
            if (c == 0) {
                add(a.arg, sgn * a.power, true);
                add(a.arg, -sgn * a.power, false);
            } else {
                sloped[a.arg.str()] += sgn * a.power;
            }
        }
        for (auto& a : t.facts()) add(Poly(a.shift + 1), sgn * a.power, true);
        for (auto& a : t.gammas()) add(a.arg, sgn * a.power, false);
    }
    for (auto& [argstr, pw] : sloped)
        if (pw != 0)
            throw NotSimilar("Pochhammer with k-dependent argument does not cancel: " + argstr);

    // Group entries whose bases differ by an integer constant; each group
    // contributes a product of Gamma quotients relative to its lowest base.
    struct Group {
        bool with_k;
        Poly anchor;
        std::vector<std::pair<Rat, long>> members; // (offset from anchor, power)
    };
    std::vector<Group> groups;
    for (auto& e : ledger) {
        bool placed = false;
        for (auto& g : groups) {
            if (g.with_k != e.with_k) continue;
            Poly diff = e.base - g.anchor;
            if (!diff.is_constant() || !rat_to_int(diff.constant_value())) continue;
            g.members.emplace_back(diff.constant_value(), e.power);
            placed = true;
            break;
        }
        if (!placed) groups.push_back({e.with_k, e.base, {{Rat(0), e.power}}});
    }

    Poly K = Poly::from_var(k);
    RatFun result = t1.prefactor() / t2.prefactor();
    for (auto& g : groups) {
        long net = 0;
        for (auto& [d, pw] : g.members) net += pw;
        // Gamma at a constant integer argument is an exact rational; those
        // groups are simply evaluated and need not cancel.
        if (!g.with_k && g.anchor.is_constant() && rat_to_int(g.anchor.constant_value())) {
            for (auto& [d, pw] : g.members) {
                Int m = *rat_to_int(g.anchor.constant_value() + d);
                if (m <= 0)
                    throw DomainViolation("Gamma prefactor at a nonpositive integer");
                result *= rf_pow(RatFun(int_factorial(m - 1)), pw);
            }
            continue;
        }
        if (net != 0)
            throw NotSimilar("Gamma-type factors with base " + g.anchor.str() +
                             (g.with_k ? " + k" : "") + " do not cancel");
        Rat dmin = g.members.front().first;
        for (auto& [d, pw] : g.members) dmin = std::min(dmin, d);
        Poly stem = g.anchor + Poly(dmin);
        if (g.with_k) stem += K;
        for (auto& [d, pw] : g.members)
            result *= rf_pow(gamma_quotient(stem, d - dmin), pw);
    }
    return result;
}

} // namespace hypersum
