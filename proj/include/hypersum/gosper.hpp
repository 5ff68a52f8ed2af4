#pragma once

// Indefinite hypergeometric summation.
//
// Given a term t(k) with rational consecutive-term ratio rho(k), decide
// whether t has a hypergeometric antidifference G (G(k+1) - G(k) = t(k)) and
// construct it.  The engine works over an exact coefficient field that may
// contain free parameters; decisions that hold only for generic parameter
// values are recorded as side conditions instead of being applied silently.
//
// The shift-coprimality candidates (values j with gcd(f(k), g(k+j)) possibly
// nontrivial) are located on a random parameter specialization and then each
// candidate is verified symbolically, so no true candidate can be missed and
// no false one can slip in.

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hypersum/hyperterm.hpp"
#include "hypersum/linsolve.hpp"
#include "hypersum/poly_gcd.hpp"

namespace hypersum {

namespace detail {

// ---------------------------------------------------------------------------
// exact integer roots of a univariate polynomial over Q

inline Int ipoly_eval(const std::vector<Int>& a, const Int& x) {
    Int acc = 0;
    for (std::size_t i = a.size(); i-- > 0;) acc = acc * x + a[i];
    return acc;
}

inline bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

inline std::uint64_t next_prime_u64(std::uint64_t n) {
    while (!is_prime_u64(n)) ++n;
    return n;
}

inline std::vector<std::uint64_t> roots_mod_p(const std::vector<Int>& a, std::uint64_t p) {
    std::vector<std::uint64_t> am(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        Int r = a[i] % Int(p);
        if (r < 0) r += Int(p);
        am[i] = r.convert_to<std::uint64_t>();
    }
    std::vector<std::uint64_t> roots;
    for (std::uint64_t x = 0; x < p; ++x) {
        unsigned __int128 acc = 0;
        for (std::size_t i = am.size(); i-- > 0;) {
            acc = acc * x + am[i];
            acc %= p;
        }
        if (acc == 0) roots.push_back(x);
    }
    return roots;
}

inline Int mod_inverse(const Int& a, const Int& m) {
    Int r0 = m, r1 = a % m;
    if (r1 < 0) r1 += m;
    Int t0 = 0, t1 = 1;
    while (r1 != 0) {
        Int q = r0 / r1;
        r0 -= q * r1;
        std::swap(r0, r1);
        t0 -= q * t1;
        std::swap(t0, t1);
    }
    if (r0 != 1) throw DomainViolation("internal: modular inverse does not exist");
    t0 %= m;
    if (t0 < 0) t0 += m;
    return t0;
}

// gcd degree of f and f' over GF(p); 0 means squarefree
inline std::size_t gcd_with_derivative_deg_mod_p(const std::vector<std::uint64_t>& f,
                                                 std::uint64_t p) {
    auto trim = [](std::vector<std::uint64_t>& v) {
        while (!v.empty() && v.back() == 0) v.pop_back();
    };
    std::vector<std::uint64_t> a = f, b(f.size() > 1 ? f.size() - 1 : 0);
    for (std::size_t i = 1; i < f.size(); ++i)
        b[i - 1] = static_cast<std::uint64_t>((unsigned __int128)f[i] * (i % p) % p);
    trim(a);
    trim(b);
    while (!b.empty()) {
        // a mod b
        while (a.size() >= b.size() && !a.empty()) {
            // make b monic on the fly via modular inverse of its lead
            std::uint64_t binv = 1, base = b.back(), e = p - 2;
            while (e) { // Fermat inverse
                if (e & 1) binv = static_cast<std::uint64_t>((unsigned __int128)binv * base % p);
                base = static_cast<std::uint64_t>((unsigned __int128)base * base % p);
                e >>= 1;
            }
            std::uint64_t q = static_cast<std::uint64_t>((unsigned __int128)a.back() * binv % p);
            std::size_t off = a.size() - b.size();
            for (std::size_t i = 0; i < b.size(); ++i) {
                std::uint64_t sub = static_cast<std::uint64_t>((unsigned __int128)q * b[i] % p);
                a[off + i] = (a[off + i] + p - sub) % p;
            }
            trim(a);
        }
        std::swap(a, b);
    }
    return a.empty() ? 0 : a.size() - 1;
}

// All integer roots of p viewed as a univariate polynomial in v (its
// coefficients must be rational constants).  Sorted ascending.  Roots are
// located modulo a small prime and Hensel-lifted past the Cauchy bound, so
// arbitrarily large coefficients are fine; every candidate is confirmed by
// exact evaluation.
inline std::vector<Int> integer_roots(const Poly& p, VarId v) {
    if (p.is_zero()) throw DomainViolation("integer_roots: zero polynomial");
    std::vector<Int> roots;
    if (!p.contains(v)) return roots;
    std::vector<Poly> cs = p.primitive().coeffs_in(v);
    std::vector<Int> a;
    a.reserve(cs.size());
    for (const Poly& c : cs) {
        if (!c.is_constant())
            throw DomainViolation("integer_roots: polynomial has extra variables");
        a.push_back(rat_num(c.constant_value())); // primitive => integer coefficients
    }
    std::size_t low = 0;
    while (low < a.size() && a[low] == 0) ++low;
    if (low > 0) {
        roots.push_back(Int(0));
        a.erase(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(low));
    }
    if (a.size() <= 1) return roots;

    using boost::multiprecision::abs;
    Int lead = abs(a.back()), maxc = 0;
    for (const Int& c : a) maxc = std::max(maxc, Int(abs(c)));
    Int bound = 1 + (maxc + lead - 1) / lead; // Cauchy bound, rounded up

    if (a.size() == 2) {
        Int q = -a[0] / a[1];
        if (q != 0 && a[1] * q + a[0] == 0) roots.push_back(q);
    } else if (bound <= 2048) {
        for (Int x = -bound; x <= bound; ++x) {
            if (x == 0) continue;
            if (ipoly_eval(a, x) == 0) roots.push_back(x);
        }
    } else {
        // squarefree part, so roots stay simple modulo a well-chosen prime
        std::vector<Poly> acs;
        acs.reserve(a.size());
        for (const Int& c : a) acs.push_back(Poly(Rat(c)));
        Poly ap = Poly::from_coeffs(acs, v);
        std::vector<Poly> dcs;
        for (std::size_t i = 1; i < acs.size(); ++i) dcs.push_back(Poly(Rat(a[i] * Int(i))));
        Poly dp = Poly::from_coeffs(dcs, v);
        Poly sf = exact(ap, poly_gcd(ap, dp)).primitive();
        std::vector<Int> s, ds;
        for (const Poly& c : sf.coeffs_in(v)) s.push_back(rat_num(c.constant_value()));
        for (std::size_t i = 1; i < s.size(); ++i) ds.push_back(s[i] * Int(i));

        std::uint64_t prime = 10007;
        bool good = false;
        for (int tries = 0; tries < 200 && !good; ++tries) {
            prime = next_prime_u64(prime + 1);
            if (s.back() % Int(prime) == 0) continue; // degree must not drop
            std::vector<std::uint64_t> sm(s.size());
            for (std::size_t i = 0; i < s.size(); ++i) {
                Int r = s[i] % Int(prime);
                if (r < 0) r += Int(prime);
                sm[i] = r.convert_to<std::uint64_t>();
            }
            good = gcd_with_derivative_deg_mod_p(sm, prime) == 0;
        }
        if (!good) throw DomainViolation("integer_roots: no squarefree prime found");

        Int two_b = Int(2) * bound;
        for (std::uint64_t r : roots_mod_p(s, prime)) {
            Int m(prime), x(r);
            while (m <= two_b) {
                m *= m;
                Int fx = ipoly_eval(s, x) % m;
                Int dfx = ipoly_eval(ds, x) % m;
                if (dfx < 0) dfx += m;
                x = (x - fx * mod_inverse(dfx, m)) % m;
                if (x < 0) x += m;
            }
            for (Int cand : {x, Int(x - m)}) {
                if (cand == 0 || cand < -bound || cand > bound) continue;
                if (ipoly_eval(a, cand) == 0) roots.push_back(cand);
            }
        }
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

// ---------------------------------------------------------------------------
// shift coprimality analysis

struct DispersionResult {
    std::vector<long> shifts;                 // verified: gcd(f(k), g(k+j)) nontrivial
    std::vector<std::string> side_conditions; // shifts discarded as generic non-roots
};

// Nonnegative integer shifts j with a genuine common factor between f(k) and
// g(k+j) over the parameter field.  Candidates come from the integer roots of
// the resultant on a random parameter specialization that preserves both
// k-degrees.  A single random point produces spurious candidates (specialized
// roots of distinct atoms land on integers, so their differences do too); a
// genuine shift survives every specialization, so only candidates shared by
// two independent points are settled symbolically.  Disagreement between the
// points means some overlap moves with the parameters: f and g(k+j) then
// share a factor only on a subvariety of parameter space, and that whole
// family is reported as one side condition read off the bivariate resultant,
// with the factors belonging to genuine shifts divided out.
inline DispersionResult dispersion(const Poly& f, const Poly& g, VarId k, std::mt19937_64& rng) {
    DispersionResult out;
    if (f.degree(k) <= 0 || g.degree(k) <= 0) return out;

    std::set<VarId> params;
    for (VarId v : f.variables())
        if (v != k) params.insert(v);
    for (VarId v : g.variables())
        if (v != k) params.insert(v);

    const VarId jv = var("_shift");
    auto specialized_candidates = [&]() {
        Poly fh = f, gh = g;
        if (!params.empty()) {
            std::uniform_int_distribution<long> pick(101, 997);
            for (int attempt = 0;; ++attempt) {
                if (attempt > 64)
                    throw DomainViolation("dispersion: failed to specialize parameters");
                Poly a = f, b = g;
                for (VarId v : params) {
                    Poly val{Rat(pick(rng))};
                    a = a.subst(v, val);
                    b = b.subst(v, val);
                }
                if (a.degree(k) == f.degree(k) && b.degree(k) == g.degree(k)) {
                    fh = a;
                    gh = b;
                    break;
                }
            }
        }
        Poly gj = gh.subst(k, Poly::from_var(k) + Poly::from_var(jv));
        Poly rj = resultant(fh, gj, k);
        std::set<long> cand;
        for (const Int& r : integer_roots(rj, jv))
            if (r >= 0) cand.insert(r.convert_to<long>());
        return cand;
    };

    std::set<long> cand = specialized_candidates();
    if (!params.empty() && !cand.empty()) {
        const std::set<long> second = specialized_candidates();
        std::set<long> both;
        std::set_intersection(cand.begin(), cand.end(), second.begin(), second.end(),
                              std::inserter(both, both.begin()));
        cand = std::move(both);
    }

    for (long j0 : cand) {
        Poly d = poly_gcd(f, g.shift(k, Rat(j0)));
        if (d.contains(k)) {
            out.shifts.push_back(j0);
        } else {
            // common factor exists only on a parameter subvariety
            Poly cond = resultant(f, g.shift(k, Rat(j0)), k);
            out.side_conditions.push_back("nonzero: " + cond.str());
        }
    }
    std::sort(out.shifts.begin(), out.shifts.end());
    return out;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Gosper-Petkovsek decomposition

// rho(k) = (a(k)/b(k)) * (c(k+1)/c(k)) with gcd(a(k), b(k+j)) = 1 for all
// integers j >= 0.
struct GPForm {
    Poly a, b, c;
    std::vector<std::string> side_conditions;
};

inline GPForm gp_decompose(const RatFun& rho, VarId k, std::mt19937_64& rng) {
    GPForm out;
    Poly f = rho.num(), g = rho.den();
    out.c = Poly(1);
    detail::DispersionResult disp = detail::dispersion(f, g, k, rng);
    out.side_conditions = disp.side_conditions;
    for (long j0 : disp.shifts) {
        Poly d = poly_gcd(f, g.shift(k, Rat(j0)));
        if (!d.contains(k)) continue;
        f = detail::exact(f, d);
        g = detail::exact(g, d.shift(k, Rat(-j0)));
        for (long i = 1; i <= j0; ++i) out.c = out.c * d.shift(k, Rat(-i));
    }
    out.a = f;
    out.b = g;

    // The decomposition is load-bearing, so recheck both of its guarantees.
    RatFun recheck = RatFun(out.a, out.b) * RatFun(out.c.shift(k, Rat(1)), out.c);
    if (!(recheck == rho)) throw DomainViolation("internal: decomposition identity failed");
    detail::DispersionResult inv = detail::dispersion(out.a, out.b, k, rng);
    if (!inv.shifts.empty()) throw DomainViolation("internal: shift coprimality failed");
    for (const auto& s : inv.side_conditions) out.side_conditions.push_back(s);
    return out;
}

namespace detail {

// Degree bound for polynomial solutions x of
//   a(k) x(k+1) - b(k-1) x(k) = rhs(k),  deg rhs = rhs_deg.
// nullopt means no nonnegative degree is possible.
inline std::optional<long> key_degree_bound(const Poly& a, const Poly& bm1, VarId k, long rhs_deg,
                                            std::vector<std::string>& side) {
    long df = a.degree(k), dg = bm1.degree(k);
    long big = std::max(df, dg);
    Poly lf = a.coeff_of(k, static_cast<std::uint32_t>(df));
    Poly lg = bm1.coeff_of(k, static_cast<std::uint32_t>(dg));
    long bound;
    if (df != dg || !(lf == lg)) {
        bound = rhs_deg - big;
    } else {
        // leading terms cancel
        long d1 = rhs_deg - big + 1;
        Poly e = big >= 1 ? (a - bm1).coeff_of(k, static_cast<std::uint32_t>(big - 1)) : Poly();
        RatFun q = RatFun(e) / RatFun(lf);
        long d2 = -1;
        if (q.is_constant()) {
            auto z = rat_to_int(q.constant_value());
            if (z && *z <= 0) d2 = Int(-*z).convert_to<long>();
        } else {
            side.push_back("degree bound assumes " + (-q).str() +
                           " is not a nonnegative integer");
        }
        bound = std::max(d1, d2);
    }
    if (bound < 0) return std::nullopt;
    return bound;
}

// Coefficient columns of the unknowns x_0..x_d in the key equation.
inline std::vector<Poly> key_columns(const Poly& a, const Poly& bm1, VarId k, long xdeg) {
    std::vector<Poly> cols;
    Poly kk = Poly::from_var(k);
    Poly k1 = kk + Poly(1);
    for (long i = 0; i <= xdeg; ++i)
        cols.push_back(a * k1.pow(static_cast<unsigned>(i)) -
                       bm1 * kk.pow(static_cast<unsigned>(i)));
    return cols;
}

// Least common multiple of the denominators of a family of rational functions.
inline Poly common_den(const std::vector<RatFun>& rs) {
    Poly q(1);
    for (const RatFun& r : rs) {
        Poly g = poly_gcd(q, r.den());
        q = exact(q, g) * r.den();
    }
    return q;
}

inline Poly ratfun_to_poly(const RatFun& r) {
    if (!r.den().is_constant()) throw DomainViolation("expected a polynomial value");
    return r.num().mul_rat(Rat(1) / r.den().constant_value());
}

// Nullspace of  a(k) x(k+1) - b(k-1) x(k) - c(k) * sum_j s_j u[j](k) = 0
// over polynomial x (degree-bounded) and k-free unknowns s_j.
struct TelescopeBasisVector {
    RatFun x;               // polynomial in k over the parameter field
    std::vector<RatFun> s;  // size u.size()
};

struct TelescopeBasis {
    GPForm gp;
    long xdeg = -1;
    std::vector<TelescopeBasisVector> basis;
    std::vector<std::string> side_conditions;
};

inline TelescopeBasis telescope_nullspace(const RatFun& rho_tilde, const std::vector<Poly>& u,
                                          VarId k, std::mt19937_64& rng) {
    TelescopeBasis out;
    out.gp = gp_decompose(rho_tilde, k, rng);
    out.side_conditions = out.gp.side_conditions;
    Poly bm1 = out.gp.b.shift(k, Rat(-1));

    long udeg = 0;
    for (const Poly& up : u) udeg = std::max(udeg, up.degree(k));
    long rhs_deg = out.gp.c.degree(k) + udeg;
    auto bound = key_degree_bound(out.gp.a, bm1, k, rhs_deg, out.side_conditions);
    out.xdeg = bound ? *bound : -1;

    std::vector<Poly> cols =
        bound ? key_columns(out.gp.a, bm1, k, out.xdeg) : std::vector<Poly>{};
    const std::size_t nx = cols.size();
    for (const Poly& up : u) cols.push_back(-(out.gp.c * up));

    long maxdeg = 0;
    for (const Poly& cp : cols) maxdeg = std::max(maxdeg, cp.degree(k));
    std::vector<std::vector<RatFun>> m(static_cast<std::size_t>(maxdeg) + 1,
                                       std::vector<RatFun>(cols.size()));
    for (std::size_t ci = 0; ci < cols.size(); ++ci) {
        auto rows = cols[ci].coeffs_in(k);
        for (std::size_t r = 0; r < rows.size(); ++r) m[r][ci] = RatFun(rows[r]);
    }
    std::vector<RatFun> zero(m.size());
    LinearSolution sol = solve_linear(m, zero);

    Poly kk = Poly::from_var(k);
    for (const auto& v : sol.nullspace) {
        TelescopeBasisVector w;
        RatFun x;
        for (std::size_t i = 0; i < nx; ++i)
            x = x + v[i] * RatFun(kk.pow(static_cast<unsigned>(i)));
        w.x = x;
        w.s.assign(v.begin() + static_cast<std::ptrdiff_t>(nx), v.end());
        out.basis.push_back(std::move(w));
    }
    return out;
}

// Scale a vector of rational functions into coprime integer polynomials.
// The reference entry (last nonzero if sign_from_back, else first nonzero)
// gets a positive leading coefficient.  Zero vectors are returned unchanged.
inline std::vector<Poly> normalize_coprime(const std::vector<RatFun>& v, bool sign_from_back) {
    std::vector<RatFun> scaled = v;
    Poly den = common_den(scaled);
    std::vector<Poly> w;
    w.reserve(v.size());
    for (const RatFun& f : scaled) w.push_back(ratfun_to_poly(f * RatFun(den)));

    Int num_gcd = 0, den_lcm = 1;
    for (const Poly& p : w)
        for (const auto& [mono, c] : p.terms()) {
            (void)mono;
            using boost::multiprecision::abs;
            num_gcd = boost::multiprecision::gcd(num_gcd, Int(abs(rat_num(c))));
            den_lcm = boost::multiprecision::lcm(den_lcm, rat_den(c));
        }
    if (num_gcd == 0) return w; // all zero
    Rat scale{Rat(den_lcm) / Rat(num_gcd)};
    for (Poly& p : w) p = p.mul_rat(scale);

    Poly g;
    for (const Poly& p : w) g = poly_gcd(g, p);
    if (!g.is_constant())
        for (Poly& p : w) p = exact(p, g);

    std::size_t ref = 0;
    bool found = false;
    if (sign_from_back) {
        for (std::size_t i = w.size(); i-- > 0;)
            if (!w[i].is_zero()) {
                ref = i;
                found = true;
                break;
            }
    } else {
        for (std::size_t i = 0; i < w.size(); ++i)
            if (!w[i].is_zero()) {
                ref = i;
                found = true;
                break;
            }
    }
    if (found && w[ref].lc() < 0)
        for (Poly& p : w) p = -p;
    return w;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Gosper's algorithm

struct GosperResult {
    bool summable = false;
    GPForm gp;
    RatFun x; // key-equation solution (a polynomial in the summation variable)
    RatFun R; // antidifference multiplier: G = R * t has G(k+1) - G(k) = t(k)
    std::vector<std::string> side_conditions;
};

inline GosperResult gosper(const HyperTerm& t, std::uint64_t seed = 0) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    VarId k = t.sumvar();
    RatFun rho = t.ratio();
    GosperResult out;
    out.gp = gp_decompose(rho, k, rng);
    out.side_conditions = out.gp.side_conditions;
    Poly bm1 = out.gp.b.shift(k, Rat(-1));

    auto bound = detail::key_degree_bound(out.gp.a, bm1, k, out.gp.c.degree(k),
                                          out.side_conditions);
    if (!bound) return out;

    auto cols = detail::key_columns(out.gp.a, bm1, k, *bound);
    long maxdeg = out.gp.c.degree(k);
    for (const Poly& cp : cols) maxdeg = std::max(maxdeg, cp.degree(k));
    std::vector<std::vector<RatFun>> m(static_cast<std::size_t>(maxdeg) + 1,
                                       std::vector<RatFun>(cols.size()));
    std::vector<RatFun> rhs(m.size());
    for (std::size_t ci = 0; ci < cols.size(); ++ci) {
        auto rows = cols[ci].coeffs_in(k);
        for (std::size_t r = 0; r < rows.size(); ++r) m[r][ci] = RatFun(rows[r]);
    }
    {
        auto rows = out.gp.c.coeffs_in(k);
        for (std::size_t r = 0; r < rows.size(); ++r) rhs[r] = RatFun(rows[r]);
    }
    LinearSolution sol = solve_linear(m, rhs);
    if (!sol.consistent) return out;

    Poly kk = Poly::from_var(k);
    RatFun x;
    for (std::size_t i = 0; i < sol.particular.size(); ++i)
        x = x + sol.particular[i] * RatFun(kk.pow(static_cast<unsigned>(i)));
    out.x = x;
    out.R = RatFun(bm1) * x / RatFun(out.gp.c);

    // Exact certificate recheck: R(k+1) rho(k) - R(k) = 1.
    if (!(out.R.shift(k, Rat(1)) * rho - out.R == RatFun(1)))
        throw DomainViolation("internal: antidifference certificate failed");
    out.summable = true;
    return out;
}

} // namespace hypersum
