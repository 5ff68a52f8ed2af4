#pragma once

// Workbench for the radial matrix elements of the Dirac-Coulomb bound state.
//
// The three moment families
//
//   A_p = integral r^(p+2) (F^2 + G^2) dr
//   B_p = integral r^(p+2) (F^2 - G^2) dr
//   C_p = integral r^(p+2) F G dr
//
// evaluate in closed form as short combinations of terminating 3F2 series at
// unit argument.  Everything this header does rests on that representation:
//
//   * derive_unmixed    re-derives the pure three-term recurrence each family
//                       satisfies in p, by creative telescoping on the folded
//                       series summand, and checks it against the closed-form
//                       coefficient triple;
//   * derive_dependencies  finds the linear relations tying the five series
//                       together at fixed parameters;
//   * derive_contiguous derives the contiguous relations that step the lower
//                       parameter of the series;
//   * verify_relation   proves the first-order relations between the moment
//                       families (the hypervirial set) by expanding both sides
//                       over the series basis, eliminating all but two slots
//                       with the derived dependencies, and reducing the two
//                       leftover coefficients modulo the bound-state parameter
//                       identities.
//
// All of it is exact: integer/rational arithmetic end to end.

#include <algorithm>
#include <array>
#include <chrono>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "hypersum/certificate.hpp"
#include "hypersum/linsolve.hpp"
#include "hypersum/pgosper.hpp"
#include "hypersum/zeilberger.hpp"

namespace hypersum::coulomb {

using BigFloat = boost::multiprecision::cpp_bin_float_quad;

// ---------------------------------------------------------------------------
// parameter alphabet

// k      summation index of the series
// p      moment power (recurrence variable)
// n      radial quantum number
// nu     sqrt(kappa^2 - mu^2)
// eps    bound-state energy in units of mc^2
// a      sqrt(1 - eps^2)
// kappa  Dirac angular quantum number
// mu     coupling alpha*Z
// beta   inverse length scale mc/hbar (kept symbolic; 1 in numeric work)
struct Symbols {
    VarId k, p, n, nu, eps, a, kappa, mu, beta;
};

inline const Symbols& syms() {
    static const Symbols s{var("k"),  var("p"), var("n"),     var("nu"), var("eps"),
                           var("a"),  var("kappa"), var("mu"), var("beta")};
    return s;
}

namespace detail {

inline Poly pv(VarId v, std::uint32_t e = 1) { return Poly::from_var(v, e); }

// Rewrite v^(2q+r) -> sq^q v^r coefficient-wise, eliminating even powers of v.
inline Poly replace_square(const Poly& e, VarId v, const Poly& sq) {
    if (!e.contains(v)) return e;
    auto cs = e.coeffs_in(v);
    Poly out;
    const Poly vp = pv(v);
    for (std::size_t i = 0; i < cs.size(); ++i) {
        if (cs[i].is_zero()) continue;
        Poly t = cs[i] * sq.pow(static_cast<unsigned>(i / 2));
        if (i % 2) t = t * vp;
        out += t;
    }
    return out;
}

} // namespace detail

// ---------------------------------------------------------------------------
// reduction modulo the bound-state identities

// The physical parameters satisfy
//
//   eps mu = a (nu + n),   eps^2 + a^2 = 1,   kappa^2 = nu^2 + mu^2.
//
// physics_reduce maps a polynomial in the alphabet to a canonical form that is
// zero exactly when the input vanishes identically on that variety: first n is
// eliminated through n = (eps mu - a nu)/a with the a-denominator cleared (the
// result picks up a factor a^deg_n, harmless since a != 0), then even powers
// of eps and of kappa are rewritten.  The two squares have no overlap, so one
// pass each makes the result canonical.
inline Poly physics_reduce(Poly e) {
    const Symbols& S = syms();
    if (e.contains(S.n)) {
        auto cs = e.coeffs_in(S.n);
        const Poly lift = detail::pv(S.eps) * detail::pv(S.mu) - detail::pv(S.a) * detail::pv(S.nu);
        const Poly av = detail::pv(S.a);
        const std::size_t d = cs.size() - 1;
        Poly acc;
        for (std::size_t i = 0; i < cs.size(); ++i) {
            if (cs[i].is_zero()) continue;
            acc += cs[i] * lift.pow(static_cast<unsigned>(i)) *
                   av.pow(static_cast<unsigned>(d - i));
        }
        e = acc;
    }
    e = detail::replace_square(e, S.eps, Poly(1) - detail::pv(S.a, 2));
    e = detail::replace_square(e, S.kappa, detail::pv(S.nu, 2) + detail::pv(S.mu, 2));
    return e;
}

// Numerator and denominator reduced separately, each up to a power of a.
inline RatFun physics_reduce(const RatFun& f) {
    Poly den = physics_reduce(f.den());
    if (den.is_zero())
        throw DomainViolation("denominator vanishes identically on the physical parameter set: " +
                              f.den().str());
    return RatFun(physics_reduce(f.num()), den);
}

inline bool physically_zero(const RatFun& f) {
    if (f.is_zero()) return true;
    if (physics_reduce(f.den()).is_zero())
        throw DomainViolation("denominator vanishes identically on the physical parameter set: " +
                              f.den().str());
    return physics_reduce(f.num()).is_zero();
}

// ---------------------------------------------------------------------------
// bound states

// One bound state with all derived parameters populated at 128-bit precision.
// mu and alpha_fs stay exact rationals; beta is 1 in numeric work.
struct CoulombState {
    long Z = 1;
    long n = 0;
    long kappa = -1;
    Rat alpha_fs;
    Rat mu;       // alpha_fs * Z
    Rat j;        // |kappa| - 1/2
    BigFloat nu, eps, a, gamma, beta;
};

inline const Rat& default_alpha_fs() {
    // CODATA 2018 value of the fine-structure constant, exact as written
    static const Rat alpha(Int("72973525693"), Int("10000000000000"));
    return alpha;
}

inline CoulombState make_state(long Z, long n, long kappa,
                               const Rat& alpha_fs = default_alpha_fs()) {
    if (Z < 1) throw UnphysicalState("nuclear charge must be a positive integer");
    if (n < 0) throw UnphysicalState("radial quantum number must be nonnegative");
    if (kappa == 0) throw UnphysicalState("kappa must be a nonzero integer");
    if (n == 0 && kappa > 0)
        throw UnphysicalState("the n = 0 level exists only for kappa < 0");
    CoulombState st;
    st.Z = Z;
    st.n = n;
    st.kappa = kappa;
    st.alpha_fs = alpha_fs;
    st.mu = alpha_fs * Rat(Z);
    const long abskappa = kappa < 0 ? -kappa : kappa;
    if (st.mu >= Rat(abskappa))
        throw UnphysicalState("mu = alpha Z = " + rat_str(st.mu) +
                              " reaches |kappa|; nu would be imaginary");
    st.j = Rat(2 * abskappa - 1, 2);
    const BigFloat muf = static_cast<BigFloat>(st.mu);
    const BigFloat kf = kappa;
    st.nu = sqrt(kf * kf - muf * muf);
    const BigFloat s = st.nu + n;
    const BigFloat hyp = sqrt(muf * muf + s * s);
    st.eps = s / hyp;   // from eps*mu = a*(nu+n) with eps^2 + a^2 = 1
    st.a = muf / hyp;
    st.beta = 1;
    st.gamma = muf * (kf - st.nu) * (st.eps * kf - st.nu);
    return st;
}

// ---------------------------------------------------------------------------
// the series basis

// The k-th term of a terminating 3F2 at unit argument:
//   Poch(u0,k) Poch(u1,k) Poch(u2,k) / (Poch(l0,k) Poch(l1,k) k!).
struct SeriesSlot {
    std::string name;
    std::array<Poly, 3> upper;
    std::array<Poly, 2> lower;
    HyperTerm term;
};

inline HyperTerm f32_summand(const std::array<Poly, 3>& upper, const std::array<Poly, 2>& lower) {
    HyperTerm t(syms().k);
    for (const Poly& u : upper) t.mul_poch(u, 1);
    for (const Poly& l : lower) t.mul_poch(l, -1);
    t.mul_fact(0, -1);
    return t;
}

inline SeriesSlot make_slot(std::string name, std::array<Poly, 3> upper,
                            std::array<Poly, 2> lower) {
    HyperTerm t = f32_summand(upper, lower);
    return SeriesSlot{std::move(name), std::move(upper), std::move(lower), std::move(t)};
}

enum SlotIndex : std::size_t { slot_zp = 0, slot_x, slot_y, slot_u, slot_v, slot_w };

// Z', X, Y carry the closed forms of the moments at power p; U, V, W are the
// X, Y, Z' series with p stepped by one.  The first five span the dependency
// space; W closes the linear algebra when moments at two consecutive powers
// appear in one relation.
inline const std::array<SeriesSlot, 6>& slots() {
    static const std::array<SeriesSlot, 6> table = [] {
        const Symbols& S = syms();
        const Poly one(1), two(2);
        const Poly n = detail::pv(S.n), p = detail::pv(S.p);
        const Poly b1 = detail::pv(S.nu) * 2 + 1;
        return std::array<SeriesSlot, 6>{
            make_slot("Z'", {one - n, -p, p + one}, {b1, two}),
            make_slot("X", {one - n, -p, p + one}, {b1, one}),
            make_slot("Y", {-n, -p, p + one}, {b1, one}),
            make_slot("U", {one - n, -p - one, p + two}, {b1, one}),
            make_slot("V", {-n, -p - one, p + two}, {b1, one}),
            make_slot("W", {one - n, -p - one, p + two}, {b1, two}),
        };
    }();
    return table;
}

// ---------------------------------------------------------------------------
// closed forms of the moments

enum class ExprMode { symbolic, numeric };

// Encodes   scale * mu * (2 a beta)^p * Gamma(2nu+1)/Gamma(2nu+p+1) * I_p
//               = coeff[0] Z' + coeff[1] X + coeff[2] Y
// for I = A, B (scale 2) or C (scale 4).
struct IntegralExpr {
    char which = 'A';
    ExprMode mode = ExprMode::symbolic;
    int scale = 2;
    std::array<Poly, 3> coeff;

    std::string str() const {
        static const char* names[3] = {"Z'", "X", "Y"};
        std::ostringstream o;
        o << scale << " mu (2 a beta)^p Gamma(2 nu + 1)/Gamma(2 nu + p + 1) * " << which
          << "[p] = ";
        bool first = true;
        for (int i = 0; i < 3; ++i) {
            if (coeff[i].is_zero()) continue;
            if (!first) o << " + ";
            o << "(" << coeff[i].str() << ") " << names[i];
            first = false;
        }
        return o.str();
    }
};

inline IntegralExpr build_integral(char which, ExprMode mode = ExprMode::symbolic) {
    const Symbols& S = syms();
    const Poly p = detail::pv(S.p), n = detail::pv(S.n), e = detail::pv(S.eps);
    const Poly a = detail::pv(S.a), ka = detail::pv(S.kappa), m = detail::pv(S.mu);
    const Poly plus = m + a * ka, minus = m - a * ka;
    IntegralExpr out;
    out.which = which;
    out.mode = mode;
    switch (which) {
        case 'A':
            out.scale = 2;
            out.coeff = {p * e * a * n * 2, plus, minus};
            break;
        case 'B':
            out.scale = 2;
            out.coeff = {p * a * n * 2, e * plus, e * minus};
            break;
        case 'C':
            out.scale = 4;
            out.coeff = {Poly(), a * plus, -(a * minus)};
            break;
        default:
            throw DomainViolation(std::string("unknown moment family: ") + which);
    }
    return out;
}

// One hypergeometric term whose sum over k >= 0 is exactly I_p(which).  The
// Z'/X and Y/X term ratios are rational in k, so the whole closed form folds
// onto the X summand with a rational cofactor; the inverted prefactor rides
// along as Gamma atoms and a parameter power.
inline HyperTerm integral_summand(char which) {
    const Symbols& S = syms();
    const IntegralExpr ex = build_integral(which);
    const auto& sl = slots();
    HyperTerm t = sl[slot_x].term;
    const Poly twonu = detail::pv(S.nu) * 2;
    t.mul_gamma(twonu + detail::pv(S.p) + 1, 1);
    t.mul_gamma(twonu + 1, -1);
    t.mul_param_pow(RatFun(1) / RatFun(detail::pv(S.a) * detail::pv(S.beta) * 2), S.p);
    RatFun fold(ex.coeff[1]);
    if (!ex.coeff[0].is_zero())
        fold = fold + RatFun(ex.coeff[0]) * cross_ratio(sl[slot_zp].term, sl[slot_x].term);
    if (!ex.coeff[2].is_zero())
        fold = fold + RatFun(ex.coeff[2]) * cross_ratio(sl[slot_y].term, sl[slot_x].term);
    fold = fold / RatFun(detail::pv(S.mu) * ex.scale);
    t.mul_rational(fold);
    return t;
}

// ---------------------------------------------------------------------------
// unmixed three-term recurrences

namespace detail {

// Closed-form coefficient triples (tau0, tau1, tau2) with
// tau0 I_p + tau1 I_{p+1} + tau2 I_{p+2} = 0, unique up to scale.
inline std::array<Poly, 3> published_unmixed(char which) {
    const Symbols& S = syms();
    const Poly p = pv(S.p), e = pv(S.eps), ka = pv(S.kappa), m = pv(S.mu);
    const Poly a = pv(S.a), b = pv(S.beta), nu = pv(S.nu);
    const Poly nu2 = nu * nu, mu2 = m * m, a2b2 = a * a * b * b;
    const Poly p1 = p + 1, p2 = p + 2, p3 = p + 3;
    switch (which) {
        case 'A': {
            auto M = [&](long off) {
                const Poly q = p + Poly(off);
                return mu2 * 4 * (q + 1) + q * (e * ka * 2 + q) * (e * ka * 2 + q + 1);
            };
            Poly P = e * p * p2 * (e * ka * 2 + p) * (e * ka * 2 + p + 1) * 2 +
                     e * ((e * e * ka * ka - nu2) * 4 - p * (e * e * ka * ka * 4 + p * p1)) +
                     (p * 2 + 1) * (e * e * ka * 4 + p2 * (e * mu2 * 2 - ka) * 2);
            return {(nu2 * 4 - p1 * p1) * M(2) * p1, b * m * (-4) * P.shift(S.p, Rat(1)),
                    a2b2 * 4 * M(1) * p3};
        }
        case 'B': {
            auto M = [&](long off) {
                const Poly q = p + Poly(off);
                return nu2 * 4 + e * ka * 2 * (q * 2 + 1) + e * e * q * (q + 1);
            };
            Poly Q = (p * 2 + 3) * (nu2 * 4 + e * ka * 2 * (p * 2 + 1) + p * p1) -
                     a * a * (p * 2 + 1) * p1 * p2;
            return {(nu2 * 4 - p1 * p1) * M(2) * p2, b * e * m * (-4) * Q.shift(S.p, Rat(1)),
                    a2b2 * 4 * M(1) * p3};
        }
        case 'C': {
            const Poly ka2 = ka * ka;
            return {p1 * (p1 * p1 - nu2 * 4) * (p2 * p2 - ka2 * 4),
                    b * m * 4 * (p * 2 + 3) * (ka * 2 + e * (p1 * p2 - ka2 * 4)),
                    a2b2 * (-4) * (p1 * p1 - ka2 * 4) * p2};
        }
        default:
            throw DomainViolation(std::string("unknown moment family: ") + which);
    }
}

// The C recurrence exactly as the telescoping run produces it, before any
// parameter reduction: a free-polynomial triple over (C_p, C_{p+1}, C_{p+2}).
inline std::array<Poly, 3> raw_unmixed_c() {
    const Symbols& S = syms();
    const Poly p = pv(S.p), n = pv(S.n), e = pv(S.eps), ka = pv(S.kappa);
    const Poly m = pv(S.mu), a = pv(S.a), b = pv(S.beta), nu = pv(S.nu);
    const Poly mu2 = m * m, akk = a * a * ka * ka;
    const Poly p1 = p + 1, p2 = p + 2;
    const Poly O0 = p1 * (p * p + p * 2 + 1 - nu * nu * 4) *
                    (mu2 * (-(p2 * p2)) + akk * (n * n * 4 + p2 * p2 + n * nu * 8));
    const Poly O2 = a * a * b * b * 4 * p2 *
                    (mu2 * (-(p1 * p1)) + akk * (n * n * 4 + p1 * p1 + n * nu * 8));
    const Poly O1 = a * b * (-4) * (p * 2 + 3) *
                    (mu2 * (-(p * p + p * 3 + 2)) * (n + nu) - a * n * ka * m * 2 * (n + nu * 2) +
                     akk * (n + nu) * (n * n * 4 + p * p + p * 3 + 2 + n * nu * 8));
    return {-O0, O1, O2};
}

} // namespace detail

struct UnmixedRecurrence {
    char which = 'A';
    Recurrence rec;                    // order 2 in p, derived from the folded summand
    TelescopeCertificate cert;
    std::array<Poly, 3> published;     // closed-form triple, same recurrence up to scale
    bool matches_published = false;    // proportional after parameter reduction
    std::optional<bool> matches_raw;   // C only: proportional as free polynomials
    double seconds = 0.0;
};

inline UnmixedRecurrence derive_unmixed(char which, std::uint64_t seed = 0) {
    const auto start = std::chrono::steady_clock::now();
    const Symbols& S = syms();
    const HyperTerm t = integral_summand(which);
    auto rec = zeilberger(t, S.p, 2, seed);
    if (!rec)
        throw NoRecurrenceFound(std::string("no recurrence of order <= 2 for ") + which +
                                "[p]");
    UnmixedRecurrence out;
    out.which = which;
    out.rec = *rec;
    out.cert = certificate_for(t, *rec);
    out.published = detail::published_unmixed(which);
    if (out.rec.order == 2) {
        bool ok = true;
        for (int i = 0; i < 3 && ok; ++i)
            for (int j = i + 1; j < 3 && ok; ++j)
                ok = physics_reduce(out.rec.sigma[i] * out.published[j] -
                                    out.rec.sigma[j] * out.published[i])
                         .is_zero();
        out.matches_published = ok;
        if (which == 'C') {
            const auto raw = detail::raw_unmixed_c();
            bool rok = true;
            for (int i = 0; i < 3 && rok; ++i)
                for (int j = i + 1; j < 3 && rok; ++j)
                    rok = (out.rec.sigma[i] * raw[j] - out.rec.sigma[j] * raw[i]).is_zero();
            out.matches_raw = rok;
        }
    }
    out.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

// ---------------------------------------------------------------------------
// dependencies among the series

namespace detail {

// The three closed-form dependencies over (Z', X, Y, U, V).
inline std::vector<std::vector<Poly>> printed_dependencies() {
    const Symbols& S = syms();
    const Poly p = pv(S.p), n = pv(S.n), nu = pv(S.nu);
    const Poly one(1);
    std::vector<std::vector<Poly>> rows;
    // n (X + U) - (1+n+p) Y + (1-n+p) V = 0
    rows.push_back({Poly(), n, -(one + n + p), n, one - n + p});
    // 2np Z' + (1+2n+p+2nu) Y - (1+p+2nu) V = 0
    rows.push_back({n * p * 2, Poly(), one + n * 2 + p + nu * 2, Poly(), -(one + p + nu * 2)});
    // 2n(n+2nu) X - (1+2n+2n^2+2p+2np+p^2+2nu+4n nu+2p nu) Y + (1+p)(1+p+2nu) V = 0
    rows.push_back({Poly(), n * (n + nu * 2) * 2,
                    -(one + n * 2 + n * n * 2 + p * 2 + n * p * 2 + p * p + nu * 2 +
                      n * nu * 4 + p * nu * 2),
                    Poly(), (p + 1) * (p + nu * 2 + 1)});
    return rows;
}

// Solve sum_b c_b basis_b = target over the k-free coefficient field.
inline std::optional<std::vector<RatFun>> expand_in_basis(const DependencySpace& space,
                                                          const std::vector<Poly>& target) {
    if (space.basis.empty()) return std::nullopt;
    const std::size_t m = target.size();
    std::vector<std::vector<RatFun>> A(m, std::vector<RatFun>(space.basis.size()));
    std::vector<RatFun> rhs(m);
    for (std::size_t s = 0; s < m; ++s) {
        for (std::size_t b = 0; b < space.basis.size(); ++b) {
            if (space.basis[b].coeffs.size() != m) return std::nullopt;
            A[s][b] = RatFun(space.basis[b].coeffs[s]);
        }
        rhs[s] = RatFun(target[s]);
    }
    auto sol = solve_linear(A, rhs);
    if (!sol.consistent) return std::nullopt;
    return sol.particular;
}

inline RatFun combine_certificates(const DependencySpace& space,
                                   const std::vector<RatFun>& combo) {
    RatFun R;
    for (std::size_t b = 0; b < combo.size(); ++b)
        R = R + combo[b] * space.basis[b].R;
    return R;
}

} // namespace detail

struct DependencyReport {
    std::vector<std::string> slot_names;             // Z', X, Y, U, V
    DependencySpace space;                           // derived basis
    std::vector<std::string> printed_names;          // lin1, lin2, lin3
    std::vector<std::vector<Poly>> printed;          // their coefficient vectors
    std::vector<bool> printed_in_span;
    std::vector<std::vector<RatFun>> printed_combo;  // expansion over the derived basis
    std::vector<TelescopeCertificate> certs;         // one per closed-form relation
    std::vector<BoundaryReport> boundaries;
};

inline DependencyReport derive_dependencies(std::uint64_t seed = 0) {
    const auto& sl = slots();
    std::vector<HyperTerm> ts;
    DependencyReport rep;
    for (std::size_t i = 0; i < 5; ++i) {
        ts.push_back(sl[i].term);
        rep.slot_names.push_back(sl[i].name);
    }
    rep.space = pgosper(ts, seed);
    rep.printed = detail::printed_dependencies();
    rep.printed_names = {"lin1", "lin2", "lin3"};
    for (const auto& row : rep.printed) {
        auto combo = detail::expand_in_basis(rep.space, row);
        rep.printed_in_span.push_back(combo.has_value());
        if (combo) {
            const RatFun R = detail::combine_certificates(rep.space, *combo);
            rep.printed_combo.push_back(*combo);
            rep.certs.push_back(certificate_for(ts, Dependency{row, R}, rep.space.side_conditions));
            rep.boundaries.push_back(boundary_report(ts[0], R));
        } else {
            rep.printed_combo.emplace_back();
            rep.certs.emplace_back();
            rep.boundaries.emplace_back();
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// contiguous relations

struct ContiguousRelation {
    std::string name;
    std::vector<std::string> term_names;
    std::vector<HyperTerm> terms;
    DependencySpace space;       // derived on the triple; expected dimension 1
    std::vector<Poly> printed;   // closed-form coefficients
    bool matches_printed = false;
    TelescopeCertificate cert;
    BoundaryReport boundary;
};

inline std::vector<ContiguousRelation> derive_contiguous(std::uint64_t seed = 0) {
    const Symbols& S = syms();
    const Poly one(1), two(2);
    const Poly n = detail::pv(S.n), p = detail::pv(S.p), nu = detail::pv(S.nu);
    const Poly lower_up = nu * 2 + 2, lower_dn = nu * 2;
    const auto& sl = slots();

    // lower-parameter neighbours of the basis series
    const SeriesSlot f1 = make_slot("F1", {one - n, -p - one, p + two}, {lower_up, one});
    const SeriesSlot f2 = make_slot("F2", {-n, -p - one, p + two}, {lower_dn, one});
    const SeriesSlot g1 = make_slot("G1", {one - n, -p, p + one}, {lower_up, one});
    const SeriesSlot g2 = make_slot("G2", {-n, -p, p + one}, {lower_dn, one});

    std::vector<ContiguousRelation> out;
    auto run = [&](std::string name, std::vector<std::string> tn, std::vector<HyperTerm> ts,
                   std::vector<Poly> printed) {
        ContiguousRelation r;
        r.name = std::move(name);
        r.term_names = std::move(tn);
        r.terms = ts;
        r.space = pgosper(ts, seed);
        r.printed = std::move(printed);
        auto combo = detail::expand_in_basis(r.space, r.printed);
        if (r.space.dimension == 1 && combo) {
            const auto& d = r.space.basis[0].coeffs;
            bool ok = d.size() == r.printed.size();
            for (std::size_t i = 0; ok && i < d.size(); ++i)
                for (std::size_t j = i + 1; ok && j < d.size(); ++j)
                    ok = (d[i] * r.printed[j] - d[j] * r.printed[i]).is_zero();
            r.matches_printed = ok;
        } else {
            r.matches_printed = combo.has_value();
        }
        if (combo) {
            const RatFun R = detail::combine_certificates(r.space, *combo);
            r.cert = certificate_for(ts, Dependency{r.printed, R}, r.space.side_conditions);
            r.boundary = boundary_report(ts[0], R);
        }
        out.push_back(std::move(r));
    };

    const Poly nn2 = n + nu * 2;
    const Poly q1 = nu * 2 + p + 1, q2 = nu * 2 + p + 2;
    const Poly head = nu * 4 * (nu * 2 + 1) * (nu + n) * (p + 1);

    run("L1", {"X", "F1", "F2"}, {sl[slot_x].term, f1.term, f2.term},
        {head, -(nn2 * q1 * q2 * (n * 2 + p + 1)),
         n * nu * 2 * (nu * 2 + 1) * (n * 2 + p + 1 + nu * 4)});
    run("L2", {"Y", "F1", "F2"}, {sl[slot_y].term, f1.term, f2.term},
        {head, -(n * (n * 2 - p - 1 + nu * 4) * q1 * q2),
         nu * 2 * (nu * 2 + 1) * nn2 * (n * 2 - p - 1)});
    run("L3", {"Z'", "G1", "G2"}, {sl[slot_zp].term, g1.term, g2.term},
        {p * (p + 1) * (nu * 2 + 1) * (nu + n) * 2, -(nn2 * (p - nu * 2) * q1),
         nu * (-2) * (nu * 2 + 1) * nn2});
    run("chebyshev", {"Z'", "Y", "X"}, {sl[slot_zp].term, sl[slot_y].term, sl[slot_x].term},
        {p * (p + 1), -nn2, nn2});
    return out;
}

// The relation that removes W: the chebyshev relation advanced one step in p,
// re-derived on (W, U, V).
struct WLink {
    DependencySpace space;
    std::vector<Poly> printed;  // (p+1)(p+2) W + (n+2nu) U - (n+2nu) V = 0
    bool matches_printed = false;
    std::vector<RatFun> combo;
};

inline WLink derive_wlink(std::uint64_t seed = 0) {
    const Symbols& S = syms();
    const Poly n = detail::pv(S.n), p = detail::pv(S.p), nu = detail::pv(S.nu);
    const auto& sl = slots();
    WLink wl;
    wl.space = pgosper({sl[slot_w].term, sl[slot_u].term, sl[slot_v].term}, seed);
    wl.printed = {(p + 1) * (p + 2), n + nu * 2, -(n + nu * 2)};
    auto combo = detail::expand_in_basis(wl.space, wl.printed);
    wl.matches_printed = combo.has_value();
    if (combo) wl.combo = *combo;
    return wl;
}

// ---------------------------------------------------------------------------
// the first-order relation catalog

struct RelationSpec {
    std::string name;
    std::string display;
    // coefficients over (A_p, B_p, C_p, A_{p+1}, B_{p+1}, C_{p+1}); the
    // relation asserts that the combination vanishes
    std::array<Poly, 6> lambda;
};

inline const std::vector<RelationSpec>& relation_catalog() {
    static const std::vector<RelationSpec> catalog = [] {
        const Symbols& S = syms();
        const Poly p = detail::pv(S.p), e = detail::pv(S.eps), ka = detail::pv(S.kappa);
        const Poly m = detail::pv(S.mu), b = detail::pv(S.beta), nu = detail::pv(S.nu);
        const Poly z;
        const Poly p1 = p + 1, p2 = p + 2;
        const Poly nu2 = nu * nu, mu2 = m * m;

        // shared building blocks of the one-step (p <-> p+1) pair relations
        const Poly NA1 = mu2 * 4 * p2 + p1 * (e * ka * 2 + p + 1) * (e * ka * 2 + p + 2);
        const Poly NA0 = nu2 * 4 * e + ka * 2 * p2 + e * p1 * (e * ka * 2 + p + 2);
        const Poly NB0 = nu2 * 4 + e * ka * 2 * (p * 2 + 3) + e * e * p1 * p2;
        const Poly NB1 = mu2 * 4 * e * p2 + p1 * (e * ka * 2 + p + 1) * (ka * 2 + e * p2);
        const Poly Dup = (Poly(1) - e * e) * p2 * b * m * 4;
        const Poly Ddown = m * (nu2 * 4 - p1 * p1);

        const Poly C = detail::pv(var("C")), D = detail::pv(var("D"));

        std::vector<RelationSpec> cat;
        cat.push_back({"indint1",
                       "(2 kappa + eps (p+1)) A[p] - (2 eps kappa + p + 1) B[p] = 4 mu C[p]",
                       {ka * 2 + e * p1, -(e * ka * 2 + p + 1), m * (-4), z, z, z}});
        cat.push_back({"rr1",
                       "2 kappa A[p] - (p+1) B[p] = 4 mu C[p] + 4 beta eps C[p+1]",
                       {ka * 2, -p1, m * (-4), z, z, b * e * (-4)}});
        cat.push_back({"rr2", "2 kappa B[p] - (p+1) A[p] = 4 beta C[p+1]",
                       {-p1, ka * 2, z, z, z, b * (-4)}});
        cat.push_back({"rr3", "mu B[p] - (p+1) C[p] = beta (A[p+1] - eps B[p+1])",
                       {z, m, -p1, -b, b * e, z}});
        cat.push_back({"rra",
                       "4 (1 - eps^2) (p+2) beta mu A[p+1] = -(p+1) (4 nu^2 eps + 2 kappa (p+2)"
                       " + eps (p+1) (2 eps kappa + p+2)) A[p] + (4 mu^2 (p+2)"
                       " + (p+1) (2 eps kappa + p+1) (2 eps kappa + p+2)) B[p]",
                       {p1 * NA0, -NA1, z, Dup, z, z}});
        cat.push_back({"rrb",
                       "4 (1 - eps^2) (p+2) beta mu B[p+1] = -(p+1) (4 nu^2 + 2 eps kappa (2p+3)"
                       " + eps^2 (p+1)(p+2)) A[p] + (4 mu^2 eps (p+2)"
                       " + (p+1) (2 eps kappa + p+1) (2 kappa + eps (p+2))) B[p]",
                       {p1 * NB0, -NB1, z, z, Dup, z}});
        cat.push_back({"rrab",
                       "mu (4 nu^2 - (p+1)^2) (p+1) A[p] = beta (4 mu^2 eps (p+2)"
                       " + (p+1) (2 eps kappa + p+1) (2 kappa + eps (p+2))) A[p+1]"
                       " - beta (4 mu^2 (p+2) + (p+1) (2 eps kappa + p+1)"
                       " (2 eps kappa + p+2)) B[p+1]   [downward step, written at p+1]",
                       {Ddown * p1, z, z, b * (-1) * NB1, b * NA1, z}});
        cat.push_back({"rrba",
                       "mu (4 nu^2 - (p+1)^2) B[p] = beta (4 nu^2 + 2 eps kappa (2p+3)"
                       " + eps^2 (p+1)(p+2)) A[p+1] - beta (4 nu^2 eps + 2 kappa (p+2)"
                       " + eps (p+1) (2 eps kappa + p+2)) B[p+1]   [downward step, written at p+1]",
                       {z, Ddown, z, b * (-1) * NB0, b * NA0, z}});
        cat.push_back({"two_param",
                       "(D (p+1) - C (2 kappa + eps (p+1))) A[p]"
                       " - (2 D kappa - C (2 eps kappa + p + 1)) B[p]"
                       " + 4 C mu C[p] + 4 D beta C[p+1] = 0   [C, D free constants]",
                       {D * p1 - C * (ka * 2 + e * p1), -(D * ka * 2 - C * (e * ka * 2 + p + 1)),
                        C * m * 4, z, z, D * b * 4}});
        cat.push_back({"extra",
                       "(p+1) (2 kappa C[p] - mu A[p]) = beta (p+2) (eps A[p+1] - B[p+1])",
                       {m * (-1) * p1, z, ka * 2 * p1, b * (-1) * e * p2, b * p2, z}});
        std::sort(cat.begin(), cat.end(),
                  [](const RelationSpec& x, const RelationSpec& y) { return x.name < y.name; });
        return cat;
    }();
    return catalog;
}

inline const RelationSpec& relation_spec(const std::string& name) {
    for (const RelationSpec& r : relation_catalog())
        if (r.name == name) return r;
    throw DomainViolation("unknown relation: " + name);
}

inline std::vector<std::string> relation_names() {
    std::vector<std::string> names;
    for (const RelationSpec& r : relation_catalog()) names.push_back(r.name);
    return names;
}

// lambda(rr1) = lambda(indint1) + eps * lambda(rr2), exactly
inline bool rr1_decomposition_holds() {
    const auto& r1 = relation_spec("rr1").lambda;
    const auto& i1 = relation_spec("indint1").lambda;
    const auto& r2 = relation_spec("rr2").lambda;
    const Poly e = detail::pv(syms().eps);
    for (int i = 0; i < 6; ++i)
        if (!(r1[i] == i1[i] + e * r2[i])) return false;
    return true;
}

// Contribution of I(which) at p (level 0) or p+1 (level 1) to the series
// combination, after the whole relation is multiplied by
// 2 mu (2 a beta)^p Gamma(2nu+1)/Gamma(2nu+p+1).  Stepping the prefactor down
// from p+1 uses Gamma(2nu+p+2) = (2nu+p+1) Gamma(2nu+p+1).
inline std::array<RatFun, 6> integral_slot_coefficients(char which, int level) {
    const Symbols& S = syms();
    const IntegralExpr ex = build_integral(which);
    RatFun ratio;
    if (level == 0) {
        ratio = RatFun(Rat(2, ex.scale));
    } else {
        ratio = RatFun(detail::pv(S.nu) * 2 + detail::pv(S.p) + 1) * RatFun(Rat(2, ex.scale)) /
                RatFun(detail::pv(S.a) * detail::pv(S.beta) * 2);
    }
    std::array<RatFun, 6> out{};
    for (int i = 0; i < 3; ++i) {
        Poly c = ex.coeff[i];
        if (c.is_zero()) continue;
        if (level == 1) c = c.shift(S.p, Rat(1));
        std::size_t idx;
        if (level == 0)
            idx = (i == 0) ? slot_zp : (i == 1 ? slot_x : slot_y);
        else
            idx = (i == 0) ? slot_w : (i == 1 ? slot_u : slot_v);
        out[idx] = ratio * RatFun(c);
    }
    return out;
}

struct ProofReport {
    std::string name;
    bool pass = false;
    std::string reduced;  // "{0, 0}" on success
    std::string transcript;
    std::vector<std::string> side_conditions;
    double seconds = 0.0;
};

// ---------------------------------------------------------------------------
// workbench

// Caches the derivations every proof shares: the dependency space, the W link,
// and the elimination of (Z', X, U, W) in terms of (Y, V).
class Workbench {
public:
    explicit Workbench(std::uint64_t seed = 0) : seed_(seed) {}

    const DependencyReport& dependencies() {
        if (!deps_) deps_ = derive_dependencies(seed_);
        return *deps_;
    }

    const WLink& wlink() {
        if (!wlink_) wlink_ = derive_wlink(seed_);
        return *wlink_;
    }

    const std::vector<ContiguousRelation>& contiguous() {
        if (!contig_) contig_ = derive_contiguous(seed_);
        return *contig_;
    }

    const UnmixedRecurrence& unmixed(char which) {
        auto it = unmixed_.find(which);
        if (it == unmixed_.end()) it = unmixed_.emplace(which, derive_unmixed(which, seed_)).first;
        return it->second;
    }

    // expressions for (Z', X, U, W) in terms of (Y, V)
    const std::array<std::array<RatFun, 2>, 4>& elimination() {
        ensure_elimination();
        return elim_;
    }

    std::array<RatFun, 6> series_combination(const RelationSpec& spec) const {
        static const std::array<std::pair<char, int>, 6> levels = {
            {{'A', 0}, {'B', 0}, {'C', 0}, {'A', 1}, {'B', 1}, {'C', 1}}};
        std::array<RatFun, 6> combo{};
        for (std::size_t i = 0; i < 6; ++i) {
            if (spec.lambda[i].is_zero()) continue;
            const auto sc = integral_slot_coefficients(levels[i].first, levels[i].second);
            for (std::size_t s = 0; s < 6; ++s)
                if (!sc[s].is_zero()) combo[s] = combo[s] + RatFun(spec.lambda[i]) * sc[s];
        }
        return combo;
    }

    ProofReport verify_relation(const std::string& name) {
        const auto start = std::chrono::steady_clock::now();
        const RelationSpec& spec = relation_spec(name);
        ensure_elimination();
        const auto combo = series_combination(spec);
        static const std::array<std::size_t, 4> elim_cols = {slot_zp, slot_x, slot_u, slot_w};
        // Accumulate the eliminated coefficients as raw numerator/denominator
        // pairs.  Normalizing intermediates would trigger multivariate gcds on
        // the largest polynomials of the whole proof; the only questions asked
        // of the result are "is it zero on the variety" and a display string,
        // neither of which needs a reduced fraction.
        Poly ny = combo[slot_y].num(), dy = combo[slot_y].den();
        Poly nv = combo[slot_v].num(), dv = combo[slot_v].den();
        for (std::size_t r = 0; r < 4; ++r) {
            const RatFun& c = combo[elim_cols[r]];
            if (c.is_zero()) continue;
            {
                const Poly pn = c.num() * elim_[r][0].num();
                const Poly pd = c.den() * elim_[r][0].den();
                ny = ny * pd + pn * dy;
                dy = dy * pd;
            }
            {
                const Poly pn = c.num() * elim_[r][1].num();
                const Poly pd = c.den() * elim_[r][1].den();
                nv = nv * pd + pn * dv;
                dv = dv * pd;
            }
        }
        const Poly red_ny = physics_reduce(ny), red_dy = physics_reduce(dy);
        const Poly red_nv = physics_reduce(nv), red_dv = physics_reduce(dv);
        if (red_dy.is_zero() || red_dv.is_zero())
            throw DomainViolation("proof denominator vanishes on the physical variety");
        const bool zy = red_ny.is_zero(), zv = red_nv.is_zero();

        ProofReport rep;
        rep.name = name;
        rep.pass = zy && zv;
        rep.side_conditions = dependencies().space.side_conditions;
        for (const auto& sc : wlink().space.side_conditions) rep.side_conditions.push_back(sc);
        const std::string red_y = zy ? "0" : RatFun(red_ny, red_dy).str();
        const std::string red_v = zv ? "0" : RatFun(red_nv, red_dv).str();
        rep.reduced = "{" + red_y + ", " + red_v + "}";

        std::ostringstream tr;
        tr << "relation " << name << ":\n  " << spec.display << "\n";
        tr << "multiply by 2 mu (2 a beta)^p Gamma(2 nu + 1)/Gamma(2 nu + p + 1), expand over"
              " the series basis:\n";
        const auto& sl = slots();
        for (std::size_t s = 0; s < 6; ++s)
            if (!combo[s].is_zero()) tr << "  " << sl[s].name << ": " << combo[s].str() << "\n";
        tr << "eliminate Z', X, U, W with the three dependencies and the stepped chebyshev"
              " link:\n";
        tr << "  coefficient of Y: " << abbreviate(ny, dy) << "\n";
        tr << "  coefficient of V: " << abbreviate(nv, dv) << "\n";
        tr << "reduce by n -> (eps mu - a nu)/a, eps^2 -> 1 - a^2, kappa^2 -> nu^2 + mu^2:\n";
        tr << "  " << rep.reduced << "\n";
        tr << (rep.pass ? "PASS" : "FAIL") << "\n";
        rep.transcript = tr.str();
        rep.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return rep;
    }

    std::vector<ProofReport> verify_all() {
        std::vector<ProofReport> out;
        for (const auto& name : relation_names()) out.push_back(verify_relation(name));
        return out;
    }

private:
    // Display form of an unnormalized fraction.  Small ones are reduced for a
    // readable transcript; large ones are summarized by term counts instead of
    // paying for a gcd nobody will read.
    static std::string abbreviate(const Poly& num, const Poly& den) {
        if (num.terms().size() <= 40 && den.terms().size() <= 40) {
            std::string s = RatFun(num, den).str();
            if (s.size() <= 300) return s;
        }
        std::ostringstream o;
        o << "<" << num.terms().size() << "-term numerator over " << den.terms().size()
          << "-term denominator>";
        return o.str();
    }

    void ensure_elimination() {
        if (elim_ready_) return;
        const DependencyReport& dep = dependencies();
        for (bool ok : dep.printed_in_span)
            if (!ok)
                throw ProofFailed("a closed-form dependency is missing from the derived span");
        const WLink& wl = wlink();
        if (!wl.matches_printed)
            throw ProofFailed("the stepped chebyshev link was not recovered");

        // rows over (Z', X, Y, U, V, W)
        std::vector<std::array<Poly, 6>> rows;
        for (const auto& r : dep.printed)
            rows.push_back({r[0], r[1], r[2], r[3], r[4], Poly()});
        rows.push_back({Poly(), Poly(), Poly(), wl.printed[1], wl.printed[2], wl.printed[0]});

        static const std::array<std::size_t, 4> elim_cols = {slot_zp, slot_x, slot_u, slot_w};
        std::vector<std::vector<RatFun>> A(4, std::vector<RatFun>(4));
        std::vector<RatFun> rhs_y(4), rhs_v(4);
        for (std::size_t r = 0; r < 4; ++r) {
            for (std::size_t c = 0; c < 4; ++c) A[r][c] = RatFun(rows[r][elim_cols[c]]);
            rhs_y[r] = RatFun() - RatFun(rows[r][slot_y]);
            rhs_v[r] = RatFun() - RatFun(rows[r][slot_v]);
        }
        const auto sy = solve_linear(A, rhs_y);
        const auto sv = solve_linear(A, rhs_v);
        if (!sy.consistent || !sv.consistent || !sy.nullspace.empty())
            throw ProofFailed("dependency rows do not determine (Z', X, U, W)");
        for (std::size_t r = 0; r < 4; ++r) {
            elim_[r][0] = sy.particular[r];
            elim_[r][1] = sv.particular[r];
        }
        elim_ready_ = true;
    }

    std::uint64_t seed_;
    std::optional<DependencyReport> deps_;
    std::optional<WLink> wlink_;
    std::optional<std::vector<ContiguousRelation>> contig_;
    std::map<char, UnmixedRecurrence> unmixed_;
    bool elim_ready_ = false;
    std::array<std::array<RatFun, 2>, 4> elim_{};
};

inline ProofReport verify_relation(const std::string& name, std::uint64_t seed = 0) {
    Workbench wb(seed);
    return wb.verify_relation(name);
}

} // namespace hypersum::coulomb
