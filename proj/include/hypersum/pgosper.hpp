#pragma once

// Parameterized indefinite summation.  Given terms t_0..t_m, all similar
// (pairwise ratios rational in k), find every k-free coefficient vector
// (c_0..c_m), entries polynomial in the parameters, such that
//
//   c_0 t_0(k) + ... + c_m t_m(k) = G(k+1) - G(k),   G = R * t_0,
//
// for some rational certificate R.  Summing k over the full support of the
// terms turns each such vector into a linear dependency among the sums.

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "hypersum/gosper.hpp"

namespace hypersum {

struct Dependency {
    std::vector<Poly> coeffs; // coprime integer polynomials, free of k
    RatFun R;                 // sum_i coeffs[i] t_i = (R t_0)(k+1) - (R t_0)(k)
};

struct DependencySpace {
    std::size_t dimension = 0;
    std::vector<Dependency> basis;
    GPForm gp;
    std::vector<std::string> side_conditions;
};

inline DependencySpace pgosper(const std::vector<HyperTerm>& ts, std::uint64_t seed = 0) {
    if (ts.empty()) throw DomainViolation("no terms given");
    VarId k = ts[0].sumvar();
    for (const HyperTerm& t : ts)
        if (t.sumvar() != k) throw DomainViolation("terms use different summation variables");
    std::mt19937_64 rng(seed ^ 0xc2b2ae3d27d4eb4full);

    std::vector<RatFun> s{RatFun(1)};
    for (std::size_t i = 1; i < ts.size(); ++i) s.push_back(cross_ratio(ts[i], ts[0]));

    Poly q = detail::common_den(s);
    std::vector<Poly> u;
    u.reserve(s.size());
    for (const RatFun& si : s) u.push_back(detail::ratfun_to_poly(si * RatFun(q)));

    RatFun rho = ts[0].ratio();
    // R = y/q turns the dependency equation into a Gosper-type key equation
    // for y against the ratio rho q/q(k+1), solved jointly with the c_i
    RatFun rho_tilde = rho * RatFun(q, q.shift(k, Rat(1)));
    detail::TelescopeBasis tb = detail::telescope_nullspace(rho_tilde, u, k, rng);

    DependencySpace out;
    out.gp = tb.gp;
    out.side_conditions = tb.side_conditions;

    // Reduce the coefficient block to reduced row echelon form so the basis
    // is deterministic; carry the telescoping parts x along with each row.
    struct Row {
        std::vector<RatFun> s;
        RatFun x;
    };
    std::vector<Row> rows;
    for (const auto& v : tb.basis) rows.push_back({v.s, v.x});
    const std::size_t ncols = ts.size();
    std::size_t rank = 0;
    for (std::size_t col = 0; col < ncols && rank < rows.size(); ++col) {
        std::size_t pivot = rows.size();
        for (std::size_t r = rank; r < rows.size(); ++r)
            if (!rows[r].s[col].is_zero()) {
                pivot = r;
                break;
            }
        if (pivot == rows.size()) continue;
        std::swap(rows[rank], rows[pivot]);
        RatFun inv = rows[rank].s[col].inverse();
        for (RatFun& e : rows[rank].s) e = e * inv;
        rows[rank].x = rows[rank].x * inv;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r == rank || rows[r].s[col].is_zero()) continue;
            RatFun f = rows[r].s[col];
            for (std::size_t cc = 0; cc < ncols; ++cc)
                rows[r].s[cc] = rows[r].s[cc] - f * rows[rank].s[cc];
            rows[r].x = rows[r].x - f * rows[rank].x;
        }
        ++rank;
    }
    rows.resize(rank); // rows past the rank have an all-zero coefficient block

    Poly bm1 = tb.gp.b.shift(k, Rat(-1));
    for (const Row& row : rows) {
        Dependency dep;
        dep.coeffs = detail::normalize_coprime(row.s, /*sign_from_back=*/false);
        for (const Poly& c : dep.coeffs)
            if (c.contains(k)) throw DomainViolation("internal: dependency coefficient not k-free");

        RatFun scale;
        for (std::size_t i = 0; i < dep.coeffs.size(); ++i)
            if (!row.s[i].is_zero()) {
                scale = RatFun(dep.coeffs[i]) / row.s[i];
                break;
            }
        dep.R = RatFun(bm1) * row.x / (RatFun(tb.gp.c) * RatFun(q)) * scale;

        RatFun lhs;
        for (std::size_t i = 0; i < dep.coeffs.size(); ++i)
            lhs = lhs + RatFun(dep.coeffs[i]) * s[i];
        RatFun rhs = dep.R.shift(k, Rat(1)) * rho - dep.R;
        if (!(lhs == rhs)) throw DomainViolation("internal: dependency certificate failed");
        out.basis.push_back(std::move(dep));
    }
    out.dimension = out.basis.size();
    return out;
}

} // namespace hypersum
