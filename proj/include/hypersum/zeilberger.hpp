#pragma once

// Creative telescoping: given a term t(recvar, k) hypergeometric in both the
// summation variable k and a parameter, find polynomials sigma_0..sigma_J in
// the parameters (free of k) and a rational certificate R(k) with
//
//   sum_j sigma_j(recvar) t(recvar + j, k) = G(k+1) - G(k),   G = R * t.
//
// Summing over k then gives a linear recurrence in recvar for the definite
// sum, with boundary terms controlled by G.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "hypersum/gosper.hpp"

namespace hypersum {

struct Recurrence {
    VarId recvar;
    long order = 0;
    std::vector<Poly> sigma; // order + 1 coprime integer polynomials, sigma[order] != 0
    RatFun R;                // certificate: sum_j sigma_j t(recvar+j) = (R t)(k+1) - (R t)(k)
    std::vector<std::string> side_conditions;
};

inline std::optional<Recurrence> zeilberger(const HyperTerm& t, VarId recvar, long max_order = 4,
                                            std::uint64_t seed = 0) {
    VarId k = t.sumvar();
    if (recvar == k) throw DomainViolation("recurrence variable equals the summation variable");
    std::mt19937_64 rng(seed ^ 0xda942042e4dd58b5ull);
    RatFun rho = t.ratio();

    for (long order = 1; order <= max_order; ++order) {
        // r_j(k) = t(recvar + j, k) / t(recvar, k), a rational function of k
        std::vector<RatFun> r{RatFun(1)};
        bool similar = true;
        for (long j = 1; j <= order; ++j) {
            try {
                r.push_back(cross_ratio(t.shift_param(recvar, j), t));
            } catch (const NotSimilar&) {
                similar = false;
                break;
            }
        }
        if (!similar) return std::nullopt;

        Poly q = detail::common_den(r);
        std::vector<Poly> u;
        u.reserve(r.size());
        for (const RatFun& rj : r) u.push_back(detail::ratfun_to_poly(rj * RatFun(q)));

        // Substituting R = y/q into  sum_j sigma_j u_j / q = R(k+1) rho - R
        // leaves a Gosper-type equation for y against the ratio rho q/q(k+1);
        // its GP key equation is solved jointly for y and the sigma_j.
        RatFun rho_tilde = rho * RatFun(q, q.shift(k, Rat(1)));
        detail::TelescopeBasis tb = detail::telescope_nullspace(rho_tilde, u, k, rng);

        // prefer the dependency of lowest effective order
        const detail::TelescopeBasisVector* best = nullptr;
        long best_top = -1;
        for (const auto& v : tb.basis) {
            long top = -1;
            for (std::size_t i = v.s.size(); i-- > 0;)
                if (!v.s[i].is_zero()) {
                    top = static_cast<long>(i);
                    break;
                }
            if (top < 0) continue; // pure telescoping of the summand itself
            if (!best || top < best_top) {
                best = &v;
                best_top = top;
            }
        }
        if (!best) continue;

        std::vector<Poly> sigma = detail::normalize_coprime(best->s, /*sign_from_back=*/true);

        // recover the exact scale applied to s so R follows along
        RatFun scale;
        for (std::size_t i = 0; i < sigma.size(); ++i)
            if (!best->s[i].is_zero()) {
                scale = RatFun(sigma[i]) / best->s[i];
                break;
            }
        Poly bm1 = tb.gp.b.shift(k, Rat(-1));
        RatFun cert = RatFun(bm1) * best->x / (RatFun(tb.gp.c) * RatFun(q)) * scale;

        // strip leading zero coefficients by reindexing the parameter shift
        std::size_t z = 0;
        while (z < sigma.size() && sigma[z].is_zero()) ++z;
        if (z == sigma.size()) continue;
        if (z > 0) {
            std::vector<Poly> s2;
            for (std::size_t i = z; i < sigma.size(); ++i)
                s2.push_back(sigma[i].shift(recvar, Rat(-static_cast<long>(z))));
            sigma = std::move(s2);
            HyperTerm down = t.shift_param(recvar, -static_cast<long>(z));
            cert = cert.shift(recvar, Rat(-static_cast<long>(z))) * cross_ratio(down, t);
        }
        while (sigma.size() > 1 && sigma.back().is_zero()) sigma.pop_back();

        // final exact verification against freshly computed term ratios
        RatFun lhs;
        for (std::size_t j = 0; j < sigma.size(); ++j) {
            RatFun rj = j == 0 ? RatFun(1)
                               : cross_ratio(t.shift_param(recvar, static_cast<long>(j)), t);
            lhs = lhs + RatFun(sigma[j]) * rj;
        }
        RatFun rhs = cert.shift(k, Rat(1)) * rho - cert;
        if (!(lhs == rhs)) throw DomainViolation("internal: telescoping certificate failed");

        Recurrence rec;
        rec.recvar = recvar;
        rec.order = static_cast<long>(sigma.size()) - 1;
        rec.sigma = std::move(sigma);
        rec.R = cert;
        rec.side_conditions = tb.side_conditions;
        return rec;
    }
    return std::nullopt;
}

} // namespace hypersum
