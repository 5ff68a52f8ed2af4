#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>
#include <string>
#include <vector>

#include "hypersum/certificate.hpp"
#include "hypersum/gosper.hpp"
#include "hypersum/parse.hpp"
#include "hypersum/pgosper.hpp"
#include "hypersum/zeilberger.hpp"

using namespace hypersum;

namespace {

Poly kpoly() { return Poly::from_var(var("k")); }
Poly npoly() { return Poly::from_var(var("n")); }

// t(k) = h(k+1) - h(k), which is summable by construction with G = h
HyperTerm difference_of(const HyperTerm& h) {
    RatFun step = h.ratio() - RatFun(1);
    HyperTerm t = h;
    t.mul_rational(step);
    return t;
}

} // namespace

TEST_CASE("integer root isolation") {
    VarId k = var("k");
    Poly kk = kpoly();

    SECTION("small roots by direct scan") {
        Poly p = (kk - Poly(3)) * (kk + Poly(5)) * (kk * kk + Poly(1));
        auto roots = detail::integer_roots(p, k);
        REQUIRE(roots.size() == 2);
        CHECK(roots[0] == -5);
        CHECK(roots[1] == 3);
    }
    SECTION("zero roots are stripped off first") {
        Poly p = kk * kk * (kk - Poly(2));
        auto roots = detail::integer_roots(p, k);
        REQUIRE(roots.size() == 2);
        CHECK(roots[0] == 0);
        CHECK(roots[1] == 2);
    }
    SECTION("no integer roots") {
        CHECK(detail::integer_roots(kk * kk + Poly(1), k).empty());
        CHECK(detail::integer_roots(Poly(2) * kk - Poly(1), k).empty());
    }
    SECTION("rational roots are not integer roots") {
        Poly p = (Poly(2) * kk - Poly(1)) * (kk - Poly(4));
        auto roots = detail::integer_roots(p, k);
        REQUIRE(roots.size() == 1);
        CHECK(roots[0] == 4);
    }
    SECTION("large roots go through the modular sieve") {
        Int big("1000000007");
        Poly p = (kk - Poly(Rat(big))) * (kk + Poly(12)) * (kk - Poly(1));
        auto roots = detail::integer_roots(p, k);
        REQUIRE(roots.size() == 3);
        CHECK(roots[0] == -12);
        CHECK(roots[1] == 1);
        CHECK(roots[2] == big);
    }
    SECTION("constant polynomials have no roots in the variable") {
        CHECK(detail::integer_roots(npoly() + Poly(1), k).empty());
        CHECK_THROWS_AS(detail::integer_roots(Poly(), k), DomainViolation);
    }
}

TEST_CASE("shift overlap detection") {
    VarId k = var("k");
    Poly kk = kpoly();
    std::mt19937_64 rng(42);

    SECTION("planted shifts are always found") {
        std::mt19937_64 trials(20240917);
        std::uniform_int_distribution<long> shift(0, 8), offset(-6, 6);
        for (int trial = 0; trial < 20; ++trial) {
            long j = shift(trials), c = offset(trials);
            Poly f = (kk + Poly(c)) * (kk * kk + Poly(7));
            Poly g = (kk + Poly(c - j)) * (kk + Poly(17));
            auto disp = detail::dispersion(f, g, k, rng);
            bool found = false;
            for (long s : disp.shifts) found = found || s == j;
            CHECK(found);
        }
    }
    SECTION("parameter-dependent overlap becomes a side condition") {
        Poly f = kk + npoly();
        auto disp = detail::dispersion(f, kk, k, rng);
        CHECK(disp.shifts.empty());
        REQUIRE_FALSE(disp.side_conditions.empty());
        CHECK(disp.side_conditions[0].rfind("nonzero: ", 0) == 0);
    }
    SECTION("constant inputs have no overlap") {
        CHECK(detail::dispersion(Poly(3), kk, k, rng).shifts.empty());
    }
}

TEST_CASE("ratio decomposition") {
    VarId k = var("k");
    Poly kk = kpoly();
    std::mt19937_64 rng(7);

    SECTION("shift-sharing factors move into c") {
        RatFun rho(kk + Poly(3), kk + Poly(1));
        GPForm gp = gp_decompose(rho, k, rng);
        CHECK(gp.a == Poly(1));
        CHECK(gp.b == Poly(1));
        CHECK(gp.c == (kk + Poly(1)) * (kk + Poly(2)));
    }
    SECTION("coprime parts stay put") {
        RatFun rho(kk + npoly(), kk);
        GPForm gp = gp_decompose(rho, k, rng);
        CHECK(gp.a == kk + npoly());
        CHECK(gp.b == kk);
        CHECK(gp.c == Poly(1));
    }
}

TEST_CASE("degree bound for the key equation") {
    VarId k = var("k");
    Poly kk = kpoly();
    std::vector<std::string> side;

    SECTION("distinct leading behaviour") {
        auto b = detail::key_degree_bound(kk + Poly(1), Poly(1), k, 0, side);
        CHECK_FALSE(b.has_value());
        b = detail::key_degree_bound(kk + Poly(1), Poly(2) * kk, k, 3, side);
        REQUIRE(b.has_value());
        CHECK(*b == 2);
        CHECK(side.empty());
    }
    SECTION("cancelling leading terms can raise the bound") {
        Poly a = kk * kk + Poly(1);
        Poly bm1 = kk * kk + kk;
        auto b = detail::key_degree_bound(a, bm1, k, 0, side);
        REQUIRE(b.has_value());
        CHECK(*b == 1); // the -q = 1 root dominates rhs_deg - deg + 1 = -1
        CHECK(side.empty());
    }
    SECTION("parameter-dependent bound is flagged") {
        Poly a = kk + Poly(2) * npoly();
        auto b = detail::key_degree_bound(a, kk, k, 1, side);
        REQUIRE(b.has_value());
        CHECK(*b == 1);
        REQUIRE(side.size() == 1);
        CHECK(side[0].find("degree bound assumes") != std::string::npos);
    }
}

TEST_CASE("indefinite summation of classic terms") {
    VarId k = var("k");
    Poly kk = kpoly();
    Poly nn = npoly();

    SECTION("constant term") {
        GosperResult g = gosper(parse_term("1"));
        REQUIRE(g.summable);
        CHECK(g.R == RatFun(kk)); // G(k) = k
    }
    SECTION("linear term sums to a triangle number") {
        GosperResult g = gosper(parse_term("k"));
        REQUIRE(g.summable);
        CHECK(g.R == RatFun(kk - Poly(1)) * RatFun(Rat(1, 2))); // G = k(k-1)/2
    }
    SECTION("telescoping rational term") {
        GosperResult g = gosper(parse_term("1/(k*(k + 1))"));
        REQUIRE(g.summable);
        CHECK(g.R == RatFun(-(kk + Poly(1)))); // G = -1/k
    }
    SECTION("alternating binomial slice") {
        GosperResult g = gosper(parse_term("Poch(-n, k)/fact(k)"));
        REQUIRE(g.summable);
        CHECK(g.R == RatFun(-kk) / RatFun(nn));
    }
    SECTION("geometric series") {
        GosperResult g = gosper(parse_term("pow(2, k)"));
        REQUIRE(g.summable);
        CHECK(g.R == RatFun(1));
        g = gosper(parse_term("pow(1/2, k)"));
        REQUIRE(g.summable);
        CHECK(g.R == RatFun(-2));
    }
    SECTION("rising factorial over factorial, with a free parameter") {
        GosperResult g = gosper(parse_term("Poch(2*nu + 1, k)/fact(k)"));
        REQUIRE(g.summable);
        Poly nu2 = Poly(2) * Poly::from_var(var("nu")) + Poly(1);
        CHECK(g.R == RatFun(kk) / RatFun(nu2));
    }
    SECTION("factorials do not telescope") {
        CHECK_FALSE(gosper(parse_term("fact(k)")).summable);
        CHECK_FALSE(gosper(parse_term("1/fact(k)")).summable);
        CHECK_FALSE(gosper(parse_term("1/(Poch(2*nu + 1, k)*fact(k))")).summable);
    }
    SECTION("harmonic-style term is not summable") {
        CHECK_FALSE(gosper(parse_term("1/(k + 1)")).summable);
    }
    SECTION("results do not depend on the seed") {
        GosperResult g1 = gosper(parse_term("Poch(-n, k)/fact(k)"), 1);
        GosperResult g2 = gosper(parse_term("Poch(-n, k)/fact(k)"), 987654321);
        CHECK(g1.R == g2.R);
    }
}

TEST_CASE("constructed differences always telescope back") {
    std::vector<std::string> shapes = {
        "Poch(-n, k)/fact(k)",
        "Poch(2*nu + 1, k)/fact(k)^2",
        "pow(3, k)*(k + 2)/(k + 5)",
        "fact(k)*Poch(n + 1, k)",
        "Poch(-n, k)*Poch(n + 1, k)/(Poch(2*nu + 1, k)*fact(k))",
        "pow(2, k)/(Poch(-n, k)*(2*k - 3))",
    };
    for (const std::string& src : shapes) {
        INFO("difference of " << src);
        HyperTerm h = parse_term(src);
        HyperTerm t = difference_of(h);
        GosperResult g = gosper(t);
        REQUIRE(g.summable);
        // replay the antidifference identity independently of the engine
        VarId k = h.sumvar();
        RatFun rho = t.ratio();
        CHECK(g.R.shift(k, Rat(1)) * rho - g.R == RatFun(1));
    }
}

TEST_CASE("recurrences for definite sums") {
    VarId n = var("n");
    Poly nn = npoly();

    SECTION("row sums of the binomial triangle double") {
        auto rec = zeilberger(parse_term("pow(-1, k)*Poch(-n, k)/fact(k)"), n);
        REQUIRE(rec.has_value());
        CHECK(rec->order == 1);
        REQUIRE(rec->sigma.size() == 2);
        CHECK(rec->sigma[0] == Poly(-2));
        CHECK(rec->sigma[1] == Poly(1));
    }
    SECTION("central binomial sum") {
        auto rec = zeilberger(parse_term("Poch(-n, k)^2/fact(k)^2"), n);
        REQUIRE(rec.has_value());
        CHECK(rec->order == 1);
        REQUIRE(rec->sigma.size() == 2);
        CHECK(rec->sigma[0] == Poly(-4) * nn - Poly(2));
        CHECK(rec->sigma[1] == nn + Poly(1));
    }
    SECTION("certificate satisfies the telescoped identity") {
        HyperTerm t = parse_term("Poch(-n, k)^2/fact(k)^2");
        auto rec = zeilberger(t, n);
        REQUIRE(rec.has_value());
        VarId k = t.sumvar();
        RatFun lhs;
        for (std::size_t j = 0; j < rec->sigma.size(); ++j) {
            RatFun rj = j == 0 ? RatFun(1)
                               : cross_ratio(t.shift_param(n, static_cast<long>(j)), t);
            lhs = lhs + RatFun(rec->sigma[j]) * rj;
        }
        CHECK(lhs == rec->R.shift(k, Rat(1)) * t.ratio() - rec->R);
    }
    SECTION("asking for a recurrence in the summation variable is an error") {
        HyperTerm t = parse_term("Poch(-n, k)/fact(k)");
        CHECK_THROWS_AS(zeilberger(t, var("k")), DomainViolation);
    }
}

TEST_CASE("dependency spaces for families of similar terms") {
    VarId n = var("n");

    SECTION("a term repeated twice has the obvious dependency") {
        // the term itself must not telescope, or extra dependencies appear
        HyperTerm t = parse_term("Poch(-n, k)^2/fact(k)^2");
        DependencySpace space = pgosper({t, t});
        REQUIRE(space.dimension == 1);
        REQUIRE(space.basis.size() == 1);
        CHECK(space.basis[0].coeffs[0] == Poly(1));
        CHECK(space.basis[0].coeffs[1] == Poly(-1));
        CHECK(space.basis[0].R.is_zero());
    }
    SECTION("three consecutive parameter shifts of a first-order-summable family") {
        HyperTerm t = parse_term("Poch(-n, k)^2/fact(k)^2");
        std::vector<HyperTerm> ts = {t, t.shift_param(n, 1), t.shift_param(n, 2)};
        DependencySpace space = pgosper(ts);
        CHECK(space.dimension == 2);
        for (const Dependency& dep : space.basis) {
            REQUIRE(dep.coeffs.size() == 3);
            bool nonzero = false;
            for (const Poly& c : dep.coeffs) {
                CHECK_FALSE(c.contains(var("k")));
                nonzero = nonzero || !c.is_zero();
            }
            CHECK(nonzero);
        }
    }
    SECTION("dimension and basis are stable across seeds") {
        HyperTerm t = parse_term("Poch(-n, k)^2/fact(k)^2");
        std::vector<HyperTerm> ts = {t, t.shift_param(n, 1), t.shift_param(n, 2)};
        DependencySpace s1 = pgosper(ts, 3);
        DependencySpace s2 = pgosper(ts, 77777);
        REQUIRE(s1.dimension == s2.dimension);
        for (std::size_t i = 0; i < s1.basis.size(); ++i) {
            for (std::size_t j = 0; j < s1.basis[i].coeffs.size(); ++j)
                CHECK(s1.basis[i].coeffs[j] == s2.basis[i].coeffs[j]);
            CHECK(s1.basis[i].R == s2.basis[i].R);
        }
    }
}

TEST_CASE("boundary analysis of antidifferences") {
    VarId k = var("k");
    Poly kk = kpoly();
    Poly nn = npoly();

    SECTION("clean telescoping sum") {
        HyperTerm t = parse_term("Poch(-n, k)/fact(k)");
        GosperResult g = gosper(t);
        REQUIRE(g.summable);
        BoundaryReport rep = boundary_report(t, g.R);
        CHECK(rep.lower_zero);
        CHECK_FALSE(rep.lower_pole);
        CHECK(rep.poles.empty());
        REQUIRE(rep.upper_bound.has_value());
        CHECK(*rep.upper_bound == nn);
        CHECK(rep.clean);
        CHECK(rep.note() ==
              "G(0) = 0; no certificate poles for k >= 0; support ends at k = n");
    }
    SECTION("unconditional certificate poles are reported") {
        HyperTerm t = parse_term("pow(2, k)");
        BoundaryReport rep = boundary_report(t, RatFun(Poly(1), (kk - Poly(2)) * (kk + Poly(1))));
        CHECK_FALSE(rep.lower_zero);
        CHECK_FALSE(rep.lower_pole);
        REQUIRE(rep.poles.size() == 1);
        CHECK(rep.poles[0] == 2);
        CHECK_FALSE(rep.clean);
        CHECK_FALSE(rep.upper_bound.has_value());
    }
    SECTION("parameter-dependent pole candidates become side conditions") {
        HyperTerm t = parse_term("pow(2, k)");
        BoundaryReport rep = boundary_report(t, RatFun(Poly(1), kk - nn));
        CHECK(rep.poles.empty());
        REQUIRE(rep.side_conditions.size() == 1);
        CHECK(rep.side_conditions[0].rfind("nonzero: ", 0) == 0);
    }
    SECTION("pole of G at the lower boundary") {
        HyperTerm t = parse_term("pow(2, k)");
        BoundaryReport rep = boundary_report(t, RatFun(Poly(1), kk));
        CHECK(rep.lower_pole);
        CHECK_FALSE(rep.clean);
        CHECK(rep.note().rfind("G has a pole at k = 0", 0) == 0);
    }
}

TEST_CASE("certificate round trips") {
    VarId n = var("n");

    SECTION("gosper certificate") {
        HyperTerm t = parse_term("Poch(-n, k)/fact(k)");
        TelescopeCertificate cert = certificate_for(t, gosper(t));
        std::string text = cert.to_text();
        TelescopeCertificate back = TelescopeCertificate::from_text(text);
        CHECK(back.to_text() == text);
        VerifyOutcome v = verify_certificate(back);
        CHECK(v.ok);
        INFO(v.detail);
    }
    SECTION("zeilberger certificate") {
        HyperTerm t = parse_term("Poch(-n, k)^2/fact(k)^2");
        auto rec = zeilberger(t, n);
        REQUIRE(rec.has_value());
        TelescopeCertificate cert = certificate_for(t, *rec);
        std::string text = cert.to_text();
        TelescopeCertificate back = TelescopeCertificate::from_text(text);
        CHECK(back.to_text() == text);
        CHECK(verify_certificate(back).ok);
    }
    SECTION("dependency certificate") {
        HyperTerm t = parse_term("Poch(-n, k)^2/fact(k)^2");
        std::vector<HyperTerm> ts = {t, t.shift_param(n, 1), t.shift_param(n, 2)};
        DependencySpace space = pgosper(ts);
        REQUIRE(space.dimension == 2);
        for (const Dependency& dep : space.basis) {
            TelescopeCertificate cert = certificate_for(ts, dep, space.side_conditions);
            TelescopeCertificate back = TelescopeCertificate::from_text(cert.to_text());
            CHECK(back.to_text() == cert.to_text());
            VerifyOutcome v = verify_certificate(back);
            INFO(v.detail);
            CHECK(v.ok);
        }
    }
    SECTION("producing a certificate twice gives identical bytes") {
        HyperTerm t = parse_term("Poch(-n, k)/fact(k)");
        std::string a = certificate_for(t, gosper(t)).to_text();
        std::string b = certificate_for(t, gosper(t)).to_text();
        CHECK(a == b);
    }
}

TEST_CASE("certificate verification rejects forgeries") {
    HyperTerm t = parse_term("Poch(-n, k)/fact(k)");
    TelescopeCertificate good = certificate_for(t, gosper(t));
    REQUIRE(verify_certificate(good).ok);

    SECTION("wrong multiplier") {
        TelescopeCertificate bad = good;
        bad.R = "k/n";
        VerifyOutcome v = verify_certificate(bad);
        CHECK_FALSE(v.ok);
        CHECK(v.detail == "telescoping identity does not hold");
    }
    SECTION("wrong boundary claim") {
        TelescopeCertificate bad = good;
        bad.boundary = "G(0) != 0; no certificate poles for k >= 0; support ends at k = n";
        VerifyOutcome v = verify_certificate(bad);
        CHECK_FALSE(v.ok);
        CHECK(v.detail.find("boundary note does not match") != std::string::npos);
    }
    SECTION("unparseable field") {
        TelescopeCertificate bad = good;
        bad.inputs[0] = "Poch(-n, k)*";
        CHECK_FALSE(verify_certificate(bad).ok);
    }
    SECTION("all-zero dependency is vacuous") {
        TelescopeCertificate bad;
        bad.kind = CertKind::param_gosper;
        bad.sumvar = "k";
        bad.inputs = {"Poch(-n, k)/fact(k)", "Poch(1 - n, k)/fact(k)"};
        bad.coeffs = {"0", "0"};
        bad.R = "0";
        VerifyOutcome v = verify_certificate(bad);
        CHECK_FALSE(v.ok);
        CHECK(v.detail == "all dependency coefficients are zero");
    }
    SECTION("malformed text is rejected with a position") {
        CHECK_THROWS_AS(TelescopeCertificate::from_text("not a certificate\n"), ParseError);
        CHECK_THROWS_AS(TelescopeCertificate::from_text("certificate v1\nbogus: 1\n"), ParseError);
        CHECK_THROWS_AS(
            TelescopeCertificate::from_text("certificate v1\nkind: gosper\nsumvar: k\n"
                                            "input 1: fact(k)\nR: 1\n"),
            ParseError);
        // sigma lines on a plain summability certificate
        CHECK_THROWS_AS(
            TelescopeCertificate::from_text("certificate v1\nkind: gosper\nsumvar: k\n"
                                            "input 0: fact(k)\nsigma 0: 1\nR: 1\n"),
            ParseError);
    }
}
