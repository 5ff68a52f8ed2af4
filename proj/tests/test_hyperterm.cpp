#include <catch2/catch_amalgamated.hpp>

#include <map>

#include "hypersum/hyperterm.hpp"
#include "hypersum/parse.hpp"

using namespace hypersum;

namespace {

Rat poch_val(const Rat& base, long len) {
    Rat v = 1;
    for (long i = 0; i < len; ++i) v *= base + Rat(i);
    return v;
}

Rat fact_val(long m) {
    Rat v = 1;
    for (long i = 2; i <= m; ++i) v *= Rat(i);
    return v;
}

Rat rat_pow(const Rat& b, long e) {
    Rat v = 1;
    for (long i = 0; i < (e < 0 ? -e : e); ++i) v *= b;
    return e < 0 ? Rat(1) / v : v;
}

// Direct evaluation of a term at integer k, with every parameter pinned to a
// rational value.  Gamma prefactors are restricted to positive integer
// arguments here so they stay exactly computable.
Rat eval_term(const HyperTerm& t, long k, std::map<VarId, Rat> params) {
    params[t.sumvar()] = Rat(k);
    Rat v = 1;
    for (const auto& a : t.pochs()) v *= rat_pow(poch_val(a.arg.eval(params), k), a.power);
    for (const auto& a : t.facts()) v *= rat_pow(fact_val(k + a.shift), a.power);
    for (const auto& a : t.gammas()) {
        Rat arg = a.arg.eval(params);
        auto m = rat_to_int(arg);
        REQUIRE(m.has_value());
        REQUIRE(*m > 0);
        v *= rat_pow(fact_val(m->convert_to<long>() - 1), a.power);
    }
    for (const auto& [q, b] : t.param_pows()) {
        auto e = rat_to_int(params.at(q));
        REQUIRE(e.has_value());
        v *= rat_pow(*b.eval(params), e->convert_to<long>());
    }
    v *= rat_pow(*t.geo_base().eval(params), k);
    v *= *t.prefactor().eval(params);
    return v;
}

// Checks that ratio() matches t(k+1)/t(k) pointwise.
void check_ratio(const HyperTerm& t, const std::map<VarId, Rat>& params, long kmax = 5) {
    RatFun r = t.ratio();
    for (long k = 0; k <= kmax; ++k) {
        std::map<VarId, Rat> at = params;
        at[t.sumvar()] = Rat(k);
        auto rv = r.eval(at);
        REQUIRE(rv.has_value());
        Rat tk = eval_term(t, k, params);
        Rat tk1 = eval_term(t, k + 1, params);
        REQUIRE(tk != 0);
        CHECK(tk1 / tk == *rv);
    }
}

} // namespace

TEST_CASE("term ratios match pointwise evaluation") {
    Poly k = Poly::variable("k"), n = Poly::variable("n");
    std::map<VarId, Rat> at{{var("n"), Rat(17, 2)}};

    SECTION("plain Pochhammer numerator and factorial denominator") {
        HyperTerm t;
        t.mul_poch(-n).mul_fact(0, -1);
        CHECK(t.ratio() == RatFun(k - n, k + Poly(1)));
        check_ratio(t, at);
    }

    SECTION("geometric part") {
        HyperTerm t;
        t.mul_geo(RatFun(Rat(-3, 7)));
        CHECK(t.ratio() == RatFun(Rat(-3, 7)));
        check_ratio(t, at);
    }

    SECTION("rising argument") {
        HyperTerm t;
        t.mul_poch(n + k); // (n + k)_k
        check_ratio(t, at);
    }

    SECTION("falling argument") {
        HyperTerm t;
        t.mul_poch(n - k); // (n - k)_k
        check_ratio(t, at, 3);
    }

    SECTION("shifted factorial power") {
        HyperTerm t;
        t.mul_fact(2).mul_fact(0, -2); // (k+2)!/k!^2
        CHECK(t.ratio() == RatFun((k + Poly(3)), (k + Poly(1)) * (k + Poly(1))));
        check_ratio(t, at);
    }

    SECTION("rational prefactor folds into the ratio") {
        HyperTerm t;
        t.mul_poch(-n).mul_rational(RatFun(k + Poly(1), n + Poly(1)));
        check_ratio(t, at);
    }

    SECTION("everything at once") {
        HyperTerm t;
        t.mul_poch(-n).mul_poch(n + Poly(1), 2).mul_fact(1, -1).mul_geo(RatFun(Rat(1, 2)));
        t.mul_gamma(Poly(4)).mul_rational(RatFun(Poly(2), k * k + Poly(1)));
        check_ratio(t, at);
    }
}

TEST_CASE("gamma quotient helper") {
    Poly v = Poly::variable("n");
    CHECK(gamma_quotient(v, Rat(3)) == RatFun(v * (v + Poly(1)) * (v + Poly(2))));
    CHECK(gamma_quotient(v, Rat(0)) == RatFun(1));
    CHECK(gamma_quotient(v, Rat(-2)) == RatFun(Poly(1), (v - Poly(1)) * (v - Poly(2))));
}

TEST_CASE("cross ratios of similar terms") {
    Poly k = Poly::variable("k"), n = Poly::variable("n"), p = Poly::variable("p");

    SECTION("Pochhammer bases differing by one") {
        HyperTerm t1, t2;
        t1.mul_poch(-n);
        t2.mul_poch(Poly(1) - n);
        CHECK(cross_ratio(t1, t2) == RatFun(n, n - k));
    }

    SECTION("factorial is a Pochhammer in disguise") {
        HyperTerm t1, t2;
        t1.mul_fact(0);
        t2.mul_poch(Poly(1));
        CHECK(cross_ratio(t1, t2) == RatFun(1));
    }

    SECTION("identical terms") {
        HyperTerm t;
        t.mul_poch(-n).mul_poch(p + Poly(1)).mul_fact(0, -1).mul_geo(RatFun(Rat(2)));
        CHECK(cross_ratio(t, t) == RatFun(1));
    }

    SECTION("parameter shift of a Pochhammer") {
        HyperTerm t;
        t.mul_poch(-n);
        RatFun r = cross_ratio(t.shift_param(var("n"), 1), t);
        CHECK(r == RatFun(n + Poly(1), n + Poly(1) - k));
    }

    SECTION("parameter shift with a parameter power") {
        Poly x = Poly::variable("a");
        HyperTerm t;
        t.mul_poch(p + Poly(1)).mul_param_pow(RatFun(x), var("p"));
        RatFun r = cross_ratio(t.shift_param(var("p"), 1), t);
        CHECK(r == RatFun(x) * RatFun(p + Poly(1) + k, p + Poly(1)));
    }

    SECTION("gamma prefactors shift with the parameter") {
        HyperTerm t;
        t.mul_gamma(Poly(2) * n + Poly(1)).mul_poch(-n);
        HyperTerm s = t.shift_param(var("n"), 1);
        REQUIRE(s.gammas().size() == 1);
        CHECK(s.gammas()[0].arg == Poly(2) * n + Poly(3));
        RatFun r = cross_ratio(s, t);
        // gamma(2n+3)/gamma(2n+1) * (-n-1)_k/(-n)_k
        CHECK(r == RatFun((Poly(2) * n + Poly(1)) * (Poly(2) * n + Poly(2))) *
                       RatFun(n + Poly(1), n + Poly(1) - k));
    }

    SECTION("dissimilar terms are rejected") {
        HyperTerm t1, t2, t3;
        t1.mul_poch(n);
        t2.mul_poch(n + Poly(Rat(1, 2)));
        CHECK_THROWS_AS(cross_ratio(t1, t2), NotSimilar);
        t3.mul_poch(n).mul_fact(0);
        CHECK_THROWS_AS(cross_ratio(t1, t3), NotSimilar);
    }

    SECTION("mismatched geometric bases are rejected") {
        HyperTerm t1, t2;
        t1.mul_poch(n).mul_geo(RatFun(Rat(2)));
        t2.mul_poch(n).mul_geo(RatFun(Rat(3)));
        CHECK_THROWS_AS(cross_ratio(t1, t2), NotSimilar);
    }
}

TEST_CASE("term builders validate their inputs") {
    Poly k = Poly::variable("k"), n = Poly::variable("n");
    HyperTerm t;
    CHECK_THROWS_AS(t.mul_poch(k * k), DomainViolation);
    CHECK_THROWS_AS(t.mul_poch(Poly(2) * k + n), DomainViolation);
    CHECK_THROWS_AS(t.mul_fact(-1), DomainViolation);
    CHECK_THROWS_AS(t.mul_geo(RatFun(k)), DomainViolation);
    CHECK_THROWS_AS(t.mul_geo(RatFun()), DomainViolation);
    CHECK_THROWS_AS(t.mul_gamma(k + n), DomainViolation);
    CHECK_THROWS_AS(t.mul_rational(RatFun()), DomainViolation);
}

TEST_CASE("inverse and equality") {
    Poly n = Poly::variable("n");
    HyperTerm t;
    t.mul_poch(-n, 2).mul_fact(0, -1).mul_geo(RatFun(Rat(3, 2)));
    HyperTerm u = t;
    u *= t.inverse();
    CHECK(u.is_pure_rational());
    CHECK(cross_ratio(u, HyperTerm()) == RatFun(1));

    HyperTerm a, b;
    a.mul_poch(-n).mul_poch(n + Poly(1));
    b.mul_poch(n + Poly(1)).mul_poch(-n);
    CHECK(a == b); // atom order is canonical
}

TEST_CASE("parsing terms, rendering, and round trips") {
    SECTION("hypergeometric summand with the usual shape") {
        HyperTerm t = parse_term("Poch(-n, k)*Poch(p + 1, k)/(Poch(2*nu + 1, k)*fact(k))");
        Poly k = Poly::variable("k"), n = Poly::variable("n"), p = Poly::variable("p");
        Poly nu = Poly::variable("nu");
        CHECK(t.ratio() ==
              RatFun((k - n) * (k + p + Poly(1)), (k + Poly(2) * nu + Poly(1)) * (k + Poly(1))));
        HyperTerm again = parse_term(t.str());
        CHECK(again == t);
    }

    SECTION("round trips preserve structure") {
        for (const char* src : {
                 "Poch(-n, k)/fact(k)",
                 "Poch(n + k, k)^2*pow(1/2, k)",
                 "pow(2*a*beta, p)*gammaf(2*nu + 1)*Poch(-p, k)",
                 "(3/4)*Poch(1 - n, k)*fact(k + 2)^-1",
                 "Poch(-n, k)*(n/(n - k) + 1)/fact(k)",
             }) {
            HyperTerm t = parse_term(src);
            HyperTerm u = parse_term(t.str());
            CHECK(u == t);
        }
    }

    SECTION("pure rational expressions") {
        RatFun r = parse_ratfun("(n^2 - 1)/(n + 1)");
        CHECK(r == RatFun(Poly::variable("n") - Poly(1)));
        Poly q = parse_poly("3*k^2 - k/2 + 1");
        CHECK(q.str() == "3*k^2 - 1/2*k + 1");
    }

    SECTION("signs and numeric literals") {
        HyperTerm t = parse_term("-2*Poch(-n, k)/fact(k)");
        CHECK(t.prefactor() == RatFun(-2));
        HyperTerm u = parse_term("Poch(-n, k)*(k + 1)^2");
        std::map<VarId, Rat> at{{var("n"), Rat(9)}};
        check_ratio(u, at);
    }

    SECTION("parse errors carry positions") {
        CHECK_THROWS_AS(parse_term("Poch(k^2, k)"), ParseError);
        CHECK_THROWS_AS(parse_term("Poch(-n, j)"), ParseError);
        CHECK_THROWS_AS(parse_term("pow(k, k)"), ParseError);
        CHECK_THROWS_AS(parse_term("fact(k - 1)"), ParseError);
        CHECK_THROWS_AS(parse_term("Poch(-n, k"), ParseError);
        CHECK_THROWS_AS(parse_term(""), ParseError);
        CHECK_THROWS_AS(parse_term("1/0"), ParseError);
        CHECK_THROWS_AS(parse_ratfun("fact(k)"), ParseError);
        try {
            parse_term("Poch(-n, k)*!");
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.pos() == 12);
        }
    }

    SECTION("mixed sums must be rational") {
        CHECK_THROWS_AS(parse_term("Poch(-n, k) + 1"), ParseError);
        HyperTerm ok = parse_term("Poch(-n, k)*(1/(k + 1) + k)");
        std::map<VarId, Rat> at{{var("n"), Rat(7, 3)}};
        check_ratio(ok, at);
    }
}

TEST_CASE("power helper on rational functions") {
    Poly x = Poly::variable("a");
    CHECK(rf_pow(RatFun(x, Poly(2)), -2) == RatFun(Poly(4), x * x));
    CHECK(rf_pow(RatFun(x), 0) == RatFun(1));
    CHECK(rf_pow(RatFun(x), 3) == RatFun(x * x * x));
}
