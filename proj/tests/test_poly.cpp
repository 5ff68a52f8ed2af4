#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <random>

#include "hypersum/linsolve.hpp"
#include "hypersum/poly.hpp"
#include "hypersum/poly_gcd.hpp"
#include "hypersum/ratfun.hpp"

using namespace hypersum;

namespace {

Poly K() { return Poly::variable("k"); }
Poly N() { return Poly::variable("n"); }
Poly P() { return Poly::variable("p"); }

// Small random polynomial in k and n with integer coefficients.
Poly random_poly(std::mt19937& rng, int max_deg = 2, int max_coeff = 4) {
    std::uniform_int_distribution<int> deg(0, max_deg);
    std::uniform_int_distribution<int> coeff(-max_coeff, max_coeff);
    Poly out;
    for (int i = 0; i <= deg(rng); ++i)
        for (int j = 0; j + i <= max_deg; ++j) {
            int c = coeff(rng);
            if (c == 0) continue;
            Monomial m;
            if (i) m.exps.emplace_back(var("k"), static_cast<std::uint32_t>(i));
            if (j) m.exps.emplace_back(var("n"), static_cast<std::uint32_t>(j));
            out = out + Poly::from_term(m, Rat(c));
        }
    return out;
}

} // namespace

TEST_CASE("polynomial arithmetic and canonical rendering") {
    Poly k = K(), n = N();

    Poly p = k * k * Poly(3) * Poly::variable("nu") - k + Poly(1);
    CHECK(p.str() == "3*k^2*nu - k + 1");

    CHECK((k + n) * (k - n) == k * k - n * n);
    CHECK(((k + Poly(1)).pow(3)) == k * k * k + Poly(3) * k * k + Poly(3) * k + Poly(1));
    CHECK((p - p).is_zero());
    CHECK(Poly(Rat(2, 3)).constant_value() == Rat(2, 3));

    // Graded-lex order: higher total degree leads; k is senior to n.
    CHECK((k + n * n).lm().degree() == 2);
    CHECK((k * n + n).total_degree() == 2);
    CHECK((k + n).str() == "k + n");
}

TEST_CASE("substitution, shifts, evaluation") {
    Poly k = K(), n = N();
    Poly p = k * k - n;

    CHECK(p.shift(var("k"), Rat(1)) == k * k + Poly(2) * k + Poly(1) - n);
    CHECK(p.subst(var("k"), n + Poly(1)) == n * n + Poly(2) * n + Poly(1) - n);

    std::map<VarId, Rat> at{{var("k"), Rat(3)}, {var("n"), Rat(2)}};
    CHECK(p.eval(at) == Rat(7));

    // Dense coefficient views round-trip.
    auto cs = p.coeffs_in(var("k"));
    REQUIRE(cs.size() == 3);
    CHECK(cs[0] == -n);
    CHECK(cs[2] == Poly(1));
    CHECK(Poly::from_coeffs(cs, var("k")) == p);
    CHECK(p.coeff_of(var("k"), 2) == Poly(1));
    CHECK(p.degree(var("k")) == 2);
    CHECK(p.degree(var("p")) == 0);
}

TEST_CASE("content and exact division") {
    Poly k = K();
    Poly p = Poly(4) * k * k - Poly(6) * k;
    CHECK(p.int_content() == Rat(2));
    CHECK(p.primitive() == Poly(2) * k * k - Poly(3) * k);
    CHECK((-p).int_content() == Rat(-2));

    Poly a = (k + Poly(1)) * (k - N());
    auto q = a.divide_exact(k + Poly(1));
    REQUIRE(q.has_value());
    CHECK(*q == k - N());
    CHECK(!a.divide_exact(k + Poly(2)).has_value());
}

TEST_CASE("multivariate gcd") {
    Poly k = K(), n = N();

    Poly g = poly_gcd((k + n) * (k - Poly(1)), (k + n) * (k + Poly(2)));
    CHECK(g == k + n);

    CHECK(poly_gcd(Poly(), k + n) == k + n);
    CHECK(poly_gcd(Poly(6), Poly(4) * k) == Poly(1));
    CHECK(poly_gcd(Poly(2) * k + Poly(2), Poly(4) * k + Poly(4)) == k + Poly(1));

    // Coprime inputs.
    CHECK(poly_gcd(k + Poly(1), k + n).is_constant());

    // Variable missing from one side: gcd against the content.
    Poly a = (n + Poly(1)) * (n + Poly(2));
    Poly b = (n + Poly(1)) * k + (n + Poly(1)) * Poly(3);
    CHECK(poly_gcd(a, b) == n + Poly(1));
}

TEST_CASE("gcd divides both inputs on random pairs") {
    std::mt19937 rng(20240915);
    int nontrivial = 0;
    for (int trial = 0; trial < 40; ++trial) {
        Poly p = random_poly(rng), q = random_poly(rng), g = random_poly(rng, 1);
        if (g.is_zero()) g = K() + Poly(1);
        Poly a = p * g, b = q * g;
        if (a.is_zero() && b.is_zero()) continue;
        Poly h = poly_gcd(a, b);
        REQUIRE(!h.is_zero());
        CHECK(a.divide_exact(h).has_value());
        CHECK(b.divide_exact(h).has_value());
        if (!p.is_zero() && !q.is_zero()) {
            // g (made primitive) must divide the gcd of a and b.
            CHECK(h.divide_exact(g.primitive()).has_value());
            ++nontrivial;
        }
    }
    CHECK(nontrivial > 20);
}

TEST_CASE("resultants follow the Sylvester layout convention") {
    Poly k = K(), n = N(), p = P(), j = Poly::variable("j");

    CHECK(resultant(k - n, k + j - n, var("k")) == j);
    CHECK(resultant(k + Poly(1), k - p + j, var("k")) == j - p - Poly(1));

    // Shared root means vanishing resultant.
    CHECK(resultant((k - Poly(1)) * (k - n), (k - n) * (k + Poly(2)), var("k")).is_zero());

    // Degree-zero edge cases.
    CHECK(resultant(Poly(5), k * k + Poly(1), var("k")) == Poly(25));
    CHECK(resultant(k * k + Poly(1), Poly(5), var("k")) == Poly(25));

    // Classic quadratic discriminant shape: res(x^2 - n, x - 3) = 9 - n.
    CHECK(resultant(k * k - n, k - Poly(3), var("k")) == Poly(9) - n);
}

TEST_CASE("rational function canonical form") {
    Poly k = K(), n = N();

    RatFun r(k * k - Poly(1), k - Poly(1));
    CHECK(r == RatFun(k + Poly(1)));
    CHECK(r.is_poly());

    // Denominator is integer-primitive with positive leading coefficient.
    RatFun s(k, Poly(-2) * k + Poly(-2));
    CHECK(s.den() == k + Poly(1));
    CHECK(s.num() == Poly(Rat(-1, 2)) * k);

    CHECK_THROWS_AS(RatFun(k, Poly()), DomainViolation);
    CHECK_THROWS_AS(RatFun(k) / RatFun(), DomainViolation);

    RatFun a(Poly(1), k), b(Poly(1), k + Poly(1));
    CHECK(a - b == RatFun(Poly(1), k * k + k));
    CHECK(a * b * (k * (k + Poly(1))) == RatFun(1));
    CHECK(a.inverse() == RatFun(k));

    // Pole detection in evaluation.
    std::map<VarId, Rat> pole{{var("k"), Rat(0)}};
    CHECK(!a.eval(pole).has_value());
    std::map<VarId, Rat> fine{{var("k"), Rat(2)}};
    CHECK(a.eval(fine) == Rat(1, 2));

    RatFun t(n * k + k, n + Poly(1));
    CHECK(t == RatFun(k));
}

TEST_CASE("linear systems over the rational function field") {
    Poly n = N();
    RatFun rn(n);

    SECTION("unique solution") {
        std::vector<std::vector<RatFun>> a{{RatFun(1), rn}, {rn, RatFun(1)}};
        std::vector<RatFun> b{RatFun(n * n + Poly(1)), RatFun(Poly(2) * n)};
        auto sol = solve_linear(a, b);
        REQUIRE(sol.consistent);
        REQUIRE(sol.particular.size() == 2);
        CHECK(sol.particular[0] == RatFun(1));
        CHECK(sol.particular[1] == rn);
        CHECK(sol.nullspace.empty());
    }

    SECTION("underdetermined system reports a nullspace basis") {
        std::vector<std::vector<RatFun>> a{{RatFun(1), RatFun(1), RatFun(1)}};
        std::vector<RatFun> b{RatFun(Poly(6))};
        auto sol = solve_linear(a, b);
        REQUIRE(sol.consistent);
        REQUIRE(sol.nullspace.size() == 2);
        for (const auto& v : sol.nullspace) {
            RatFun dot;
            for (std::size_t i = 0; i < 3; ++i) dot = dot + a[0][i] * v[i];
            CHECK(dot.is_zero());
        }
        RatFun dot;
        for (std::size_t i = 0; i < 3; ++i) dot = dot + a[0][i] * sol.particular[i];
        CHECK(dot == RatFun(Poly(6)));
    }

    SECTION("inconsistent system") {
        std::vector<std::vector<RatFun>> a{{RatFun(1)}, {RatFun(1)}};
        std::vector<RatFun> b{RatFun(1), RatFun(2)};
        CHECK(!solve_linear(a, b).consistent);
    }

    SECTION("zero columns stay free") {
        std::vector<std::vector<RatFun>> a{{RatFun(), RatFun(1)}};
        std::vector<RatFun> b{rn};
        auto sol = solve_linear(a, b);
        REQUIRE(sol.consistent);
        CHECK(sol.particular[0].is_zero());
        CHECK(sol.particular[1] == rn);
        REQUIRE(sol.nullspace.size() == 1);
        CHECK(sol.nullspace[0][0] == RatFun(1));
        CHECK(sol.nullspace[0][1].is_zero());
    }
}

TEST_CASE("random linear systems satisfy their own equations") {
    std::mt19937 rng(77);
    std::uniform_int_distribution<int> coeff(-3, 3);
    for (int trial = 0; trial < 25; ++trial) {
        std::size_t rows = 3, cols = 4;
        std::vector<std::vector<RatFun>> a(rows, std::vector<RatFun>(cols));
        std::vector<RatFun> xtrue(cols);
        for (auto& x : xtrue) x = RatFun(coeff(rng)) + RatFun(N()) * RatFun(coeff(rng));
        for (auto& row : a)
            for (auto& e : row) e = RatFun(coeff(rng)) + RatFun(N()) * RatFun(coeff(rng));
        std::vector<RatFun> b(rows);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) b[i] = b[i] + a[i][j] * xtrue[j];

        auto sol = solve_linear(a, b);
        REQUIRE(sol.consistent);
        for (std::size_t i = 0; i < rows; ++i) {
            RatFun dot;
            for (std::size_t j = 0; j < cols; ++j) dot = dot + a[i][j] * sol.particular[j];
            CHECK(dot == b[i]);
        }
        for (const auto& v : sol.nullspace)
            for (std::size_t i = 0; i < rows; ++i) {
                RatFun dot;
                for (std::size_t j = 0; j < cols; ++j) dot = dot + a[i][j] * v[j];
                CHECK(dot.is_zero());
            }
    }
}
