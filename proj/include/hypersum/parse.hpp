#pragma once

// Recursive-descent parser for the two input languages:
//
//   ratexpr  :=  rterm (('+'|'-') rterm)*
//   rterm    :=  rfactor (('*'|'/') rfactor)*
//   rfactor  :=  '-'* base ('^' '-'? integer)?
//   base     :=  integer | name | '(' ratexpr ')'
//
//   term     :=  tfactor (('*'|'/') tfactor)*
//   tfactor  :=  'Poch' '(' ratexpr ',' var ')'
//             |  'fact' '(' ratexpr ')'
//             |  'pow'  '(' ratexpr ',' var ')'
//             |  'gammaf' '(' ratexpr ')'
//             |  '(' termsum ')'            -- sum of terms; only the purely
//             |  rfactor                       rational case may have 2+ addends
//   each tfactor takes an optional '^' integer exponent
//
// Whitespace is insignificant.  Errors carry the byte offset of the offending
// token.  parse_term(render(t)) reproduces t exactly for canonical terms.

#include <cctype>
#include <string>
#include <string_view>

#include "hypersum/hyperterm.hpp"

namespace hypersum {

namespace detail {

struct Lexer {
    std::string_view text;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }

    bool accept(char c) {
        if (peek() == c) {
            ++pos;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c))
            throw ParseError(std::string("expected '") + c + "'", pos);
    }

    bool name_ahead() {
        char c = peek();
        return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
    }

    bool int_ahead() { return std::isdigit(static_cast<unsigned char>(peek())); }

    std::string name() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            ++pos;
        if (start == pos) throw ParseError("expected a name", pos);
        return std::string(text.substr(start, pos - start));
    }

    Int integer() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (start == pos) throw ParseError("expected an integer", pos);
        return Int(std::string(text.substr(start, pos - start)));
    }

    long small_int() {
        Int v = integer();
        if (v > 1000000 || v < -1000000) throw ParseError("exponent out of range", pos);
        return v.convert_to<long>();
    }

    void expect_end() {
        skip_ws();
        if (pos != text.size()) throw ParseError("trailing input", pos);
    }
};

class ExprParser {
public:
    ExprParser(std::string_view text, VarId sumvar) : lex_{text}, sumvar_(sumvar) {}

    RatFun ratexpr() {
        RatFun acc = rterm();
        for (;;) {
            if (lex_.accept('+')) acc += rterm();
            else if (lex_.accept('-')) acc -= rterm();
            else return acc;
        }
    }

    // A term, i.e. a sum with at most one hypergeometric addend (a sum of
    // genuinely hypergeometric atoms is not a term; rational sums are fine).
    HyperTerm termsum() {
        HyperTerm first = product();
        bool negate = false;
        RatFun rat_acc(0);
        bool summed = false;
        for (;;) {
            if (lex_.accept('+')) negate = false;
            else if (lex_.accept('-')) negate = true;
            else break;
            std::size_t at = lex_.pos;
            HyperTerm next = product();
            if (!next.is_pure_rational())
                throw ParseError("cannot add hypergeometric factors inside a term", at);
            if (!summed) {
                if (!first.is_pure_rational())
                    throw ParseError("cannot add hypergeometric factors inside a term", at);
                rat_acc = first.prefactor();
                summed = true;
            }
            rat_acc = negate ? rat_acc - next.prefactor() : rat_acc + next.prefactor();
        }
        if (!summed) return first;
        if (rat_acc.is_zero()) throw ParseError("term is identically zero", lex_.pos);
        HyperTerm r(sumvar_);
        r.mul_rational(rat_acc);
        return r;
    }

    Lexer& lex() { return lex_; }

private:
    RatFun rterm() {
        RatFun acc = rfactor();
        for (;;) {
            if (lex_.accept('*')) acc *= rfactor();
            else if (lex_.accept('/')) {
                std::size_t save = lex_.pos;
                RatFun d = rfactor();
                if (d.is_zero()) throw ParseError("division by zero", save);
                acc /= d;
            } else
                return acc;
        }
    }

    RatFun rfactor() {
        bool neg = false;
        while (lex_.accept('-')) neg = !neg;
        RatFun v;
        if (lex_.int_ahead()) {
            v = RatFun(Rat(lex_.integer()));
        } else if (lex_.name_ahead()) {
            v = RatFun(Poly::variable(lex_.name()));
        } else if (lex_.accept('(')) {
            v = ratexpr();
            lex_.expect(')');
        } else {
            throw ParseError("expected a number, name, or parenthesized expression", lex_.pos);
        }
        if (lex_.accept('^')) {
            std::size_t save = lex_.pos;
            long e = exponent();
            if (v.is_zero() && e < 0) throw ParseError("zero raised to a negative power", save);
            v = rf_pow(v, e);
        }
        return neg ? -v : v;
    }

    long exponent() {
        bool neg = lex_.accept('-');
        long e = lex_.small_int();
        return neg ? -e : e;
    }

    // product of term factors, honoring '*' and '/'
    HyperTerm product() {
        HyperTerm acc(sumvar_);
        bool invert = false;
        for (;;) {
            mul_tfactor(acc, invert);
            if (lex_.accept('*')) invert = false;
            else if (lex_.accept('/')) invert = true;
            else return acc;
        }
    }

    void mul_tfactor(HyperTerm& acc, bool invert) {
        int sign = invert ? -1 : 1;
        bool neg = false;
        while (lex_.accept('-')) neg = !neg;
        if (neg) acc.mul_rational(RatFun(-1));
        std::size_t start = lex_.pos;

        if (lex_.name_ahead()) {
            std::size_t save = lex_.pos;
            std::string word = lex_.name();
            if (word == "Poch") {
                lex_.expect('(');
                Poly arg = poly_arg();
                lex_.expect(',');
                expect_sumvar();
                lex_.expect(')');
                try {
                    acc.mul_poch(arg, static_cast<int>(sign * opt_exponent()));
                } catch (const DomainViolation& e) {
                    throw ParseError(e.what(), save);
                }
                return;
            }
            if (word == "fact") {
                lex_.expect('(');
                Poly arg = poly_arg();
                lex_.expect(')');
                Poly rest = arg - Poly::from_var(sumvar_);
                if (!rest.is_constant())
                    throw ParseError("fact argument must be the summation variable plus an integer",
                                     lex_.pos);
                auto s = rat_to_int(rest.constant_value());
                if (!s || *s < 0)
                    throw ParseError("fact argument must have a nonnegative integer shift", lex_.pos);
                acc.mul_fact(s->convert_to<long>(), static_cast<int>(sign * opt_exponent()));
                return;
            }
            if (word == "pow") {
                lex_.expect('(');
                RatFun base = ratexpr();
                lex_.expect(',');
                std::string v = lex_.name();
                lex_.expect(')');
                long e = sign * opt_exponent();
                try {
                    if (var(v) == sumvar_) acc.mul_geo(rf_pow(base, e));
                    else acc.mul_param_pow(rf_pow(base, e), var(v));
                } catch (const DomainViolation& ex) {
                    throw ParseError(ex.what(), save);
                }
                return;
            }
            if (word == "gammaf") {
                lex_.expect('(');
                Poly arg = poly_arg();
                lex_.expect(')');
                try {
                    acc.mul_gamma(arg, static_cast<int>(sign * opt_exponent()));
                } catch (const DomainViolation& ex) {
                    throw ParseError(ex.what(), save);
                }
                return;
            }
            // plain name: rational factor
            lex_.pos = save;
        }
        if (lex_.peek() == '(') {
            lex_.expect('(');
            HyperTerm sub = termsum();
            lex_.expect(')');
            long e = sign * opt_exponent();
            if (sub.is_pure_rational()) {
                acc.mul_rational(rf_pow(sub.prefactor(), e));
                return;
            }
            if (e < 0) {
                sub = sub.inverse();
                e = -e;
            }
            for (long i = 0; i < e; ++i) acc *= sub;
            return;
        }
        // bare rational factor
        RatFun v;
        if (lex_.int_ahead()) v = RatFun(Rat(lex_.integer()));
        else if (lex_.name_ahead()) v = RatFun(Poly::variable(lex_.name()));
        else throw ParseError("expected a term factor", lex_.pos);
        if (lex_.accept('^')) {
            long e = exponent();
            if (!v.is_zero()) v = rf_pow(v, e);
        }
        if (v.is_zero())
            throw ParseError(invert ? "division by zero" : "a term cannot contain a zero factor",
                             start);
        acc.mul_rational(invert ? v.inverse() : v);
    }

    long opt_exponent() { return lex_.accept('^') ? exponent() : 1; }

    Poly poly_arg() {
        std::size_t at = lex_.pos;
        RatFun v = ratexpr();
        if (!v.den().is_constant())
            throw ParseError("expected a polynomial argument", at);
        return v.num().mul_rat(Rat(1) / v.den().constant_value());
    }

    void expect_sumvar() {
        std::size_t at = lex_.pos;
        std::string v = lex_.name();
        if (var(v) != sumvar_)
            throw ParseError("expected the summation variable here, got '" + v + "'", at);
    }

    Lexer lex_;
    VarId sumvar_;
};

} // namespace detail

inline RatFun parse_ratfun(std::string_view text) {
    detail::ExprParser p(text, var("k"));
    RatFun r = p.ratexpr();
    p.lex().expect_end();
    return r;
}

inline Poly parse_poly(std::string_view text) {
    RatFun r = parse_ratfun(text);
    if (!r.den().is_constant())
        throw ParseError("expected a polynomial, got a proper rational function", 0);
    return r.num().mul_rat(Rat(1) / r.den().constant_value());
}

inline HyperTerm parse_term(std::string_view text, std::string_view sumvar = "k") {
    detail::ExprParser p(text, var(sumvar));
    HyperTerm t = p.termsum();
    p.lex().expect_end();
    return t;
}

} // namespace hypersum
