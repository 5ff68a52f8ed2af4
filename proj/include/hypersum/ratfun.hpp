#pragma once

// Rational functions num/den over the shared polynomial ring, kept reduced:
// gcd(num, den) = 1, den primitive over Z with positive leading coefficient
// under the global monomial order (so equal values compare bitwise equal).
// The rational content of the value lives in num's coefficients.

#include <optional>
#include <string>

#include "hypersum/poly.hpp"
#include "hypersum/poly_gcd.hpp"

namespace hypersum {

class RatFun {
public:
    RatFun() : num_(), den_(1) {}
    RatFun(const Poly& p) : num_(p), den_(1) {}
    RatFun(const Rat& q) : num_(q), den_(1) {}
    RatFun(long q) : num_(q), den_(1) {}
    RatFun(int q) : num_(q), den_(1) {}

    RatFun(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) {
        if (den_.is_zero()) throw DomainViolation("rational function with zero denominator");
        reduce();
    }

    const Poly& num() const { return num_; }
    const Poly& den() const { return den_; }

    bool is_zero() const { return num_.is_zero(); }
    bool is_poly() const { return den_ == Poly(1); }
    bool is_constant() const { return num_.is_constant() && den_.is_constant(); }

    Rat constant_value() const {
        return num_.constant_value() / den_.constant_value();
    }

    RatFun operator-() const {
        RatFun r(*this);
        r.num_ = -r.num_;
        return r;
    }

    friend RatFun operator+(const RatFun& x, const RatFun& y) {
        return RatFun(x.num_ * y.den_ + y.num_ * x.den_, x.den_ * y.den_);
    }
    friend RatFun operator-(const RatFun& x, const RatFun& y) {
        return RatFun(x.num_ * y.den_ - y.num_ * x.den_, x.den_ * y.den_);
    }
    friend RatFun operator*(const RatFun& x, const RatFun& y) {
        return RatFun(x.num_ * y.num_, x.den_ * y.den_);
    }
    friend RatFun operator/(const RatFun& x, const RatFun& y) {
        if (y.is_zero()) throw DomainViolation("division by zero rational function");
        return RatFun(x.num_ * y.den_, x.den_ * y.num_);
    }

    RatFun& operator+=(const RatFun& o) { return *this = *this + o; }
    RatFun& operator-=(const RatFun& o) { return *this = *this - o; }
    RatFun& operator*=(const RatFun& o) { return *this = *this * o; }
    RatFun& operator/=(const RatFun& o) { return *this = *this / o; }

    bool operator==(const RatFun& o) const { return num_ == o.num_ && den_ == o.den_; }

    RatFun inverse() const {
        if (is_zero()) throw DomainViolation("inverse of zero rational function");
        return RatFun(den_, num_);
    }

    bool contains(VarId v) const { return num_.contains(v) || den_.contains(v); }

    RatFun shift(VarId v, const Rat& offset) const {
        return RatFun(num_.shift(v, offset), den_.shift(v, offset));
    }

    RatFun subst(VarId v, const Poly& value) const {
        return RatFun(num_.subst(v, value), den_.subst(v, value));
    }

    // Evaluation at a point; nullopt at a pole of the reduced form.
    std::optional<Rat> eval(const std::map<VarId, Rat>& point) const {
        Rat d = den_.eval(point);
        if (d == 0) return std::nullopt;
        return num_.eval(point) / d;
    }

    template <class F>
    F eval_as(const std::map<VarId, F>& point) const {
        F d = den_.eval_as<F>(point);
        return num_.eval_as<F>(point) / d;
    }

    std::string str() const {
        if (is_poly()) return num_.str();
        std::string n = num_.str(), d = den_.str();
        std::string r = num_.terms().size() > 1 ? "(" + n + ")" : n;
        r += "/";
        r += (den_.terms().size() > 1 || !den_.lm().is_one() || den_.lc() < 0) ? "(" + d + ")" : d;
        return r;
    }

private:
    void reduce() {
        if (num_.is_zero()) {
            den_ = Poly(1);
            return;
        }
        Poly g = poly_gcd(num_, den_);
        if (!(g == Poly(1))) {
            num_ = detail::exact(num_, g);
            den_ = detail::exact(den_, g);
        }
        Rat c = den_.int_content(); // sign-carrying; den/c has positive lc
        if (c != 1) {
            Rat inv = Rat(1) / c;
            den_ = den_.mul_rat(inv);
            num_ = num_.mul_rat(inv);
        }
    }

    Poly num_, den_;
};

inline RatFun operator+(const Poly& p, const RatFun& r) { return RatFun(p) + r; }
inline RatFun operator*(const Poly& p, const RatFun& r) { return RatFun(p) * r; }

} // namespace hypersum
