#pragma once

#include <gmpxx.h>

#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>

#include "cordfol/errors.hpp"

namespace cordfol {

// Exact rational number, always kept in lowest terms with a positive denominator.
class Rational {
public:
    Rational() = default;
    Rational(int n) : v_(n) {}
    Rational(long n) : v_(n) {}
    Rational(long long n) : v_(static_cast<long>(n)) {}
    Rational(long n, long d)
    {
        if (d == 0)
            throw DomainError("rational with zero denominator");
        v_ = mpq_class(n, d);
        v_.canonicalize();
    }
    explicit Rational(const mpq_class& q) : v_(q) { v_.canonicalize(); }
    explicit Rational(const mpz_class& z) : v_(z) {}

    // Accepts "p", "-p", "p/q".
    static Rational parse(std::string_view s)
    {
        std::string str(s);
        mpq_class q;
        if (str.empty() || q.set_str(str, 10) != 0)
            throw DomainError("not a rational literal: '" + str + "'");
        if (q.get_den() == 0)
            throw DomainError("rational with zero denominator: '" + str + "'");
        q.canonicalize();
        return Rational(q);
    }

    // Exact binary value of a finite double.
    static Rational from_double(double x)
    {
        if (!std::isfinite(x))
            throw DomainError("cannot convert non-finite double to rational");
        return Rational(mpq_class(x));
    }

    // Continued-fraction approximation with |result - x| <= tol.
    static Rational approximate(double x, double tol)
    {
        if (!std::isfinite(x))
            throw DomainError("cannot convert non-finite double to rational");
        mpq_class target(x);
        mpz_class h0 = 0, h1 = 1, k0 = 1, k1 = 0;
        mpq_class rest = target;
        for (int it = 0; it < 64; ++it) {
            mpz_class a = rest.get_num() / rest.get_den();
            if (rest < 0 && a * rest.get_den() != rest.get_num())
                a -= 1;
            mpz_class h2 = a * h1 + h0, k2 = a * k1 + k0;
            h0 = h1; h1 = h2; k0 = k1; k1 = k2;
            mpq_class approx(h1, k1);
            approx.canonicalize();
            if (std::abs(approx.get_d() - x) <= tol)
                return Rational(approx);
            mpq_class frac = rest - mpq_class(a);
            if (frac == 0)
                break;
            rest = 1 / frac;
        }
        return Rational(target);
    }

    const mpq_class& raw() const noexcept { return v_; }
    mpz_class num() const { return v_.get_num(); }
    mpz_class den() const { return v_.get_den(); }
    bool is_zero() const noexcept { return sgn(v_) == 0; }
    bool is_integer() const { return v_.get_den() == 1; }
    int sign() const noexcept { return sgn(v_); }
    double to_double() const { return v_.get_d(); }

    // Only valid when is_integer() and the value fits.
    long to_long() const
    {
        if (!is_integer() || !v_.get_num().fits_slong_p())
            throw DomainError("rational " + str() + " is not a machine integer");
        return v_.get_num().get_si();
    }

    std::string str() const { return v_.get_str(); }

    Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
    Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
    Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
    Rational& operator/=(const Rational& o)
    {
        if (o.is_zero())
            throw DomainError("division by zero rational");
        v_ /= o.v_;
        return *this;
    }

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
    friend Rational operator-(const Rational& a) { return Rational(mpq_class(-a.v_)); }

    friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b)
    {
        int c = cmp(a.v_, b.v_);
        return c < 0 ? std::strong_ordering::less : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

    std::size_t hash() const
    {
        return std::hash<std::string>{}(v_.get_str(16));
    }

private:
    mpq_class v_;
};

inline Rational pow(const Rational& base, int e)
{
    if (e < 0)
        return pow(Rational(1) / base, -e);
    Rational r(1), b = base;
    while (e) {
        if (e & 1)
            r *= b;
        b *= b;
        e >>= 1;
    }
    return r;
}

inline Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

inline Rational binomial(int n, int k)
{
    if (k < 0 || k > n)
        return Rational(0);
    mpz_class z;
    mpz_bin_uiui(z.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return Rational(z);
}

inline Rational factorial(int n)
{
    mpz_class z;
    mpz_fac_ui(z.get_mpz_t(), static_cast<unsigned long>(n));
    return Rational(z);
}

} // namespace cordfol
