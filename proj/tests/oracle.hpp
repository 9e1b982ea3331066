#pragma once

// Independent dense reference arithmetic for truncated polynomials in one or two variables.
// Deliberately naive: full coefficient grids, schoolbook products, no sharing with the library kernels.

#include <vector>

#include "cordfol/rational.hpp"
#include "cordfol/series.hpp"

namespace oracle {

using cordfol::Rational;

// c[i][j] multiplies u1^i u2^j; only entries with i + j <= n matter.
struct Dense {
    int n = 0;
    std::vector<std::vector<Rational>> c;

    explicit Dense(int order) : n(order), c(order + 1, std::vector<Rational>(order + 1)) {}

    static Dense from(const cordfol::Series<Rational>& s)
    {
        Dense d(s.order());
        for (auto& [m, v] : s.terms())
            d.c[m.e[0]][s.codim() > 1 ? m.e[1] : 0] = v;
        return d;
    }

    cordfol::Series<Rational> to(int k) const
    {
        cordfol::Series<Rational> s(k, n);
        for (int i = 0; i <= n; ++i)
            for (int j = 0; i + j <= n; ++j) {
                if (c[i][j].is_zero())
                    continue;
                if (k == 1 && j > 0)
                    continue;
                cordfol::MultiIndex m(k);
                m.e[0] = static_cast<std::uint8_t>(i);
                if (k > 1)
                    m.e[1] = static_cast<std::uint8_t>(j);
                s.set(m, c[i][j]);
            }
        return s;
    }

    friend Dense operator+(const Dense& a, const Dense& b)
    {
        Dense r(a.n);
        for (int i = 0; i <= a.n; ++i)
            for (int j = 0; j <= a.n; ++j)
                r.c[i][j] = a.c[i][j] + b.c[i][j];
        return r;
    }

    friend Dense operator*(const Dense& a, const Dense& b)
    {
        Dense r(a.n);
        for (int i1 = 0; i1 <= a.n; ++i1)
            for (int j1 = 0; i1 + j1 <= a.n; ++j1)
                for (int i2 = 0; i1 + j1 + i2 <= a.n; ++i2)
                    for (int j2 = 0; i1 + j1 + i2 + j2 <= a.n; ++j2)
                        r.c[i1 + i2][j1 + j2] += a.c[i1][j1] * b.c[i2][j2];
        return r;
    }

    Dense scaled(const Rational& x) const
    {
        Dense r(n);
        for (int i = 0; i <= n; ++i)
            for (int j = 0; j <= n; ++j)
                r.c[i][j] = c[i][j] * x;
        return r;
    }

    static Dense one(int n)
    {
        Dense d(n);
        d.c[0][0] = 1;
        return d;
    }
};

// outer(inner) where inner has zero constant terms; outer has as many variables as inner entries.
inline Dense compose(const Dense& outer, const std::vector<Dense>& inner)
{
    Dense acc(outer.n);
    for (int i = 0; i <= outer.n; ++i)
        for (int j = 0; i + j <= outer.n; ++j) {
            if (outer.c[i][j].is_zero())
                continue;
            Dense term = Dense::one(outer.n).scaled(outer.c[i][j]);
            for (int p = 0; p < i; ++p)
                term = term * inner[0];
            for (int p = 0; p < j; ++p)
                term = term * inner.at(1);
            acc = acc + term;
        }
    return acc;
}

// Univariate reciprocal by the recurrence r_m = -(1/a_0) sum_{i>=1} a_i r_{m-i}.
inline std::vector<Rational> reciprocal1(const std::vector<Rational>& a)
{
    std::vector<Rational> r(a.size());
    r[0] = Rational(1) / a[0];
    for (std::size_t m = 1; m < a.size(); ++m) {
        Rational s;
        for (std::size_t i = 1; i <= m; ++i)
            s += a[i] * r[m - i];
        r[m] = -s / a[0];
    }
    return r;
}

inline std::vector<Rational> mul1(const std::vector<Rational>& a, const std::vector<Rational>& b)
{
    std::vector<Rational> r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; i + j < a.size(); ++j)
            r[i + j] += a[i] * b[j];
    return r;
}

// Lagrange inversion: for f(w) = sum_{i>=1} f_i w^i, [v^m] f^{-1}(v) = (1/m) [w^{m-1}] (w / f(w))^m.
inline std::vector<Rational> lagrange_inverse(const std::vector<Rational>& f)
{
    const std::size_t n = f.size() - 1;
    std::vector<Rational> shifted(n + 1); // f(w)/w
    for (std::size_t i = 1; i <= n; ++i)
        shifted[i - 1] = f[i];
    std::vector<Rational> h = reciprocal1(shifted); // w/f(w)
    std::vector<Rational> out(n + 1);
    std::vector<Rational> power(n + 1);
    power[0] = 1;
    for (std::size_t m = 1; m <= n; ++m) {
        power = mul1(power, h);
        out[m] = power[m - 1] / Rational(static_cast<long>(m));
    }
    return out;
}

} // namespace oracle
