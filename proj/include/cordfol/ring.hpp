#pragma once

#include <cmath>
#include <cstdio>
#include <type_traits>
#include <string>
#include <vector>

#include "cordfol/errors.hpp"
#include "cordfol/rational.hpp"

// Scalar hooks shared by the coefficient rings. Every ring S used as a series coefficient provides
// S{} == 0, S(Rational), + - *, is_zero, reciprocal, partial (coordinate derivative), evaluate, to_text.
namespace cordfol {

inline bool is_zero(const Rational& r) { return r.is_zero(); }
inline bool is_zero(double x) { return x == 0.0; }

inline Rational reciprocal(const Rational& r)
{
    if (r.is_zero())
        throw DomainError("reciprocal of zero");
    return Rational(1) / r;
}
inline double reciprocal(double x)
{
    if (x == 0.0)
        throw DomainError("reciprocal of zero");
    return 1.0 / x;
}

inline Rational partial(const Rational&, int) { return Rational(0); }
inline double partial(double, int) { return 0.0; }

inline double evaluate(const Rational& r, const std::vector<double>&) { return r.to_double(); }
inline double evaluate(double x, const std::vector<double>&) { return x; }

inline std::string to_text(const Rational& r) { return r.str(); }
inline std::string to_text(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

template <class S>
inline S from_rational(const Rational& r)
{
    if constexpr (std::is_same_v<S, double>)
        return r.to_double();
    else
        return S(r);
}

template <class R>
using Matrix = std::vector<std::vector<R>>;

template <class R>
Matrix<R> minor_of(const Matrix<R>& m, std::size_t row, std::size_t col)
{
    Matrix<R> out;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (i == row)
            continue;
        std::vector<R> r;
        for (std::size_t j = 0; j < m.size(); ++j)
            if (j != col)
                r.push_back(m[i][j]);
        out.push_back(std::move(r));
    }
    return out;
}

// Cofactor expansion along the first row; only needs ring operations.
template <class R>
R determinant(const Matrix<R>& m)
{
    const std::size_t n = m.size();
    if (n == 0)
        throw StructuralError("determinant of empty matrix");
    if (n == 1)
        return m[0][0];
    if (n == 2)
        return m[0][0] * m[1][1] - m[0][1] * m[1][0];
    R acc = m[0][0] * determinant(minor_of(m, 0, 0));
    for (std::size_t j = 1; j < n; ++j) {
        R term = m[0][j] * determinant(minor_of(m, 0, j));
        if (j % 2)
            acc = acc - term;
        else
            acc = acc + term;
    }
    return acc;
}

// Inverse through the adjugate; S must support reciprocal of the determinant.
template <class S>
Matrix<S> matrix_inverse(const Matrix<S>& m)
{
    const std::size_t n = m.size();
    S det = determinant(m);
    if (is_zero(det))
        throw DomainError("singular matrix");
    S inv = reciprocal(det);
    Matrix<S> out(n, std::vector<S>(n));
    if (n == 1) {
        out[0][0] = inv;
        return out;
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            S c = determinant(minor_of(m, j, i)) * inv;
            out[i][j] = ((i + j) % 2) ? S() - c : c;
        }
    return out;
}

template <class R>
Matrix<R> matmul(const Matrix<R>& a, const Matrix<R>& b)
{
    const std::size_t n = a.size(), m = b[0].size(), inner = b.size();
    Matrix<R> out(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            R acc = a[i][0] * b[0][j];
            for (std::size_t l = 1; l < inner; ++l)
                acc = acc + a[i][l] * b[l][j];
            out[i].push_back(std::move(acc));
        }
    return out;
}

} // namespace cordfol
