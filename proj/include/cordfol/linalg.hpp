#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "cordfol/rational.hpp"

namespace cordfol {

using RationalMatrix = std::vector<std::vector<Rational>>;

// Rank by fraction-free (Bareiss) elimination after clearing denominators row by row.
inline std::size_t exact_rank(const RationalMatrix& m)
{
    if (m.empty())
        return 0;
    const std::size_t rows = m.size(), cols = m[0].size();
    std::vector<std::vector<mpz_class>> a(rows, std::vector<mpz_class>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        mpz_class l = 1;
        for (auto& v : m[i])
            mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), v.den().get_mpz_t());
        for (std::size_t j = 0; j < cols; ++j)
            a[i][j] = m[i][j].num() * (l / m[i][j].den());
    }
    std::size_t rank = 0;
    mpz_class prev = 1;
    for (std::size_t c = 0; c < cols && rank < rows; ++c) {
        std::size_t piv = rank;
        while (piv < rows && a[piv][c] == 0)
            ++piv;
        if (piv == rows)
            continue;
        std::swap(a[piv], a[rank]);
        for (std::size_t i = rank + 1; i < rows; ++i) {
            for (std::size_t j = c + 1; j < cols; ++j) {
                mpz_class v = a[rank][c] * a[i][j] - a[i][c] * a[rank][j];
                mpz_divexact(a[i][j].get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
            }
            a[i][c] = 0;
        }
        prev = a[rank][c];
        ++rank;
    }
    return rank;
}

// Basis of the right null space {x : m x = 0}, by exact reduced row echelon form.
inline std::vector<std::vector<Rational>> null_space(const RationalMatrix& m, std::size_t cols)
{
    RationalMatrix a = m;
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < a.size(); ++c) {
        std::size_t piv = r;
        while (piv < a.size() && a[piv][c].is_zero())
            ++piv;
        if (piv == a.size())
            continue;
        std::swap(a[piv], a[r]);
        Rational inv = Rational(1) / a[r][c];
        for (auto& v : a[r])
            v *= inv;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (i != r && !a[i][c].is_zero()) {
                Rational f = a[i][c];
                for (std::size_t j = 0; j < cols; ++j)
                    a[i][j] -= f * a[r][j];
            }
        pivots.push_back(c);
        ++r;
    }
    std::vector<bool> is_pivot(cols, false);
    for (auto p : pivots)
        is_pivot[p] = true;
    std::vector<std::vector<Rational>> basis;
    for (std::size_t free = 0; free < cols; ++free) {
        if (is_pivot[free])
            continue;
        std::vector<Rational> x(cols, Rational(0));
        x[free] = Rational(1);
        for (std::size_t i = 0; i < pivots.size(); ++i)
            x[pivots[i]] = -a[i][free];
        basis.push_back(std::move(x));
    }
    return basis;
}

} // namespace cordfol
