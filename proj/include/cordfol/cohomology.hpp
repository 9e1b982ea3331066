#pragma once

#include <algorithm>
#include <cstdlib>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cordfol/chart.hpp"
#include "cordfol/cord.hpp"
#include "cordfol/errors.hpp"
#include "cordfol/integrate.hpp"
#include "cordfol/linalg.hpp"

namespace cordfol {

// Twisted differential nabla_A W = dW + [A, W]; requires matching sources.
template <class S>
JetForm<S> nabla(const JetForm<S>& a, const JetForm<S>& w)
{
    if (a.degree() != 1)
        throw StructuralError("twisted differential needs a jet 1-form");
    if (!(a.source() == w.source()))
        throw DomainError("twisted differential: source of W differs from source of A");
    const int m = std::min(a.order(), w.order());
    JetForm<S> wt = truncate_to(w, m);
    JetForm<S> br = bracket(truncate_to(a, m), wt);
    return truncate_to(d_total(wt), br.order()) + br;
}

// Phi(W) = (DY)^{-1} (W o Y) for a gauge Y with Y * A = B, checked before use.
template <class S>
JetForm<S> phi_transport(const JetForm<S>& a, const JetForm<S>& b, const GaugeSection<S>& y, const JetForm<S>& w)
{
    if (!(w.source() == a.source()))
        throw DomainError("phi transport: source of W differs from source of A");
    JetForm<S> ya = gauge(y, a);
    const int m = std::min(ya.order(), b.order());
    if (!(truncate_to(ya, m) == truncate_to(b, m)))
        throw DomainError("phi transport: Y * A does not equal B");
    return pushforward(y, w);
}

// Bott differential on horizontal forms: d w + a ^ L_V w - L_V(a) ^ w.
inline ScalarForm bott_differential(const ScalarForm& a, const VectorField<ScalarField>& v, const ScalarForm& w)
{
    if (a.degree() != 1)
        throw StructuralError("Bott differential needs a 1-form a");
    if (!(contract(v, a) == ScalarForm::scalar(a.dim(), ScalarField(-1))))
        throw DomainError("Bott differential needs contract(V, a) = -1");
    if (w.degree() > 0 && !is_zero(contract(v, w)))
        throw DomainError("Bott differential is defined on horizontal forms (contract(V, w) = 0)");
    ScalarForm b = lie_derivative(v, a);
    return exterior_d(w) + wedge(a, lie_derivative(v, w)) - wedge(b, w);
}

// Real Fourier basis on a fully periodic chart: 1, cos(f.x), sin(f.x) with max|f_i| <= D and the
// first non-zero entry of f positive.
inline std::vector<ScalarField> fourier_basis(int n, int cutoff)
{
    std::vector<ScalarField> out{ScalarField(1)};
    std::vector<int> f(n, -cutoff);
    for (;;) {
        int lead = 0;
        for (int j = 0; j < n; ++j)
            if (f[j]) {
                lead = f[j];
                break;
            }
        if (lead > 0) {
            out.push_back(ScalarField::cos_of(f));
            out.push_back(ScalarField::sin_of(f));
        }
        int j = n - 1;
        while (j >= 0 && f[j] == cutoff)
            f[j--] = -cutoff;
        if (j < 0)
            break;
        ++f[j];
    }
    return out;
}

namespace detail {

struct TermIndex {
    std::map<std::pair<IndexSet, TermKey>, std::size_t> rows;
    std::size_t at(IndexSet m, const TermKey& k)
    {
        auto [it, fresh] = rows.emplace(std::make_pair(m, k), rows.size());
        return it->second;
    }
};

// Matrix whose columns are the coefficient vectors of the given forms.
inline RationalMatrix column_matrix(const std::vector<ScalarForm>& forms)
{
    TermIndex idx;
    std::vector<std::vector<std::pair<std::size_t, Rational>>> cols;
    for (auto& f : forms) {
        std::vector<std::pair<std::size_t, Rational>> col;
        for (auto& [m, c] : f.terms())
            for (auto& [k, v] : c.terms())
                col.push_back({idx.at(m, k), v});
        cols.push_back(std::move(col));
    }
    RationalMatrix mat(idx.rows.size(), std::vector<Rational>(forms.size(), Rational(0)));
    for (std::size_t j = 0; j < cols.size(); ++j)
        for (auto& [i, v] : cols[j])
            mat[i][j] = v;
    return mat;
}

inline ScalarForm combine(const std::vector<ScalarForm>& basis, const std::vector<Rational>& x, int n, int p)
{
    ScalarForm r(n, p);
    for (std::size_t i = 0; i < basis.size(); ++i)
        if (!x[i].is_zero())
            r = r + scale(ScalarField(x[i]), basis[i]);
    return r;
}

inline std::vector<ScalarForm> truncated_forms(int n, int p, int cutoff)
{
    std::vector<ScalarForm> out;
    auto modes = fourier_basis(n, cutoff);
    for (IndexSet s = 0; s < (IndexSet(1) << n); ++s)
        if (popcount(s) == p)
            for (auto& f : modes) {
                ScalarForm w(n, p);
                w.set(s, f);
                out.push_back(w);
            }
    return out;
}

inline void require_torus(const Chart& chart)
{
    if (!chart.fully_periodic())
        throw DomainError("Fourier truncation needs a fully periodic chart");
}

} // namespace detail

// dim ker d_{a,V} on degree-0 functions in the Fourier truncation with cutoff D.
inline std::size_t h0_dimension(const ScalarForm& a, const VectorField<ScalarField>& v, int cutoff, const Chart& chart)
{
    detail::require_torus(chart);
    const int n = chart.dim();
    std::vector<ScalarForm> images;
    for (auto& f : fourier_basis(n, cutoff))
        images.push_back(bott_differential(a, v, ScalarForm::scalar(n, f)));
    auto mat = detail::column_matrix(images);
    return images.size() - exact_rank(mat);
}

// Closed-form count for the slope foliation a = q dy - p dx: modes k (p, -q)/gcd with |k| max(p,q)/gcd <= D.
inline std::size_t slope_lattice_count(long p, long q, int cutoff)
{
    mpz_class g;
    mpz_class pz(p), qz(q);
    mpz_gcd(g.get_mpz_t(), pz.get_mpz_t(), qz.get_mpz_t());
    long mx = std::max(std::labs(p), std::labs(q));
    return 2 * static_cast<std::size_t>(cutoff * g.get_si() / mx) + 1;
}

// Ranks of the truncated Bott complex, for diagnostics only: horizontal dimension, rank of d,
// and the resulting truncated Betti numbers for every degree.
struct TruncatedBott {
    std::vector<std::size_t> horizontal_dim;
    std::vector<std::size_t> rank;
    std::vector<long> betti() const
    {
        std::vector<long> b;
        for (std::size_t p = 0; p < horizontal_dim.size(); ++p)
            b.push_back(static_cast<long>(horizontal_dim[p]) - static_cast<long>(rank[p]) -
                        (p ? static_cast<long>(rank[p - 1]) : 0L));
        return b;
    }
};

inline TruncatedBott truncated_bott_ranks(const ScalarForm& a, const VectorField<ScalarField>& v, int cutoff,
                                          const Chart& chart)
{
    detail::require_torus(chart);
    const int n = chart.dim();
    TruncatedBott out;
    for (int p = 0; p <= n; ++p) {
        auto forms = detail::truncated_forms(n, p, cutoff);
        std::vector<ScalarForm> horizontal;
        if (p == 0) {
            horizontal = forms;
        } else {
            std::vector<ScalarForm> contracted;
            for (auto& f : forms)
                contracted.push_back(contract(v, f));
            auto mat = detail::column_matrix(contracted);
            for (auto& x : null_space(mat, forms.size()))
                horizontal.push_back(detail::combine(forms, x, n, p));
        }
        std::vector<ScalarForm> images;
        for (auto& h : horizontal)
            images.push_back(bott_differential(a, v, h));
        out.horizontal_dim.push_back(horizontal.size());
        out.rank.push_back(exact_rank(detail::column_matrix(images)));
    }
    return out;
}

// Integral over T^3 of a1 ^ da1, where a1 is the linear coefficient of a codimension-one cord.
inline TwoPiMultiple gv_integral(const Cord& a, const Chart& chart)
{
    if (chart.dim() != 3 || !chart.fully_periodic())
        throw DomainError("Godbillon-Vey integral needs the 3-torus chart");
    if (a.codim() != 1 || a.degree() != 1 || a.dim() != 3)
        throw StructuralError("Godbillon-Vey integral needs a codimension-one cord on the chart");
    if (a.order() < 1)
        throw StructuralError("Godbillon-Vey integral needs the linear coefficient");
    ScalarForm a1 = a.coefficient(0, MultiIndex{1});
    return integrate_torus(wedge(a1, exterior_d(a1)), chart);
}

} // namespace cordfol
