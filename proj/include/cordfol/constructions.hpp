#pragma once

#include <string>
#include <vector>

#include "cordfol/chart.hpp"
#include "cordfol/cord.hpp"
#include "cordfol/errors.hpp"
#include "cordfol/rational_field.hpp"

namespace cordfol {

namespace detail {

// Sign of a chart function: exact when constant, otherwise from the active sampling grid.
inline int certified_sign(const ScalarField& f, bool& sampled)
{
    if (f.is_constant())
        return f.constant_term().sign();
    sampled = true;
    return sampled_sign(f);
}
inline int certified_sign(const RationalField& f, bool& sampled)
{
    if (!f.is_polynomial())
        sampled = true;
    return certified_sign(f.numerator(), sampled);
}

template <class S>
void require_normalized(const Form<S>& a0, const VectorField<S>& v)
{
    if (a0.degree() != 1)
        throw StructuralError("zeroth coefficient must be a 1-form");
    Form<S> c = contract(v, a0);
    if (!(c == Form<S>::scalar(a0.dim(), from_rational<S>(Rational(-1)))))
        throw DomainError("normalization violated: contraction of the zeroth coefficient with V is " + c.str() +
                          ", expected -1");
}

} // namespace detail

// A = e^{tL} a0 with L the Lie derivative along V: a_n = L(a_{n-1}) / n, source 0.
template <class S>
JetForm<S> gv_cord(const Form<S>& a0, const VectorField<S>& v, int order)
{
    detail::require_normalized(a0, v);
    std::vector<Form<S>> coeffs{a0};
    for (int n = 1; n <= order; ++n)
        coeffs.push_back(scale(from_rational<S>(Rational(1, n)), lie_derivative(v, coeffs.back())));
    return jetform_from_coefficients(a0.dim(), 1, coeffs);
}

// Cord B with b0 = x0 a0 solving L(B) + [B, X] + dX = 0 order by order; then contract(V, B) + X = 0.
// X is a codimension-one jet function with source 0 and x0 < 0.
template <class S>
JetForm<S> mc_cord(const Form<S>& a0, const VectorField<S>& v, const JetForm<S>& x, int order)
{
    detail::require_normalized(a0, v);
    if (x.degree() != 0 || x.codim() != 1)
        throw StructuralError("X must be a codimension-one jet function");
    if (x.order() < order)
        throw StructuralError("X is known to order " + std::to_string(x.order()) + ", need " + std::to_string(order));
    std::vector<S> xs = function_coefficients(x);
    bool sampled = false;
    if (detail::certified_sign(xs[0], sampled) >= 0)
        throw DomainError("x0 is not certified negative");
    const int n_dim = a0.dim();
    auto xform = [&](int i) { return Form<S>::scalar(n_dim, xs[i]); };
    std::vector<Form<S>> b{scale(xs[0], a0)};
    for (int n = 0; n < order; ++n) {
        Form<S> acc = lie_derivative(v, b[n]) + exterior_d(xform(n));
        for (int i = 0; i <= n; ++i) {
            const int j = n - i;
            acc = acc + scale(from_rational<S>(Rational(j + 1)) * xs[j + 1], b[i]);
            if (i >= 1)
                acc = acc - scale(from_rational<S>(Rational(j + 1)) * xs[i], b[j + 1]);
        }
        b.push_back(scale(reciprocal(from_rational<S>(Rational(n + 1)) * xs[0]), acc));
    }
    return jetform_from_coefficients(n_dim, 1, b);
}

namespace detail {

template <class S>
S vector_apply(const VectorField<S>& v, const S& f)
{
    S r{};
    for (int j = 0; j < v.dim(); ++j)
        if (!is_zero(v.comps[j]))
            r = r + v.comps[j] * partial(f, j);
    return r;
}

// Solves X Y' = C o Y - V(Y) for Y with Y(0) = 0, where C = contract(V, A).
template <class S>
GaugeSection<S> solve_fiber_equation(const JetForm<S>& a, const VectorField<S>& v, const std::vector<S>& xs)
{
    const int order = a.order();
    if (a.codim() != 1)
        throw StructuralError("fiber solver is implemented in codimension one");
    for (auto& s : a.source())
        if (!is_zero(s))
            throw StructuralError("fiber solver needs a cord with source 0");
    if (static_cast<int>(xs.size()) < order)
        throw StructuralError("X is known to order " + std::to_string(xs.size() - 1) + ", need " +
                              std::to_string(order - 1));
    JetForm<S> c = contract(v, a);
    const Series<S>* cs = c.component(0).find(0);
    Series<S> cser = cs ? *cs : Series<S>(1, order);
    Series<S> y(1, order);
    std::vector<S> ys(order + 1);
    for (int n = 0; n < order; ++n) {
        S cy = substitute(cser, SeriesVec<S>{y}).coeff(MultiIndex{n});
        S rhs = cy - vector_apply(v, ys[n]);
        for (int i = 1; i <= n; ++i)
            rhs = rhs - from_rational<S>(Rational(n + 1 - i)) * xs[i] * ys[n + 1 - i];
        ys[n + 1] = rhs * reciprocal(from_rational<S>(Rational(n + 1)) * xs[0]);
        y.set(MultiIndex{n + 1}, ys[n + 1]);
    }
    return GaugeSection<S>(a.dim(), a.source(), SeriesVec<S>{y});
}

} // namespace detail

// Y fixing 0 with contract(V, Y * A) = X; needs x0 < 0 and the normalization of a0 against V.
template <class S>
GaugeSection<S> fiber_solve(const JetForm<S>& a, const VectorField<S>& v, const JetForm<S>& x)
{
    if (a.degree() != 1)
        throw StructuralError("fiber solver needs a cord");
    if (x.degree() != 0 || x.codim() != 1)
        throw StructuralError("X must be a codimension-one jet function");
    detail::require_normalized(a.coefficient(0, MultiIndex(1)), v);
    std::vector<S> xs = function_coefficients(x);
    bool sampled = false;
    if (detail::certified_sign(xs[0], sampled) >= 0)
        throw DomainError("x0 is not certified negative");
    return detail::solve_fiber_equation(a, v, xs);
}

// Unique Y fixing 0 with Y * A = A; returns the identity for non-impotent cords.
template <class S>
GaugeSection<S> stabilizer_solve(const JetForm<S>& a, const VectorField<S>& v)
{
    if (a.degree() != 1)
        throw StructuralError("stabilizer solver needs a cord");
    if (is_impotent(a))
        throw DomainError("impotent cord: every constant arrow fixing 0 stabilizes it");
    JetForm<S> c = contract(v, a);
    std::vector<S> cs = function_coefficients(c);
    bool sampled = false;
    if (detail::certified_sign(cs[0], sampled) == 0)
        throw DomainError("contraction of the zeroth coefficient with V is not nowhere zero");
    GaugeSection<S> y = detail::solve_fiber_equation(a, v, cs);
    if (!(gauge(y, a) == a.truncate(a.order() - 1)))
        throw NumericError("stabilizer solution does not fix the cord");
    return y;
}

using detail::require_normalized;

// Affine map between charts: x_target = W x_source + offset.
struct AffineMap {
    std::vector<std::vector<Rational>> w; // rows indexed by target coordinate
    std::vector<Rational> offset;

    static AffineMap identity(int n)
    {
        AffineMap m;
        m.w.assign(n, std::vector<Rational>(n));
        for (int i = 0; i < n; ++i)
            m.w[i][i] = Rational(1);
        m.offset.assign(n, Rational(0));
        return m;
    }

    // Periodic targets take integer combinations of periodic sources with zero offset;
    // real targets take real sources only.
    void validate(const Chart& src, const Chart& tgt) const
    {
        if (static_cast<int>(w.size()) != tgt.dim() || static_cast<int>(offset.size()) != tgt.dim())
            throw StructuralError("affine map rows do not match target chart");
        for (int j = 0; j < tgt.dim(); ++j) {
            if (static_cast<int>(w[j].size()) != src.dim())
                throw StructuralError("affine map columns do not match source chart");
            const bool pj = tgt[j].periodic;
            if (pj && !offset[j].is_zero())
                throw DomainError("unsupported map: offset into periodic coordinate " + tgt[j].name);
            for (int i = 0; i < src.dim(); ++i) {
                if (w[j][i].is_zero())
                    continue;
                const bool pi = src[i].periodic;
                if (pj && (!pi || !w[j][i].is_integer()))
                    throw DomainError("unsupported map: periodic coordinate " + tgt[j].name +
                                      " must be an integer combination of periodic coordinates");
                if (!pj && pi)
                    throw DomainError("unsupported map: real coordinate " + tgt[j].name +
                                      " cannot depend on a periodic coordinate");
            }
        }
    }
};

inline ScalarField pullback(const ScalarField& f, const AffineMap& m)
{
    const int tdim = static_cast<int>(m.w.size());
    const int sdim = tdim ? static_cast<int>(m.w[0].size()) : 0;
    std::vector<ScalarField> image(tdim);
    for (int j = 0; j < tdim; ++j) {
        ScalarField e(m.offset[j]);
        for (int i = 0; i < sdim; ++i)
            if (!m.w[j][i].is_zero())
                e = e + ScalarField::coordinate(i).scaled(m.w[j][i]);
        image[j] = e;
    }
    ScalarField r;
    for (auto& [key, c] : f.terms()) {
        ScalarField term(c);
        for (int j = 0; j < tdim; ++j)
            for (int e = 0; e < key.exp(j); ++e)
                term = term * image[j];
        if (key.kind() != Harmonic::one) {
            std::vector<int> g(sdim, 0);
            for (int i = 0; i < sdim; ++i) {
                Rational gi(0);
                for (int j = 0; j < tdim; ++j)
                    gi += Rational(key.freq(j)) * m.w[j][i];
                if (!gi.is_integer())
                    throw DomainError("unsupported map: non-integer frequency after pullback");
                g[i] = static_cast<int>(gi.to_long());
            }
            term = term * ScalarField::harmonic(key.kind(), g);
        }
        r = r + term;
    }
    return r;
}

template <class R, class F>
Form<R> pullback_form(const Form<R>& f, const AffineMap& m, F&& coeff)
{
    const int sdim = m.w.empty() ? 0 : static_cast<int>(m.w[0].size());
    std::vector<Form<ScalarField>> dx;
    for (auto& row : m.w) {
        Form<ScalarField> d(sdim, 1);
        for (int i = 0; i < sdim; ++i)
            if (!row[i].is_zero())
                d.set(IndexSet(1) << i, ScalarField(row[i]));
        dx.push_back(d);
    }
    Form<R> out(sdim, f.degree());
    for (auto& [mask, v] : f.terms()) {
        Form<ScalarField> basis = Form<ScalarField>::scalar(sdim, ScalarField(1));
        for (int j = 0; j < static_cast<int>(m.w.size()); ++j)
            if (mask & (IndexSet(1) << j))
                basis = wedge(basis, dx[j]);
        R pv = coeff(v);
        for (auto& [bm, bc] : basis.terms())
            out.add_to(bm, times(bc, pv));
    }
    return out;
}

inline ScalarForm pullback(const ScalarForm& f, const AffineMap& m)
{
    return pullback_form(f, m, [&](const ScalarField& c) { return pullback(c, m); });
}

inline Cord pullback_cord(const Cord& a, const AffineMap& m, const Chart& src, const Chart& tgt)
{
    m.validate(src, tgt);
    if (a.dim() != tgt.dim())
        throw StructuralError("cord lives on a different chart than the map target");
    std::vector<ScalarField> source;
    for (auto& s : a.source())
        source.push_back(pullback(s, m));
    Cord r(a.codim(), a.order(), src.dim(), a.degree(), source);
    for (int i = 0; i < a.codim(); ++i)
        r.set_component(i, pullback_form(a.component(i), m, [&](const Series<ScalarField>& s) {
                            return s.map_coeffs([&](const ScalarField& c) { return pullback(c, m); });
                        }));
    return r;
}

// Order-m flatness residuals for a codimension-one cord with source 0:
// corrected: da_m + (m+1) a_{m+1} ^ ds - 1/2 sum_{p+q=m+1} (p-q) a_p ^ a_q  (ds = 0 here),
// as printed: the same with the factor 1/2 dropped.
struct RecursionResidual {
    int m;
    ScalarForm corrected;
    ScalarForm as_printed;
};

inline std::vector<RecursionResidual> flatness_recursion_residuals(const Cord& a)
{
    if (a.codim() != 1 || a.degree() != 1)
        throw StructuralError("recursion cross-check is for codimension-one cords");
    for (auto& s : a.source())
        if (!is_zero(s))
            throw StructuralError("recursion cross-check needs source 0");
    std::vector<ScalarForm> c;
    for (int n = 0; n <= a.order(); ++n)
        c.push_back(a.coefficient(0, MultiIndex{n}));
    std::vector<RecursionResidual> out;
    for (int m = 0; m < a.order(); ++m) {
        ScalarForm sym(a.dim(), 2);
        for (int p = 0; p <= m + 1; ++p) {
            int q = m + 1 - p;
            if (p != q)
                sym = sym + scale(ScalarField(Rational(p - q)), wedge(c[p], c[q]));
        }
        ScalarForm lhs = exterior_d(c[m]);
        out.push_back({m, lhs - scale(ScalarField(Rational(1, 2)), sym), lhs - sym});
    }
    return out;
}

// Formal trivialization of A = sum a_n t^n ds on a line, a_0 a non-zero constant: Y with Y * 0 = A,
// y_0 = -a_0 s and (n+1) a_0 y_{n+1} = -y_n' - sum_{m<n} (m+1) y_{m+1} a_{n-m}. Y has one order more than A.
inline GaugeSection<ScalarField> local_trivialization(const Cord& a, const Chart& chart)
{
    if (chart.dim() != 1 || chart[0].periodic)
        throw DomainError("local trivialization is implemented on a non-periodic line");
    if (a.codim() != 1 || a.degree() != 1 || a.dim() != 1)
        throw StructuralError("local trivialization needs a codimension-one cord on the line");
    if (!is_zero(a.source()[0]))
        throw StructuralError("local trivialization needs source 0");
    const int order = a.order();
    std::vector<ScalarField> alpha;
    for (int n = 0; n <= order; ++n) {
        ScalarForm f = a.coefficient(0, MultiIndex{n});
        const ScalarField* c = f.find(1);
        alpha.push_back(c ? *c : ScalarField());
    }
    if (!alpha[0].is_constant() || alpha[0].is_zero())
        throw DomainError("local trivialization needs a non-zero constant zeroth coefficient");
    ScalarField inv = reciprocal(alpha[0]);
    std::vector<ScalarField> y{-ScalarField::coordinate(0) * alpha[0]};
    for (int n = 0; n <= order; ++n) {
        ScalarField rhs = -y[n].partial(0);
        for (int m = 0; m < n; ++m)
            rhs -= (y[m + 1] * alpha[n - m]).scaled(Rational(m + 1));
        y.push_back((rhs * inv).scaled(Rational(1, n + 1)));
    }
    Series<ScalarField> s(1, order + 1);
    for (int n = 0; n <= order + 1; ++n)
        s.set(MultiIndex{n}, y[n]);
    GaugeSection<ScalarField> out(1, {ScalarField()}, {s});
    Cord zero(1, order + 1, 1, 1, {y[0]});
    if (!(gauge(out, zero) == a))
        throw NumericError("local trivialization does not reproduce the cord");
    return out;
}

// Flat cord on the chart extended by s in [0, 1], gauge-equivalent to the s-constant extension of A
// through Z = t + h(s) (Y - t) with h = 3s^2 - 2s^3.
struct Concord {
    Chart chart; // extended chart, s is the last coordinate
    RationalCord cord;

    int s_index() const { return chart.dim() - 1; }

    RationalCord restrict_to(const Rational& s) const;
    // A = A_s + B_s ds.
    RationalCord horizontal() const;
    RationalCord ds_part() const;
};

namespace detail {

template <class R>
Form<R> widen(const Form<R>& f, int dim)
{
    Form<R> r(dim, f.degree());
    for (auto& [m, v] : f.terms())
        r.set(m, v);
    return r;
}

inline RationalCord restrict_coordinate(const RationalCord& w, int j, const Rational& value, int new_dim)
{
    const IndexSet bit = IndexSet(1) << j;
    auto sub = [&](const RationalField& f) { return f.substitute_coordinate(j, value); };
    std::vector<RationalField> source;
    for (auto& s : w.source())
        source.push_back(sub(s));
    RationalCord r(w.codim(), w.order(), new_dim, w.degree(), source);
    for (int i = 0; i < w.codim(); ++i) {
        Form<Series<RationalField>> c(new_dim, w.degree());
        for (auto& [m, s] : w.component(i).terms())
            if (!(m & bit))
                c.set(m, s.map_coeffs(sub));
        r.set_component(i, c);
    }
    return r;
}

} // namespace detail

inline RationalCord Concord::restrict_to(const Rational& s) const
{
    return detail::restrict_coordinate(cord, s_index(), s, s_index());
}

inline RationalCord Concord::horizontal() const
{
    const IndexSet bit = IndexSet(1) << s_index();
    RationalCord r(cord.codim(), cord.order(), cord.dim(), 1, cord.source());
    for (int i = 0; i < cord.codim(); ++i) {
        Form<Series<RationalField>> c(cord.dim(), 1);
        for (auto& [m, v] : cord.component(i).terms())
            if (!(m & bit))
                c.set(m, v);
        r.set_component(i, c);
    }
    return r;
}

inline RationalCord Concord::ds_part() const
{
    const IndexSet bit = IndexSet(1) << s_index();
    RationalCord r(cord.codim(), cord.order(), cord.dim(), 0, cord.source());
    for (int i = 0; i < cord.codim(); ++i) {
        const Series<RationalField>* v = cord.component(i).find(bit);
        if (v)
            r.set_component(i, Form<Series<RationalField>>::scalar(cord.dim(), *v));
    }
    return r;
}

inline RationalField to_rational_field(const ScalarField& f) { return RationalField(f); }

inline RationalCord to_rational_cord(const Cord& a)
{
    return a.convert<RationalField>([](const ScalarField& f) { return RationalField(f); });
}

inline GaugeSection<RationalField> to_rational_section(const GaugeSection<ScalarField>& y)
{
    return y.convert<RationalField>([](const ScalarField& f) { return RationalField(f); });
}

inline Concord concord_from_gauge(const Cord& a, const GaugeSection<ScalarField>& y, const Chart& chart)
{
    if (a.dim() != chart.dim() || y.dim() != chart.dim())
        throw StructuralError("concord: cord, gauge and chart dimensions differ");
    if (!(y.target() == a.source()))
        throw StructuralError("concord: gauge target is not the cord source");
    if (!(y.source() == y.target()))
        throw StructuralError("concord: interpolation needs a gauge whose source equals its target");
    const int n = chart.dim();
    Concord out{chart.extended({"s", false, 0.0, 1.0}), {}};
    SamplingScope scope(out.chart);

    ScalarField s = ScalarField::coordinate(n);
    ScalarField h = s * s * (ScalarField(3) - s.scaled(2));
    const int k = a.codim(), order = a.order();
    SeriesVec<RationalField> z;
    for (int i = 0; i < k; ++i) {
        Series<ScalarField> u = Series<ScalarField>::variable(k, order, i);
        Series<ScalarField> zi = u + (y.components()[i].without_constant() - u).scaled(h);
        zi.set(MultiIndex(k), y.source()[i]);
        z.push_back(zi.map_coeffs([](const ScalarField& f) { return RationalField(f); }));
    }
    std::vector<RationalField> src;
    for (auto& v : y.source())
        src.push_back(RationalField(v));
    GaugeSection<RationalField> zs(n + 1, src, z);

    RationalCord ext(k, order, n + 1, 1, src);
    for (int i = 0; i < k; ++i)
        ext.set_component(i, detail::widen(to_rational_cord(a).component(i), n + 1));
    out.cord = gauge(zs, ext);
    return out;
}

// Residual of d/ds A_s - (d B_s + [A_s, B_s]) with ds components dropped, at one order below the concord.
inline RationalCord concord_split_residual(const Concord& c)
{
    RationalCord as = c.horizontal();
    RationalCord bs = c.ds_part();
    const int j = c.s_index();
    RationalCord lhs(as.codim(), as.order(), as.dim(), 1, as.source());
    for (int i = 0; i < as.codim(); ++i)
        lhs.set_component(i, as.component(i).map_coeffs([&](const Series<RationalField>& s) {
            return s.map_coeffs([&](const RationalField& f) { return f.partial(j); });
        }));
    RationalCord br = bracket(as, bs);
    RationalCord rhs = truncate_to(d_total(bs), br.order()) + br;
    Concord tmp{c.chart, rhs};
    return truncate_to(lhs, br.order()) - tmp.horizontal();
}

} // namespace cordfol
