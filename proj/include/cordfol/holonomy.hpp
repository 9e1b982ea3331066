#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cordfol/cord.hpp"
#include "cordfol/errors.hpp"
#include "cordfol/integrate.hpp"

namespace cordfol {

// Holonomy jet: an arrow fixing 0, with floating coefficients and a per-coefficient error estimate.
struct HolonomyJet {
    SeriesVec<double> value;
    SeriesVec<double> error;

    static HolonomyJet identity(int k, int order)
    {
        HolonomyJet h;
        for (int i = 0; i < k; ++i) {
            h.value.push_back(Series<double>::variable(k, order, i));
            h.error.push_back(Series<double>(k, order));
        }
        return h;
    }

    int codim() const { return static_cast<int>(value.size()); }
    int order() const { return value.empty() ? 0 : value[0].order(); }

    double coeff(int i, const MultiIndex& m) const { return value.at(i).coeff(m); }
    double coeff_error(int i, const MultiIndex& m) const { return error.at(i).coeff(m); }
    double max_error() const
    {
        double e = 0;
        for (auto& s : error)
            for (auto& [m, v] : s.terms())
                e = std::max(e, std::abs(v));
        return e;
    }

    HolonomyJet truncate(int order) const
    {
        HolonomyJet h;
        for (int i = 0; i < codim(); ++i) {
            h.value.push_back(value[i].truncate(order));
            h.error.push_back(error[i].truncate(order));
        }
        return h;
    }
};

// outer after inner. Error estimates are propagated to first order only through the value.
inline HolonomyJet compose(const HolonomyJet& inner, const HolonomyJet& outer)
{
    HolonomyJet h;
    h.value = substitute(outer.value, inner.value);
    for (int i = 0; i < inner.codim(); ++i) {
        Series<double> e(inner.codim(), inner.order());
        for (auto& [m, v] : inner.error[i].terms())
            e.set(m, std::abs(v));
        for (auto& [m, v] : outer.error[i].terms())
            e.add_to(m, std::abs(v));
        h.error.push_back(e);
    }
    return h;
}

inline HolonomyJet invert(const HolonomyJet& h)
{
    HolonomyJet r;
    r.value = invert_series_map(h.value);
    r.error = h.error;
    return r;
}

// Largest coefficient-wise difference, relative to max(1, |coefficient|).
inline double relative_distance(const SeriesVec<double>& a, const SeriesVec<double>& b)
{
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (auto& m : multi_indices(a[i].codim(), std::min(a[i].order(), b[i].order()))) {
            double x = a[i].coeff(m), y = b[i].coeff(m);
            d = std::max(d, std::abs(x - y) / std::max(1.0, std::max(std::abs(x), std::abs(y))));
        }
    return d;
}

struct StepControl {
    double step = 1e-3;
    double tolerance = 1e-6; // on the Richardson estimate, relative to max(1, |c|)
};

class ToleranceNotMet : public NumericError {
public:
    ToleranceNotMet(double achieved, double wanted)
        : NumericError("tolerance not met: estimate " + std::to_string(achieved) + " exceeds " +
                       std::to_string(wanted)),
          achieved_(achieved)
    {
    }
    double achieved() const { return achieved_; }

private:
    double achieved_;
};

namespace detail {

// Right-hand side F(t, u) = sum_j A_j(t, gamma(u)) gamma_j'(u) of the leaf equation.
class TransportField {
public:
    TransportField(const Cord& a, const Chart& chart, const Loop& loop) : a_(a), loop_(loop)
    {
        if (a.dim() != chart.dim())
            throw StructuralError("cord and chart dimensions differ");
        loop.validate(chart);
        if (!is_impotent(a))
            throw DomainError("holonomy transport needs an impotent cord");
        for (int i = 0; i < a.codim(); ++i)
            for (auto& [mask, s] : a.component(i).terms()) {
                int j = std::countr_zero(mask);
                for (auto& [m, f] : s.terms())
                    entries_.push_back({i, j, m, f});
            }
    }

    SeriesVec<double> at(double u) const
    {
        auto x = loop_.point(u);
        auto v = loop_.velocity(u);
        x.resize(kMaxDim, 0.0);
        SeriesVec<double> out(a_.codim(), Series<double>(a_.codim(), a_.order()));
        for (auto& e : entries_)
            if (v[e.j] != 0.0)
                out[e.i].add_to(e.m, e.f.evaluate(x) * v[e.j]);
        return out;
    }

private:
    struct Entry {
        int i, j;
        MultiIndex m;
        ScalarField f;
    };
    const Cord& a_;
    Loop loop_;
    std::vector<Entry> entries_;
};

inline SeriesVec<double> axpy(const SeriesVec<double>& y, double h, const SeriesVec<double>& k)
{
    SeriesVec<double> r = y;
    for (std::size_t i = 0; i < y.size(); ++i)
        r[i] = r[i] + k[i].scaled(h);
    return r;
}

// Fixed-step RK4 for dc/du = F(c(u), u) starting from c(0) = start.
inline SeriesVec<double> rk4(const TransportField& f, SeriesVec<double> c, int steps)
{
    const double h = 1.0 / steps;
    auto rhs = [&](const SeriesVec<double>& y, double u) { return substitute(f.at(u), y); };
    for (int n = 0; n < steps; ++n) {
        double u = n * h;
        auto k1 = rhs(c, u);
        auto k2 = rhs(axpy(c, h / 2, k1), u + h / 2);
        auto k3 = rhs(axpy(c, h / 2, k2), u + h / 2);
        auto k4 = rhs(axpy(c, h, k3), u + h);
        for (std::size_t i = 0; i < c.size(); ++i)
            c[i] = c[i] + (k1[i] + k2[i].scaled(2) + k3[i].scaled(2) + k4[i]).scaled(h / 6);
    }
    return c;
}

inline int steps_for(double step)
{
    if (!(step > 0) || step > 1)
        throw DomainError("step must lie in (0, 1]");
    return std::max(1, static_cast<int>(std::lround(1.0 / step)));
}

} // namespace detail

// Plain RK4 transport of `start` along the loop with the given number of steps.
inline SeriesVec<double> transport_rk4(const Cord& a, const Chart& chart, const Loop& loop, int steps,
                                       const SeriesVec<double>& start)
{
    detail::TransportField f(a, chart, loop);
    return detail::rk4(f, start, steps);
}

// Transport of the jet `start` along the loop: RK4 at steps h and h/2 combined by Richardson
// extrapolation (16 y_{h/2} - y_h) / 15, with |y_{h/2} - y_h| / 15 as error estimate.
inline HolonomyJet transport_from(const Cord& a, const Chart& chart, const Loop& loop, const HolonomyJet& start,
                                  const StepControl& ctl = {})
{
    detail::TransportField f(a, chart, loop);
    const int steps = detail::steps_for(ctl.step);
    auto coarse = detail::rk4(f, start.value, steps);
    auto fine = detail::rk4(f, start.value, 2 * steps);
    HolonomyJet out;
    double worst = 0;
    for (int i = 0; i < start.codim(); ++i) {
        Series<double> v(a.codim(), a.order()), e(a.codim(), a.order());
        for (auto& m : multi_indices(a.codim(), a.order())) {
            double cf = coarse[i].coeff(m), ff = fine[i].coeff(m);
            double val = (16 * ff - cf) / 15;
            double err = std::abs(ff - cf) / 15 + std::abs(start.error[i].coeff(m));
            v.set(m, val);
            e.set(m, err);
            worst = std::max(worst, err / std::max(1.0, std::abs(val)));
        }
        out.value.push_back(v);
        out.error.push_back(e);
    }
    if (worst > ctl.tolerance)
        throw ToleranceNotMet(worst, ctl.tolerance);
    return out;
}

inline HolonomyJet transport(const Cord& a, const Chart& chart, const Loop& loop, const StepControl& ctl = {})
{
    return transport_from(a, chart, loop, HolonomyJet::identity(a.codim(), a.order()), ctl);
}

// Word letters: generator index and exponent +1 / -1.
struct Letter {
    int generator;
    int exponent;
};
using Word = std::vector<Letter>;

namespace detail {

inline const Loop& letter_loop(const std::vector<Loop>& generators, const Letter& l)
{
    if (l.generator < 0 || l.generator >= static_cast<int>(generators.size()))
        throw StructuralError("word letter refers to generator " + std::to_string(l.generator));
    if (l.exponent != 1 && l.exponent != -1)
        throw StructuralError("word exponents must be +1 or -1");
    return generators[l.generator];
}

inline void require_common_base(const std::vector<Loop>& generators)
{
    for (auto& g : generators)
        if (g.base != generators.at(0).base)
            throw DomainError("generator loops do not share a basepoint");
}

} // namespace detail

// Monodromy of a word: each letter is transported from the identity and the jets are composed
// so that the word g1 g2 gives phi(g2) o phi(g1). Inverse letters use the reversed loop.
inline HolonomyJet monodromy_word(const Cord& a, const Chart& chart, const std::vector<Loop>& generators,
                                  const Word& w, const StepControl& ctl = {})
{
    detail::require_common_base(generators);
    HolonomyJet h = HolonomyJet::identity(a.codim(), a.order());
    for (auto& l : w) {
        const Loop& g = detail::letter_loop(generators, l);
        h = compose(h, transport(a, chart, l.exponent > 0 ? g : g.reversed(), ctl));
    }
    return h;
}

// Same word, transported in one pass along the concatenated path.
inline HolonomyJet transport_along_word(const Cord& a, const Chart& chart, const std::vector<Loop>& generators,
                                        const Word& w, const StepControl& ctl = {})
{
    detail::require_common_base(generators);
    HolonomyJet h = HolonomyJet::identity(a.codim(), a.order());
    for (auto& l : w) {
        const Loop& g = detail::letter_loop(generators, l);
        h = transport_from(a, chart, l.exponent > 0 ? g : g.reversed(), h, ctl);
    }
    return h;
}

// Value of a gauge section at a point as a floating arrow (the target must vanish there).
inline SeriesVec<double> evaluate_section(const GaugeSection<ScalarField>& y, std::vector<double> x)
{
    x.resize(kMaxDim, 0.0);
    SeriesVec<double> out;
    for (auto& s : y.components()) {
        Series<double> v(s.codim(), s.order());
        for (auto& [m, f] : s.terms())
            v.set(m, f.evaluate(x));
        if (v.constant_term() != 0.0)
            throw DomainError("gauge section does not fix 0 at the basepoint");
        out.push_back(v);
    }
    return out;
}

struct ConjugationReport {
    double residual_inner_first; // phi_B vs Y^{-1} o phi_A o Y
    double residual_outer_first; // phi_B vs Y o phi_A o Y^{-1}
    std::string orientation() const
    {
        return residual_inner_first <= residual_outer_first ? "Y^-1 . phi . Y" : "Y . phi . Y^-1";
    }
    double best() const { return std::min(residual_inner_first, residual_outer_first); }
};

inline ConjugationReport gauge_conjugation(const HolonomyJet& phi_a, const HolonomyJet& phi_b,
                                           const SeriesVec<double>& y)
{
    const int m = phi_b.order();
    SeriesVec<double> yt, phi;
    for (auto& s : y)
        yt.push_back(s.truncate(m));
    for (auto& s : phi_a.value)
        phi.push_back(s.truncate(m));
    auto yinv = invert_series_map(yt);
    // Y^{-1} o phi o Y: apply Y first.
    auto a1 = substitute(yinv, substitute(phi, yt));
    auto a2 = substitute(yt, substitute(phi, yinv));
    return {relative_distance(phi_b.value, a1), relative_distance(phi_b.value, a2)};
}

struct FirstOrderReport {
    double transported;
    double predicted; // exp of the path integral of the linear coefficient form
    std::optional<TwoPiMultiple> exact_integral;
    double relative_error() const { return std::abs(transported - predicted) / std::abs(predicted); }
};

// Compares the transported linear coefficient with exp(integral of a_1 along the loop), codimension one.
inline FirstOrderReport first_order_check(const Cord& a, const Chart& chart, const Loop& loop,
                                          const StepControl& ctl = {})
{
    if (a.codim() != 1)
        throw StructuralError("first-order check is implemented in codimension one");
    if (!is_impotent(a))
        throw DomainError("first-order check needs an impotent cord");
    HolonomyJet h = transport(a.truncate(std::min(a.order(), 1)), chart, loop, ctl);
    PathIntegral p = integrate_path(a.coefficient(0, MultiIndex{1}), chart, loop);
    double integral = p.exact ? p.exact->value() : p.numeric.value;
    return {h.coeff(0, MultiIndex{1}), std::exp(integral), p.exact};
}

} // namespace cordfol
