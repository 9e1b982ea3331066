#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "cordfol/chart.hpp"
#include "cordfol/errors.hpp"
#include "cordfol/form.hpp"

namespace cordfol {

// coeff * (2 pi)^power
struct TwoPiMultiple {
    Rational coeff;
    int power = 0;

    double value() const { return coeff.to_double() * std::pow(2 * std::numbers::pi, power); }
    friend bool operator==(const TwoPiMultiple& a, const TwoPiMultiple& b)
    {
        return a.coeff == b.coeff && (a.coeff.is_zero() || a.power == b.power);
    }
};

struct Estimate {
    double value = 0;
    double abs_err = 0;
};

// Integral of a top-degree form over the standard torus [0, 2pi)^n of a fully periodic chart.
inline TwoPiMultiple integrate_torus(const ScalarForm& w, const Chart& chart)
{
    if (!chart.fully_periodic())
        throw StructuralError("torus integration needs a fully periodic chart");
    if (w.dim() != chart.dim() || w.degree() != chart.dim())
        throw StructuralError("torus integration needs a top-degree form on the chart");
    IndexSet top = chart.dim() == 32 ? ~IndexSet(0) : (IndexSet(1) << chart.dim()) - 1;
    const ScalarField* c = w.find(top);
    return TwoPiMultiple{c ? c->constant_term() : Rational(0), chart.dim()};
}

// Closed loop u in [0,1] -> chart:  x_j(u) = base_j + 2 pi w_j u + g_j(2 pi u),
// where w_j is an integer winding (zero for non-periodic coordinates) and g_j an optional
// trigonometric polynomial in one periodic variable.
struct Loop {
    std::vector<Rational> base;
    std::vector<int> winding;
    std::vector<ScalarField> wiggle; // empty or one entry per coordinate

    static Loop generator(const Chart& chart, int j)
    {
        Loop l;
        l.base.assign(chart.dim(), Rational(0));
        l.winding.assign(chart.dim(), 0);
        if (!chart[j].periodic)
            throw DomainError("generator loop along non-periodic coordinate '" + chart[j].name + "'");
        l.winding[j] = 1;
        return l;
    }

    Loop reversed() const
    {
        Loop r = *this;
        for (auto& w : r.winding)
            w = -w;
        for (auto& g : r.wiggle) {
            // g(2 pi (1 - u)) = g(-2 pi u) when g is 2 pi periodic
            ScalarField flipped;
            for (auto& [k, c] : g.terms()) {
                TermKey key = k;
                key.set_freq(0, -k.freq(0));
                flipped.add_term(key, c);
            }
            g = flipped;
        }
        return r;
    }

    bool affine() const
    {
        for (auto& g : wiggle)
            if (!g.is_zero())
                return false;
        return true;
    }

    void validate(const Chart& chart) const
    {
        if (static_cast<int>(base.size()) != chart.dim() || static_cast<int>(winding.size()) != chart.dim())
            throw StructuralError("loop dimension does not match chart");
        if (!wiggle.empty() && static_cast<int>(wiggle.size()) != chart.dim())
            throw StructuralError("loop perturbation needs one entry per coordinate");
        for (int j = 0; j < chart.dim(); ++j)
            if (!chart[j].periodic && winding[j] != 0)
                throw DomainError("loop winds around non-periodic coordinate '" + chart[j].name + "'");
    }

    std::vector<double> point(double u) const
    {
        std::vector<double> x(base.size());
        double phi = 2 * std::numbers::pi * u;
        for (std::size_t j = 0; j < base.size(); ++j) {
            x[j] = base[j].to_double() + 2 * std::numbers::pi * winding[j] * u;
            if (!wiggle.empty())
                x[j] += wiggle[j].evaluate({phi});
        }
        return x;
    }
    std::vector<double> velocity(double u) const
    {
        std::vector<double> v(base.size());
        double phi = 2 * std::numbers::pi * u;
        for (std::size_t j = 0; j < base.size(); ++j) {
            v[j] = 2 * std::numbers::pi * winding[j];
            if (!wiggle.empty())
                v[j] += 2 * std::numbers::pi * wiggle[j].partial(0).evaluate({phi});
        }
        return v;
    }
};

struct PathIntegral {
    std::optional<TwoPiMultiple> exact;
    Estimate numeric;
};

// Periodic trapezoid rule; doubling the node count gives the error estimate.
template <class F>
Estimate periodic_quadrature(F&& f, int nodes = 256)
{
    auto rule = [&](int m) {
        double s = 0;
        for (int i = 0; i < m; ++i)
            s += f(static_cast<double>(i) / m);
        return s / m;
    };
    double coarse = rule(nodes), fine = rule(2 * nodes);
    return {fine, std::abs(fine - coarse) + 1e-15 * std::abs(fine)};
}

// Integral of a 1-form along a loop. The exact branch applies to affine loops whose periodic
// base coordinates vanish: then only harmonics constant along the loop survive.
inline PathIntegral integrate_path(const ScalarForm& w, const Chart& chart, const Loop& loop)
{
    loop.validate(chart);
    if (w.degree() != 1 || w.dim() != chart.dim())
        throw StructuralError("path integration needs a 1-form on the loop's chart");
    PathIntegral out;
    out.numeric = periodic_quadrature([&](double u) {
        auto x = loop.point(u);
        auto v = loop.velocity(u);
        x.resize(kMaxDim, 0.0);
        double s = 0;
        for (auto& [set, c] : w.terms())
            s += c.evaluate(x) * v[std::countr_zero(set)];
        return s;
    });
    bool exact_ok = loop.affine();
    for (int j = 0; j < chart.dim(); ++j)
        if (chart[j].periodic && !loop.base[j].is_zero())
            exact_ok = false;
    if (exact_ok) {
        Rational total;
        for (auto& [set, c] : w.terms()) {
            int j = std::countr_zero(set);
            if (loop.winding[j] == 0)
                continue;
            Rational mean;
            for (auto& [k, coeff] : c.terms()) {
                int phase = 0;
                for (int l = 0; l < kMaxDim; ++l)
                    phase += k.freq(l) * (l < chart.dim() ? loop.winding[l] : 0);
                if (k.kind() == Harmonic::sin || (k.kind() == Harmonic::cos && phase != 0))
                    continue;
                Rational mono = coeff;
                for (int l = 0; l < chart.dim(); ++l)
                    if (int e = k.exp(l))
                        mono *= pow(loop.base[l], e);
                mean += mono;
            }
            total += mean * Rational(loop.winding[j]);
        }
        out.exact = TwoPiMultiple{total, 1};
    }
    return out;
}

} // namespace cordfol
