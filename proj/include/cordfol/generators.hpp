#pragma once

// Seeded random generators for identity checks.

#include <cstdint>
#include <random>
#include <vector>

#include "cordfol/chart.hpp"
#include "cordfol/cord.hpp"
#include "cordfol/form.hpp"
#include "cordfol/jet.hpp"
#include "cordfol/scalar_field.hpp"

namespace cordfol::gen {

using cordfol::GroupoidArrow;
using cordfol::MultiIndex;
using cordfol::Rational;
using cordfol::Series;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
    bool chance(double p) { return std::uniform_real_distribution<double>(0, 1)(eng_) < p; }
    double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }

    // Small rational p/q with |p| <= num_max, 1 <= q <= den_max.
    Rational rational(int num_max = 5, int den_max = 4)
    {
        return Rational(integer(-num_max, num_max), integer(1, den_max));
    }
    Rational positive_rational(int num_max = 5, int den_max = 4)
    {
        return Rational(integer(1, num_max), integer(1, den_max));
    }

    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
};

// Random arrow with the given source; linear part has positive determinant, higher terms sparse.
inline GroupoidArrow random_arrow(Rng& rng, int k, int order, std::vector<Rational> source, double density = 0.5)
{
    for (;;) {
        cordfol::SeriesVec<Rational> comps;
        for (int i = 0; i < k; ++i) {
            Series<Rational> s(k, order);
            s.set(MultiIndex(k), rng.rational());
            for (auto& m : cordfol::multi_indices(k, order)) {
                int d = m.degree();
                if (d == 0)
                    continue;
                if (d == 1) {
                    bool diag = m.e[i] == 1;
                    s.set(m, diag ? rng.positive_rational(4, 3) : (rng.chance(0.5) ? rng.rational(2, 3) : Rational(0)));
                } else if (rng.chance(density)) {
                    s.set(m, rng.rational(3, 4));
                }
            }
            comps.push_back(s);
        }
        if (cordfol::determinant(cordfol::linear_part(comps)).sign() > 0)
            return GroupoidArrow(std::move(source), std::move(comps));
    }
}

inline std::vector<Rational> random_point(Rng& rng, int k)
{
    std::vector<Rational> p;
    for (int i = 0; i < k; ++i)
        p.push_back(rng.rational());
    return p;
}

// Random trig-polynomial scalar field valid on the chart.
inline cordfol::ScalarField random_scalar(Rng& rng, const cordfol::Chart& chart, int terms = 3, int max_freq = 2,
                                          int max_exp = 2)
{
    cordfol::ScalarField f;
    for (int t = 0; t < terms; ++t) {
        cordfol::TermKey k;
        bool any_periodic = false;
        for (int j = 0; j < chart.dim(); ++j) {
            if (chart[j].periodic) {
                k.set_freq(j, rng.integer(-max_freq, max_freq));
                any_periodic = true;
            } else {
                k.set_exp(j, rng.integer(0, max_exp));
            }
        }
        k.set_kind(any_periodic ? static_cast<cordfol::Harmonic>(rng.integer(0, 2)) : cordfol::Harmonic::one);
        if (k.kind() == cordfol::Harmonic::one)
            for (int j = 0; j < chart.dim(); ++j)
                k.set_freq(j, 0);
        f.add_term(k, rng.rational(4, 3));
    }
    return f;
}

inline cordfol::ScalarForm random_form(Rng& rng, const cordfol::Chart& chart, int degree, int terms = 2)
{
    cordfol::ScalarForm w(chart.dim(), degree);
    for (cordfol::IndexSet s = 0; s < (cordfol::IndexSet(1) << chart.dim()); ++s)
        if (cordfol::popcount(s) == degree && rng.chance(0.7))
            w.set(s, random_scalar(rng, chart, terms));
    return w;
}

inline cordfol::VectorField<cordfol::ScalarField> random_vector_field(Rng& rng, const cordfol::Chart& chart,
                                                                       int terms = 2)
{
    cordfol::VectorField<cordfol::ScalarField> v;
    for (int j = 0; j < chart.dim(); ++j)
        v.comps.push_back(random_scalar(rng, chart, terms, 1, 1));
    return v;
}


// Sparse jet form: each (component, multi-index) slot is filled with probability `density`.
inline cordfol::Cord random_jetform(Rng& rng, const cordfol::Chart& chart, int k, int order, int degree,
                                    std::vector<cordfol::ScalarField> source, double density = 0.35)
{
    cordfol::Cord w(k, order, chart.dim(), degree, std::move(source));
    for (int i = 0; i < k; ++i)
        for (auto& m : cordfol::multi_indices(k, order))
            if (rng.chance(density))
                w.set_coefficient(i, m, random_form(rng, chart, degree, 1));
    return w;
}

inline std::vector<cordfol::ScalarField> random_source(Rng& rng, const cordfol::Chart& chart, int k)
{
    std::vector<cordfol::ScalarField> s;
    for (int i = 0; i < k; ++i)
        s.push_back(rng.chance(0.5) ? random_scalar(rng, chart, 1, 1, 1) : cordfol::ScalarField(rng.rational()));
    return s;
}

// Gauge section with constant positive linear part and sparse chart-dependent higher terms.
inline cordfol::GaugeSection<cordfol::ScalarField> random_section(Rng& rng, const cordfol::Chart& chart, int order,
                                                                   std::vector<cordfol::ScalarField> source,
                                                                   std::vector<cordfol::ScalarField> target,
                                                                   double density = 0.3)
{
    const int k = static_cast<int>(source.size());
    GroupoidArrow lin = random_arrow(rng, k, 1, std::vector<Rational>(k));
    cordfol::SeriesVec<cordfol::ScalarField> comps;
    for (int i = 0; i < k; ++i) {
        Series<cordfol::ScalarField> s(k, order);
        s.set(MultiIndex(k), target[i]);
        for (auto& m : cordfol::multi_indices(k, order)) {
            if (m.degree() == 1)
                s.set(m, cordfol::ScalarField(lin.components()[i].coeff(m)));
            else if (m.degree() > 1 && rng.chance(density))
                s.set(m, random_scalar(rng, chart, 1, 1, 1));
        }
        comps.push_back(s);
    }
    return cordfol::GaugeSection<cordfol::ScalarField>(chart.dim(), std::move(source), std::move(comps));
}

} // namespace cordfol::gen
