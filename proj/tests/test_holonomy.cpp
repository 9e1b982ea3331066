#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "cordfol/constructions.hpp"
#include "cordfol/holonomy.hpp"
#include "generators.hpp"

using namespace cordfol;

namespace {

using SF = ScalarField;
const double e2pi = std::exp(2 * std::numbers::pi);

Chart circle() { return Chart({{"theta", true}}); }

// sum_n c_n t^n dtheta on the circle
Cord circle_cord(const std::vector<Rational>& c)
{
    std::vector<ScalarForm> forms;
    for (auto& v : c)
        forms.push_back(ScalarForm::basis1(1, 0, SF(v)));
    return jetform_from_coefficients(1, 1, forms);
}

// Jet of the logistic flow t' = r (t + t^2) after time 1: t0 e^r / (1 - t0 (e^r - 1)).
std::vector<double> logistic_jet(double r, int order)
{
    std::vector<double> c(order + 1, 0.0);
    for (int m = 1; m <= order; ++m)
        c[m] = std::exp(r) * std::pow(std::exp(r) - 1, m - 1);
    return c;
}

void expect_relative(double got, double want, double tol)
{
    EXPECT_LE(std::abs(got - want), tol * std::abs(want)) << "got " << got << " want " << want;
}

} // namespace

TEST(Transport, LinearClosedForm)
{
    Cord a = circle_cord({0, 1, 0, 0});
    HolonomyJet h = transport(a, circle(), Loop::generator(circle(), 0));
    expect_relative(h.coeff(0, MultiIndex{1}), e2pi, 1e-8);
    EXPECT_NEAR(h.coeff(0, MultiIndex{2}), 0.0, 1e-9);
    EXPECT_NEAR(h.coeff(0, MultiIndex{0}), 0.0, 0.0);
}

TEST(Transport, ZeroCordGivesIdentity)
{
    Cord a = Cord::zero_source(1, 4, 1, 1);
    HolonomyJet h = transport(a, circle(), Loop::generator(circle(), 0));
    EXPECT_LT(relative_distance(h.value, HolonomyJet::identity(1, 4).value), 1e-15);
}

TEST(Transport, LogisticClosedForm)
{
    const int order = 5;
    Cord a = circle_cord({0, 1, 1, 0, 0, 0});
    HolonomyJet h = transport(a, circle(), Loop::generator(circle(), 0));
    auto want = logistic_jet(2 * std::numbers::pi, order);
    expect_relative(h.coeff(0, MultiIndex{2}), e2pi * (e2pi - 1), 1e-6);
    for (int m = 1; m <= order; ++m)
        expect_relative(h.coeff(0, MultiIndex{m}), want[m], 1e-6);
}

TEST(Transport, RejectsNonImpotentAndCoarseSteps)
{
    EXPECT_THROW(transport(circle_cord({1, 1}), circle(), Loop::generator(circle(), 0)), DomainError);
    StepControl coarse{0.5, 1e-9};
    try {
        transport(circle_cord({0, 1, 1}), circle(), Loop::generator(circle(), 0), coarse);
        FAIL() << "expected tolerance failure";
    } catch (const ToleranceNotMet& e) {
        EXPECT_GT(e.achieved(), 1e-9);
    }
}

TEST(Transport, RichardsonFourthOrder)
{
    Cord a = circle_cord({0, 1, 1});
    Loop g = Loop::generator(circle(), 0);
    auto start = HolonomyJet::identity(1, 2).value;
    auto want = logistic_jet(2 * std::numbers::pi, 2);
    for (int m = 1; m <= 2; ++m) {
        double e1 = std::abs(transport_rk4(a, circle(), g, 100, start)[0].coeff(MultiIndex{m}) - want[m]);
        double e2 = std::abs(transport_rk4(a, circle(), g, 200, start)[0].coeff(MultiIndex{m}) - want[m]);
        EXPECT_GT(e1 / e2, 13.0) << "coefficient " << m;
        EXPECT_LT(e1 / e2, 19.0) << "coefficient " << m;
    }
    HolonomyJet h = transport(a, circle(), g, {1e-2, 1e-3});
    for (int m = 1; m <= 2; ++m)
        EXPECT_LE(std::abs(h.coeff(0, MultiIndex{m}) - want[m]), 10 * h.coeff_error(0, MultiIndex{m}) + 1e-12);
}

TEST(Monodromy, InverseAndSquare)
{
    Cord a = circle_cord({0, Rational(1, 4), Rational(1, 4), Rational(1, 8), 0});
    std::vector<Loop> gens{Loop::generator(circle(), 0)};
    HolonomyJet id = monodromy_word(a, circle(), gens, {{0, 1}, {0, -1}});
    EXPECT_LT(relative_distance(id.value, HolonomyJet::identity(1, 4).value), 1e-6);
    HolonomyJet g = transport(a, circle(), gens[0]);
    HolonomyJet g2 = monodromy_word(a, circle(), gens, {{0, 1}, {0, 1}});
    EXPECT_LT(relative_distance(g2.value, compose(g, g).value), 1e-6);
}

TEST(Monodromy, BasepointMismatchRejected)
{
    Chart t2 = Chart::torus(2);
    Loop a = Loop::generator(t2, 0), b = Loop::generator(t2, 1);
    b.base[0] = Rational(1);
    EXPECT_THROW(monodromy_word(Cord::zero_source(1, 2, 2, 1), t2, {a, b}, {{0, 1}}), DomainError);
}

TEST(MonodromyProperty, HomomorphismOnTorusWords)
{
    gen::Rng rng(201);
    Chart t2 = Chart::torus(2);
    std::vector<Loop> gens{Loop::generator(t2, 0), Loop::generator(t2, 1)};
    StepControl ctl{1e-2, 1e-6};
    for (int trial = 0; trial < 8; ++trial) {
        const int order = 2 + trial % 4;
        Cord a = gen::random_jetform(rng, t2, 1, order, 1, {SF()}, 0.6);
        a.set_coefficient(0, MultiIndex{0}, ScalarForm(2, 1));
        a = a.scaled(Rational(1, 4));
        std::vector<HolonomyJet> single, inverse;
        for (auto& g : gens) {
            single.push_back(transport(a, t2, g, ctl));
            inverse.push_back(transport(a, t2, g.reversed(), ctl));
        }
        Word w;
        int len = rng.integer(1, 4);
        for (int i = 0; i < len; ++i)
            w.push_back({rng.integer(0, 1), rng.chance(0.5) ? 1 : -1});
        HolonomyJet along = transport_along_word(a, t2, gens, w, ctl);
        HolonomyJet composed = HolonomyJet::identity(1, order);
        for (auto& l : w)
            composed = compose(composed, l.exponent > 0 ? single[l.generator] : inverse[l.generator]);
        EXPECT_LT(relative_distance(monodromy_word(a, t2, gens, w, ctl).value, composed.value), 1e-12);
        EXPECT_LT(relative_distance(along.value, composed.value), 1e-6) << "trial " << trial;
        // reversed loop transports the inverse jet
        for (int g = 0; g < 2; ++g)
            EXPECT_LT(relative_distance(compose(single[g], inverse[g]).value, HolonomyJet::identity(1, order).value),
                      1e-6);
    }
}

TEST(MonodromyProperty, GaugeConjugation)
{
    gen::Rng rng(202);
    Chart t2 = Chart::torus(2);
    Loop g = Loop::generator(t2, 0);
    g.base = {Rational(0), Rational(1, 3)};
    StepControl ctl{1e-2, 1e-6};
    for (int trial = 0; trial < 8; ++trial) {
        const int order = 4;
        Cord a = gen::random_jetform(rng, t2, 1, order, 1, {SF()}, 0.6);
        a.set_coefficient(0, MultiIndex{0}, ScalarForm(2, 1));
        a = a.scaled(Rational(1, 4));
        auto y = gen::random_section(rng, t2, order, {SF()}, {SF()}, 0.4);
        Cord b = gauge(y, a);
        HolonomyJet pa = transport(a, t2, g, ctl);
        HolonomyJet pb = transport(b, t2, g, ctl);
        auto rep = gauge_conjugation(pa, pb, evaluate_section(y, g.point(0)));
        EXPECT_LT(rep.best(), 1e-6) << "trial " << trial;
        EXPECT_EQ(rep.orientation(), "Y^-1 . phi . Y");
    }
}

TEST(FirstOrder, ExamplesMatchExponentialOfIntegral)
{
    auto r1 = first_order_check(circle_cord({0, 1, 2}), circle(), Loop::generator(circle(), 0));
    ASSERT_TRUE(r1.exact_integral);
    EXPECT_EQ(r1.exact_integral->coeff, Rational(1));
    EXPECT_LE(r1.relative_error(), 1e-8);
    expect_relative(r1.transported, e2pi, 1e-8);

    // a_1 = d(sin theta)
    Cord exact_a1 = jetform_from_coefficients<SF>(1, 1, {ScalarForm(1, 1), ScalarForm::basis1(1, 0, SF::cos_of({1}))});
    auto r2 = first_order_check(exact_a1, circle(), Loop::generator(circle(), 0));
    EXPECT_NEAR(r2.transported, 1.0, 1e-9);
    EXPECT_NEAR(r2.predicted, 1.0, 1e-12);
}

TEST(LeafHolonomy, CylinderLeafIsTrivialAtFirstOrder)
{
    Chart cyl({{"x", true}, {"y", false}});
    ScalarForm a0 = ScalarForm::basis1(2, 1, SF(1)) + ScalarForm::basis1(2, 0, SF::coordinate(1) * SF::cos_of({1}));
    Cord a = gv_cord(a0, VectorField<SF>{{SF(), SF(-1)}}, 4);
    AffineMap leaf{{{Rational(1)}, {Rational(0)}}, {Rational(0), Rational(0)}};
    Cord l = pullback_cord(a, leaf, circle(), cyl);
    auto r = first_order_check(l, circle(), Loop::generator(circle(), 0));
    EXPECT_NEAR(r.transported, 1.0, 1e-9);
    EXPECT_NEAR(r.predicted, 1.0, 1e-12);
}

TEST(LeafHolonomy, LogisticLeafMatchesLeafEquation)
{
    // Leaves of dy - (y + y^2) dx satisfy dy/dx = y + y^2; along the leaf y = 0 the return map is
    // y0 -> y0 e^{2pi} / (1 - y0 (e^{2pi} - 1)). The transverse jet variable is t = -y.
    Chart cyl({{"x", true}, {"y", false}});
    const int order = 5;
    ScalarForm a0 = ScalarForm::basis1(2, 1, SF(1)) -
                    ScalarForm::basis1(2, 0, SF::coordinate(1) + SF::coordinate(1) * SF::coordinate(1));
    Cord a = gv_cord(a0, VectorField<SF>{{SF(), SF(-1)}}, order);
    AffineMap leaf{{{Rational(1)}, {Rational(0)}}, {Rational(0), Rational(0)}};
    Cord l = pullback_cord(a, leaf, circle(), cyl);
    ASSERT_TRUE(is_impotent(l));
    HolonomyJet h = transport(l, circle(), Loop::generator(circle(), 0));
    auto y_jet = logistic_jet(2 * std::numbers::pi, order);
    for (int m = 1; m <= order; ++m) {
        double want = (m % 2 ? 1.0 : -1.0) * y_jet[m];
        expect_relative(h.coeff(0, MultiIndex{m}), want, 1e-6);
    }
    auto r = first_order_check(l, circle(), Loop::generator(circle(), 0));
    EXPECT_LE(r.relative_error(), 1e-8);
}
