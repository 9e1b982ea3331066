#include <gtest/gtest.h>

#include "cordfol/cohomology.hpp"
#include "cordfol/constructions.hpp"
#include "generators.hpp"

using namespace cordfol;

namespace {

using SF = ScalarField;
using VF = VectorField<ScalarField>;
using Section = GaugeSection<ScalarField>;

Chart cylinder() { return Chart({{"x", true}, {"y", false}}); }
ScalarForm dx2() { return ScalarForm::basis1(2, 0, SF(1)); }
ScalarForm dy2() { return ScalarForm::basis1(2, 1, SF(1)); }
VF minus_dy() { return VF{{SF(), SF(-1)}}; }
ScalarForm cylinder_a0() { return dy2() + ScalarForm::basis1(2, 0, SF::coordinate(1) * SF::cos_of({1})); }
ScalarForm logistic_a0()
{
    SF y = SF::coordinate(1);
    return dy2() - ScalarForm::basis1(2, 0, y + y * y);
}

// Slope foliation q dy - p dx on T^2 with V = -(1/q) d/dy.
std::pair<ScalarForm, VF> slope(int p, int q)
{
    ScalarForm a = ScalarForm::basis1(2, 1, SF(q)) - ScalarForm::basis1(2, 0, SF(p));
    return {a, VF{{SF(), SF(Rational(-1, q))}}};
}

// Flat cord with a chart-dependent source: a random gauge of a GV cord.
Cord random_flat(gen::Rng& rng, const Chart& ch, int order)
{
    Cord base = gv_cord(rng.chance(0.5) ? cylinder_a0() : logistic_a0(), minus_dy(), order + 1);
    auto src = gen::random_source(rng, ch, 1);
    Section y = gen::random_section(rng, ch, order + 1, src, {SF()}, 0.3);
    return gauge(y, base);
}

} // namespace

TEST(Nabla, Frozen)
{
    Chart ch = cylinder();
    gen::Rng rng(301);
    Cord w = gen::random_jetform(rng, ch, 1, 4, 1, {SF()}, 0.6);
    Cord zero = Cord::zero_source(1, 4, 2, 1);
    EXPECT_EQ(nabla(zero, w), d_total(w).truncate(3));

    Cord a = jetform_from_coefficients<SF>(2, 1, {ScalarForm(2, 1), dy2(), ScalarForm(2, 1)});
    Cord one = jetfunction_from_coefficients<SF>(2, {SF(1), SF(), SF()});
    EXPECT_EQ(nabla(a, one), jetform_from_coefficients<SF>(2, 1, {-dy2(), ScalarForm(2, 1)}));

    Cord shifted(1, 2, 2, 0, {SF(1)});
    EXPECT_THROW(nabla(a, shifted), DomainError);
}

TEST(NablaProperty, SquaresToZeroOnFlatCords)
{
    gen::Rng rng(302);
    Chart ch = cylinder();
    for (int trial = 0; trial < 30; ++trial) {
        Cord a = random_flat(rng, ch, 5);
        ASSERT_TRUE(is_flat(a));
        Cord w = gen::random_jetform(rng, ch, 1, 5, trial % 2, a.source(), 0.5);
        EXPECT_TRUE(nabla(a, nabla(a, w)).is_zero_jetform()) << "trial " << trial;
    }
}

TEST(NablaProperty, NonFlatNegativeControl)
{
    Cord b = jetform_from_coefficients<SF>(2, 1, {ScalarForm(2, 1), ScalarForm::basis1(2, 1, SF::coordinate(0)),
                                                   ScalarForm(2, 1), ScalarForm(2, 1)});
    ASSERT_FALSE(is_flat(b));
    Cord one = jetfunction_from_coefficients<SF>(2, {SF(1), SF(), SF(), SF()});
    EXPECT_FALSE(nabla(b, nabla(b, one)).is_zero_jetform());
}

TEST(NablaProperty, GradedLeibniz)
{
    gen::Rng rng(303);
    Chart ch = cylinder();
    for (int trial = 0; trial < 40; ++trial) {
        auto src = gen::random_source(rng, ch, 1);
        const int order = 5;
        Cord a = gen::random_jetform(rng, ch, 1, order, 1, src, 0.5);
        const int k = rng.integer(0, 1), l = rng.integer(0, 1);
        Cord z = gen::random_jetform(rng, ch, 1, order, k, src, 0.5);
        Cord w = gen::random_jetform(rng, ch, 1, order, l, src, 0.5);
        Cord lhs = nabla(a, bracket(z, w));
        Cord r1 = bracket(nabla(a, z), nabla(a, w).order() == order - 1 ? w.truncate(order - 1) : w);
        Cord r2 = bracket(z.truncate(order - 1), nabla(a, w));
        Cord rhs = k % 2 ? r1 - r2 : r1 + r2;
        EXPECT_EQ(truncate_to(lhs, rhs.order()), rhs) << "trial " << trial;
    }
}

TEST(PhiTransport, Frozen)
{
    const int order = 4;
    Cord a = gv_cord(cylinder_a0(), minus_dy(), order);
    gen::Rng rng(304);
    Cord w = gen::random_jetform(rng, cylinder(), 1, order, 1, {SF()}, 0.7);
    Section id = Section::identity(1, order, 2, {SF()});
    EXPECT_EQ(phi_transport(a, gauge(id, a), id, w), w.truncate(order - 1));

    // Y = t/2: Phi(W)(t) = 2 W(t/2)
    Series<SF> half(1, order);
    half.set(MultiIndex{1}, SF(Rational(1, 2)));
    Section y(2, {SF()}, {half});
    Cord phi = phi_transport(a, gauge(y, a), y, w);
    for (int n = 0; n < order; ++n)
        EXPECT_EQ(phi.coefficient(0, MultiIndex{n}),
                  scale(SF(Rational(2) * pow(Rational(1, 2), n)), w.coefficient(0, MultiIndex{n})));

    EXPECT_THROW(phi_transport(a, a.truncate(order - 1), y, w), DomainError);
}

TEST(PhiTransportProperty, ChainIsomorphism)
{
    gen::Rng rng(305);
    Chart ch = cylinder();
    for (int trial = 0; trial < 30; ++trial) {
        const int order = 5;
        Cord a = random_flat(rng, ch, order);
        Section y = gen::random_section(rng, ch, order, gen::random_source(rng, ch, 1), a.source(), 0.3);
        Cord b = gauge(y, a);
        Cord w = gen::random_jetform(rng, ch, 1, order, trial % 2, a.source(), 0.5);
        Cord lhs = nabla(b, phi_transport(a, b, y, w));
        Cord rhs = pushforward(y.truncate(order - 1), nabla(a, w));
        EXPECT_EQ(lhs, rhs) << "trial " << trial;

        Section yinv = invert_section(y).truncate(order - 1);
        Cord back = phi_transport(b, gauge(yinv, b), yinv, phi_transport(a, b, y, w));
        EXPECT_EQ(back, w.truncate(order - 2));
    }
}

TEST(Bott, Frozen)
{
    EXPECT_TRUE(is_zero(bott_differential(dy2(), minus_dy(), ScalarForm::basis1(2, 0, SF::cos_of({1})))));
    EXPECT_EQ(bott_differential(dy2(), minus_dy(), ScalarForm::scalar(2, SF::sin_of({1}))),
              ScalarForm::basis1(2, 0, SF::cos_of({1})));
    EXPECT_THROW(bott_differential(dy2(), minus_dy(), dy2()), DomainError);
    EXPECT_THROW(bott_differential(dx2(), minus_dy(), dx2()), DomainError);
}

TEST(BottProperty, HorizontalAndSquareZero)
{
    gen::Rng rng(306);
    Chart cyl = cylinder();
    Chart t2 = Chart::torus(2);
    for (int trial = 0; trial < 40; ++trial) {
        const bool torus = trial % 2;
        const Chart& ch = torus ? t2 : cyl;
        auto [a, v] = torus ? slope(rng.integer(0, 3), rng.integer(1, 3)) : std::make_pair(cylinder_a0(), minus_dy());
        SF f = gen::random_scalar(rng, ch, 3);
        ScalarForm df = bott_differential(a, v, ScalarForm::scalar(2, f));
        EXPECT_TRUE(is_zero(contract(v, df)));
        EXPECT_TRUE(is_zero(bott_differential(a, v, df)));
        // a horizontal 1-form: no dy component since V is vertical
        ScalarForm h = ScalarForm::basis1(2, 0, gen::random_scalar(rng, ch, 2));
        EXPECT_TRUE(is_zero(contract(v, bott_differential(a, v, h))));
    }
}

TEST(H0, Frozen)
{
    Chart t2 = Chart::torus(2);
    auto [a12, v12] = slope(1, 2);
    EXPECT_EQ(h0_dimension(a12, v12, 4, t2), 5u);
    auto [a01, v01] = slope(0, 1);
    EXPECT_EQ(h0_dimension(a01, v01, 4, t2), 9u);
    EXPECT_EQ(h0_dimension(a12, v12, 0, t2), 1u);
    EXPECT_THROW(h0_dimension(dy2(), minus_dy(), 2, cylinder()), DomainError);
}

TEST(H0Property, SlopeLatticeCount)
{
    Chart t2 = Chart::torus(2);
    for (auto [p, q] : std::vector<std::pair<int, int>>{{0, 1}, {1, 1}, {1, 2}, {2, 3}})
        for (int d = 0; d <= 6; ++d) {
            auto [a, v] = slope(p, q);
            EXPECT_EQ(h0_dimension(a, v, d, t2), slope_lattice_count(p, q, d)) << p << "/" << q << " D=" << d;
        }
}

TEST(TruncatedBott, DiagnosticsConsistentWithH0)
{
    Chart t2 = Chart::torus(2);
    auto [a, v] = slope(1, 2);
    auto tb = truncated_bott_ranks(a, v, 2, t2);
    ASSERT_EQ(tb.horizontal_dim.size(), 3u);
    EXPECT_EQ(tb.horizontal_dim[0], 25u);
    EXPECT_EQ(tb.horizontal_dim[1], 25u);
    EXPECT_EQ(tb.horizontal_dim[2], 0u);
    auto b = tb.betti();
    EXPECT_EQ(b[0], static_cast<long>(h0_dimension(a, v, 2, t2)));
    for (auto x : b)
        EXPECT_GE(x, 0);
}

TEST(GvIntegral, Frozen)
{
    Chart t3 = Chart::torus(3);
    ScalarForm dz = ScalarForm::basis1(3, 2, SF(1));
    auto cord = [&](const ScalarForm& a1) { return jetform_from_coefficients<SF>(3, 1, {dz, a1}); };
    EXPECT_TRUE(gv_integral(cord(ScalarForm(3, 1)), t3).coeff.is_zero());
    ScalarForm a1 = ScalarForm::basis1(3, 0, SF::cos_of({0, 0, 1})) + ScalarForm::basis1(3, 1, SF::sin_of({0, 0, 1}));
    auto gv = gv_integral(cord(a1), t3);
    EXPECT_EQ(gv.coeff, Rational(-1));
    EXPECT_EQ(gv.power, 3);
    ScalarForm closed = exterior_d(ScalarForm::scalar(3, SF::sin_of({1, 1, 0})));
    EXPECT_TRUE(gv_integral(cord(closed), t3).coeff.is_zero());
    EXPECT_THROW(gv_integral(gv_cord(cylinder_a0(), minus_dy(), 2), cylinder()), DomainError);
}

TEST(GvIntegralProperty, InvariantUnderExactCorrection)
{
    gen::Rng rng(307);
    Chart t3 = Chart::torus(3);
    ScalarForm dz = ScalarForm::basis1(3, 2, SF(1));
    for (int trial = 0; trial < 30; ++trial) {
        ScalarForm a1 = gen::random_form(rng, t3, 1, 2);
        SF f = gen::random_scalar(rng, t3, 3);
        ScalarForm shifted = a1 + exterior_d(ScalarForm::scalar(3, f));
        EXPECT_EQ(gv_integral(jetform_from_coefficients<SF>(3, 1, {dz, a1}), t3).coeff,
                  gv_integral(jetform_from_coefficients<SF>(3, 1, {dz, shifted}), t3).coeff);
    }
}
