#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "cordfol/integrate.hpp"
#include "cordfol/rational_field.hpp"
#include "generators.hpp"

using namespace cordfol;

namespace {

const double pi = std::numbers::pi;

Chart cylinder() { return Chart({{"x", true}, {"y", false}}); }
Chart mixed3() { return Chart({{"x", true}, {"y", false}, {"z", true}}); }

std::vector<double> pad(std::vector<double> p)
{
    p.resize(kMaxDim, 0.0);
    return p;
}

// Reference evaluation straight from the term list, independent of ScalarField::evaluate.
double reference_eval(const ScalarField& f, const std::vector<double>& x)
{
    double s = 0;
    for (auto& [k, c] : f.terms()) {
        double v = c.to_double(), ph = 0;
        for (int j = 0; j < kMaxDim; ++j) {
            for (int e = 0; e < k.exp(j); ++e)
                v *= x[j];
            ph += k.freq(j) * x[j];
        }
        if (k.kind() == Harmonic::cos)
            v *= std::cos(ph);
        if (k.kind() == Harmonic::sin)
            v *= std::sin(ph);
        s += v;
    }
    return s;
}

} // namespace

TEST(ScalarField, ProductToSumFrozen)
{
    auto c = ScalarField::cos_of({1});
    auto s = ScalarField::sin_of({1});
    EXPECT_EQ(c * c, ScalarField(Rational(1, 2)) + ScalarField::cos_of({2}).scaled(Rational(1, 2)));
    EXPECT_EQ(c * c + s * s, ScalarField(1));
    EXPECT_EQ(s * c, ScalarField::sin_of({2}).scaled(Rational(1, 2)));
}

TEST(ScalarField, CanonicalSigns)
{
    EXPECT_EQ(ScalarField::sin_of({-1}), -ScalarField::sin_of({1}));
    EXPECT_EQ(ScalarField::cos_of({-2, 1}), ScalarField::cos_of({2, -1}));
    EXPECT_TRUE(ScalarField::sin_of({0, 0}).is_zero());
    EXPECT_EQ(ScalarField::cos_of({0}), ScalarField(1));
}

TEST(ScalarField, PartialFrozen)
{
    EXPECT_EQ(ScalarField::sin_of({2}).partial(0), ScalarField::cos_of({2}).scaled(2));
    EXPECT_EQ(ScalarField::cos_of({0, 3}).partial(1), ScalarField::sin_of({0, 3}).scaled(-3));
    auto y = ScalarField::coordinate(1);
    EXPECT_EQ((y * y * ScalarField::cos_of({1})).partial(1), (y * ScalarField::cos_of({1})).scaled(2));
}

TEST(ScalarField, Printing)
{
    auto f = ScalarField::coordinate(1) * ScalarField::cos_of({1}) - ScalarField(Rational(1, 2));
    EXPECT_EQ(f.str({"x", "y"}), "-1/2 + y*cos(x)");
}

TEST(ScalarFieldProperty, ProductMatchesPointwise)
{
    gen::Rng rng(21);
    Chart ch = mixed3();
    for (int trial = 0; trial < 200; ++trial) {
        auto f = gen::random_scalar(rng, ch, 3);
        auto g = gen::random_scalar(rng, ch, 3);
        auto x = pad({rng.real(0, 6.3), rng.real(-1, 1), rng.real(0, 6.3)});
        EXPECT_NEAR(reference_eval(f * g, x), reference_eval(f, x) * reference_eval(g, x), 1e-9);
    }
}

TEST(ScalarFieldProperty, PartialMatchesFiniteDifference)
{
    gen::Rng rng(22);
    Chart ch = mixed3();
    for (int trial = 0; trial < 100; ++trial) {
        auto f = gen::random_scalar(rng, ch, 3);
        auto x = pad({rng.real(0, 6.3), rng.real(-1, 1), rng.real(0, 6.3)});
        for (int j = 0; j < 3; ++j) {
            const double h = 1e-5;
            auto xp = x, xm = x;
            xp[j] += h;
            xm[j] -= h;
            double fd = (reference_eval(f, xp) - reference_eval(f, xm)) / (2 * h);
            EXPECT_NEAR(f.partial(j).evaluate(x), fd, 1e-6);
        }
    }
}

TEST(Form, WedgeSigns)
{
    const int n = 3;
    auto dx = ScalarForm::basis1(n, 0, 1), dy = ScalarForm::basis1(n, 1, 1), dz = ScalarForm::basis1(n, 2, 1);
    EXPECT_EQ(wedge(dy, dx), -wedge(dx, dy));
    EXPECT_TRUE(is_zero(wedge(dx, dx)));
    auto vol = wedge(wedge(dx, dy), dz);
    EXPECT_EQ(vol.terms().begin()->second, ScalarField(1));
    EXPECT_EQ(wedge(wedge(dz, dx), dy), vol);
    EXPECT_EQ(wedge(wedge(dy, dx), dz), -vol);
}

TEST(FormProperty, ExteriorDerivativeSquaresToZero)
{
    gen::Rng rng(23);
    Chart ch = mixed3();
    for (int trial = 0; trial < 60; ++trial) {
        int p = trial % 3;
        auto w = gen::random_form(rng, ch, p);
        EXPECT_TRUE(is_zero(exterior_d(exterior_d(w))));
    }
}

TEST(FormProperty, GradedCommutativityAndLeibniz)
{
    gen::Rng rng(24);
    Chart ch = mixed3();
    for (int trial = 0; trial < 60; ++trial) {
        int p = trial % 3, q = (trial / 3) % 2;
        auto a = gen::random_form(rng, ch, p);
        auto b = gen::random_form(rng, ch, q);
        auto ab = wedge(a, b);
        auto ba = wedge(b, a);
        EXPECT_EQ(ab, (p * q) % 2 ? -ba : ba);
        // d(a^b) = da^b + (-1)^p a^db
        auto rhs1 = wedge(exterior_d(a), b);
        auto rhs2 = wedge(a, exterior_d(b));
        EXPECT_EQ(exterior_d(ab), p % 2 ? rhs1 - rhs2 : rhs1 + rhs2);
    }
}

TEST(FormProperty, CartanCalculus)
{
    gen::Rng rng(25);
    Chart ch = mixed3();
    for (int trial = 0; trial < 40; ++trial) {
        int p = 1 + trial % 2;
        auto w = gen::random_form(rng, ch, p);
        auto v = gen::random_vector_field(rng, ch);
        EXPECT_TRUE(is_zero(contract(v, contract(v, w))));
        EXPECT_EQ(lie_derivative(v, exterior_d(w)), exterior_d(lie_derivative(v, w)));
        EXPECT_EQ(contract(v, lie_derivative(v, w)), lie_derivative(v, contract(v, w)));
        // i_V(a ^ b) = i_V a ^ b + (-1)^p a ^ i_V b
        auto b = gen::random_form(rng, ch, 1);
        auto lhs = contract(v, wedge(w, b));
        auto r1 = wedge(contract(v, w), b);
        auto r2 = wedge(w, contract(v, b));
        EXPECT_EQ(lhs, p % 2 ? r1 - r2 : r1 + r2);
    }
}

TEST(Integrate, TorusFrozen)
{
    Chart t3 = Chart::torus(3);
    auto dx = ScalarForm::basis1(3, 0, ScalarField::cos_of({0, 0, 1}));
    auto dy = ScalarForm::basis1(3, 1, ScalarField::sin_of({0, 0, 1}));
    auto a1 = dx + dy;
    auto gv = integrate_torus(wedge(a1, exterior_d(a1)), t3);
    EXPECT_EQ(gv.coeff, Rational(-1));
    EXPECT_EQ(gv.power, 3);

    Chart t2 = Chart::torus(2);
    auto c2 = ScalarField::cos_of({1, 0}) * ScalarField::cos_of({1, 0});
    auto area = wedge(ScalarForm::basis1(2, 0, c2), ScalarForm::basis1(2, 1, ScalarField(1)));
    EXPECT_EQ(integrate_torus(area, t2).coeff, Rational(1, 2));
}

TEST(Integrate, PathFrozen)
{
    Chart circle({{"theta", true}});
    auto res = integrate_path(ScalarForm::basis1(1, 0, ScalarField(1)), circle, Loop::generator(circle, 0));
    ASSERT_TRUE(res.exact);
    EXPECT_EQ(res.exact->coeff, Rational(1));
    EXPECT_NEAR(res.numeric.value, 2 * pi, 1e-12);

    Chart cyl = cylinder();
    auto w = ScalarForm::basis1(2, 0, -ScalarField::cos_of({1}));
    auto r2 = integrate_path(w, cyl, Loop::generator(cyl, 0));
    ASSERT_TRUE(r2.exact);
    EXPECT_TRUE(r2.exact->coeff.is_zero());
    EXPECT_NEAR(r2.numeric.value, 0, 1e-12);
}

TEST(IntegrateProperty, ExactAndNumericPathsAgree)
{
    gen::Rng rng(26);
    Chart ch = mixed3();
    for (int trial = 0; trial < 50; ++trial) {
        auto w = gen::random_form(rng, ch, 1, 3);
        Loop l;
        l.base = {0, rng.rational(), 0};
        l.winding = {rng.integer(-2, 2), 0, rng.integer(-2, 2)};
        auto res = integrate_path(w, ch, l);
        ASSERT_TRUE(res.exact);
        EXPECT_NEAR(res.exact->value(), res.numeric.value, 1e-9);
    }
}

TEST(IntegrateProperty, TorusIntegralOfExactFormVanishes)
{
    gen::Rng rng(27);
    Chart t3 = Chart::torus(3);
    for (int trial = 0; trial < 20; ++trial) {
        auto w = gen::random_form(rng, t3, 2, 3);
        EXPECT_TRUE(integrate_torus(exterior_d(w), t3).coeff.is_zero());
    }
}

TEST(RationalField, ReciprocalAndQuotientRule)
{
    Chart circle({{"x", true}});
    SamplingScope scope(circle);
    ScalarField den = ScalarField(2) + ScalarField::cos_of({1});
    RationalField inv = reciprocal(RationalField(den));
    EXPECT_EQ(inv.certificate(), Certificate::sampled);
    EXPECT_EQ(inv * RationalField(den), RationalField(1));
    // d/dx 1/(2+cos x) = sin x / (2+cos x)^2
    RationalField expect = RationalField(ScalarField::sin_of({1})) * inv * inv;
    EXPECT_EQ(inv.partial(0), expect);
    EXPECT_THROW(reciprocal(RationalField(ScalarField::cos_of({1}))), DomainError);
}

TEST(RationalFieldProperty, FieldIdentities)
{
    gen::Rng rng(28);
    Chart ch({{"x", true}, {"y", false}});
    SamplingScope scope(ch);
    for (int trial = 0; trial < 30; ++trial) {
        ScalarField d1 = ScalarField(4) + gen::random_scalar(rng, ch, 1, 1, 1).scaled(Rational(1, 4));
        ScalarField d2 = ScalarField(3) + gen::random_scalar(rng, ch, 1, 1, 1).scaled(Rational(1, 4));
        RationalField a = RationalField(gen::random_scalar(rng, ch, 2)) * reciprocal(RationalField(d1));
        RationalField b = RationalField(gen::random_scalar(rng, ch, 2)) * reciprocal(RationalField(d2));
        auto x = pad({rng.real(0, 6.3), rng.real(-1, 1)});
        EXPECT_NEAR((a + b).evaluate(x), a.evaluate(x) + b.evaluate(x), 1e-9);
        EXPECT_NEAR((a * b).evaluate(x), a.evaluate(x) * b.evaluate(x), 1e-9);
        EXPECT_EQ((a + b) - b, a);
        const double h = 1e-6;
        auto xp = x, xm = x;
        xp[0] += h;
        xm[0] -= h;
        EXPECT_NEAR(a.partial(0).evaluate(x), (a.evaluate(xp) - a.evaluate(xm)) / (2 * h), 1e-5);
        // Leibniz rule for the quotient derivative.
        EXPECT_EQ((a * b).partial(1), a.partial(1) * b + a * b.partial(1));
    }
}
