#include <gtest/gtest.h>

#include "cordfol/jet.hpp"
#include "generators.hpp"
#include "oracle.hpp"

using namespace cordfol;

namespace {

Series<Rational> poly1(int order, std::vector<Rational> coeffs)
{
    Series<Rational> s(1, order);
    for (std::size_t i = 0; i < coeffs.size(); ++i)
        s.set(MultiIndex{static_cast<int>(i)}, coeffs[i]);
    return s;
}

GroupoidArrow arrow1(int order, Rational source, std::vector<Rational> coeffs)
{
    return GroupoidArrow({source}, {poly1(order, std::move(coeffs))});
}

} // namespace

TEST(MultiIndex, GradedLexOrder)
{
    auto all = multi_indices(2, 2);
    ASSERT_EQ(all.size(), 6u);
    EXPECT_EQ(all[0], (MultiIndex{0, 0}));
    EXPECT_EQ(all[1], (MultiIndex{1, 0}));
    EXPECT_EQ(all[2], (MultiIndex{0, 1}));
    EXPECT_EQ(all[3], (MultiIndex{2, 0}));
    EXPECT_EQ(all[4], (MultiIndex{1, 1}));
    EXPECT_EQ(all[5], (MultiIndex{0, 2}));
}

TEST(Jet, ProductTruncates)
{
    Jet a(poly1(3, {1, 1}), {0});
    Jet cube = a * a * a;
    EXPECT_EQ(cube.series(), poly1(3, {1, 3, 3, 1}));
    Jet fourth = cube * a;
    EXPECT_EQ(fourth.series(), poly1(3, {1, 4, 6, 4}));
}

TEST(Jet, MixedOrderOrBasepointIsStructuralError)
{
    Jet a(poly1(3, {1, 1}), {0});
    Jet b(poly1(4, {1, 1}), {0});
    Jet c(poly1(3, {1, 1}), {Rational(1, 2)});
    EXPECT_THROW(jet_mul(a, b), StructuralError);
    EXPECT_THROW(jet_mul(a, c), StructuralError);
    EXPECT_THROW(a + c, StructuralError);
}

TEST(Jet, DerivativeLowersOrder)
{
    Jet a(poly1(3, {5, 1, 2, 7}), {0});
    Jet d = a.derivative(0);
    EXPECT_EQ(d.order(), 2);
    EXPECT_EQ(d.series(), poly1(2, {1, 4, 21}));
}

TEST(Jet, ReciprocalOfOneMinusT)
{
    Jet a(poly1(6, {1, -1}), {0});
    EXPECT_EQ(jet_reciprocal(a).series(), poly1(6, {1, 1, 1, 1, 1, 1, 1}));
}

TEST(Jet, MatrixInverseFrozen)
{
    Jet one_plus_t(poly1(4, {1, 1}), {0});
    Jet t(poly1(4, {0, 1}), {0});
    Jet zero(poly1(4, {}), {0});
    Jet two(poly1(4, {2}), {0});
    auto inv = jet_matrix_inverse(Matrix<Jet>{{one_plus_t, t}, {zero, two}});
    EXPECT_EQ(inv[0][0].series(), poly1(4, {1, -1, 1, -1, 1}));
    EXPECT_EQ(inv[0][1].series(), poly1(4, {0, Rational(-1, 2), Rational(1, 2), Rational(-1, 2), Rational(1, 2)}));
    EXPECT_TRUE(inv[1][0].series().is_zero_series());
    EXPECT_EQ(inv[1][1].series(), poly1(4, {Rational(1, 2)}));
}

TEST(Jet, MatrixInverseSingularConstantPart)
{
    Jet t(poly1(4, {0, 1}), {0});
    EXPECT_THROW(jet_matrix_inverse(Matrix<Jet>{{t}}), DomainError);
}

TEST(Arrow, ComposeFrozen)
{
    auto doubling = arrow1(8, 0, {0, 2});
    auto quad = arrow1(8, 0, {0, 1, 1});
    EXPECT_EQ(compose(doubling, quad), arrow1(8, 0, {0, 2, 4}));
}

TEST(Arrow, InverseFrozen)
{
    auto y = arrow1(8, 0, {1, 2, 3});
    auto inv = invert(y);
    EXPECT_EQ(inv.source(), std::vector<Rational>{1});
    EXPECT_EQ(inv, arrow1(8, 1,
                          {0, Rational(1, 2), Rational(-3, 8), Rational(9, 16), Rational(-135, 128), Rational(567, 256),
                           Rational(-5103, 1024), Rational(24057, 2048), Rational(-938223, 32768)}));
}

TEST(Arrow, CatalanInverse)
{
    auto inv = invert(arrow1(8, 0, {0, 1, 1}));
    EXPECT_EQ(inv, arrow1(8, 0, {0, 1, -1, 2, -5, 14, -42, 132, -429}));
}

TEST(Arrow, NonPositiveDeterminantRejected)
{
    EXPECT_THROW(arrow1(4, 0, {0, -1}), DomainError);
    EXPECT_THROW(arrow1(4, 0, {0, 0, 1}), DomainError);
}

TEST(Arrow, ComposeRequiresMatchingEndpoints)
{
    auto a = arrow1(4, 0, {1, 1});
    auto b = arrow1(4, 0, {0, 1});
    EXPECT_THROW(compose(a, b), StructuralError);
    EXPECT_THROW(compose(a, arrow1(5, 1, {0, 1})), StructuralError);
}

TEST(ArrowProperty, CompositionMatchesDenseOracle)
{
    gen::Rng rng(11);
    for (int trial = 0; trial < 60; ++trial) {
        int k = 1 + trial % 2;
        auto z = gen::random_arrow(rng, k, 6, gen::random_point(rng, k));
        auto y = gen::random_arrow(rng, k, 6, z.target());
        auto got = compose(z, y);
        std::vector<oracle::Dense> inner;
        for (auto& c : z.nonconstant())
            inner.push_back(oracle::Dense::from(c));
        for (int i = 0; i < k; ++i) {
            auto expect = oracle::compose(oracle::Dense::from(y.components()[i]), inner).to(k);
            EXPECT_EQ(got.components()[i], expect) << "trial " << trial;
        }
    }
}

TEST(ArrowProperty, InverseMatchesLagrange)
{
    gen::Rng rng(12);
    for (int trial = 0; trial < 40; ++trial) {
        auto y = gen::random_arrow(rng, 1, 8, {Rational(0)});
        std::vector<Rational> f(9);
        for (int i = 0; i <= 8; ++i)
            f[i] = i == 0 ? Rational(0) : y.components()[0].coeff(MultiIndex{i});
        auto expect = oracle::lagrange_inverse(f);
        auto inv = invert(y);
        for (int i = 1; i <= 8; ++i)
            EXPECT_EQ(inv.components()[0].coeff(MultiIndex{i}), expect[i]);
    }
}

TEST(ArrowProperty, GroupoidLaws)
{
    gen::Rng rng(13);
    for (int trial = 0; trial < 40; ++trial) {
        int k = 1 + trial % 2;
        auto x = gen::random_arrow(rng, k, 8, gen::random_point(rng, k));
        auto y = gen::random_arrow(rng, k, 8, x.target());
        auto z = gen::random_arrow(rng, k, 8, y.target());
        EXPECT_EQ(compose(compose(x, y), z), compose(x, compose(y, z)));
        auto id_src = GroupoidArrow::identity(k, 8, x.source());
        auto id_tgt = GroupoidArrow::identity(k, 8, x.target());
        EXPECT_EQ(compose(id_src, x), x);
        EXPECT_EQ(compose(x, id_tgt), x);
        EXPECT_TRUE(compose(x, invert(x)).is_identity());
        EXPECT_TRUE(compose(invert(x), x).is_identity());
        EXPECT_EQ(invert(invert(x)), x);
    }
}

TEST(ArrowProperty, MatrixInverseIsTwoSided)
{
    gen::Rng rng(14);
    for (int trial = 0; trial < 20; ++trial) {
        auto a = gen::random_arrow(rng, 2, 6, gen::random_point(rng, 2));
        Matrix<Series<Rational>> m(2);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                m[i].push_back(a.components()[i].derivative(j));
        auto inv = series_matrix_inverse(m);
        auto prod = matmul(m, inv);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                EXPECT_EQ(prod[i][j], Series<Rational>::constant(2, 5, Rational(i == j ? 1 : 0)));
    }
}
