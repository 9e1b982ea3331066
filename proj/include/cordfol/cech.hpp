#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "cordfol/chart.hpp"
#include "cordfol/cord.hpp"
#include "cordfol/errors.hpp"
#include "cordfol/holonomy.hpp"
#include "cordfol/jet.hpp"
#include "cordfol/rational_field.hpp"

namespace cordfol {

namespace detail {

inline Rational floor_of(const Rational& r)
{
    mpz_class q;
    mpz_class n = r.num(), d = r.den();
    mpz_fdiv_q(q.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
    return Rational(mpq_class(q));
}
inline Rational frac(const Rational& r) { return r - floor_of(r); }
inline double frac(double x) { return x - std::floor(x); }

} // namespace detail

// Open arc (start, end) of the circle R/Z, measured in turns; 0 < end - start < 1.
struct Arc {
    Rational start, end;

    Arc(Rational s, Rational e) : start(std::move(s)), end(std::move(e))
    {
        Rational len = end - start;
        if (len.sign() <= 0 || !(len < Rational(1)))
            throw DomainError("arc (" + start.str() + ", " + end.str() + ") must have length in (0, 1)");
    }

    Rational length() const { return end - start; }
    Rational midpoint() const { return (start + end) / Rational(2); }
    // Representative of x mod 1 in [start, start + 1).
    Rational lift(const Rational& x) const { return start + detail::frac(x - start); }
    double lift(double x) const { return start.to_double() + detail::frac(x - start.to_double()); }
    bool contains(const Rational& x) const
    {
        Rational r = detail::frac(x - start);
        return r.sign() > 0 && r < length();
    }
    bool contains(double x) const
    {
        double r = detail::frac(x - start.to_double());
        return r > 0 && r < length().to_double();
    }
    std::string str() const { return "(" + start.str() + ", " + end.str() + ")"; }
};

namespace detail {

// Connected components of the intersection of two arcs, each shifted so that its start lies in [0, 1).
inline std::vector<Arc> intersect(const Arc& a, const Arc& b)
{
    std::vector<Arc> out;
    for (int k = -2; k <= 2; ++k) {
        Rational lo = std::max(a.start, b.start + Rational(k));
        Rational hi = std::min(a.end, b.end + Rational(k));
        if (lo < hi) {
            Rational f = floor_of(lo);
            out.emplace_back(lo - f, hi - f);
        }
    }
    return out;
}

inline std::vector<std::vector<Arc>> product(const std::vector<std::vector<Arc>>& axes)
{
    std::vector<std::vector<Arc>> out{{}};
    for (auto& choices : axes) {
        std::vector<std::vector<Arc>> next;
        for (auto& partial : out)
            for (auto& c : choices) {
                auto p = partial;
                p.push_back(c);
                next.push_back(std::move(p));
            }
        out = std::move(next);
    }
    return out;
}

} // namespace detail

// Product of arcs in T^n (turns on every axis).
struct Box {
    std::vector<Arc> sides;

    int dim() const { return static_cast<int>(sides.size()); }
    bool contains(const std::vector<Rational>& x) const
    {
        for (int j = 0; j < dim(); ++j)
            if (!sides[j].contains(x[j]))
                return false;
        return true;
    }
    bool contains(const std::vector<double>& x) const
    {
        for (int j = 0; j < dim(); ++j)
            if (!sides[j].contains(x[j]))
                return false;
        return true;
    }
    std::vector<double> anchor() const
    {
        std::vector<double> p;
        for (auto& s : sides)
            p.push_back(s.midpoint().to_double());
        return p;
    }
    // start + f * length on every axis.
    std::vector<double> point(double f) const
    {
        std::vector<double> p;
        for (auto& s : sides)
            p.push_back(s.start.to_double() + f * s.length().to_double());
        return p;
    }
    std::vector<Rational> point(const Rational& f) const
    {
        std::vector<Rational> p;
        for (auto& s : sides)
            p.push_back(s.start + f * s.length());
        return p;
    }
    std::vector<double> lift(const std::vector<double>& x) const
    {
        std::vector<double> p;
        for (int j = 0; j < dim(); ++j)
            p.push_back(sides[j].lift(x[j]));
        return p;
    }
    std::string str() const
    {
        std::string s;
        for (int j = 0; j < dim(); ++j)
            s += (j ? " x " : "") + sides[j].str();
        return s;
    }
};

// One connected component of U_a n U_b, a < b.
struct Overlap {
    int a, b;
    Box box;
};

// Finite cover of T^n by boxes, with precomputed overlap components.
class Cover {
public:
    Cover() = default;
    explicit Cover(std::vector<Box> pieces) : pieces_(std::move(pieces))
    {
        if (pieces_.size() < 2)
            throw DomainError("a cover needs at least two pieces");
        n_ = pieces_[0].dim();
        if (n_ < 1)
            throw StructuralError("cover pieces need at least one side");
        for (auto& p : pieces_)
            if (p.dim() != n_)
                throw StructuralError("cover pieces have different dimensions");
        for (int a = 0; a < size(); ++a)
            for (int b = a + 1; b < size(); ++b)
                for (auto& sides : intersection(pieces_[a], pieces_[b].sides))
                    overlaps_.push_back({a, b, Box{sides}});
        check_coverage();
    }

    static Cover circle(const std::vector<Arc>& arcs)
    {
        std::vector<Box> boxes;
        for (auto& a : arcs)
            boxes.push_back(Box{{a}});
        return Cover(std::move(boxes));
    }

    int dim() const { return n_; }
    int size() const { return static_cast<int>(pieces_.size()); }
    const Box& piece(int i) const { return pieces_.at(i); }
    const std::vector<Box>& pieces() const { return pieces_; }
    const std::vector<Overlap>& overlaps() const { return overlaps_; }

    // Index of the overlap component of pieces a != b containing x, or -1.
    template <class P>
    int overlap_at(int a, int b, const P& x) const
    {
        if (a > b)
            std::swap(a, b);
        for (std::size_t i = 0; i < overlaps_.size(); ++i)
            if (overlaps_[i].a == a && overlaps_[i].b == b && overlaps_[i].box.contains(x))
                return static_cast<int>(i);
        return -1;
    }

    // Components of U_a n U_b n U_c.
    std::vector<Box> triple(int a, int b, int c) const
    {
        std::vector<Box> out;
        for (auto& o : overlaps_)
            if ((o.a == std::min(a, b) && o.b == std::max(a, b)))
                for (auto& sides : intersection(pieces_.at(c), o.box.sides))
                    out.push_back(Box{sides});
        return out;
    }

private:
    static std::vector<std::vector<Arc>> intersection(const Box& p, const std::vector<Arc>& sides)
    {
        std::vector<std::vector<Arc>> axes;
        for (int j = 0; j < p.dim(); ++j)
            axes.push_back(detail::intersect(p.sides[j], sides[j]));
        return detail::product(axes);
    }

    // Every breakpoint and every gap midpoint of the per-axis grid must lie in some piece.
    void check_coverage() const
    {
        std::vector<std::vector<Rational>> axes(n_);
        for (int j = 0; j < n_; ++j) {
            std::vector<Rational> bp;
            for (auto& p : pieces_) {
                bp.push_back(detail::frac(p.sides[j].start));
                bp.push_back(detail::frac(p.sides[j].end));
            }
            std::sort(bp.begin(), bp.end());
            bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
            for (std::size_t i = 0; i < bp.size(); ++i) {
                Rational next = i + 1 < bp.size() ? bp[i + 1] : bp[0] + Rational(1);
                axes[j].push_back(bp[i]);
                axes[j].push_back((bp[i] + next) / Rational(2));
            }
        }
        std::vector<std::size_t> idx(n_, 0);
        for (;;) {
            std::vector<Rational> x;
            for (int j = 0; j < n_; ++j)
                x.push_back(axes[j][idx[j]]);
            bool hit = false;
            for (auto& p : pieces_)
                hit = hit || p.contains(x);
            if (!hit) {
                std::string s;
                for (int j = 0; j < n_; ++j)
                    s += (j ? ", " : "") + x[j].str();
                throw DomainError("cover misses the point (" + s + ")");
            }
            int j = n_ - 1;
            while (j >= 0 && ++idx[j] == axes[j].size())
                idx[j--] = 0;
            if (j < 0)
                break;
        }
    }

    int n_ = 0;
    std::vector<Box> pieces_;
    std::vector<Overlap> overlaps_;
};

// Coefficients of a codimension-k jet 1-form on T^n at a point given in turns. Entry j of the value is
// the jet vector multiplying d(turn_j).
struct JetField {
    int dim = 0, codim = 0, order = 0;
    std::function<std::vector<SeriesVec<double>>(const std::vector<double>&)> at;
    // For piecewise fields on the circle: turns in [0, 1) where the field is only finitely smooth.
    std::vector<double> breaks;
};

// A cord on a fully periodic chart, read in turns (d(theta) = 2 pi d(turn)).
template <class S>
JetField jet_field(const JetForm<S>& a, const Chart& chart)
{
    if (!chart.fully_periodic() || chart.dim() != a.dim())
        throw DomainError("Cech extraction needs a cord on a fully periodic chart");
    if (a.degree() != 1)
        throw StructuralError("Cech extraction needs a jet 1-form");
    if (!is_impotent(a))
        throw DomainError("Cech extraction needs an impotent cord");
    struct Entry {
        int i, j;
        MultiIndex m;
        S f;
    };
    std::vector<Entry> entries;
    for (int i = 0; i < a.codim(); ++i)
        for (auto& [mask, s] : a.component(i).terms()) {
            int j = std::countr_zero(mask);
            for (auto& [m, f] : s.terms())
                entries.push_back({i, j, m, f});
        }
    const int n = a.dim(), k = a.codim(), order = a.order();
    JetField out{n, k, order, {}, {}};
    out.at = [entries, n, k, order](const std::vector<double>& x) {
        constexpr double tau = 2 * std::numbers::pi;
        std::vector<double> xr(kMaxDim, 0.0);
        for (int j = 0; j < n; ++j)
            xr[j] = tau * x[j];
        std::vector<SeriesVec<double>> v(n, SeriesVec<double>(k, Series<double>(k, order)));
        for (auto& e : entries)
            v[e.j][e.i].add_to(e.m, tau * e.f.evaluate(xr));
        return v;
    };
    return out;
}

namespace detail {

inline Series<double> padded(const Series<double>& s, int order)
{
    Series<double> r(s.codim(), order);
    for (auto& [m, v] : s.terms())
        r.set(m, v);
    return r;
}

inline SeriesVec<double> identity_jet(int k, int order)
{
    SeriesVec<double> y;
    for (int i = 0; i < k; ++i)
        y.push_back(Series<double>::variable(k, order, i));
    return y;
}

// Parameter values in (0, 1) where the path from + u (to - from) on the circle crosses a break.
inline std::vector<double> crossings(const JetField& f, const std::vector<double>& from,
                                     const std::vector<double>& to)
{
    std::vector<double> u{0.0};
    if (f.dim == 1 && to[0] != from[0]) {
        double lo = std::min(from[0], to[0]), hi = std::max(from[0], to[0]);
        for (double b : f.breaks)
            for (double x = b + std::ceil(lo - b); x < hi; x += 1.0)
                if (x > lo)
                    u.push_back((x - from[0]) / (to[0] - from[0]));
    }
    u.push_back(1.0);
    std::sort(u.begin(), u.end());
    return u;
}

// Classical RK4 for dc/du = rhs(c, u) on [u0, u1] with the given number of steps.
template <class F>
SeriesVec<double> rk4_on(const F& rhs, SeriesVec<double> c, double u0, double u1, int steps)
{
    const double h = (u1 - u0) / steps;
    for (int s = 0; s < steps; ++s) {
        double u = u0 + s * h;
        auto k1 = rhs(c, u);
        auto k2 = rhs(axpy(c, h / 2, k1), u + h / 2);
        auto k3 = rhs(axpy(c, h / 2, k2), u + h / 2);
        auto k4 = rhs(axpy(c, h, k3), u + h);
        for (std::size_t i = 0; i < c.size(); ++i)
            c[i] = c[i] + (k1[i] + k2[i].scaled(2) + k3[i].scaled(2) + k4[i]).scaled(h / 6);
    }
    return c;
}

// RK4 through each smooth piece in turn; `density` is steps per unit of u.
template <class F>
SeriesVec<double> rk4_pieces(const F& rhs, SeriesVec<double> c, const std::vector<double>& pieces, double density)
{
    for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
        double len = pieces[i + 1] - pieces[i];
        if (len <= 0)
            continue;
        c = rk4_on(rhs, std::move(c), pieces[i], pieces[i + 1],
                   std::max(2, static_cast<int>(std::ceil(len * density))));
    }
    return c;
}

// RK4 for dY/du = -DY . F(u) along the segment from -> to, Y(0) = identity.
inline SeriesVec<double> trivialization_rk4(const JetField& f, const std::vector<double>& from,
                                            const std::vector<double>& to, double density)
{
    const int k = f.codim, n = f.dim, order = f.order;
    std::vector<double> dir(n);
    for (int j = 0; j < n; ++j)
        dir[j] = to[j] - from[j];
    auto rhs = [&](const SeriesVec<double>& y, double u) {
        std::vector<double> p(n);
        for (int j = 0; j < n; ++j)
            p[j] = from[j] + u * dir[j];
        auto c = f.at(p);
        SeriesVec<double> fl(k, Series<double>(k, order));
        for (int j = 0; j < n; ++j)
            if (dir[j] != 0.0)
                for (int l = 0; l < k; ++l)
                    fl[l] = fl[l] + c[j][l].scaled(dir[j]);
        SeriesVec<double> out(k, Series<double>(k, order));
        for (int i = 0; i < k; ++i)
            for (int l = 0; l < k; ++l)
                out[i] = out[i] - padded(y[i].derivative(l), order) * fl[l];
        return out;
    };
    return rk4_pieces(rhs, identity_jet(k, order), crossings(f, from, to), density);
}

inline SeriesVec<double> richardson(const SeriesVec<double>& coarse, const SeriesVec<double>& fine, double tol,
                                    double& error)
{
    SeriesVec<double> out;
    for (std::size_t i = 0; i < fine.size(); ++i)
        out.push_back((fine[i].scaled(16) - coarse[i]).scaled(1.0 / 15));
    error = relative_distance(fine, coarse) / 15;
    if (error > tol)
        throw ToleranceNotMet(error, tol);
    return out;
}

} // namespace detail

struct Trivialization {
    SeriesVec<double> value; // Y with Y * 0 = A, normalised to the identity at the start point
    double error = 0;
};

// Local trivialization of an impotent cord along the straight segment from -> to (in turns).
inline Trivialization trivialize(const JetField& f, const std::vector<double>& from, const std::vector<double>& to,
                                 const StepControl& ctl = {})
{
    if (!(ctl.step > 0))
        throw DomainError("step must be positive");
    double length = 0;
    for (int j = 0; j < f.dim; ++j)
        length = std::max(length, std::abs(to[j] - from[j]));
    double density = std::max(4.0, length / ctl.step);
    Trivialization t;
    t.value = detail::richardson(detail::trivialization_rk4(f, from, to, density),
                                 detail::trivialization_rk4(f, from, to, 2 * density), ctl.tolerance, t.error);
    return t;
}

// Trivialization of piece a at x, anchored at the centre of the piece.
inline Trivialization piece_trivialization(const JetField& f, const Cover& cover, int a, const std::vector<double>& x,
                                           const StepControl& ctl = {})
{
    const Box& p = cover.piece(a);
    return trivialize(f, p.anchor(), p.lift(x), ctl);
}

// Cocycle with floating jets, as extracted from a cord: arrows[i] is c_{ab} on overlap component i.
struct ExtractedCocycle {
    Cover cover;
    std::vector<SeriesVec<double>> arrows;
    double constancy = 0;         // largest spread of an arrow across the samples of its component
    double integration_error = 0; // largest Richardson estimate among the trivializations
    double cocycle_residual = 0;  // largest |c_ab o c_bc - c_ac| over triple overlaps

    // c_{ab} on the component containing x.
    SeriesVec<double> at(int a, int b, const std::vector<double>& x) const
    {
        if (a == b)
            return detail::identity_jet(arrows.at(0).size(), arrows.at(0)[0].order());
        int i = cover.overlap_at(a, b, x);
        if (i < 0)
            throw DomainError("pieces " + std::to_string(a) + ", " + std::to_string(b) + " do not overlap there");
        return a < b ? arrows[i] : invert_series_map(arrows[i]);
    }
};

inline std::vector<double> to_doubles(const std::vector<Rational>& x)
{
    std::vector<double> d;
    for (auto& v : x)
        d.push_back(v.to_double());
    return d;
}

// c_{ab} = Y_a o Y_b^{-1}, sampled at the centre of each overlap component and checked at two more points.
inline ExtractedCocycle extract_cocycle(const JetField& f, const Cover& cover, const StepControl& ctl = {})
{
    if (f.dim != cover.dim())
        throw StructuralError("cord and cover dimensions differ");
    if (f.order < 1)
        throw StructuralError("extraction needs truncation order >= 1");
    ExtractedCocycle out{cover, {}, 0, 0, 0};
    for (auto& o : cover.overlaps()) {
        std::optional<SeriesVec<double>> first;
        for (double s : {0.5, 0.25, 0.75}) {
            auto x = o.box.point(s);
            auto ya = piece_trivialization(f, cover, o.a, x, ctl);
            auto yb = piece_trivialization(f, cover, o.b, x, ctl);
            out.integration_error = std::max({out.integration_error, ya.error, yb.error});
            auto c = substitute(ya.value, invert_series_map(yb.value));
            if (!first) {
                first = c;
                continue;
            }
            double dev = relative_distance(*first, c);
            out.constancy = std::max(out.constancy, dev);
            if (dev > ctl.tolerance)
                throw NumericError("extraction: arrow between pieces " + std::to_string(o.a) + " and " +
                                   std::to_string(o.b) + " is not locally constant, max deviation " +
                                   std::to_string(dev));
        }
        out.arrows.push_back(*first);
    }
    for (int a = 0; a < cover.size(); ++a)
        for (int b = a + 1; b < cover.size(); ++b)
            for (int c = b + 1; c < cover.size(); ++c)
                for (auto& box : cover.triple(a, b, c)) {
                    auto x = box.point(0.5);
                    auto lhs = substitute(out.at(a, b, x), out.at(b, c, x));
                    out.cocycle_residual = std::max(out.cocycle_residual, relative_distance(lhs, out.at(a, c, x)));
                }
    return out;
}

inline ExtractedCocycle extract_cocycle(const Cord& a, const Chart& chart, const Cover& cover,
                                        const StepControl& ctl = {})
{
    return extract_cocycle(jet_field(a, chart), cover, ctl);
}

// Cocycle with exact arrows: arrows[i] is c_{ab} on overlap component i of the cover.
class Cocycle {
public:
    Cocycle(Cover cover, std::vector<GroupoidArrow> arrows) : cover_(std::move(cover)), arrows_(std::move(arrows))
    {
        if (arrows_.size() != cover_.overlaps().size())
            throw StructuralError("cocycle needs one arrow per overlap component (" +
                                  std::to_string(cover_.overlaps().size()) + "), got " +
                                  std::to_string(arrows_.size()));
        for (auto& c : arrows_)
            if (c.codim() != arrows_[0].codim() || c.order() != arrows_[0].order())
                throw StructuralError("cocycle arrows differ in codimension or order");
    }

    static Cocycle trivial(const Cover& cover, int k, int order)
    {
        std::vector<GroupoidArrow> arrows(cover.overlaps().size(),
                                          GroupoidArrow::identity(k, order, std::vector<Rational>(k)));
        return Cocycle(cover, std::move(arrows));
    }

    const Cover& cover() const { return cover_; }
    const std::vector<GroupoidArrow>& arrows() const { return arrows_; }
    int codim() const { return arrows_[0].codim(); }
    int order() const { return arrows_[0].order(); }

    GroupoidArrow at(int a, int b, const std::vector<Rational>& x) const
    {
        if (a == b)
            return GroupoidArrow::identity(codim(), order(), std::vector<Rational>(codim()));
        int i = cover_.overlap_at(a, b, x);
        if (i < 0)
            throw DomainError("pieces " + std::to_string(a) + ", " + std::to_string(b) + " do not overlap there");
        return a < b ? arrows_[i] : invert(arrows_[i]);
    }

    // Every arrow fixes 0.
    bool fixes_origin() const
    {
        for (auto& c : arrows_)
            for (int i = 0; i < codim(); ++i)
                if (!c.source()[i].is_zero() || !c.target()[i].is_zero())
                    return false;
        return true;
    }

    // Exact cocycle law c_ab o c_bc = c_ac on every triple overlap.
    void verify() const
    {
        for (int a = 0; a < cover_.size(); ++a)
            for (int b = a + 1; b < cover_.size(); ++b)
                for (int c = b + 1; c < cover_.size(); ++c)
                    for (auto& box : cover_.triple(a, b, c)) {
                        auto x = box.point(Rational(1, 2));
                        auto ab = at(a, b, x), bc = at(b, c, x), ac = at(a, c, x);
                        if (!(bc.target() == ab.source()) || !(compose(bc, ab) == ac))
                            throw DomainError("cocycle law fails on the triple overlap of pieces " +
                                              std::to_string(a) + ", " + std::to_string(b) + ", " +
                                              std::to_string(c) + " at " + box.str());
                    }
    }

private:
    Cover cover_;
    std::vector<GroupoidArrow> arrows_;
};

// Rounds every coefficient to a nearby rational (|error| <= tol).
inline Cocycle to_exact(const ExtractedCocycle& c, double tol = 1e-12)
{
    std::vector<GroupoidArrow> arrows;
    for (auto& v : c.arrows) {
        SeriesVec<Rational> comps;
        for (auto& s : v)
            comps.push_back(s.map_coeffs([tol](double x) { return Rational::approximate(x, tol); }));
        for (auto& s : comps)
            s.set(MultiIndex(s.codim()), Rational(0));
        arrows.emplace_back(std::vector<Rational>(v.size()), std::move(comps));
    }
    return Cocycle(c.cover, std::move(arrows));
}

// c'_{ab} = d_a o c_ab o d_b^{-1} for locally constant arrows d, one per piece.
inline Cocycle coboundary(const Cocycle& c, const std::vector<GroupoidArrow>& d)
{
    if (static_cast<int>(d.size()) != c.cover().size())
        throw StructuralError("coboundary needs one arrow per piece");
    std::vector<GroupoidArrow> arrows;
    for (std::size_t i = 0; i < c.arrows().size(); ++i) {
        auto& o = c.cover().overlaps()[i];
        arrows.push_back(compose(compose(invert(d[o.b]), c.arrows()[i]), d[o.a]));
    }
    return Cocycle(c.cover(), std::move(arrows));
}

namespace detail {

// Pieces of a circle cover in cyclic order of their start points, and the overlap component through
// which each piece hands over to the next one.
struct CircleChain {
    std::vector<int> order;
    std::vector<int> handover;
};

inline CircleChain circle_chain(const Cover& cover)
{
    if (cover.dim() != 1)
        throw DomainError("full-loop product is only defined for circle covers");
    CircleChain ch;
    for (int i = 0; i < cover.size(); ++i)
        ch.order.push_back(i);
    std::sort(ch.order.begin(), ch.order.end(), [&](int a, int b) {
        return frac(cover.piece(a).sides[0].start) < frac(cover.piece(b).sides[0].start);
    });
    const int m = cover.size();
    for (int i = 0; i < m; ++i) {
        int cur = ch.order[i], nxt = ch.order[(i + 1) % m];
        Rational s = frac(cover.piece(nxt).sides[0].start);
        if (!cover.piece(cur).sides[0].contains(s))
            throw DomainError("circle cover is not a chain: piece " + std::to_string(nxt) +
                              " does not start inside piece " + std::to_string(cur));
        int found = -1;
        for (std::size_t o = 0; o < cover.overlaps().size(); ++o) {
            auto& ov = cover.overlaps()[o];
            if (ov.a == std::min(cur, nxt) && ov.b == std::max(cur, nxt) && ov.box.sides[0].start == s)
                found = static_cast<int>(o);
        }
        if (found < 0)
            throw DomainError("circle cover: no overlap component where piece " + std::to_string(cur) +
                              " hands over to " + std::to_string(nxt));
        ch.handover.push_back(found);
    }
    return ch;
}

} // namespace detail

// Ordered full-loop product c_{0,m-1} o ... o c_{2,1} o c_{1,0} around the circle.
inline GroupoidArrow loop_product(const Cocycle& c)
{
    auto ch = detail::circle_chain(c.cover());
    GroupoidArrow p = GroupoidArrow::identity(c.codim(), c.order(), c.arrows()[0].source());
    for (std::size_t i = 0; i < ch.order.size(); ++i) {
        int cur = ch.order[i], nxt = ch.order[(i + 1) % ch.order.size()];
        auto& arrow = c.arrows()[ch.handover[i]];
        p = compose(p, nxt < cur ? arrow : invert(arrow));
    }
    return p;
}

inline SeriesVec<double> loop_product(const ExtractedCocycle& c)
{
    auto ch = detail::circle_chain(c.cover);
    SeriesVec<double> p = detail::identity_jet(c.arrows.at(0).size(), c.arrows[0][0].order());
    for (std::size_t i = 0; i < ch.order.size(); ++i) {
        int cur = ch.order[i], nxt = ch.order[(i + 1) % ch.order.size()];
        auto& arrow = c.arrows[ch.handover[i]];
        p = substitute(nxt < cur ? arrow : invert_series_map(arrow), p);
    }
    return p;
}

inline SeriesVec<double> to_doubles(const GroupoidArrow& g)
{
    SeriesVec<double> out;
    for (auto& s : g.nonconstant())
        out.push_back(s.map_coeffs([](const Rational& r) { return r.to_double(); }));
    return out;
}

namespace detail {

// L with L o P = lambda L and L'(0) = 1, for a codimension-one jet P with P(0) = 0 and lambda != 1.
inline Series<double> linearizer(const Series<double>& p, double lambda)
{
    const int n = p.order();
    std::vector<Series<double>> powers{Series<double>::constant(1, n, 1.0), p};
    for (int m = 2; m <= n; ++m)
        powers.push_back(powers.back() * p);
    std::vector<double> l(n + 1, 0.0);
    l[1] = 1;
    for (int k = 2; k <= n; ++k) {
        double acc = 0;
        for (int m = 1; m < k; ++m)
            acc += l[m] * powers[m].coeff(MultiIndex{k});
        l[k] = acc / (lambda - std::pow(lambda, k));
    }
    Series<double> out(1, n);
    for (int k = 1; k <= n; ++k)
        out.set(MultiIndex{k}, l[k]);
    return out;
}

} // namespace detail

enum class ClassRelation { same, distinct, undetermined };

inline const char* to_string(ClassRelation r)
{
    switch (r) {
    case ClassRelation::same: return "same";
    case ClassRelation::distinct: return "distinct";
    case ClassRelation::undetermined: return "undetermined";
    }
    return "?";
}

struct ClassComparison {
    ClassRelation relation = ClassRelation::undetermined;
    double linear_p = 0, linear_q = 0;
    std::optional<SeriesVec<double>> conjugator; // h with h o P = Q o h
    double residual = 0;                         // of the conjugation, when a conjugator is reported
};

// Classes of codimension-one circle cocycles, compared through their full-loop products. The linear
// coefficient is a conjugacy invariant; when it differs from 1 both jets are linearizable and the
// conjugator is explicit. Tangent-to-identity products are only decided when they coincide.
inline ClassComparison compare_classes(const SeriesVec<double>& p, const SeriesVec<double>& q, double tol)
{
    if (p.size() != 1 || q.size() != 1)
        throw DomainError("class comparison is implemented for codimension one");
    const int n = std::min(p[0].order(), q[0].order());
    Series<double> pp = p[0].truncate(n), qq = q[0].truncate(n);
    ClassComparison r;
    r.linear_p = pp.coeff(MultiIndex{1});
    r.linear_q = qq.coeff(MultiIndex{1});
    double scale = std::max({1.0, std::abs(r.linear_p), std::abs(r.linear_q)});
    if (std::abs(r.linear_p - r.linear_q) > tol * scale) {
        r.relation = ClassRelation::distinct;
        return r;
    }
    if (std::abs(r.linear_p - 1) > tol) {
        auto lp = detail::linearizer(pp, r.linear_p);
        auto lq = detail::linearizer(qq, r.linear_q);
        SeriesVec<double> h = substitute(invert_series_map(SeriesVec<double>{lq}), SeriesVec<double>{lp});
        r.residual = relative_distance(substitute(h, SeriesVec<double>{pp}), substitute(SeriesVec<double>{qq}, h));
        r.conjugator = h;
        r.relation = r.residual <= tol ? ClassRelation::same : ClassRelation::undetermined;
        return r;
    }
    if (relative_distance({pp}, {qq}) <= tol) {
        r.conjugator = detail::identity_jet(1, n);
        r.relation = ClassRelation::same;
    }
    return r;
}

namespace detail {

// Polynomial in the first coordinate, evaluated by Horner's rule in 256-bit floating point: the
// expanded glued coefficients cancel far beyond double precision.
class PrecisePolynomial {
public:
    static constexpr mp_bitcnt_t bits = 256;

    explicit PrecisePolynomial(const ScalarField& f)
    {
        for (auto& [k, c] : f.terms()) {
            if (k.kind() != Harmonic::one)
                throw DomainError("precise evaluation needs a polynomial");
            for (int j = 1; j < kMaxDim; ++j)
                if (k.exp(j))
                    throw DomainError("precise evaluation needs a polynomial in one coordinate");
            const std::size_t d = static_cast<std::size_t>(k.exp(0));
            if (c_.size() <= d)
                c_.resize(d + 1, mpf_class(0, bits));
            c_[d] = mpf_class(c.num(), bits) / mpf_class(c.den(), bits);
        }
    }

    mpf_class at(const mpf_class& v) const
    {
        mpf_class acc(0, bits);
        for (auto it = c_.rbegin(); it != c_.rend(); ++it)
            acc = acc * v + *it;
        return acc;
    }

private:
    std::vector<mpf_class> c_;
};

class PreciseRational {
public:
    explicit PreciseRational(const RationalField& f) : num_(f.numerator())
    {
        for (auto& d : f.denominator())
            den_.push_back({PrecisePolynomial(d.atom), d.power});
    }

    double evaluate(double v) const
    {
        mpf_class x(v, PrecisePolynomial::bits);
        mpf_class r = num_.at(x);
        for (auto& [p, e] : den_) {
            mpf_class d = p.at(x);
            for (int i = 0; i < e; ++i)
                r /= d;
        }
        return r.get_d();
    }

private:
    PrecisePolynomial num_;
    std::vector<std::pair<PrecisePolynomial, int>> den_;
};

} // namespace detail

// Cord glued from a circle cocycle: one exact piece per segment [lo, hi] of the circle (in turns),
// on the local chart v in [0, 1] with turn = lo + v (hi - lo); the coefficient multiplies dv.
struct GluedSegment {
    Rational lo, hi;
    RationalCord cord;
};

class ReconstructedCord {
public:
    ReconstructedCord(int codim, int order, std::vector<GluedSegment> segments)
        : k_(codim), n_(order), segments_(std::move(segments))
    {
    }

    int codim() const { return k_; }
    int order() const { return n_; }
    const std::vector<GluedSegment>& segments() const { return segments_; }

    static Chart local_chart() { return Chart({{"v", false, 0.0, 1.0}}); }

    bool impotent() const
    {
        for (auto& s : segments_)
            if (!is_impotent(s.cord))
                return false;
        return true;
    }
    bool flat() const
    {
        for (auto& s : segments_)
            if (!is_flat(s.cord))
                return false;
        return true;
    }

    JetField field() const
    {
        if (!impotent())
            throw DomainError("reconstructed cord is not impotent");
        struct Entry {
            int i;
            MultiIndex m;
            detail::PreciseRational f;
        };
        struct Piece {
            double lo, hi;
            std::vector<Entry> entries;
        };
        std::vector<Piece> table;
        for (auto& s : segments_) {
            std::vector<Entry> e;
            for (int i = 0; i < k_; ++i)
                for (auto& [mask, ser] : s.cord.component(i).terms())
                    for (auto& [m, f] : ser.terms())
                        e.push_back({i, m, detail::PreciseRational(f)});
            table.push_back({s.lo.to_double(), s.hi.to_double(), std::move(e)});
        }
        const int k = k_, n = n_;
        JetField out{1, k, n, {}, {}};
        for (auto& s : segments_)
            out.breaks.push_back(s.lo.to_double());
        out.at = [table, k, n](const std::vector<double>& x) {
            double u = detail::frac(x[0]);
            std::size_t i = 0;
            while (i + 1 < table.size() && u > table[i].hi)
                ++i;
            const double len = table[i].hi - table[i].lo;
            const double p = (u - table[i].lo) / len;
            std::vector<SeriesVec<double>> v(1, SeriesVec<double>(k, Series<double>(k, n)));
            for (auto& e : table[i].entries)
                v[0][e.i].add_to(e.m, e.f.evaluate(p) / len);
            return v;
        };
        return out;
    }

private:
    int k_, n_;
    std::vector<GluedSegment> segments_;
};

namespace detail {

// C^2 quintic smoothstep 10v^3 - 15v^4 + 6v^5.
inline ScalarField smoothstep(const ScalarField& v)
{
    ScalarField v3 = v * v * v;
    return v3.scaled(Rational(10)) - (v3 * v).scaled(Rational(15)) + (v3 * v * v).scaled(Rational(6));
}

} // namespace detail

// Exact gluing Y_a^{-1} = sum_g lambda_g c_{ga}, A = Y_a * 0, over a circle cover. The partition of unity
// is made of compactly supported piecewise-polynomial bumps; each bump ramps up and down inside the
// overlaps, so every segment of the circle carries one bump that is identically 1 there. The result
// has truncation order c.order() - 1.
inline ReconstructedCord reconstruct_cord(const Cocycle& c)
{
    const Cover& cover = c.cover();
    if (cover.dim() != 1)
        throw DomainError("reconstruction is implemented for circle covers");
    if (c.order() < 2)
        throw StructuralError("reconstruction needs cocycle arrows of order >= 2");
    c.verify();
    const int k = c.codim(), order = c.order();

    Rational width = Rational(1);
    for (auto& o : cover.overlaps())
        width = std::min(width, o.box.sides[0].length());
    // bumps vanish within `margin` of an arc end and reach 1 at distance `reach`
    const Rational margin = width / Rational(16), reach = width * Rational(7, 16);

    std::vector<Rational> bp{Rational(0), Rational(1)};
    for (auto& p : cover.pieces()) {
        auto& s = p.sides[0];
        for (auto& x : {s.start, s.start + margin, s.start + reach, s.end - reach, s.end - margin, s.end})
            bp.push_back(detail::frac(x));
    }
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());

    std::vector<GluedSegment> out;
    for (std::size_t seg = 0; seg + 1 < bp.size(); ++seg) {
        const Rational lo = bp[seg], hi = bp[seg + 1], mid = (lo + hi) / Rational(2);
        Chart local = ReconstructedCord::local_chart();
        SamplingScope scope(local);
        const Rational seg_len = hi - lo;

        std::vector<int> active;
        std::vector<ScalarField> psi;
        bool plateau = false;
        for (int g = 0; g < cover.size(); ++g) {
            auto& s = cover.piece(g).sides[0];
            if (!s.contains(mid))
                continue;
            // position inside the arc, as a function of the local coordinate v
            Rational offset = s.lift(mid) - mid - s.start;
            Rational r = mid + offset, len = s.length();
            ScalarField pos = ScalarField::coordinate(0).scaled(seg_len) + ScalarField(lo + offset);
            const Rational ramp = reach - margin;
            ScalarField bump;
            if (r < margin || r > len - margin) {
                bump = ScalarField(0);
            } else if (r < reach) {
                bump = detail::smoothstep((pos - ScalarField(margin)).scaled(Rational(1) / ramp));
            } else if (r > len - reach) {
                bump = ScalarField(1) - detail::smoothstep((pos - ScalarField(len - reach)).scaled(Rational(1) / ramp));
            } else {
                bump = ScalarField(1);
                plateau = true;
            }
            active.push_back(g);
            psi.push_back(bump);
        }
        if (!plateau)
            throw DomainError("partition of unity degenerates on [" + lo.str() + ", " + hi.str() +
                              "]: cover overlaps are too thin");
        ScalarField total(0);
        for (auto& p : psi)
            total = total + p;

        std::optional<RationalCord> glued;
        int glued_from = -1;
        for (int a : active) {
            std::vector<Rational> x{mid};
            std::optional<std::vector<Rational>> src;
            SeriesVec<RationalField> w(k, Series<RationalField>(k, order));
            for (std::size_t gi = 0; gi < active.size(); ++gi) {
                if (psi[gi].is_zero())
                    continue;
                GroupoidArrow cga = c.at(active[gi], a, x);
                if (src && !(*src == cga.source()))
                    throw DomainError("cocycle arrows into piece " + std::to_string(a) + " have different sources");
                src = cga.source();
                RationalField lambda = RationalField::quotient(psi[gi], total, Certificate::construction);
                for (int i = 0; i < k; ++i)
                    w[i] = w[i] + cga.components()[i].map_coeffs([](const Rational& v) { return RationalField(v); })
                                      .scaled(lambda);
            }
            std::vector<RationalField> source;
            for (auto& v : *src)
                source.push_back(RationalField(v));
            GaugeSection<RationalField> winv(1, source, w);
            GaugeSection<RationalField> y = invert_section(winv);
            RationalCord zero(k, order, 1, 1, y.target());
            RationalCord a_alpha = gauge(y, zero);
            if (!glued) {
                glued = a_alpha;
                glued_from = a;
            } else if (!(*glued == a_alpha)) {
                throw DomainError("glued pieces " + std::to_string(glued_from) + " and " + std::to_string(a) +
                                  " disagree on [" + lo.str() + ", " + hi.str() + "]");
            }
        }
        out.push_back({lo, hi, *glued});
    }
    return ReconstructedCord(k, order - 1, std::move(out));
}

// Monodromy of a jet field on the circle around the generator, from turn 0.
inline HolonomyJet circle_monodromy(const JetField& f, const StepControl& ctl = {})
{
    if (f.dim != 1)
        throw DomainError("circle monodromy needs a field on the circle");
    auto rhs = [&](const SeriesVec<double>& y, double u) { return substitute(f.at({u})[0], y); };
    auto pieces = detail::crossings(f, {0.0}, {1.0});
    auto run = [&](double density) { return detail::rk4_pieces(rhs, detail::identity_jet(f.codim, f.order), pieces, density); };
    const double density = detail::steps_for(ctl.step);
    auto coarse = run(density), fine = run(2 * density);
    HolonomyJet h;
    double err = 0;
    h.value = detail::richardson(coarse, fine, ctl.tolerance, err);
    for (std::size_t i = 0; i < fine.size(); ++i)
        h.error.push_back((fine[i] - coarse[i]).scaled(1.0 / 15));
    return h;
}

struct RoundtripReport {
    SeriesVec<double> before;   // full-loop product of the input cocycle
    SeriesVec<double> after;    // full-loop product of the cocycle extracted from the glued cord
    SeriesVec<double> monodromy; // of the glued cord
    ExtractedCocycle extracted;
    ClassComparison comparison;
};

// Glue, extract again on the same cover, and compare classes.
inline RoundtripReport roundtrip_class(const Cocycle& c, const StepControl& ctl = {})
{
    ReconstructedCord a = reconstruct_cord(c);
    JetField f = a.field();
    RoundtripReport r;
    r.extracted = extract_cocycle(f, c.cover(), ctl);
    r.after = loop_product(r.extracted);
    for (auto& s : to_doubles(loop_product(c)))
        r.before.push_back(s.truncate(a.order()));
    r.monodromy = circle_monodromy(f, ctl).value;
    r.comparison = compare_classes(r.before, r.after, ctl.tolerance * 10);
    return r;
}

} // namespace cordfol
