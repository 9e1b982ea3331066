#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "cordfol/errors.hpp"
#include "cordfol/rational.hpp"
#include "cordfol/series.hpp"

namespace cordfol {

// Truncated Taylor expansion of a real function of k variables around a rational basepoint.
// Coefficients multiply powers of (t - basepoint).
class Jet {
public:
    Jet(int k, int order, std::vector<Rational> basepoint)
        : series_(k, order), base_(std::move(basepoint))
    {
        if (static_cast<int>(base_.size()) != k)
            throw StructuralError("basepoint dimension does not match codimension");
    }
    Jet(Series<Rational> s, std::vector<Rational> basepoint) : series_(std::move(s)), base_(std::move(basepoint))
    {
        if (static_cast<int>(base_.size()) != series_.codim())
            throw StructuralError("basepoint dimension does not match codimension");
    }

    static Jet constant(int k, int order, std::vector<Rational> base, const Rational& c)
    {
        return Jet(Series<Rational>::constant(k, order, c), std::move(base));
    }

    int codim() const { return series_.codim(); }
    int order() const { return series_.order(); }
    const std::vector<Rational>& basepoint() const { return base_; }
    const Series<Rational>& series() const { return series_; }
    Rational coeff(const MultiIndex& m) const { return series_.coeff(m); }
    void set(const MultiIndex& m, const Rational& v) { series_.set(m, v); }

    Jet derivative(int i) const { return Jet(series_.derivative(i), base_); }
    Jet truncate(int order) const { return Jet(series_.truncate(order), base_); }

    double evaluate(const std::vector<double>& t) const
    {
        double acc = 0;
        for (auto& [m, v] : series_.terms()) {
            double term = v.to_double();
            for (int i = 0; i < codim(); ++i)
                for (int e = 0; e < m.e[i]; ++e)
                    term *= t[i] - base_[i].to_double();
            acc += term;
        }
        return acc;
    }

    friend Jet operator+(const Jet& a, const Jet& b) { a.require_compatible(b, "jet sum"); return Jet(a.series_ + b.series_, a.base_); }
    friend Jet operator-(const Jet& a, const Jet& b) { a.require_compatible(b, "jet difference"); return Jet(a.series_ - b.series_, a.base_); }
    friend Jet operator-(const Jet& a) { return Jet(-a.series_, a.base_); }
    friend Jet operator*(const Jet& a, const Jet& b) { a.require_compatible(b, "jet product"); return Jet(a.series_ * b.series_, a.base_); }
    friend bool operator==(const Jet& a, const Jet& b) { return a.base_ == b.base_ && a.series_ == b.series_; }

    std::string str() const { return series_.str(); }

private:
    void require_compatible(const Jet& o, const char* op) const
    {
        series_.require_same_shape(o.series_, op);
        if (base_ != o.base_)
            throw StructuralError(std::string(op) + ": basepoint mismatch");
    }

    Series<Rational> series_;
    std::vector<Rational> base_;
};

inline Jet jet_mul(const Jet& a, const Jet& b) { return a * b; }

// Multiplicative inverse of a jet with nonzero constant term.
inline Jet jet_reciprocal(const Jet& a)
{
    Matrix<Series<Rational>> m{{a.series()}};
    return Jet(series_matrix_inverse(m)[0][0], a.basepoint());
}

inline Matrix<Jet> jet_matrix_inverse(const Matrix<Jet>& m)
{
    Matrix<Series<Rational>> raw(m.size());
    for (std::size_t i = 0; i < m.size(); ++i)
        for (auto& j : m[i]) {
            if (j.basepoint() != m[0][0].basepoint())
                throw StructuralError("jet matrix entries with different basepoints");
            raw[i].push_back(j.series());
        }
    auto inv = series_matrix_inverse(raw);
    Matrix<Jet> out(m.size());
    for (std::size_t i = 0; i < m.size(); ++i)
        for (auto& s : inv[i])
            out[i].push_back(Jet(s, m[0][0].basepoint()));
    return out;
}

// N-jet at a source point of a local diffeomorphism of R^k, with positive Jacobian determinant.
// Component i is expanded in powers of (t - source); its constant term is the target coordinate.
class GroupoidArrow {
public:
    GroupoidArrow(std::vector<Rational> source, SeriesVec<Rational> comps)
        : source_(std::move(source)), comps_(std::move(comps))
    {
        const int k = static_cast<int>(comps_.size());
        if (k == 0 || static_cast<int>(source_.size()) != k)
            throw StructuralError("arrow needs one component and one source coordinate per codimension");
        for (auto& c : comps_) {
            c.require_same_shape(comps_[0], "arrow");
            if (c.codim() != k)
                throw StructuralError("arrow component codimension mismatch");
        }
        if (comps_[0].order() < 1)
            throw StructuralError("arrow needs truncation order >= 1");
        Rational det = determinant(linear_part(comps_));
        if (det.sign() <= 0)
            throw DomainError("arrow linear part has determinant " + det.str() + ", must be > 0");
    }

    static GroupoidArrow identity(int k, int order, std::vector<Rational> point)
    {
        SeriesVec<Rational> comps;
        for (int i = 0; i < k; ++i) {
            Series<Rational> s = Series<Rational>::variable(k, order, i);
            s.set(MultiIndex(k), point[i]);
            comps.push_back(s);
        }
        return GroupoidArrow(std::move(point), std::move(comps));
    }

    int codim() const { return static_cast<int>(comps_.size()); }
    int order() const { return comps_[0].order(); }
    const std::vector<Rational>& source() const { return source_; }
    std::vector<Rational> target() const
    {
        std::vector<Rational> t;
        for (auto& c : comps_)
            t.push_back(c.constant_term());
        return t;
    }
    const SeriesVec<Rational>& components() const { return comps_; }
    Matrix<Rational> linear() const { return linear_part(comps_); }

    SeriesVec<Rational> nonconstant() const
    {
        SeriesVec<Rational> out;
        for (auto& c : comps_)
            out.push_back(c.without_constant());
        return out;
    }

    bool is_identity() const { return *this == identity(codim(), order(), source_); }

    friend bool operator==(const GroupoidArrow& a, const GroupoidArrow& b)
    {
        return a.source_ == b.source_ && a.comps_ == b.comps_;
    }

    std::string str() const
    {
        std::ostringstream os;
        for (int i = 0; i < codim(); ++i)
            os << (i ? "; " : "") << comps_[i].str();
        return os.str();
    }

private:
    std::vector<Rational> source_;
    SeriesVec<Rational> comps_;
};

// outer after inner; requires inner's target to be outer's source.
inline GroupoidArrow compose(const GroupoidArrow& inner, const GroupoidArrow& outer)
{
    if (inner.codim() != outer.codim())
        throw StructuralError("compose: codimension mismatch");
    if (inner.order() != outer.order())
        throw StructuralError("compose: truncation order mismatch");
    if (inner.target() != outer.source())
        throw StructuralError("compose: inner target does not equal outer source");
    return GroupoidArrow(inner.source(), substitute(outer.components(), inner.nonconstant()));
}

inline GroupoidArrow invert(const GroupoidArrow& y)
{
    SeriesVec<Rational> w = invert_series_map(y.nonconstant());
    for (int i = 0; i < y.codim(); ++i)
        w[i].set(MultiIndex(y.codim()), y.source()[i]);
    return GroupoidArrow(y.target(), std::move(w));
}

} // namespace cordfol
