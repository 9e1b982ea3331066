#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "cordfol/chart.hpp"
#include "cordfol/errors.hpp"
#include "cordfol/form.hpp"
#include "cordfol/rational_field.hpp"
#include "cordfol/scalar_field.hpp"
#include "cordfol/series.hpp"

namespace cordfol {

// Vector-valued (R^k) differential p-form on a chart whose coefficients are N-jets in the
// transverse variable t, expanded around the source map s: component i is sum_I w_{i,I} (t - s)^I.
// S is the coefficient ring of the chart functions (ScalarField or RationalField).
template <class S>
class JetForm {
public:
    using Coeff = Series<S>;
    using Component = Form<Coeff>;

    JetForm() = default;
    JetForm(int k, int order, int dim, int degree, std::vector<S> source)
        : k_(k), n_(order), dim_(dim), p_(degree), source_(std::move(source)), comps_(k, Component(dim, degree))
    {
        MultiIndex check(k);
        (void)check;
        if (static_cast<int>(source_.size()) != k)
            throw StructuralError("source map needs one function per transverse coordinate");
        if (order < 0)
            throw StructuralError("negative truncation order");
    }
    static JetForm zero_source(int k, int order, int dim, int degree)
    {
        return JetForm(k, order, dim, degree, std::vector<S>(k));
    }

    int codim() const { return k_; }
    int order() const { return n_; }
    int dim() const { return dim_; }
    int degree() const { return p_; }
    const std::vector<S>& source() const { return source_; }
    const std::vector<Component>& components() const { return comps_; }
    const Component& component(int i) const { return comps_.at(i); }

    void set_component(int i, Component c)
    {
        if (c.dim() != dim_ || c.degree() != p_)
            throw StructuralError("component shape mismatch");
        for (auto& [m, s] : c.terms())
            if (s.codim() != k_ || s.order() != n_)
                throw StructuralError("component series shape mismatch");
        comps_.at(i) = std::move(c);
    }

    // The p-form multiplying (t - s)^I in component i.
    Form<S> coefficient(int i, const MultiIndex& idx) const
    {
        Form<S> f(dim_, p_);
        for (auto& [m, s] : comps_.at(i).terms())
            f.set(m, s.coeff(idx));
        return f;
    }
    void set_coefficient(int i, const MultiIndex& idx, const Form<S>& f)
    {
        if (f.dim() != dim_ || f.degree() != p_)
            throw StructuralError("coefficient form shape mismatch");
        Component& c = comps_.at(i);
        Component updated(dim_, p_);
        std::map<IndexSet, Coeff> merged;
        for (auto& [m, s] : c.terms())
            merged.emplace(m, s);
        for (auto& [m, v] : f.terms())
            merged.emplace(m, Coeff(k_, n_));
        for (auto& [m, s] : merged) {
            Coeff s2 = s;
            const S* v = f.find(m);
            s2.set(idx, v ? *v : S());
            updated.set(m, s2);
        }
        c = std::move(updated);
    }

    bool is_zero_jetform() const
    {
        for (auto& c : comps_)
            if (!is_zero(c))
                return false;
        return true;
    }

    JetForm truncate(int order) const
    {
        if (order > n_)
            throw StructuralError("cannot raise truncation order from " + std::to_string(n_) + " to " +
                                  std::to_string(order));
        JetForm r(k_, order, dim_, p_, source_);
        for (int i = 0; i < k_; ++i)
            r.comps_[i] = comps_[i].map_coeffs([order](const Coeff& s) { return s.truncate(order); });
        return r;
    }

    // d/dt_i applied to every coefficient; one order is lost.
    JetForm t_derivative(int i) const
    {
        JetForm r(k_, n_ - 1, dim_, p_, source_);
        for (int j = 0; j < k_; ++j)
            r.comps_[j] = comps_[j].map_coeffs([i](const Coeff& s) { return s.derivative(i); });
        return r;
    }

    void require_same_shape(const JetForm& o, const char* op) const
    {
        if (k_ != o.k_ || dim_ != o.dim_)
            throw StructuralError(std::string(op) + ": codimension or chart mismatch");
        if (p_ != o.p_)
            throw StructuralError(std::string(op) + ": degree mismatch " + std::to_string(p_) + " vs " +
                                  std::to_string(o.p_));
        if (n_ != o.n_)
            throw StructuralError(std::string(op) + ": truncation order mismatch " + std::to_string(n_) + " vs " +
                                  std::to_string(o.n_));
        if (!(source_ == o.source_))
            throw StructuralError(std::string(op) + ": source maps differ");
    }

    friend JetForm operator+(const JetForm& a, const JetForm& b)
    {
        a.require_same_shape(b, "jet form sum");
        JetForm r = a;
        for (int i = 0; i < a.k_; ++i)
            r.comps_[i] = a.comps_[i] + b.comps_[i];
        return r;
    }
    friend JetForm operator-(const JetForm& a)
    {
        JetForm r = a;
        for (auto& c : r.comps_)
            c = -c;
        return r;
    }
    friend JetForm operator-(const JetForm& a, const JetForm& b) { return a + (-b); }
    friend bool operator==(const JetForm& a, const JetForm& b)
    {
        return a.k_ == b.k_ && a.n_ == b.n_ && a.dim_ == b.dim_ && a.p_ == b.p_ && a.source_ == b.source_ &&
               a.comps_ == b.comps_;
    }

    JetForm scaled(const Rational& c) const
    {
        JetForm r = *this;
        S cs = from_rational<S>(c);
        for (auto& comp : r.comps_)
            comp = comp.map_coeffs([&](const Coeff& s) { return s.scaled(cs); });
        return r;
    }

    template <class T, class F>
    JetForm<T> convert(F&& f) const
    {
        std::vector<T> src;
        for (auto& s : source_)
            src.push_back(f(s));
        JetForm<T> r(k_, n_, dim_, p_, src);
        for (int i = 0; i < k_; ++i)
            r.set_component(i, comps_[i].map_coeffs([&](const Coeff& s) { return s.map_coeffs(f); }));
        return r;
    }

    // Human-readable listing of the non-zero coefficient forms.
    std::string str(const std::vector<std::string>& names = {}) const
    {
        std::ostringstream os;
        bool any = false;
        for (int i = 0; i < k_; ++i)
            for (auto& idx : multi_indices(k_, n_)) {
                Form<S> f = coefficient(i, idx);
                if (is_zero(f))
                    continue;
                os << (any ? "\n" : "") << "[" << i << "]" << idx.str() << ": " << f.str(names);
                any = true;
            }
        return any ? os.str() : "0";
    }

private:
    int k_ = 1;
    int n_ = 0;
    int dim_ = 0;
    int p_ = 0;
    std::vector<S> source_;
    std::vector<Component> comps_;
};

using Cord = JetForm<ScalarField>;
using RationalCord = JetForm<RationalField>;

template <class S>
Form<Series<S>> lift_form(const Form<S>& f, int k, int order)
{
    return f.map_coeffs([&](const S& v) { return Series<S>::constant(k, order, v); });
}

template <class S>
JetForm<S> truncate_to(const JetForm<S>& w, int order)
{
    return w.order() == order ? w : w.truncate(order);
}

// Total exterior derivative: d acting on chart coefficients plus the chain rule through (t - s),
// d(t - s)_i = -ds_i. Exact to order N when the source is locally constant, N-1 otherwise.
template <class S>
JetForm<S> d_total(const JetForm<S>& w)
{
    const int k = w.codim();
    std::vector<Form<S>> ds;
    bool constant_source = true;
    for (auto& s : w.source()) {
        ds.push_back(exterior_d(Form<S>::scalar(w.dim(), s)));
        constant_source = constant_source && is_zero(ds.back());
    }
    const int out_order = constant_source ? w.order() : w.order() - 1;
    JetForm<S> r(k, out_order, w.dim(), w.degree() + 1, w.source());
    JetForm<S> wt = constant_source ? w : w.truncate(out_order);
    for (int j = 0; j < k; ++j) {
        auto c = exterior_d(wt.component(j));
        if (!constant_source)
            for (int i = 0; i < k; ++i)
                if (!is_zero(ds[i]))
                    c = c - wedge(lift_form(ds[i], k, out_order), w.t_derivative(i).component(j));
        r.set_component(j, c);
    }
    return r;
}

// Graded bracket [A,B]_j = sum_i A_i ^ d_i B_j - (-1)^{pq} B_i ^ d_i A_j, at one order less.
template <class S>
JetForm<S> bracket(const JetForm<S>& a, const JetForm<S>& b)
{
    if (a.codim() != b.codim() || a.dim() != b.dim())
        throw StructuralError("bracket: codimension or chart mismatch");
    if (a.order() != b.order())
        throw StructuralError("bracket: truncation order mismatch " + std::to_string(a.order()) + " vs " +
                              std::to_string(b.order()));
    if (!(a.source() == b.source()))
        throw StructuralError("bracket: source maps differ");
    const int k = a.codim(), m = a.order() - 1;
    const int p = a.degree(), q = b.degree();
    const bool flip = (p * q) % 2 == 0; // sign in front of the second sum is -(-1)^{pq}
    JetForm<S> at = a.truncate(m), bt = b.truncate(m);
    std::vector<JetForm<S>> da, db;
    for (int i = 0; i < k; ++i) {
        da.push_back(a.t_derivative(i));
        db.push_back(b.t_derivative(i));
    }
    JetForm<S> r(k, m, a.dim(), p + q, a.source());
    for (int j = 0; j < k; ++j) {
        Form<Series<S>> acc(a.dim(), p + q);
        for (int i = 0; i < k; ++i) {
            acc = acc + wedge(at.component(i), db[i].component(j));
            auto second = wedge(bt.component(i), da[i].component(j));
            acc = flip ? acc - second : acc + second;
        }
        r.set_component(j, acc);
    }
    return r;
}

// F_A = dA + 1/2 [A, A], known to order N - 1.
template <class S>
JetForm<S> curvature(const JetForm<S>& a)
{
    if (a.degree() != 1)
        throw StructuralError("curvature needs a jet 1-form");
    JetForm<S> br = bracket(a, a);
    return truncate_to(d_total(a), br.order()) + br.scaled(Rational(1, 2));
}

template <class S>
bool is_flat(const JetForm<S>& a)
{
    return curvature(a).is_zero_jetform();
}

// Source 0 and every constant coefficient form zero.
template <class S>
bool is_impotent(const JetForm<S>& a)
{
    for (auto& s : a.source())
        if (!is_zero(s))
            return false;
    for (int i = 0; i < a.codim(); ++i)
        if (!is_zero(a.coefficient(i, MultiIndex(a.codim()))))
            return false;
    return true;
}

// Field of N-jets of local diffeomorphisms t -> Y(t, x): component i expanded in (t - source);
// its constant term is the target map.
template <class S>
class GaugeSection {
public:
    GaugeSection() = default;
    GaugeSection(int dim, std::vector<S> source, SeriesVec<S> comps)
        : dim_(dim), source_(std::move(source)), comps_(std::move(comps))
    {
        const int k = static_cast<int>(comps_.size());
        if (k == 0 || static_cast<int>(source_.size()) != k)
            throw StructuralError("gauge section needs one component and source per transverse coordinate");
        for (auto& c : comps_) {
            c.require_same_shape(comps_[0], "gauge section");
            if (c.codim() != k)
                throw StructuralError("gauge section component codimension mismatch");
        }
        if (comps_[0].order() < 1)
            throw StructuralError("gauge section needs truncation order >= 1");
        S det = determinant(linear_part(comps_));
        certificate_ = positivity(det);
    }

    static GaugeSection identity(int k, int order, int dim, std::vector<S> point)
    {
        SeriesVec<S> comps;
        for (int i = 0; i < k; ++i) {
            Series<S> s = Series<S>::variable(k, order, i);
            s.set(MultiIndex(k), point.at(i));
            comps.push_back(s);
        }
        return GaugeSection(dim, std::move(point), std::move(comps));
    }

    int dim() const { return dim_; }
    int codim() const { return static_cast<int>(comps_.size()); }
    int order() const { return comps_[0].order(); }
    const std::vector<S>& source() const { return source_; }
    const SeriesVec<S>& components() const { return comps_; }
    Certificate certificate() const { return certificate_; }
    std::vector<S> target() const
    {
        std::vector<S> t;
        for (auto& c : comps_)
            t.push_back(c.constant_term());
        return t;
    }
    SeriesVec<S> nonconstant() const
    {
        SeriesVec<S> out;
        for (auto& c : comps_)
            out.push_back(c.without_constant());
        return out;
    }
    // (DY)_{ij} = d Y_i / d t_j, one order less.
    Matrix<Series<S>> jacobian() const
    {
        Matrix<Series<S>> m(codim());
        for (int i = 0; i < codim(); ++i)
            for (int j = 0; j < codim(); ++j)
                m[i].push_back(comps_[i].derivative(j));
        return m;
    }
    JetForm<S> as_jetform() const
    {
        JetForm<S> r(codim(), order(), dim_, 0, source_);
        for (int i = 0; i < codim(); ++i)
            r.set_component(i, Form<Series<S>>::scalar(dim_, comps_[i]));
        return r;
    }
    GaugeSection truncate(int order) const
    {
        SeriesVec<S> c;
        for (auto& s : comps_)
            c.push_back(s.truncate(order));
        return GaugeSection(dim_, source_, c);
    }
    bool is_identity() const
    {
        return source_ == target() && *this == identity(codim(), order(), dim_, source_);
    }

    template <class T, class F>
    GaugeSection<T> convert(F&& f) const
    {
        std::vector<T> src;
        for (auto& s : source_)
            src.push_back(f(s));
        SeriesVec<T> c;
        for (auto& s : comps_)
            c.push_back(s.map_coeffs(f));
        return GaugeSection<T>(dim_, src, c);
    }

    friend bool operator==(const GaugeSection& a, const GaugeSection& b)
    {
        return a.dim_ == b.dim_ && a.source_ == b.source_ && a.comps_ == b.comps_;
    }

    std::string str(const std::vector<std::string>& names = {}) const
    {
        std::ostringstream os;
        for (int i = 0; i < codim(); ++i) {
            os << (i ? "; " : "");
            bool first = true;
            for (auto& [m, v] : comps_[i].terms()) {
                os << (first ? "" : " + ") << "(" << text(v, names) << ")*u^" << m.str();
                first = false;
            }
            if (first)
                os << "0";
        }
        return os.str();
    }

private:
    static std::string text(const S& v, const std::vector<std::string>& names)
    {
        if constexpr (requires { v.str(names); })
            return v.str(names);
        else
            return to_text(v);
    }

    static Certificate positivity(const S& det)
    {
        if constexpr (std::is_same_v<S, ScalarField>) {
            if (det.is_constant()) {
                if (det.constant_term().sign() <= 0)
                    throw DomainError("gauge linear part has non-positive determinant " + det.str());
                return Certificate::exact;
            }
            if (sampled_sign(det) <= 0)
                throw DomainError("gauge linear part determinant " + det.str() + " is not positive on samples");
            return Certificate::sampled;
        } else if constexpr (std::is_same_v<S, RationalField>) {
            const ScalarField& num = det.numerator();
            if (num.is_constant()) {
                if (num.constant_term().sign() <= 0)
                    throw DomainError("gauge linear part has non-positive determinant");
                return det.certificate();
            }
            if (sampled_sign(num) <= 0)
                throw DomainError("gauge linear part determinant is not positive on samples");
            return Certificate::sampled;
        } else {
            if (!(det > S(0)))
                throw DomainError("gauge linear part has non-positive determinant");
            return Certificate::exact;
        }
    }

    int dim_ = 0;
    std::vector<S> source_;
    SeriesVec<S> comps_;
    Certificate certificate_ = Certificate::exact;
};

// outer after inner, pointwise.
template <class S>
GaugeSection<S> compose_sections(const GaugeSection<S>& inner, const GaugeSection<S>& outer)
{
    if (inner.codim() != outer.codim() || inner.order() != outer.order() || inner.dim() != outer.dim())
        throw StructuralError("gauge composition: shape mismatch");
    if (!(inner.target() == outer.source()))
        throw StructuralError("gauge composition: inner target is not outer source");
    return GaugeSection<S>(inner.dim(), inner.source(), substitute(outer.components(), inner.nonconstant()));
}

template <class S>
GaugeSection<S> invert_section(const GaugeSection<S>& y)
{
    SeriesVec<S> w = invert_series_map(y.nonconstant());
    for (int i = 0; i < y.codim(); ++i)
        w[i].set(MultiIndex(y.codim()), y.source()[i]);
    return GaugeSection<S>(y.dim(), y.target(), std::move(w));
}

// W o Y: substitutes Y into the t-dependence of W; requires W's source to be Y's target.
template <class S>
JetForm<S> compose(const JetForm<S>& w, const GaugeSection<S>& y)
{
    if (w.codim() != y.codim() || w.dim() != y.dim())
        throw StructuralError("composition: codimension or chart mismatch");
    if (w.order() != y.order())
        throw StructuralError("composition: truncation order mismatch " + std::to_string(w.order()) + " vs " +
                              std::to_string(y.order()));
    if (!(w.source() == y.target()))
        throw StructuralError("composition: form source is not the gauge target");
    JetForm<S> r(w.codim(), w.order(), w.dim(), w.degree(), y.source());
    auto inner = y.nonconstant();
    for (int i = 0; i < w.codim(); ++i)
        r.set_component(i, w.component(i).map_coeffs([&](const Series<S>& s) { return substitute(s, inner); }));
    return r;
}

// (DY)^{-1} applied componentwise to a jet form.
template <class S>
JetForm<S> apply_matrix(const Matrix<Series<S>>& m, const JetForm<S>& w)
{
    const int k = w.codim();
    JetForm<S> r(k, w.order(), w.dim(), w.degree(), w.source());
    for (int i = 0; i < k; ++i) {
        Form<Series<S>> acc(w.dim(), w.degree());
        for (int j = 0; j < k; ++j)
            acc = acc + scale(m[i][j], w.component(j));
        r.set_component(i, acc);
    }
    return r;
}

// Y * A = (DY)^{-1} (A o Y - dY), known to order N - 1; its source is Y's source.
template <class S>
JetForm<S> gauge(const GaugeSection<S>& y, const JetForm<S>& a)
{
    if (a.degree() != 1)
        throw StructuralError("gauge action is defined on jet 1-forms");
    JetForm<S> ay = compose(a, y);
    JetForm<S> dy = d_total(y.as_jetform());
    const int m = y.order() - 1;
    auto jinv = series_matrix_inverse(y.jacobian());
    return apply_matrix(jinv, truncate_to(ay, m) - truncate_to(dy, m));
}

// Transport of an arbitrary jet form along a gauge: (DY)^{-1} (W o Y), to order N - 1.
template <class S>
JetForm<S> pushforward(const GaugeSection<S>& y, const JetForm<S>& w)
{
    JetForm<S> wy = compose(w, y);
    auto jinv = series_matrix_inverse(y.jacobian());
    return apply_matrix(jinv, wy.truncate(y.order() - 1));
}

// Contraction and Lie derivative acting on the chart part of every coefficient.
template <class S>
JetForm<S> contract(const VectorField<S>& v, const JetForm<S>& w)
{
    JetForm<S> r(w.codim(), w.order(), w.dim(), w.degree() - 1, w.source());
    for (int i = 0; i < w.codim(); ++i)
        r.set_component(i, contract(v, w.component(i)));
    return r;
}

template <class S>
JetForm<S> lie_derivative(const VectorField<S>& v, const JetForm<S>& w)
{
    JetForm<S> r(w.codim(), w.order(), w.dim(), w.degree(), w.source());
    for (int i = 0; i < w.codim(); ++i)
        r.set_component(i, lie_derivative(v, w.component(i)));
    return r;
}

// Jet form in codimension one with source 0 built from coefficient forms c_0 .. c_N of t^n.
template <class S>
JetForm<S> jetform_from_coefficients(int dim, int degree, const std::vector<Form<S>>& coeffs)
{
    const int order = static_cast<int>(coeffs.size()) - 1;
    JetForm<S> r = JetForm<S>::zero_source(1, order, dim, degree);
    for (int n = 0; n <= order; ++n)
        r.set_coefficient(0, MultiIndex{n}, coeffs[n]);
    return r;
}

// Degree-0 jet in codimension one from function coefficients.
template <class S>
JetForm<S> jetfunction_from_coefficients(int dim, const std::vector<S>& coeffs)
{
    std::vector<Form<S>> forms;
    for (auto& c : coeffs)
        forms.push_back(Form<S>::scalar(dim, c));
    return jetform_from_coefficients(dim, 0, forms);
}

template <class S>
std::vector<S> function_coefficients(const JetForm<S>& w)
{
    if (w.degree() != 0 || w.codim() != 1)
        throw StructuralError("expected a codimension-one jet function");
    std::vector<S> out;
    for (int n = 0; n <= w.order(); ++n) {
        const Series<S>* s = w.component(0).find(0);
        out.push_back(s ? s->coeff(MultiIndex{n}) : S());
    }
    return out;
}

} // namespace cordfol
