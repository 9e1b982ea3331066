#pragma once

#include <bit>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cordfol/chart.hpp"
#include "cordfol/errors.hpp"
#include "cordfol/rational_field.hpp"
#include "cordfol/scalar_field.hpp"
#include "cordfol/series.hpp"

namespace cordfol {

using IndexSet = std::uint32_t; // bit j set <=> dx_j present; increasing order is implied

inline int popcount(IndexSet s) { return std::popcount(s); }

// Sign of dx_I ^ dx_J relative to dx_{I u J} in increasing order; 0 if I and J overlap.
inline int wedge_sign(IndexSet a, IndexSet b)
{
    if (a & b)
        return 0;
    int swaps = 0;
    for (IndexSet rest = b; rest; rest &= rest - 1) {
        int j = std::countr_zero(rest);
        swaps += popcount(a >> (j + 1)); // entries of a greater than j must move past it
    }
    return swaps % 2 ? -1 : 1;
}

// Homogeneous differential form of degree p on an n-dimensional chart, coefficients in the ring R.
template <class R>
class Form {
public:
    Form() = default;
    Form(int n, int p) : n_(n), p_(p)
    {
        // Degrees above n are allowed and hold only the zero form.
        if (n < 0 || n > kMaxDim || p < 0)
            throw StructuralError("form degree " + std::to_string(p) + " invalid on a chart of dimension " +
                                  std::to_string(n));
    }

    static Form scalar(int n, const R& c)
    {
        Form f(n, 0);
        f.set(0, c);
        return f;
    }
    // c dx_j
    static Form basis1(int n, int j, const R& c)
    {
        Form f(n, 1);
        f.set(IndexSet(1) << j, c);
        return f;
    }

    int dim() const { return n_; }
    int degree() const { return p_; }
    const std::map<IndexSet, R>& terms() const { return c_; }
    bool is_zero_form() const { return c_.empty(); }

    const R* find(IndexSet s) const
    {
        auto it = c_.find(s);
        return it == c_.end() ? nullptr : &it->second;
    }

    void set(IndexSet s, const R& v)
    {
        if (popcount(s) != p_ || (n_ < 32 && (s >> n_)))
            throw StructuralError("index set does not match form degree/chart");
        if (is_zero(v))
            c_.erase(s);
        else
            c_[s] = v;
    }
    void add_to(IndexSet s, const R& v)
    {
        auto it = c_.find(s);
        if (it == c_.end()) {
            set(s, v);
            return;
        }
        it->second = it->second + v;
        if (is_zero(it->second))
            c_.erase(it);
    }

    void require_same_shape(const Form& o, const char* op) const
    {
        if (n_ != o.n_)
            throw StructuralError(std::string(op) + ": chart dimension mismatch");
        if (p_ != o.p_)
            throw StructuralError(std::string(op) + ": form degree mismatch " + std::to_string(p_) + " vs " +
                                  std::to_string(o.p_));
    }

    friend Form operator+(const Form& a, const Form& b)
    {
        a.require_same_shape(b, "form sum");
        Form r = a;
        for (auto& [s, v] : b.c_)
            r.add_to(s, v);
        return r;
    }
    friend Form operator-(const Form& a)
    {
        Form r(a.n_, a.p_);
        for (auto& [s, v] : a.c_)
            r.c_.emplace(s, -v);
        return r;
    }
    friend Form operator-(const Form& a, const Form& b) { return a + (-b); }
    friend bool operator==(const Form& a, const Form& b)
    {
        if (a.n_ != b.n_ || a.p_ != b.p_ || a.c_.size() != b.c_.size())
            return false;
        for (auto ia = a.c_.begin(), ib = b.c_.begin(); ia != a.c_.end(); ++ia, ++ib)
            if (ia->first != ib->first || !(ia->second == ib->second))
                return false;
        return true;
    }

    template <class F>
    auto map_coeffs(F&& f) const
    {
        using T = std::decay_t<decltype(f(std::declval<const R&>()))>;
        Form<T> out(n_, p_);
        for (auto& [s, v] : c_)
            out.set(s, f(v));
        return out;
    }

    std::string str(const std::vector<std::string>& names = {}) const
    {
        if (c_.empty())
            return "0";
        std::ostringstream os;
        bool first = true;
        for (auto& [s, v] : c_) {
            os << (first ? "" : " + ") << "(" << text_of(v, names) << ")";
            first = false;
            for (int j = 0; j < n_; ++j)
                if (s & (IndexSet(1) << j))
                    os << (p_ > 0 ? "*d" : "") << (j < static_cast<int>(names.size()) ? names[j] : "x" + std::to_string(j));
        }
        return os.str();
    }

private:
    template <class T>
    static std::string text_of(const T& v, const std::vector<std::string>& names)
    {
        if constexpr (requires { v.str(names); })
            return v.str(names);
        else
            return to_text(v);
    }

    int n_ = 0;
    int p_ = 0;
    std::map<IndexSet, R> c_;
};

template <class R>
bool is_zero(const Form<R>& f)
{
    return f.is_zero_form();
}

// Left multiplication of a form by a ring element.
template <class R>
Form<R> scale(const R& a, const Form<R>& f)
{
    Form<R> r(f.dim(), f.degree());
    if (is_zero(a))
        return r;
    for (auto& [s, v] : f.terms())
        r.set(s, a * v);
    return r;
}

template <class R>
Form<R> wedge(const Form<R>& a, const Form<R>& b)
{
    if (a.dim() != b.dim())
        throw StructuralError("wedge: chart dimension mismatch");
    Form<R> r(a.dim(), a.degree() + b.degree());
    for (auto& [sa, va] : a.terms())
        for (auto& [sb, vb] : b.terms()) {
            int sign = wedge_sign(sa, sb);
            if (sign == 0)
                continue;
            R prod = va * vb;
            r.add_to(sa | sb, sign > 0 ? prod : -prod);
        }
    return r;
}

// Exterior derivative in the chart coordinates (coefficients differentiated with `partial`).
template <class R>
Form<R> exterior_d(const Form<R>& f)
{
    Form<R> r(f.dim(), f.degree() + 1);
    for (auto& [s, v] : f.terms())
        for (int j = 0; j < f.dim(); ++j) {
            IndexSet bit = IndexSet(1) << j;
            if (s & bit)
                continue;
            R d = partial(v, j);
            if (is_zero(d))
                continue;
            int sign = wedge_sign(bit, s);
            r.add_to(s | bit, sign > 0 ? d : -d);
        }
    return r;
}

// Vector field sum_j v_j d/dx_j with coefficients in S.
template <class S>
struct VectorField {
    std::vector<S> comps;

    int dim() const { return static_cast<int>(comps.size()); }
    S operator[](int j) const { return comps.at(j); }

    // V(f) for a coefficient f.
    template <class R>
    R apply(const R& f) const
    {
        R acc = lift_like(f, S());
        bool first = true;
        for (int j = 0; j < dim(); ++j) {
            if (is_zero(comps[j]))
                continue;
            R term = times(comps[j], partial(f, j));
            acc = first ? term : acc + term;
            first = false;
        }
        return acc;
    }
};

// s * r where r may be a series over S.
template <class S>
S times(const S& s, const S& r)
{
    return s * r;
}
template <class S>
Series<S> times(const S& s, const Series<S>& r)
{
    return r.scaled(s);
}
template <class S>
S lift_like(const S&, const S& v)
{
    return v;
}
template <class S>
Series<S> lift_like(const Series<S>& like, const S& v)
{
    return Series<S>::constant(like.codim(), like.order(), v);
}

// Interior product with a vector field.
template <class R, class S>
Form<R> contract(const VectorField<S>& v, const Form<R>& f)
{
    if (v.dim() != f.dim())
        throw StructuralError("contraction: vector field and form live on different charts");
    if (f.degree() == 0)
        return Form<R>(f.dim(), 0);
    Form<R> r(f.dim(), f.degree() - 1);
    for (auto& [s, c] : f.terms()) {
        int pos = 0;
        for (int j = 0; j < f.dim(); ++j) {
            IndexSet bit = IndexSet(1) << j;
            if (!(s & bit))
                continue;
            if (!is_zero(v.comps[j])) {
                R term = times(v.comps[j], c);
                r.add_to(s & ~bit, pos % 2 ? -term : term);
            }
            ++pos;
        }
    }
    return r;
}

// Cartan's formula: L_V = d i_V + i_V d.
template <class R, class S>
Form<R> lie_derivative(const VectorField<S>& v, const Form<R>& f)
{
    Form<R> out = contract(v, exterior_d(f));
    if (f.degree() > 0)
        out = out + exterior_d(contract(v, f));
    return out;
}

template <class R, class T, class F>
Form<T> convert_form(const Form<R>& f, F&& conv)
{
    return f.map_coeffs(conv);
}

using ScalarForm = Form<ScalarField>;

inline Form<RationalField> to_rational_form(const ScalarForm& f)
{
    return f.map_coeffs([](const ScalarField& s) { return RationalField(s); });
}

} // namespace cordfol
