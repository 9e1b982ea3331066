#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cordfol/errors.hpp"
#include "cordfol/ring.hpp"

namespace cordfol {

inline constexpr int kMaxCodim = 4;

// Exponent vector of a monomial in the jet variables t_1..t_k.
struct MultiIndex {
    std::array<std::uint8_t, kMaxCodim> e{};
    std::uint8_t k = 0;

    MultiIndex() = default;
    explicit MultiIndex(int codim) : k(static_cast<std::uint8_t>(codim))
    {
        if (codim < 1 || codim > kMaxCodim)
            throw StructuralError("codimension " + std::to_string(codim) + " outside 1.." + std::to_string(kMaxCodim));
    }
    MultiIndex(std::initializer_list<int> exps) : MultiIndex(static_cast<int>(exps.size()))
    {
        int i = 0;
        for (int x : exps)
            e[i++] = static_cast<std::uint8_t>(x);
    }

    static MultiIndex unit(int codim, int i)
    {
        MultiIndex m(codim);
        m.e[i] = 1;
        return m;
    }

    int degree() const
    {
        int d = 0;
        for (int i = 0; i < k; ++i)
            d += e[i];
        return d;
    }
    int operator[](int i) const { return e[i]; }

    friend MultiIndex operator+(MultiIndex a, const MultiIndex& b)
    {
        for (int i = 0; i < a.k; ++i)
            a.e[i] = static_cast<std::uint8_t>(a.e[i] + b.e[i]);
        return a;
    }
    friend bool operator==(const MultiIndex& a, const MultiIndex& b) { return a.k == b.k && a.e == b.e; }

    // Graded lexicographic: total degree first, then larger leading exponent first.
    friend bool operator<(const MultiIndex& a, const MultiIndex& b)
    {
        int da = a.degree(), db = b.degree();
        if (da != db)
            return da < db;
        for (int i = 0; i < a.k; ++i)
            if (a.e[i] != b.e[i])
                return a.e[i] > b.e[i];
        return false;
    }

    std::string str() const
    {
        std::string s = "(";
        for (int i = 0; i < k; ++i) {
            if (i)
                s += ",";
            s += std::to_string(e[i]);
        }
        return s + ")";
    }
};

// All multi-indices of k variables with total degree <= n, in graded-lex order.
inline std::vector<MultiIndex> multi_indices(int k, int n)
{
    std::vector<MultiIndex> out;
    std::function<void(MultiIndex&, int, int)> rec = [&](MultiIndex& m, int var, int left) {
        if (var == k - 1) {
            m.e[var] = static_cast<std::uint8_t>(left);
            out.push_back(m);
            return;
        }
        for (int x = left; x >= 0; --x) {
            m.e[var] = static_cast<std::uint8_t>(x);
            rec(m, var + 1, left - x);
        }
    };
    for (int d = 0; d <= n; ++d) {
        MultiIndex m(k);
        rec(m, 0, d);
    }
    return out;
}

// Truncated polynomial in k variables (the local coordinates t - s), kept to total degree N.
// Coefficients are sparse; zero coefficients are never stored.
template <class S>
class Series {
public:
    Series() = default;
    Series(int k, int order) : k_(k), n_(order)
    {
        MultiIndex check(k);
        (void)check;
        if (order < 0)
            throw StructuralError("negative truncation order");
    }

    static Series constant(int k, int order, const S& c)
    {
        Series s(k, order);
        s.set(MultiIndex(k), c);
        return s;
    }
    // The coordinate t_i - s_i.
    static Series variable(int k, int order, int i)
    {
        Series s(k, order);
        if (order >= 1)
            s.set(MultiIndex::unit(k, i), from_rational<S>(Rational(1)));
        return s;
    }

    int codim() const { return k_; }
    int order() const { return n_; }
    const std::map<MultiIndex, S>& terms() const { return c_; }
    bool is_zero_series() const { return c_.empty(); }

    S coeff(const MultiIndex& m) const
    {
        auto it = c_.find(m);
        return it == c_.end() ? S() : it->second;
    }
    S constant_term() const { return coeff(MultiIndex(k_)); }

    void set(const MultiIndex& m, const S& v)
    {
        if (m.k != k_)
            throw StructuralError("multi-index codimension mismatch");
        if (m.degree() > n_)
            throw StructuralError("multi-index " + m.str() + " beyond truncation order " + std::to_string(n_));
        if (is_zero(v))
            c_.erase(m);
        else
            c_[m] = v;
    }
    void add_to(const MultiIndex& m, const S& v)
    {
        if (m.degree() > n_)
            return;
        auto it = c_.find(m);
        if (it == c_.end()) {
            if (!is_zero(v))
                c_.emplace(m, v);
            return;
        }
        it->second = it->second + v;
        if (is_zero(it->second))
            c_.erase(it);
    }

    Series without_constant() const
    {
        Series s = *this;
        s.c_.erase(MultiIndex(k_));
        return s;
    }

    // Homogeneous part of total degree d.
    Series homogeneous(int d) const
    {
        Series s(k_, n_);
        for (auto& [m, v] : c_)
            if (m.degree() == d)
                s.c_.emplace(m, v);
        return s;
    }

    Series truncate(int order) const
    {
        if (order > n_)
            throw StructuralError("cannot raise truncation order from " + std::to_string(n_) + " to " +
                                  std::to_string(order));
        Series s(k_, order);
        for (auto& [m, v] : c_)
            if (m.degree() <= order)
                s.c_.emplace(m, v);
        return s;
    }

    // d/dt_i; the result is only known to one order less.
    Series derivative(int i) const
    {
        if (n_ < 1)
            throw StructuralError("derivative of an order-0 series carries no information");
        Series s(k_, n_ - 1);
        for (auto& [m, v] : c_) {
            if (m.e[i] == 0)
                continue;
            MultiIndex d = m;
            d.e[i] -= 1;
            s.c_.emplace(d, v * from_rational<S>(Rational(m.e[i])));
        }
        return s;
    }

    template <class F>
    auto map_coeffs(F&& f) const
    {
        using T = std::decay_t<decltype(f(std::declval<const S&>()))>;
        Series<T> out(k_, n_);
        for (auto& [m, v] : c_)
            out.set(m, f(v));
        return out;
    }

    Series scaled(const S& a) const
    {
        Series s(k_, n_);
        if (is_zero(a))
            return s;
        for (auto& [m, v] : c_)
            s.set(m, v * a);
        return s;
    }

    void require_same_shape(const Series& o, const char* op) const
    {
        if (k_ != o.k_)
            throw StructuralError(std::string(op) + ": codimension mismatch " + std::to_string(k_) + " vs " +
                                  std::to_string(o.k_));
        if (n_ != o.n_)
            throw StructuralError(std::string(op) + ": truncation order mismatch " + std::to_string(n_) + " vs " +
                                  std::to_string(o.n_));
    }

    friend Series operator+(const Series& a, const Series& b)
    {
        a.require_same_shape(b, "series sum");
        Series s = a;
        for (auto& [m, v] : b.c_)
            s.add_to(m, v);
        return s;
    }
    friend Series operator-(const Series& a) { return a.scaled(from_rational<S>(Rational(-1))); }
    friend Series operator-(const Series& a, const Series& b) { return a + (-b); }
    friend Series operator*(const Series& a, const Series& b)
    {
        a.require_same_shape(b, "series product");
        Series s(a.k_, a.n_);
        for (auto& [ma, va] : a.c_) {
            int da = ma.degree();
            for (auto& [mb, vb] : b.c_) {
                if (da + mb.degree() > a.n_)
                    break; // b is graded-lex ordered, later entries only get higher degree
                s.add_to(ma + mb, va * vb);
            }
        }
        return s;
    }
    friend bool operator==(const Series& a, const Series& b)
    {
        if (a.k_ != b.k_ || a.n_ != b.n_ || a.c_.size() != b.c_.size())
            return false;
        auto ia = a.c_.begin();
        for (auto ib = b.c_.begin(); ib != b.c_.end(); ++ia, ++ib)
            if (!(ia->first == ib->first) || !(ia->second == ib->second))
                return false;
        return true;
    }

    std::string str() const
    {
        if (c_.empty())
            return "0";
        std::ostringstream os;
        bool first = true;
        for (auto& [m, v] : c_) {
            if (!first)
                os << " + ";
            first = false;
            os << "(" << to_text(v) << ")";
            for (int i = 0; i < k_; ++i) {
                if (m.e[i] == 0)
                    continue;
                os << "*u" << (k_ > 1 ? std::to_string(i + 1) : std::string());
                if (m.e[i] > 1)
                    os << "^" << int(m.e[i]);
            }
        }
        return os.str();
    }

private:
    int k_ = 1;
    int n_ = 0;
    std::map<MultiIndex, S> c_;
};

template <class S>
bool is_zero(const Series<S>& s)
{
    return s.is_zero_series();
}

template <class S>
Series<S> partial(const Series<S>& s, int coord)
{
    return s.map_coeffs([coord](const S& v) { return partial(v, coord); });
}

template <class S>
using SeriesVec = std::vector<Series<S>>;

// outer(inner): each inner component has zero constant term, so truncation is exact.
// outer has one variable per inner component; the result lives in inner's variables.
template <class S>
Series<S> substitute(const Series<S>& outer, const SeriesVec<S>& inner)
{
    if (static_cast<int>(inner.size()) != outer.codim())
        throw StructuralError("substitution: outer codimension does not match number of inner components");
    const int k_in = inner.at(0).codim();
    const int n = inner[0].order();
    if (outer.order() != n)
        throw StructuralError("substitution: truncation order mismatch " + std::to_string(outer.order()) + " vs " +
                              std::to_string(n));
    for (auto& c : inner) {
        c.require_same_shape(inner[0], "substitution");
        if (!is_zero(c.constant_term()))
            throw StructuralError("substitution: inner series must have zero constant term");
    }
    // powers[j][e] = inner_j^e
    std::vector<std::vector<Series<S>>> powers(inner.size());
    for (std::size_t j = 0; j < inner.size(); ++j) {
        powers[j].push_back(Series<S>::constant(k_in, n, from_rational<S>(Rational(1))));
        for (int e = 1; e <= n; ++e)
            powers[j].push_back(powers[j].back() * inner[j]);
    }
    Series<S> out(k_in, n);
    for (auto& [m, v] : outer.terms()) {
        Series<S> prod = Series<S>::constant(k_in, n, v);
        for (int j = 0; j < outer.codim(); ++j)
            if (m.e[j])
                prod = prod * powers[j][m.e[j]];
        out = out + prod;
    }
    return out;
}

template <class S>
SeriesVec<S> substitute(const SeriesVec<S>& outer, const SeriesVec<S>& inner)
{
    SeriesVec<S> out;
    for (auto& o : outer)
        out.push_back(substitute(o, inner));
    return out;
}

template <class S>
Matrix<S> linear_part(const SeriesVec<S>& comps)
{
    const int k = static_cast<int>(comps.size());
    Matrix<S> m(k, std::vector<S>(k));
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            m[i][j] = comps[i].coeff(MultiIndex::unit(comps[i].codim(), j));
    return m;
}

// Compositional inverse of a map with zero constant term and invertible linear part, order by order.
template <class S>
SeriesVec<S> invert_series_map(const SeriesVec<S>& f)
{
    const int k = static_cast<int>(f.size());
    const int n = f.at(0).order();
    for (auto& c : f)
        if (!is_zero(c.constant_term()))
            throw StructuralError("series inversion expects zero constant terms");
    Matrix<S> lin = linear_part(f);
    Matrix<S> lin_inv = matrix_inverse(lin);
    // f = L + H with H of order >= 2; solve w = L^{-1}(v - H(w)).
    SeriesVec<S> higher;
    for (int i = 0; i < k; ++i) {
        Series<S> h = f[i];
        for (int j = 0; j < k; ++j)
            h.set(MultiIndex::unit(k, j), S());
        higher.push_back(h);
    }
    auto apply_lin_inv = [&](const SeriesVec<S>& v) {
        SeriesVec<S> out;
        for (int i = 0; i < k; ++i) {
            Series<S> acc(k, n);
            for (int j = 0; j < k; ++j)
                acc = acc + v[j].scaled(lin_inv[i][j]);
            out.push_back(acc);
        }
        return out;
    };
    SeriesVec<S> ident;
    for (int i = 0; i < k; ++i)
        ident.push_back(Series<S>::variable(k, n, i));
    SeriesVec<S> w = apply_lin_inv(ident);
    for (int m = 2; m <= n; ++m) {
        SeriesVec<S> hw = substitute(higher, w);
        SeriesVec<S> rhs;
        for (int i = 0; i < k; ++i)
            rhs.push_back(ident[i] - hw[i]);
        SeriesVec<S> next = apply_lin_inv(rhs);
        // Only degree m is newly determined at this step; lower degrees are already final.
        for (int i = 0; i < k; ++i) {
            Series<S> fresh = next[i].homogeneous(m);
            for (auto& [mi, v] : fresh.terms())
                w[i].set(mi, v);
        }
    }
    return w;
}

// Inverse of a matrix of series with invertible constant part: C^{-1} times the geometric series.
template <class S>
Matrix<Series<S>> series_matrix_inverse(const Matrix<Series<S>>& m)
{
    const std::size_t k = m.size();
    const int codim = m.at(0).at(0).codim();
    const int n = m[0][0].order();
    Matrix<S> c(k, std::vector<S>(k));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            m[i][j].require_same_shape(m[0][0], "matrix inverse");
            c[i][j] = m[i][j].constant_term();
        }
    Matrix<S> cinv = matrix_inverse(c);
    Matrix<Series<S>> cinv_s(k), e(k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            cinv_s[i].push_back(Series<S>::constant(codim, n, cinv[i][j]));
    Matrix<Series<S>> rest(k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            rest[i].push_back(m[i][j].without_constant());
    e = matmul(cinv_s, rest);
    Matrix<Series<S>> ident(k), neg_e(k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            ident[i].push_back(Series<S>::constant(codim, n, from_rational<S>(Rational(i == j ? 1 : 0))));
            neg_e[i].push_back(-e[i][j]);
        }
    // (I + E)^{-1} = sum_{p=0}^{n} (-E)^p, exact since E has no constant term.
    Matrix<Series<S>> sum = ident, power = ident;
    for (int p = 1; p <= n; ++p) {
        power = matmul(power, neg_e);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j)
                sum[i][j] = sum[i][j] + power[i][j];
    }
    return matmul(sum, cinv_s);
}

} // namespace cordfol
