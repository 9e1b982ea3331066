#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cordfol/errors.hpp"
#include "cordfol/rational.hpp"
#include "cordfol/ring.hpp"

namespace cordfol {

inline constexpr int kMaxDim = 6;

enum class Harmonic : std::int16_t { one = 0, cos = 1, sin = 2 };

// Monomial in the non-periodic coordinates times one harmonic of an integer combination of the
// periodic ones: x^e * {1, cos(f.x), sin(f.x)}. Exponents of periodic coordinates and frequencies
// of non-periodic coordinates are always zero, so one layout serves every chart.
struct TermKey {
    std::array<std::int16_t, 1 + 2 * kMaxDim> raw{};

    Harmonic kind() const { return static_cast<Harmonic>(raw[0]); }
    void set_kind(Harmonic h) { raw[0] = static_cast<std::int16_t>(h); }
    int exp(int j) const { return raw[1 + j]; }
    int freq(int j) const { return raw[1 + kMaxDim + j]; }
    void set_exp(int j, int v) { raw[1 + j] = static_cast<std::int16_t>(v); }
    void set_freq(int j, int v) { raw[1 + kMaxDim + j] = static_cast<std::int16_t>(v); }

    bool zero_freq() const
    {
        for (int j = 0; j < kMaxDim; ++j)
            if (freq(j))
                return false;
        return true;
    }
    bool zero_exp() const
    {
        for (int j = 0; j < kMaxDim; ++j)
            if (exp(j))
                return false;
        return true;
    }
    int max_freq() const
    {
        int m = 0;
        for (int j = 0; j < kMaxDim; ++j)
            m = std::max(m, std::abs(freq(j)));
        return m;
    }

    friend bool operator<(const TermKey& a, const TermKey& b) { return a.raw < b.raw; }
    friend bool operator==(const TermKey& a, const TermKey& b) { return a.raw == b.raw; }
};

// Exact real-valued function on a chart: finite sum of rational multiples of TermKey basis functions.
class ScalarField {
public:
    ScalarField() = default;
    ScalarField(const Rational& c)
    {
        if (!c.is_zero())
            terms_.emplace(TermKey{}, c);
    }
    ScalarField(int c) : ScalarField(Rational(c)) {}

    // Non-periodic coordinate x_j.
    static ScalarField coordinate(int j)
    {
        check_index(j);
        TermKey k;
        k.set_exp(j, 1);
        ScalarField f;
        f.terms_.emplace(k, Rational(1));
        return f;
    }
    static ScalarField monomial(const Rational& c, const std::vector<int>& exps)
    {
        TermKey k;
        for (std::size_t j = 0; j < exps.size(); ++j)
            k.set_exp(static_cast<int>(j), exps[j]);
        ScalarField f;
        f.add_term(k, c);
        return f;
    }
    // c * cos(f.x) or c * sin(f.x) with integer frequency vector over the periodic coordinates.
    static ScalarField harmonic(Harmonic h, const std::vector<int>& freq, const Rational& c = Rational(1))
    {
        if (freq.size() > static_cast<std::size_t>(kMaxDim))
            throw StructuralError("frequency vector longer than the maximum chart dimension");
        TermKey k;
        k.set_kind(h);
        for (std::size_t j = 0; j < freq.size(); ++j)
            k.set_freq(static_cast<int>(j), freq[j]);
        ScalarField f;
        f.add_term(k, c);
        return f;
    }
    static ScalarField cos_of(const std::vector<int>& freq) { return harmonic(Harmonic::cos, freq); }
    static ScalarField sin_of(const std::vector<int>& freq) { return harmonic(Harmonic::sin, freq); }

    const std::map<TermKey, Rational>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == TermKey{}); }
    Rational constant_term() const
    {
        auto it = terms_.find(TermKey{});
        return it == terms_.end() ? Rational(0) : it->second;
    }

    // Adds c * basis(k), canonicalising the harmonic so that equal functions have equal keys.
    void add_term(TermKey k, Rational c)
    {
        if (c.is_zero())
            return;
        if (k.kind() != Harmonic::one) {
            if (k.zero_freq()) {
                if (k.kind() == Harmonic::sin)
                    return;
                k.set_kind(Harmonic::one);
            } else {
                int lead = 0;
                for (int j = 0; j < kMaxDim; ++j)
                    if (k.freq(j)) {
                        lead = k.freq(j);
                        break;
                    }
                if (lead < 0) {
                    for (int j = 0; j < kMaxDim; ++j)
                        k.set_freq(j, -k.freq(j));
                    if (k.kind() == Harmonic::sin)
                        c = -c;
                }
            }
        } else if (!k.zero_freq()) {
            throw StructuralError("constant harmonic carrying a frequency");
        }
        auto it = terms_.find(k);
        if (it == terms_.end()) {
            terms_.emplace(k, std::move(c));
            return;
        }
        it->second += c;
        if (it->second.is_zero())
            terms_.erase(it);
    }

    ScalarField& operator+=(const ScalarField& o)
    {
        for (auto& [k, c] : o.terms_)
            add_term(k, c);
        return *this;
    }
    ScalarField& operator-=(const ScalarField& o)
    {
        for (auto& [k, c] : o.terms_)
            add_term(k, -c);
        return *this;
    }
    friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
    friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
    friend ScalarField operator-(const ScalarField& a)
    {
        ScalarField r;
        for (auto& [k, c] : a.terms_)
            r.terms_.emplace(k, -c);
        return r;
    }
    friend ScalarField operator*(const ScalarField& a, const ScalarField& b)
    {
        ScalarField r;
        if (a.is_zero() || b.is_zero())
            return r;
        if (b.is_constant())
            return a.scaled(b.constant_term());
        if (a.is_constant())
            return b.scaled(a.constant_term());
        for (auto& [ka, ca] : a.terms_)
            for (auto& [kb, cb] : b.terms_)
                multiply_terms(r, ka, ca, kb, cb);
        return r;
    }
    ScalarField scaled(const Rational& s) const
    {
        ScalarField r;
        if (s.is_zero())
            return r;
        for (auto& [k, c] : terms_)
            r.terms_.emplace(k, c * s);
        return r;
    }
    friend bool operator==(const ScalarField& a, const ScalarField& b) { return a.terms_ == b.terms_; }
    friend bool operator<(const ScalarField& a, const ScalarField& b)
    {
        return std::lexicographical_compare(a.terms_.begin(), a.terms_.end(), b.terms_.begin(), b.terms_.end(),
                                            [](auto& x, auto& y) {
                                                if (!(x.first == y.first))
                                                    return x.first < y.first;
                                                return x.second < y.second;
                                            });
    }

    ScalarField partial(int j) const
    {
        check_index(j);
        ScalarField r;
        for (auto& [k, c] : terms_) {
            if (int e = k.exp(j)) {
                TermKey d = k;
                d.set_exp(j, e - 1);
                r.add_term(d, c * Rational(e));
            }
            if (int f = k.freq(j)) {
                TermKey d = k;
                if (k.kind() == Harmonic::cos) {
                    d.set_kind(Harmonic::sin);
                    r.add_term(d, -c * Rational(f));
                } else {
                    d.set_kind(Harmonic::cos);
                    r.add_term(d, c * Rational(f));
                }
            }
        }
        return r;
    }

    double evaluate(const std::vector<double>& x) const
    {
        double acc = 0;
        for (auto& [k, c] : terms_) {
            double v = c.to_double();
            double phase = 0;
            for (int j = 0; j < kMaxDim; ++j) {
                if (int e = k.exp(j))
                    v *= std::pow(x.at(j), e);
                if (int f = k.freq(j))
                    phase += f * x.at(j);
            }
            if (k.kind() == Harmonic::cos)
                v *= std::cos(phase);
            else if (k.kind() == Harmonic::sin)
                v *= std::sin(phase);
            acc += v;
        }
        return acc;
    }

    // Restriction to x_j = value for a non-periodic coordinate j.
    ScalarField substitute_coordinate(int j, const Rational& value) const
    {
        check_index(j);
        ScalarField r;
        for (auto& [k, c] : terms_) {
            if (k.freq(j))
                throw StructuralError("cannot substitute a value for a periodic coordinate");
            TermKey d = k;
            d.set_exp(j, 0);
            r.add_term(d, c * pow(value, k.exp(j)));
        }
        return r;
    }

    // Keeps the harmonics with every |frequency| <= cutoff.
    ScalarField fourier_truncate(int cutoff) const
    {
        ScalarField r;
        for (auto& [k, c] : terms_)
            if (k.max_freq() <= cutoff)
                r.terms_.emplace(k, c);
        return r;
    }

    // Highest coordinate index the field depends on, plus one.
    int span() const
    {
        int s = 0;
        for (auto& [k, c] : terms_)
            for (int j = 0; j < kMaxDim; ++j)
                if (k.exp(j) || k.freq(j))
                    s = std::max(s, j + 1);
        return s;
    }
    bool depends_on(int j) const
    {
        for (auto& [k, c] : terms_)
            if (k.exp(j) || k.freq(j))
                return true;
        return false;
    }

    std::string str(const std::vector<std::string>& names = {}) const
    {
        if (terms_.empty())
            return "0";
        auto name = [&](int j) { return j < static_cast<int>(names.size()) ? names[j] : "x" + std::to_string(j); };
        std::ostringstream os;
        bool first = true;
        for (auto& [k, c] : terms_) {
            Rational mag = cordfol::abs(c);
            os << (first ? (c.sign() < 0 ? "-" : "") : (c.sign() < 0 ? " - " : " + "));
            first = false;
            std::vector<std::string> factors;
            for (int j = 0; j < kMaxDim; ++j)
                if (int e = k.exp(j))
                    factors.push_back(e == 1 ? name(j) : name(j) + "^" + std::to_string(e));
            if (k.kind() != Harmonic::one) {
                std::string arg;
                for (int j = 0; j < kMaxDim; ++j) {
                    int f = k.freq(j);
                    if (!f)
                        continue;
                    if (!arg.empty())
                        arg += f > 0 ? "+" : "-";
                    else if (f < 0)
                        arg += "-";
                    if (std::abs(f) != 1)
                        arg += std::to_string(std::abs(f)) + "*";
                    arg += name(j);
                }
                factors.push_back(std::string(k.kind() == Harmonic::cos ? "cos(" : "sin(") + arg + ")");
            }
            if (factors.empty() || mag != Rational(1)) {
                os << mag.str();
                if (!factors.empty())
                    os << "*";
            }
            for (std::size_t i = 0; i < factors.size(); ++i)
                os << (i ? "*" : "") << factors[i];
        }
        return os.str();
    }

private:
    static void check_index(int j)
    {
        if (j < 0 || j >= kMaxDim)
            throw StructuralError("coordinate index " + std::to_string(j) + " outside chart bounds");
    }

    static void multiply_terms(ScalarField& r, const TermKey& a, const Rational& ca, const TermKey& b,
                               const Rational& cb)
    {
        TermKey base;
        for (int j = 0; j < kMaxDim; ++j)
            base.set_exp(j, a.exp(j) + b.exp(j));
        Rational c = ca * cb;
        if (a.kind() == Harmonic::one || b.kind() == Harmonic::one) {
            const TermKey& h = a.kind() == Harmonic::one ? b : a;
            base.set_kind(h.kind());
            for (int j = 0; j < kMaxDim; ++j)
                base.set_freq(j, h.freq(j));
            r.add_term(base, c);
            return;
        }
        TermKey sum = base, diff = base;
        for (int j = 0; j < kMaxDim; ++j) {
            sum.set_freq(j, a.freq(j) + b.freq(j));
            diff.set_freq(j, a.freq(j) - b.freq(j));
        }
        Rational half = c * Rational(1, 2);
        auto put = [&](TermKey k, Harmonic h, const Rational& v) {
            k.set_kind(h);
            r.add_term(k, v);
        };
        if (a.kind() == Harmonic::cos && b.kind() == Harmonic::cos) {
            put(diff, Harmonic::cos, half);
            put(sum, Harmonic::cos, half);
        } else if (a.kind() == Harmonic::sin && b.kind() == Harmonic::sin) {
            put(diff, Harmonic::cos, half);
            put(sum, Harmonic::cos, -half);
        } else if (a.kind() == Harmonic::sin) { // sin a cos b
            put(sum, Harmonic::sin, half);
            put(diff, Harmonic::sin, half);
        } else { // cos a sin b
            put(sum, Harmonic::sin, half);
            put(diff, Harmonic::sin, -half);
        }
    }

    std::map<TermKey, Rational> terms_;
};

inline bool is_zero(const ScalarField& f) { return f.is_zero(); }
inline ScalarField partial(const ScalarField& f, int j) { return f.partial(j); }
inline double evaluate(const ScalarField& f, const std::vector<double>& x) { return f.evaluate(x); }
inline std::string to_text(const ScalarField& f) { return f.str(); }

inline ScalarField reciprocal(const ScalarField& f)
{
    if (!f.is_constant())
        throw DomainError("reciprocal of non-constant scalar field " + f.str() +
                          " needs rational-field coefficients");
    if (f.is_zero())
        throw DomainError("reciprocal of zero scalar field");
    return ScalarField(Rational(1) / f.constant_term());
}

} // namespace cordfol
