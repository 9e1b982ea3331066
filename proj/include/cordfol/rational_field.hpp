#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "cordfol/chart.hpp"
#include "cordfol/errors.hpp"
#include "cordfol/scalar_field.hpp"

namespace cordfol {

// How positivity of a denominator factor is known.
enum class Certificate { exact = 0, construction = 1, sampled = 2 };

inline const char* to_string(Certificate c)
{
    switch (c) {
    case Certificate::exact: return "exact";
    case Certificate::construction: return "construction";
    case Certificate::sampled: return "sampled";
    }
    return "?";
}

// Chart whose sample grid is used when positivity has to be checked numerically.
class SamplingScope {
public:
    explicit SamplingScope(const Chart& c) : prev_(current_) { current_ = &c; }
    ~SamplingScope() { current_ = prev_; }
    SamplingScope(const SamplingScope&) = delete;
    SamplingScope& operator=(const SamplingScope&) = delete;

    static const Chart* current() { return current_; }

private:
    const Chart* prev_;
    static inline thread_local const Chart* current_ = nullptr;
};

// Sign of f on the active sampling grid: +1 or -1 if strictly of one sign there, 0 otherwise.
inline int sampled_sign(const ScalarField& f)
{
    std::vector<std::vector<double>> pts;
    if (const Chart* c = SamplingScope::current()) {
        pts = c->sample_points();
    } else {
        std::vector<Coordinate> coords;
        for (int j = 0; j < f.span(); ++j) {
            bool periodic = false;
            for (auto& [k, v] : f.terms())
                periodic = periodic || k.freq(j) != 0;
            coords.push_back({"c" + std::to_string(j), periodic});
        }
        pts = Chart(coords).sample_points();
    }
    int sign = 0;
    for (auto& p : pts) {
        p.resize(kMaxDim, 0.0);
        double v = f.evaluate(p);
        int s = v > 0 ? 1 : v < 0 ? -1 : 0;
        if (s == 0 || (sign != 0 && s != sign))
            return 0;
        sign = s;
    }
    return sign;
}

// Quotient num / prod(atom_i ^ e_i) with every atom a non-constant scalar field known to be positive.
// Atoms are normalised so that their leading coefficient is +-1; denominators never need gcds:
// sums use the least common multiple of the atom exponents.
class RationalField {
public:
    struct Factor {
        ScalarField atom;
        int power;
        Certificate cert;
    };

    RationalField() = default;
    RationalField(const Rational& c) : num_(c) {}
    RationalField(int c) : num_(Rational(c)) {}
    RationalField(const ScalarField& f) : num_(f) {}

    // num / den where den > 0 is certified by the caller.
    static RationalField quotient(const ScalarField& num, const ScalarField& den, Certificate cert)
    {
        if (den.is_zero())
            throw DomainError("rational field with zero denominator");
        if (den.is_constant()) {
            if (den.constant_term().sign() < 0 && cert != Certificate::exact)
                throw DomainError("denominator certified positive but is negative constant");
            return RationalField(num.scaled(Rational(1) / den.constant_term()));
        }
        RationalField r(num);
        Rational lead = den.terms().begin()->second;
        ScalarField atom = den.scaled(Rational(1) / cordfol::abs(lead));
        r.num_ = r.num_.scaled(Rational(1) / cordfol::abs(lead));
        r.den_.push_back({atom, 1, cert});
        return r;
    }

    const ScalarField& numerator() const { return num_; }
    const std::vector<Factor>& denominator() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    bool is_polynomial() const { return den_.empty(); }

    Certificate certificate() const
    {
        Certificate c = Certificate::exact;
        for (auto& f : den_)
            c = std::max(c, f.cert);
        return c;
    }

    ScalarField expanded_denominator() const
    {
        ScalarField d(Rational(1));
        for (auto& f : den_)
            for (int i = 0; i < f.power; ++i)
                d = d * f.atom;
        return d;
    }

    friend RationalField operator+(const RationalField& a, const RationalField& b)
    {
        if (b.is_zero())
            return a;
        if (a.is_zero())
            return b;
        RationalField r;
        r.den_ = a.den_;
        for (auto& f : b.den_) {
            auto it = find_atom(r.den_, f.atom);
            if (it == r.den_.end())
                r.den_.push_back(f);
            else
                it->power = std::max(it->power, f.power);
        }
        sort_factors(r.den_);
        r.num_ = a.num_ * missing(r.den_, a.den_) + b.num_ * missing(r.den_, b.den_);
        r.cancel_trivial();
        return r;
    }
    friend RationalField operator-(const RationalField& a)
    {
        RationalField r = a;
        r.num_ = -r.num_;
        return r;
    }
    friend RationalField operator-(const RationalField& a, const RationalField& b) { return a + (-b); }
    friend RationalField operator*(const RationalField& a, const RationalField& b)
    {
        RationalField r;
        if (a.is_zero() || b.is_zero())
            return r;
        r.num_ = a.num_ * b.num_;
        r.den_ = a.den_;
        for (auto& f : b.den_) {
            auto it = find_atom(r.den_, f.atom);
            if (it == r.den_.end())
                r.den_.push_back(f);
            else
                it->power += f.power;
        }
        sort_factors(r.den_);
        r.cancel_trivial();
        return r;
    }
    friend bool operator==(const RationalField& a, const RationalField& b) { return (a - b).is_zero(); }

    // Quotient rule on the factored denominator.
    RationalField partial(int j) const
    {
        if (den_.empty())
            return RationalField(num_.partial(j));
        // d(n / prod a_i^e_i) = (n' prod a_i - n sum e_i a_i' prod_{l != i} a_l) / prod a_i^(e_i + 1)
        ScalarField all(Rational(1));
        for (auto& f : den_)
            all = all * f.atom;
        ScalarField numer = num_.partial(j) * all;
        for (std::size_t i = 0; i < den_.size(); ++i) {
            ScalarField d = den_[i].atom.partial(j);
            if (d.is_zero())
                continue;
            ScalarField others(Rational(den_[i].power));
            for (std::size_t l = 0; l < den_.size(); ++l)
                if (l != i)
                    others = others * den_[l].atom;
            numer -= num_ * d * others;
        }
        RationalField r;
        r.num_ = numer;
        r.den_ = den_;
        for (auto& f : r.den_)
            f.power += 1;
        r.cancel_trivial();
        return r;
    }

    RationalField substitute_coordinate(int j, const Rational& value) const
    {
        RationalField r(num_.substitute_coordinate(j, value));
        for (auto& f : den_) {
            ScalarField a = f.atom.substitute_coordinate(j, value);
            for (int i = 0; i < f.power; ++i)
                r = r * (a.is_constant() ? RationalField(Rational(1) / a.constant_term())
                                         : quotient(ScalarField(1), a, f.cert));
        }
        return r;
    }

    double evaluate(const std::vector<double>& x) const
    {
        double d = 1;
        for (auto& f : den_)
            d *= std::pow(f.atom.evaluate(x), f.power);
        return num_.evaluate(x) / d;
    }

    std::string str(const std::vector<std::string>& names = {}) const
    {
        if (den_.empty())
            return num_.str(names);
        std::string s = "(" + num_.str(names) + ")/(";
        for (std::size_t i = 0; i < den_.size(); ++i) {
            s += (i ? "*" : "") + std::string("(") + den_[i].atom.str(names) + ")";
            if (den_[i].power > 1)
                s += "^" + std::to_string(den_[i].power);
        }
        return s + ")";
    }

private:
    static std::vector<Factor>::iterator find_atom(std::vector<Factor>& v, const ScalarField& a)
    {
        return std::find_if(v.begin(), v.end(), [&](const Factor& f) { return f.atom == a; });
    }
    static void sort_factors(std::vector<Factor>& v)
    {
        std::sort(v.begin(), v.end(), [](const Factor& a, const Factor& b) { return a.atom < b.atom; });
    }
    // Product of the atoms of `full` to the powers not already present in `part`.
    static ScalarField missing(const std::vector<Factor>& full, const std::vector<Factor>& part)
    {
        ScalarField m(Rational(1));
        for (auto& f : full) {
            int have = 0;
            for (auto& g : part)
                if (g.atom == f.atom)
                    have = g.power;
            for (int i = have; i < f.power; ++i)
                m = m * f.atom;
        }
        return m;
    }
    void cancel_trivial()
    {
        if (num_.is_zero())
            den_.clear();
        std::erase_if(den_, [](const Factor& f) { return f.power == 0; });
    }

    ScalarField num_;
    std::vector<Factor> den_;
};

inline bool is_zero(const RationalField& f) { return f.is_zero(); }
inline RationalField partial(const RationalField& f, int j) { return f.partial(j); }
inline double evaluate(const RationalField& f, const std::vector<double>& x) { return f.evaluate(x); }
inline std::string to_text(const RationalField& f) { return f.str(); }

// 1/f: the numerator of f becomes a new atom after its sign is determined (exactly when constant,
// otherwise on the active sampling grid).
inline RationalField reciprocal(const RationalField& f)
{
    const ScalarField& n = f.numerator();
    if (n.is_zero())
        throw DomainError("reciprocal of zero rational field");
    ScalarField top = f.expanded_denominator();
    if (n.is_constant())
        return RationalField(top.scaled(Rational(1) / n.constant_term()));
    int sign = sampled_sign(n);
    if (sign == 0)
        throw DomainError("cannot certify that " + n.str() + " has constant sign; reciprocal refused");
    ScalarField den = sign > 0 ? n : -n;
    return RationalField::quotient(sign > 0 ? top : -top, den, Certificate::sampled);
}

} // namespace cordfol
