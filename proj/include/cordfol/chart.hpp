#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "cordfol/errors.hpp"
#include "cordfol/rational.hpp"
#include "cordfol/scalar_field.hpp"

namespace cordfol {

struct Coordinate {
    std::string name;
    bool periodic = false;
    // Sampling interval for non-periodic coordinates (numeric checks only).
    double lo = -1.0;
    double hi = 1.0;

    friend bool operator==(const Coordinate& a, const Coordinate& b)
    {
        return a.name == b.name && a.periodic == b.periodic;
    }
};

// Ordered coordinates of R^a x T^b; periodic coordinates are angles in [0, 2*pi).
class Chart {
public:
    Chart() = default;
    explicit Chart(std::vector<Coordinate> coords) : coords_(std::move(coords))
    {
        if (coords_.size() > static_cast<std::size_t>(kMaxDim))
            throw StructuralError("chart dimension exceeds " + std::to_string(kMaxDim));
        for (std::size_t i = 0; i < coords_.size(); ++i)
            for (std::size_t j = i + 1; j < coords_.size(); ++j)
                if (coords_[i].name == coords_[j].name)
                    throw StructuralError("duplicate coordinate name '" + coords_[i].name + "'");
    }

    static Chart torus(int n)
    {
        static const char* names[] = {"x", "y", "z", "w", "v", "u"};
        std::vector<Coordinate> c;
        for (int i = 0; i < n; ++i)
            c.push_back({names[i], true});
        return Chart(c);
    }

    int dim() const { return static_cast<int>(coords_.size()); }
    const Coordinate& operator[](int i) const { return coords_.at(i); }
    const std::vector<Coordinate>& coords() const { return coords_; }
    bool fully_periodic() const
    {
        for (auto& c : coords_)
            if (!c.periodic)
                return false;
        return true;
    }
    int index_of(const std::string& name) const
    {
        for (int i = 0; i < dim(); ++i)
            if (coords_[i].name == name)
                return i;
        return -1;
    }
    std::vector<std::string> names() const
    {
        std::vector<std::string> n;
        for (auto& c : coords_)
            n.push_back(c.name);
        return n;
    }

    Chart extended(Coordinate extra) const
    {
        auto c = coords_;
        c.push_back(std::move(extra));
        return Chart(c);
    }

    // A scalar field belongs to the chart when harmonics only involve periodic coordinates
    // and monomials only non-periodic ones.
    void validate(const ScalarField& f) const
    {
        for (auto& [k, c] : f.terms())
            for (int j = 0; j < kMaxDim; ++j) {
                if ((k.exp(j) || k.freq(j)) && j >= dim())
                    throw StructuralError("scalar field uses coordinate " + std::to_string(j) +
                                          " outside the chart");
                if (k.exp(j) && coords_[j].periodic)
                    throw StructuralError("polynomial in periodic coordinate '" + coords_[j].name + "'");
                if (k.freq(j) && !coords_[j].periodic)
                    throw StructuralError("harmonic of non-periodic coordinate '" + coords_[j].name + "'");
            }
    }

    // Deterministic grid of sample points used for sampled certificates.
    std::vector<std::vector<double>> sample_points(int per_axis = 7) const
    {
        std::vector<std::vector<double>> pts{{}};
        for (auto& c : coords_) {
            std::vector<std::vector<double>> next;
            for (auto& p : pts)
                for (int i = 0; i < per_axis; ++i) {
                    double v = c.periodic ? 2 * std::numbers::pi * (i + 0.37) / per_axis
                                          : c.lo + (c.hi - c.lo) * i / (per_axis - 1);
                    auto q = p;
                    q.push_back(v);
                    next.push_back(std::move(q));
                }
            pts = std::move(next);
        }
        return pts;
    }

    friend bool operator==(const Chart& a, const Chart& b) { return a.coords_ == b.coords_; }

private:
    std::vector<Coordinate> coords_;
};

} // namespace cordfol
