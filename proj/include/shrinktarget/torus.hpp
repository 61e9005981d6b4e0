#pragma once

#include <vector>

#include "errors.hpp"
#include "numtypes.hpp"

namespace st {

// Point on the d-torus with exact rational coordinates in [0,1).
struct TorusPoint {
    std::vector<Rat> coords;

    TorusPoint() = default;
    explicit TorusPoint(std::vector<Rat> c) : coords(std::move(c)) {
        for (Rat& v : coords) v = rat_frac(v);
    }

    int dim() const { return int(coords.size()); }

    bool operator==(const TorusPoint& o) const { return coords == o.coords; }
    bool operator<(const TorusPoint& o) const { return coords < o.coords; }
};

// Metric ball on the torus. Radius must sit in (0, 1/2] so the ball is unambiguous;
// whole_space() is the trivial full-measure target.
struct Ball {
    TorusPoint center;
    double radius = 0;
    bool whole = false;

    Ball() = default;
    Ball(TorusPoint c, double r) : center(std::move(c)), radius(r) {
        if (!(r > 0) || r > 0.5)
            throw RadiusTooLarge("ball radius must be in (0, 1/2], got " + std::to_string(r));
    }

    static Ball whole_space(int d) {
        Ball b;
        b.whole = true;
        b.center.coords.assign(std::size_t(d), Rat(0));
        b.radius = 1.0;
        return b;
    }
};

// Exact squared torus distance: per coordinate the wrap happens independently.
inline Rat torus_dist2_exact(const TorusPoint& a, const TorusPoint& b) {
    if (a.dim() != b.dim()) throw DomainError("torus points have different dimensions");
    Rat sum(0);
    for (int j = 0; j < a.dim(); ++j) {
        Rat d = a.coords[std::size_t(j)] - b.coords[std::size_t(j)];
        if (d < 0) d = -d;           // d in [0,1)
        Rat alt = Rat(1) - d;        // wrapped alternative
        Rat m = d < alt ? d : alt;
        sum += m * m;
    }
    return sum;
}

// Double-precision torus distance for samplers and rasterization.
inline double torus_dist_double(const double* a, const double* b, int d) {
    double sum = 0;
    for (int j = 0; j < d; ++j) {
        double diff = a[j] - b[j];
        diff -= std::floor(diff + 0.5); // nearest representative in [-1/2, 1/2)
        sum += diff * diff;
    }
    return std::sqrt(sum);
}

inline double torus_dist_double(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw DomainError("torus points have different dimensions");
    return torus_dist_double(a.data(), b.data(), int(a.size()));
}

inline std::vector<double> to_doubles(const TorusPoint& p) {
    std::vector<double> v;
    v.reserve(p.coords.size());
    for (const Rat& c : p.coords) v.push_back(to_double(c));
    return v;
}

} // namespace st
