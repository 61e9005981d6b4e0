#pragma once
// Diophantine analysis of 2x2 toral endomorphisms: exact eigendirection
// slopes, periodic continued fractions, three-distance statistics of
// irrational rotations, ellipse lattice-point counts, and the q * ||q theta||
// profile that quantifies how badly approximable a slope is.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "int_matrix.hpp"
#include "numtypes.hpp"
#include "quadsurd.hpp"

namespace st {

// Slope of the expanding eigendirection of a 2x2 matrix, as an exact
// quadratic irrational (lambda_max - a00) / a01.
inline QuadSurd eigen_slope(const IntMatrix& A) {
    if (A.dim() != 2) throw Unsupported("eigen_slope needs a 2x2 matrix");
    const Int T = A.at(0, 0) + A.at(1, 1);
    const Int det2 = A.at(0, 0) * A.at(1, 1) - A.at(0, 1) * A.at(1, 0);
    const Int disc = T * T - 4 * det2;
    if (disc <= 0) throw DomainError("eigen_slope needs real distinct eigenvalues");
    if (is_perfect_square(disc))
        throw RationalEigenvalue("eigen_slope: eigenvalues are rational, slope is not a quadratic irrational");
    // disc non-square forces a01 != 0
    return QuadSurd(T - 2 * A.at(0, 0), 1, 2 * A.at(0, 1), disc);
}

struct ContinuedFraction {
    std::vector<Int> head;    // coefficients before the cycle
    std::vector<Int> period;  // repeating block, nonempty

    // first n coefficients of the full expansion
    std::vector<Int> expand(std::size_t n) const {
        std::vector<Int> out;
        for (std::size_t i = 0; i < head.size() && out.size() < n; ++i) out.push_back(head[i]);
        while (out.size() < n)
            for (std::size_t i = 0; i < period.size() && out.size() < n; ++i) out.push_back(period[i]);
        return out;
    }
};

// Periodic continued fraction of a quadratic irrational, with the cycle
// detected exactly from the (P, Q) state of the standard recurrence for
// (P + sqrt(N)) / Q.
inline ContinuedFraction continued_fraction(const QuadSurd& x, int max_terms = 100000) {
    if (x.is_rational()) throw NotIrrational("continued_fraction needs an irrational input");
    Int N = x.q() * x.q() * x.D();
    Int P = x.p(), Q = x.r();
    if (x.q() < 0) {
        P = -P;
        Q = -Q;
    }
    if ((N - P * P) % Q != 0) {  // scale so Q divides N - P^2
        Int g = abs(Q);
        P *= g;
        N *= g * g;
        Q *= g;
    }
    const Int s_root = isqrt(N);
    std::map<std::pair<Int, Int>, std::size_t> seen;
    std::vector<Int> coeffs;
    for (int iter = 0; iter < max_terms; ++iter) {
        auto key = std::make_pair(P, Q);
        auto it = seen.find(key);
        if (it != seen.end()) {
            ContinuedFraction cf;
            cf.head.assign(coeffs.begin(), coeffs.begin() + long(it->second));
            cf.period.assign(coeffs.begin() + long(it->second), coeffs.end());
            return cf;
        }
        seen.emplace(key, coeffs.size());
        Int a = Q > 0 ? detail::floor_div(P + s_root, Q) : detail::floor_div(-P - s_root - 1, -Q);
        coeffs.push_back(a);
        P = a * Q - P;
        Int num = N - P * P;
        if (num % Q != 0) throw ConstructionFailed("continued_fraction lost the divisibility invariant");
        Q = num / Q;
    }
    throw ConstructionFailed("continued_fraction found no cycle within the term limit");
}

// --- three-distance statistics for the orbit {k theta mod 1} -----------------

struct ThreeGapRow {
    long long N = 0;
    int distinct = 0;  // number of distinct gap lengths; at most 3 for any N
    double d_min = 0, d_max = 0;
    double ratio = 0;  // d_max / d_min
};

struct ThreeDistanceResult {
    long long N = 0;
    std::vector<double> gap_values;  // distinct gaps, ascending
    std::vector<long long> gap_counts;
    double d_min = 0, d_max = 0, ratio = 0;
};

namespace detail {

struct GapLess {
    bool operator()(const HPReal& a, const HPReal& b) const { return a < b - HPReal("1e-50"); }
};

// Incrementally insert frac(k theta) for k = 1..n_max into the partition of
// [0,1] and keep the multiset of gap lengths keyed by value.  After each
// insertion the partition is the circle orbit {k theta : 0 <= k <= N} cut at
// the orbit point 0, so the gap multiset has at most three distinct values.
template <typename RowFn>
inline std::map<HPReal, long long, GapLess> three_gap_run(const HPReal& theta, long long n_max, RowFn&& row) {
    std::set<HPReal> points;
    points.insert(HPReal(0));
    points.insert(HPReal(1));
    std::map<HPReal, long long, GapLess> gaps;
    gaps[HPReal(1)] = 1;
    HPReal step = theta - floor(theta);
    HPReal cur(0);
    for (long long k = 1; k <= n_max; ++k) {
        cur += step;
        if (cur >= 1) cur -= 1;
        auto ins = points.insert(cur);
        if (ins.second) {
            auto it = ins.first;
            auto prv = std::prev(it);
            auto nxt = std::next(it);
            auto old_gap = gaps.find(*nxt - *prv);
            if (old_gap != gaps.end() && --old_gap->second == 0) gaps.erase(old_gap);
            ++gaps[*it - *prv];
            ++gaps[*nxt - *it];
        }
        row(k, gaps);
    }
    return gaps;
}

}  // namespace detail

inline ThreeDistanceResult three_distance(const HPReal& theta, long long N) {
    if (N < 1) throw DomainError("three_distance needs N >= 1");
    auto gaps = detail::three_gap_run(theta, N, [](long long, const auto&) {});
    ThreeDistanceResult res;
    res.N = N;
    for (const auto& [g, c] : gaps) {
        res.gap_values.push_back(g.convert_to<double>());
        res.gap_counts.push_back(c);
    }
    res.d_min = res.gap_values.front();
    res.d_max = res.gap_values.back();
    res.ratio = res.d_max / res.d_min;
    return res;
}

inline ThreeDistanceResult three_distance(const QuadSurd& theta, long long N) {
    if (theta.is_rational()) throw NotIrrational("three_distance needs an irrational rotation number");
    return three_distance(theta.to_hp(), N);
}

inline std::vector<ThreeGapRow> three_distance_sweep(const HPReal& theta, long long n_max) {
    if (n_max < 1) throw DomainError("three_distance_sweep needs N >= 1");
    std::vector<ThreeGapRow> rows;
    rows.reserve(std::size_t(n_max));
    detail::three_gap_run(theta, n_max, [&rows](long long k, const auto& gaps) {
        ThreeGapRow r;
        r.N = k;
        r.distinct = int(gaps.size());
        r.d_min = gaps.begin()->first.template convert_to<double>();
        r.d_max = gaps.rbegin()->first.template convert_to<double>();
        r.ratio = r.d_max / r.d_min;
        rows.push_back(r);
    });
    return rows;
}

// --- lattice points in the stretched ball A^n B(0, r) ------------------------

struct LatticeCountResult {
    int n = 0;
    Rat radius;
    Int count;
    double normalized = 0;  // count / (pi r^2 |det A|^n), -> 1 as the ellipse grows
};

// Exact count of integer vectors v with |A^{-n} v| <= r, by scanning one
// coordinate and solving the per-column quadratic with integer square roots.
inline LatticeCountResult lattice_count_ellipse(const IntMatrix& A, int n, const Rat& r) {
    if (A.dim() != 2) throw Unsupported("lattice_count_ellipse needs a 2x2 matrix");
    if (n < 0) throw DomainError("lattice_count_ellipse needs n >= 0");
    if (r <= 0) throw DomainError("lattice_count_ellipse needs r > 0");
    IntMatrix P = matrix_power_exact(A, n);
    const Int Delta = det(P);
    if (Delta == 0) throw SingularMatrix("lattice_count_ellipse needs det A != 0");
    // |A^{-n} v|^2 <= r^2  <=>  |adj(P) v|^2 <= r^2 det(P)^2
    const Int c00 = P.at(1, 1), c01 = -P.at(0, 1), c10 = -P.at(1, 0), c11 = P.at(0, 0);
    const Int q00 = c00 * c00 + c10 * c10;
    const Int q01 = c00 * c01 + c10 * c11;
    const Int q11 = c01 * c01 + c11 * c11;
    const Rat r2d2 = r * r * Rat(Delta * Delta);
    const Int alpha = rat_num(r2d2), beta = rat_den(r2d2);
    // q00 x^2 + 2 q01 x y + q11 y^2 <= alpha / beta, scaled to integers:
    const Int a = beta * q11;
    // x ranges over x^2 <= q11 * r2d2 / (q00 q11 - q01^2); the denominator is det(P)^2 > 0
    const Rat xb = Rat(q11) * r2d2 / Rat(q00 * q11 - q01 * q01);
    Int x_max = isqrt(rat_num(xb) / rat_den(xb));
    while ((x_max + 1) * (x_max + 1) * rat_den(xb) <= rat_num(xb)) ++x_max;
    while (x_max > 0 && x_max * x_max * rat_den(xb) > rat_num(xb)) --x_max;
    LatticeCountResult res;
    res.n = n;
    res.radius = r;
    res.count = 0;
    for (Int x = -x_max; x <= x_max; ++x) {
        const Int b = 2 * beta * q01 * x;
        const Int c = beta * q00 * x * x - alpha;
        const Int disc = b * b - 4 * a * c;
        if (disc < 0) continue;
        const Int s = isqrt(disc);
        Int y_hi = detail::floor_div(-b + s, 2 * a);
        Int y_lo;
        if (s * s == disc)
            y_lo = -detail::floor_div(b + s, 2 * a);  // ceil((-b - s) / 2a)
        else
            y_lo = detail::floor_div(-b - s - 1, 2 * a) + 1;
        if (y_hi >= y_lo) res.count += y_hi - y_lo + 1;
    }
    const double area = 3.14159265358979323846 * to_double(r * r) * std::abs(to_double(Rat(Delta)));
    res.normalized = res.count.convert_to<double>() / area;
    return res;
}

// --- badly approximable profile ----------------------------------------------

struct LiouvilleRow {
    long long q = 0;
    double dist = 0;    // ||q theta||
    double q_dist = 0;  // q * ||q theta||
};

struct LiouvilleReport {
    long long q_max = 0;
    long long argmin_q = 0;
    double min_q_dist = 0;
    std::vector<LiouvilleRow> records;  // rows where the running minimum improved
};

// min over 1 <= q <= q_max of q * ||q theta||, computed exactly on surds.
inline LiouvilleReport liouville_gap(const QuadSurd& theta, long long q_max) {
    if (theta.is_rational()) throw NotIrrational("liouville_gap needs an irrational input");
    if (q_max < 1) throw DomainError("liouville_gap needs q_max >= 1");
    LiouvilleReport rep;
    rep.q_max = q_max;
    bool have = false;
    QuadSurd best = theta;  // placeholder until first row
    for (long long q = 1; q <= q_max; ++q) {
        QuadSurd f = theta.scaled(Int(q)).frac();
        QuadSurd dist = f.cmp(Rat(1, 2)) <= 0 ? f : f.negated().plus_rat(Rat(1));
        QuadSurd qd = dist.scaled(Int(q));
        if (!have || qd.cmp(best) < 0) {
            have = true;
            best = qd;
            rep.argmin_q = q;
            rep.min_q_dist = qd.to_double();
            rep.records.push_back({q, dist.to_double(), rep.min_q_dist});
        }
    }
    return rep;
}

}  // namespace st
