#pragma once
// Covering-number experiments on E_n = T^{-n} B(z, e^{-n tau}).
//
// Counts come from the raster: a box "meets" E_n when one of its sample points
// does (plus unconditional marking of exact preimage cells), so a grid count is
// a covering number up to the usual grid factor (a delta-grid cover is within
// 2^d 3^d of optimal).  Exponents, not constants, are the meaningful output:
// covering_exponent_fit ties the box side to the singular spectrum via
// delta_n = e^{-(l_k + tau) n}, rounded to the nearest power of two so that
// successive grids share cell boundaries, and fits log N against n.
// limsup_boxdim_trend box-counts finite truncations U_{n=lo..hi} E_n; no
// theorem equates that with a dimension, so its output is labeled HEURISTIC.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "errors.hpp"
#include "int_matrix.hpp"
#include "raster.hpp"
#include "spectral.hpp"
#include "torus.hpp"

namespace st {

struct CoverReport {
    int n = 0;
    double delta_requested = 0;  // box side asked for
    double delta_effective = 0;  // realized side 1/grid_m
    int grid_m = 0;
    long long boxes = 0;  // delta-grid boxes meeting E_n
    int subsamples = 0;
    double tau = 0;
};

// Number of delta-grid boxes meeting E_n, via a raster at grid_m = round(1/delta).
// Satisfies 1 <= boxes <= grid_m^d whenever the preimage cells are enumerable.
inline CoverReport covering_number(const IntMatrix& A, int n, const TorusPoint& z, double tau,
                                   double delta, int subsamples = 3, int threads = 1) {
    const int d = A.dim();
    if (d != 2 && d != 3) throw Unsupported("covering_number supports d = 2 or 3");
    if (!(delta > 0)) throw DomainError("covering_number needs delta > 0");
    long long want = std::llround(1.0 / delta);
    if (want < 1) want = 1;
    if (want > raster_cell_cap(d))
        throw CapExceeded("covering_number: grid finer than the raster cell cap",
                          std::to_string(want) + " cells per side, cap " +
                              std::to_string(raster_cell_cap(d)));
    const int m = int(want);
    CoverReport rep;
    rep.n = n;
    rep.delta_requested = delta;
    rep.grid_m = m;
    rep.delta_effective = 1.0 / double(m);
    rep.subsamples = subsamples;
    rep.tau = tau;
    rep.boxes = rasterize(A, n, z, tau, m, subsamples, threads).marked;
    return rep;
}

struct ExponentFitRow {
    int n = 0;
    double delta = 0;  // realized box side: a power of two, clamped at the raster cap
    int grid_m = 0;
    long long boxes = 0;
    bool capped = false;  // schedule wanted a finer grid than the cap allows
};

struct ExponentFit {
    int k = 0;               // 1-based index into the ascending log singular rates
    double scale_rate = 0;   // l_k + tau = lim log(1/delta_n) / n along the schedule
    double growth_rate = 0;  // least-squares slope of log N vs n
    // Count exponent of the axis-aligned cover: k l_k + sum_{j>k} l_j.
    double predicted_rate = 0;
    // For expanding A, the prediction net of wrap-around overlap,
    // predicted_rate - sum_j max(l_j - l_k - tau, 0); NaN otherwise.
    double refined_rate = std::numeric_limits<double>::quiet_NaN();
    double quotient = 0;  // growth_rate / scale_rate, a box-dimension estimate
    double predicted_quotient = 0;
    // Least-squares slope of log N vs log(1/delta) over the uncapped rows: the
    // same estimate immune to the power-of-two rounding of the schedule (which
    // biases growth_rate whenever (l_k + tau)/log 2 is far from an integer).
    // NaN when fewer than two distinct uncapped grids exist.
    double realized_quotient = std::numeric_limits<double>::quiet_NaN();
    std::vector<ExponentFitRow> rows;
};

// Fit log N(E_n, delta_n) against n along delta_n = e^{-(l_k + tau) n} rounded
// to the nearest power of two.  Rows whose grid hits the raster cap are kept,
// flagged, and counted at the cap; they can only undercount.  The quotient is
// reported against the ideal rate l_k + tau (rounding perturbs the realized
// rate by at most log(2) / (2n)).
inline ExponentFit covering_exponent_fit(const IntMatrix& A, const TorusPoint& z, double tau,
                                         int k, const std::vector<int>& n_list,
                                         int subsamples = 3, int threads = 1) {
    const int d = A.dim();
    if (d != 2 && d != 3) throw Unsupported("covering_exponent_fit supports d = 2 or 3");
    const SpectralData sp = spectral_data(A);
    if (k < 1 || k > d) throw DomainError("covering_exponent_fit: k must lie in 1.." + std::to_string(d));
    const double lk = sp.log_moduli[std::size_t(k - 1)];
    if (!(lk + tau > 0))
        throw DomainError("covering_exponent_fit needs l_k + tau > 0; got " + std::to_string(lk + tau));
    if (n_list.size() < 2) throw DomainError("covering_exponent_fit needs at least two n values");

    int cap_exp = 0;
    while ((1 << (cap_exp + 1)) <= raster_cell_cap(d)) ++cap_exp;

    ExponentFit fit;
    fit.k = k;
    fit.scale_rate = lk + tau;
    fit.predicted_rate = k * lk;
    for (int j = k; j < d; ++j) fit.predicted_rate += sp.log_moduli[std::size_t(j)];
    if (sp.is_expanding) {
        double overlap = 0;
        for (int j = 0; j < d; ++j) overlap += std::max(sp.log_moduli[std::size_t(j)] - lk - tau, 0.0);
        fit.refined_rate = fit.predicted_rate - overlap;
    }
    fit.predicted_quotient = fit.predicted_rate / fit.scale_rate;

    for (int n : n_list) {
        if (n < 1) throw DomainError("covering_exponent_fit needs n >= 1");
        long long e = std::llround(double(n) * (lk + tau) / std::log(2.0));
        if (e < 0) e = 0;
        ExponentFitRow row;
        row.n = n;
        if (e > cap_exp) {
            row.capped = true;
            e = cap_exp;
        }
        row.grid_m = 1 << int(e);
        row.delta = 1.0 / double(row.grid_m);
        row.boxes = rasterize(A, n, z, tau, row.grid_m, subsamples, threads).marked;
        if (row.boxes <= 0)
            throw ConstructionFailed("covering_exponent_fit: raster missed E_n at n = " + std::to_string(n));
        fit.rows.push_back(row);
    }

    const double N = double(fit.rows.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& row : fit.rows) {
        const double x = double(row.n), y = std::log(double(row.boxes));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = N * sxx - sx * sx;
    if (denom <= 0) throw DomainError("covering_exponent_fit needs at least two distinct n values");
    fit.growth_rate = (N * sxy - sx * sy) / denom;
    fit.quotient = fit.growth_rate / fit.scale_rate;

    double rn = 0, rx = 0, ry = 0, rxx = 0, rxy = 0;
    for (const auto& row : fit.rows) {
        if (row.capped) continue;
        const double x = std::log(1.0 / row.delta), y = std::log(double(row.boxes));
        rn += 1;
        rx += x;
        ry += y;
        rxx += x * x;
        rxy += x * y;
    }
    const double rdenom = rn * rxx - rx * rx;
    if (rdenom > 1e-12) fit.realized_quotient = (rn * rxy - rx * ry) / rdenom;
    return fit;
}

struct TrendRow {
    int n_hi = 0;  // union taken over n in [n_lo, n_hi]
    long long boxes = 0;
    double quotient = 0;  // log N / log(1/delta)
};

struct TrendReport {
    int n_lo = 0;
    int n_hi = 0;
    double delta = 0;
    int grid_m = 0;
    std::vector<TrendRow> rows;
    double final_quotient = 0;
    // Box counts of a finite truncation say nothing rigorous about the limit
    // set's dimensions, hence the fixed label.
    std::string label = "HEURISTIC";
};

// Box counts of the nested truncations U_{n=n_lo..M} E_n for M up to n_hi, at a
// fixed grid.  A falling quotient as the grid refines, or a stable one as n_hi
// grows, is suggestive only; the report is labeled accordingly.
inline TrendReport limsup_boxdim_trend(const IntMatrix& A, const TorusPoint& z, double tau,
                                       int n_lo, int n_hi, double delta,
                                       int subsamples = 3, int threads = 1) {
    const int d = A.dim();
    if (d != 2 && d != 3) throw Unsupported("limsup_boxdim_trend supports d = 2 or 3");
    if (n_lo < 0 || n_hi < n_lo) throw DomainError("limsup_boxdim_trend needs 0 <= n_lo <= n_hi");
    if (!(delta > 0)) throw DomainError("limsup_boxdim_trend needs delta > 0");
    long long want = std::llround(1.0 / delta);
    if (want < 2) throw DomainError("limsup_boxdim_trend needs delta <= 2/3 for a nontrivial grid");
    if (want > raster_cell_cap(d))
        throw CapExceeded("limsup_boxdim_trend: grid finer than the raster cell cap",
                          std::to_string(want) + " cells per side, cap " +
                              std::to_string(raster_cell_cap(d)));
    const int m = int(want);

    TrendReport rep;
    rep.n_lo = n_lo;
    rep.n_hi = n_hi;
    rep.grid_m = m;
    rep.delta = 1.0 / double(m);
    std::vector<std::uint8_t> acc;
    for (int n = n_lo; n <= n_hi; ++n) {
        const RasterGrid g = rasterize(A, n, z, tau, m, subsamples, threads);
        if (acc.empty()) acc.assign(g.mask.size(), 0);
        long long count = 0;
        for (std::size_t i = 0; i < acc.size(); ++i) {
            acc[i] |= g.mask[i];
            count += acc[i];
        }
        TrendRow row;
        row.n_hi = n;
        row.boxes = count;
        row.quotient = count > 0 ? std::log(double(count)) / std::log(double(m)) : 0.0;
        rep.rows.push_back(row);
    }
    rep.final_quotient = rep.rows.back().quotient;
    return rep;
}

}  // namespace st
