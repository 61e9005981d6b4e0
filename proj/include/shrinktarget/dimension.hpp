#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "spectral.hpp"

namespace st {

struct DimensionResult {
    double value = std::numeric_limits<double>::quiet_NaN();
    bool indeterminate = false;
    int attaining_index = -1; // 1-based index of the attaining term, -1 if n/a
    std::string branch;
    std::string note;
};

// ---- tuple-level formula cores (l ascending) ----

// 2x2 hyperbolic target dimension; l1 < 0 < l2. unimodular marks |det| == 1.
inline DimensionResult hyperbolic_2d_core(double l1, double l2, double tau, bool unimodular) {
    if (tau < 0) throw DomainError("tau must be >= 0");
    if (!(l1 < 0 && 0 < l2)) throw Unsupported("need l1 < 0 < l2 for the 2x2 hyperbolic formula");
    DimensionResult r;
    const double L = unimodular ? 0.0 : l1 + l2; // log|det|, exactly zero when |det| = 1
    if (tau < -l1) {
        r.value = 2 * l2 / (tau + l2);
        r.branch = "hyperbolic-low-tau";
        r.attaining_index = 2;
    } else if (tau > -l1) {
        double a = L / (tau + l1);
        double b = 2 * l2 / (tau + l2);
        r.branch = "hyperbolic-high-tau";
        if (a <= b) { r.value = a; r.attaining_index = 1; }
        else        { r.value = b; r.attaining_index = 2; }
    } else {
        r.branch = "critical";
        if (unimodular) {
            r.indeterminate = true;
            r.note = "critical tau with |det| = 1: dimension jumps, value indeterminate at the point";
        } else {
            r.value = 2 * l2 / (l2 - l1);
            r.attaining_index = 2;
        }
    }
    return r;
}

// general-d covering upper bound; valid indices need tau + l_k > 0
inline DimensionResult upper_bound_core(const std::vector<double>& l, double tau) {
    if (tau < 0) throw DomainError("tau must be >= 0");
    const int d = int(l.size());
    DimensionResult r;
    r.branch = "upper-bound";
    double best = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= d; ++k) {
        double lk = l[std::size_t(k - 1)];
        if (tau + lk <= 0) continue;
        double num = k * lk;
        for (int j = k + 1; j <= d; ++j) num += l[std::size_t(j - 1)];
        double v = num / (tau + lk);
        if (v < best) { best = v; r.attaining_index = k; }
    }
    if (!std::isfinite(best)) throw NoValidIndex("no index k has tau + l_k > 0");
    // the numerator is >= log|det| >= 0 exactly; shave off float noise
    if (best < 0 && best > -1e-9) best = 0.0;
    r.value = best;
    return r;
}

// expanding-case dimension; requires all l_j > 0
inline DimensionResult expanding_core(const std::vector<double>& l, double tau) {
    if (tau < 0) throw DomainError("tau must be >= 0");
    const int d = int(l.size());
    for (double v : l)
        if (v <= 0) throw Unsupported("expanding formula needs all Lyapunov exponents positive");
    DimensionResult r;
    r.branch = "expanding";
    if (tau == 0) { // the target is the whole torus
        r.value = double(d);
        r.attaining_index = d;
        r.note = "tau = 0: full torus";
        return r;
    }
    double best = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= d; ++k) {
        double lk = l[std::size_t(k - 1)];
        double num = k * lk;
        for (int j = k + 1; j <= d; ++j) num += l[std::size_t(j - 1)];
        for (int j = 1; j <= d; ++j) {
            double excess = l[std::size_t(j - 1)] - lk - tau;
            if (excess > 0) num -= excess;
        }
        double v = num / (tau + lk);
        if (v < best) { best = v; r.attaining_index = k; }
    }
    r.value = best;
    return r;
}

// partition form of the expanding dimension: min over thresholds t in {l_i} u {l_i + tau}
inline DimensionResult partition_core(const std::vector<double>& l, double tau) {
    if (tau < 0) throw DomainError("tau must be >= 0");
    const int d = int(l.size());
    for (double v : l)
        if (v <= 0) throw Unsupported("partition formula needs all Lyapunov exponents positive");
    std::vector<double> cand;
    for (double v : l) { cand.push_back(v); cand.push_back(v + tau); }
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

    DimensionResult r;
    r.branch = "partition";
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t ci = 0; ci < cand.size(); ++ci) {
        double t = cand[ci];
        int n1 = 0, n2 = 0;
        double sum3 = 0;
        for (int j = 0; j < d; ++j) {
            double lj = l[std::size_t(j)];
            if (lj >= t) ++n1;
            else if (lj + tau <= t) ++n2;
            else sum3 += lj;
        }
        double v = double(n1 + n2) + (sum3 - double(n2) * tau) / t;
        if (v < best) {
            best = v;
            r.attaining_index = int(ci) + 1;
            r.note = "attaining threshold t = " + std::to_string(t);
        }
    }
    r.value = best;
    return r;
}

// ---- matrix-level wrappers ----

inline DimensionResult hyperbolic_2d_dimension(const IntMatrix& A, double tau) {
    SpectralData s = spectral_data(A);
    if (s.d != 2) throw Unsupported("hyperbolic_2d_dimension needs a 2x2 matrix");
    if (!s.is_hyperbolic || s.is_expanding)
        throw Unsupported("hyperbolic_2d_dimension needs |lambda_1| < 1 < |lambda_2|");
    Int ad = s.determinant < 0 ? Int(-s.determinant) : s.determinant;
    return hyperbolic_2d_core(s.log_moduli[0], s.log_moduli[1], tau, ad == 1);
}

inline DimensionResult upper_bound_dimension(const IntMatrix& A, double tau) {
    return upper_bound_core(spectral_data(A).log_moduli, tau);
}

inline DimensionResult expanding_dimension(const IntMatrix& A, double tau) {
    SpectralData s = spectral_data(A);
    if (!s.is_expanding) throw Unsupported("expanding_dimension needs an expanding matrix");
    return expanding_core(s.log_moduli, tau);
}

inline DimensionResult partition_dimension(const IntMatrix& A, double tau) {
    SpectralData s = spectral_data(A);
    if (!s.is_expanding) throw Unsupported("partition_dimension needs an expanding matrix");
    return partition_core(s.log_moduli, tau);
}

// ---- profile over a tau grid ----

struct ProfileRow {
    double tau = 0;
    DimensionResult result;
};

struct ProfileResult {
    std::string formula; // "hyperbolic-2d" or "expanding"
    std::vector<ProfileRow> rows;
    bool has_critical = false;
    double tau_critical = 0;
    DimensionResult at_critical;
    double left_limit = 0;
    double right_limit = 0;
};

inline ProfileResult dimension_profile(const IntMatrix& A, const std::vector<double>& tau_grid) {
    SpectralData s = spectral_data(A);
    ProfileResult pr;
    bool hyp2 = (s.d == 2 && s.is_hyperbolic && !s.is_expanding);
    if (hyp2) pr.formula = "hyperbolic-2d";
    else if (s.is_expanding) pr.formula = "expanding";
    else
        throw Unsupported("dimension_profile needs a 2x2 hyperbolic or an expanding matrix; "
                          "upper_bound_dimension still applies to this input");

    Int ad = s.determinant < 0 ? Int(-s.determinant) : s.determinant;
    for (double tau : tau_grid) {
        ProfileRow row;
        row.tau = tau;
        row.result = hyp2 ? hyperbolic_2d_core(s.log_moduli[0], s.log_moduli[1], tau, ad == 1)
                          : expanding_core(s.log_moduli, tau);
        pr.rows.push_back(row);
    }
    if (hyp2) {
        double l1 = s.log_moduli[0], l2 = s.log_moduli[1];
        pr.has_critical = true;
        pr.tau_critical = -l1;
        pr.at_critical = hyperbolic_2d_core(l1, l2, -l1, ad == 1);
        pr.left_limit = 2 * l2 / (l2 - l1);
        pr.right_limit = (ad == 1) ? 0.0 : pr.left_limit;
    }
    return pr;
}

} // namespace st
