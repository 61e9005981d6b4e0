#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "singular.hpp"
#include "smith.hpp"
#include "torus.hpp"

namespace st {

constexpr long long kDefaultPreimageCap = 1000000;

// All solutions of A^n x = z on the torus, exact, sorted lexicographically.
inline std::vector<TorusPoint> preimage_points(const IntMatrix& A, long long n,
                                               const TorusPoint& z,
                                               long long cap = kDefaultPreimageCap) {
    const int d = A.dim();
    if (n < 0) throw DomainError("preimage_points: n must be >= 0");
    if (z.dim() != d) throw DomainError("preimage_points: z has wrong dimension");
    IntMatrix M = matrix_power_exact(A, n);
    Int dt = det(M);
    if (dt == 0) throw SingularMatrix("preimage_points requires det A != 0");
    Int count = dt < 0 ? Int(-dt) : dt;
    if (count > cap)
        throw CapExceeded("preimage enumeration over cap " + std::to_string(cap), count.str());

    SmithForm f = smith_normal_form(M);
    IntMatrix Uinv = unimodular_inverse(f.U);
    IntMatrix Vinv = unimodular_inverse(f.V);

    // w = U^{-1} z ; solutions y_i = (w_i + t_i) / s_i , t_i in [0, s_i)
    std::vector<Rat> w(std::size_t(d), Rat(0));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) w[std::size_t(i)] += Rat(Uinv.at(i, j)) * z.coords[std::size_t(j)];

    std::vector<long long> s(std::size_t(d), 0LL);
    for (int i = 0; i < d; ++i) s[std::size_t(i)] = f.S.at(i, i).convert_to<long long>();

    std::vector<TorusPoint> out;
    out.reserve(count.convert_to<std::size_t>());
    std::vector<long long> t(std::size_t(d), 0);
    for (;;) {
        std::vector<Rat> y(std::size_t(d), Rat(0));
        for (int i = 0; i < d; ++i)
            y[std::size_t(i)] = (w[std::size_t(i)] + t[std::size_t(i)]) / s[std::size_t(i)];
        std::vector<Rat> x(std::size_t(d), Rat(0));
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) x[std::size_t(i)] += Rat(Vinv.at(i, j)) * y[std::size_t(j)];
        }
        out.emplace_back(std::move(x));

        int pos = d - 1;
        while (pos >= 0 && ++t[std::size_t(pos)] == s[std::size_t(pos)]) {
            t[std::size_t(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Common shape of every preimage component: the ellipsoid A^{-n} B(0, r).
struct EllipsoidShape {
    double radius = 0;                 // r = e^{-n tau}
    std::vector<double> semi_axes;     // descending: r / sigma_{n,j}
    Eigen::MatrixXd axis_directions;   // column j pairs with semi_axes[j]
    bool long_axis = false;            // largest semi-axis exceeds 1/2
};

struct PreimageSet {
    long long n = 0;
    double tau = 0;
    TorusPoint z;
    std::vector<TorusPoint> centers;
    EllipsoidShape shape;
};

inline PreimageSet preimage_set(const IntMatrix& A, long long n, const TorusPoint& z, double tau,
                                long long cap = kDefaultPreimageCap) {
    if (tau < 0) throw DomainError("preimage_set: tau must be >= 0");
    double r = std::exp(-double(n) * tau);
    if (r > 0.5)
        throw RadiusTooLarge("target radius e^{-n tau} = " + std::to_string(r) + " exceeds 1/2");
    PreimageSet ps;
    ps.n = n;
    ps.tau = tau;
    ps.z = z;
    ps.centers = preimage_points(A, n, z, cap);
    SingularProfile sp = log_singular_values(A, n);
    ps.shape.radius = r;
    for (int j = 0; j < A.dim(); ++j)
        ps.shape.semi_axes.push_back(r * std::exp(-sp.log_sigma[std::size_t(j)]));
    ps.shape.axis_directions.resize(A.dim(), A.dim());
    for (int j = 0; j < A.dim(); ++j)
        ps.shape.axis_directions.col(j) = sp.right_vectors.col(j);
    ps.shape.long_axis = ps.shape.semi_axes[0] > 0.5;
    return ps;
}

// Exact membership: does x lie in T^{-n} B(z, e^{-n tau})?
// The forward image is computed in exact rational arithmetic; the radius
// comparison runs at 100-digit precision, boundary points counting as members.
inline bool membership(const IntMatrix& A, long long n, const TorusPoint& z, double tau,
                       const TorusPoint& x) {
    const int d = A.dim();
    if (x.dim() != d || z.dim() != d) throw DomainError("membership: dimension mismatch");
    if (n < 0) throw DomainError("membership: n must be >= 0");
    if (tau < 0) throw DomainError("membership: tau must be >= 0");
    IntMatrix M = matrix_power_exact(A, n);
    std::vector<Rat> img(std::size_t(d), Rat(0));
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) img[std::size_t(i)] += Rat(M.at(i, j)) * x.coords[std::size_t(j)];
    }
    TorusPoint w{std::move(img)};
    Rat dist2 = torus_dist2_exact(w, z);
    HPReal r2 = exp(HPReal(-2.0 * double(n) * tau));
    return HPReal(dist2) <= r2;
}

// Minimal positive gaps between centers projected on each eigencoordinate.
struct SeparationRow {
    double eigenvalue_modulus = 0;
    double log_modulus = 0;
    double min_gap = 0;       // minimal positive projected gap
    double expected_gap = 0;  // e^{-n l_j}
    double ratio = 0;         // min_gap / expected_gap
};

struct SeparationReport {
    long long n = 0;
    std::vector<SeparationRow> rows;
};

inline SeparationReport separation_report(const IntMatrix& A, long long n,
                                          const std::vector<TorusPoint>& centers) {
    const int d = A.dim();
    if (int(centers.size()) < 2)
        throw TooFewCenters("separation_report needs at least 2 centers, got " +
                            std::to_string(centers.size()));
    SpectralData sd = spectral_data(A);
    for (const HPComplex& ev : sd.eigenvalues)
        if (abs(ev.imag()) > HPReal("1e-30"))
            throw DomainError("separation_report needs a matrix diagonalizable over the reals");

    // left eigenvectors: null vectors of (A^T - lambda I), high precision
    SeparationReport rep;
    rep.n = n;
    for (int e = 0; e < d; ++e) {
        HPReal lam = sd.eigenvalues[std::size_t(e)].real();
        // Gaussian elimination with partial pivoting on (A^T - lam I)
        std::vector<std::vector<HPReal>> m(std::size_t(d), std::vector<HPReal>(std::size_t(d), HPReal(0)));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                m[std::size_t(i)][std::size_t(j)] = HPReal(A.at(j, i).convert_to<double>());
                if (i == j) m[std::size_t(i)][std::size_t(j)] -= lam;
            }
        std::vector<int> pivot_col(std::size_t(d), -1);
        int rank = 0;
        for (int col = 0; col < d && rank < d; ++col) {
            int best = -1;
            HPReal bestv(0);
            for (int row = rank; row < d; ++row) {
                HPReal v = abs(m[std::size_t(row)][std::size_t(col)]);
                if (v > bestv) { bestv = v; best = row; }
            }
            if (best < 0 || bestv < HPReal("1e-40")) continue;
            std::swap(m[std::size_t(rank)], m[std::size_t(best)]);
            for (int row = 0; row < d; ++row) {
                if (row == rank) continue;
                HPReal fac = m[std::size_t(row)][std::size_t(col)] / m[std::size_t(rank)][std::size_t(col)];
                for (int j = col; j < d; ++j)
                    m[std::size_t(row)][std::size_t(j)] -= fac * m[std::size_t(rank)][std::size_t(j)];
            }
            pivot_col[std::size_t(rank)] = col;
            ++rank;
        }
        // free variable: the eigen index position among non-pivot columns; take the
        // e-th geometric copy deterministically by choosing free column round-robin
        std::vector<bool> is_pivot(std::size_t(d), false);
        for (int rix = 0; rix < rank; ++rix) is_pivot[std::size_t(pivot_col[std::size_t(rix)])] = true;
        std::vector<int> free_cols;
        for (int j = 0; j < d; ++j)
            if (!is_pivot[std::size_t(j)]) free_cols.push_back(j);
        if (free_cols.empty())
            throw DomainError("separation_report: eigenvector extraction failed (not diagonalizable?)");
        // count how many earlier spectral slots share this eigenvalue to pick distinct copies
        int copy = 0;
        for (int p = 0; p < e; ++p)
            if (abs(sd.eigenvalues[std::size_t(p)].real() - lam) < HPReal("1e-30")) ++copy;
        int fc = free_cols[std::size_t(copy % int(free_cols.size()))];

        std::vector<HPReal> w(std::size_t(d), HPReal(0));
        w[std::size_t(fc)] = 1;
        for (int rix = rank - 1; rix >= 0; --rix) {
            int pc = pivot_col[std::size_t(rix)];
            HPReal acc(0);
            for (int j = pc + 1; j < d; ++j) acc += m[std::size_t(rix)][std::size_t(j)] * w[std::size_t(j)];
            w[std::size_t(pc)] = -acc / m[std::size_t(rix)][std::size_t(pc)];
        }
        HPReal norm(0);
        for (const HPReal& v : w) norm += v * v;
        norm = sqrt(norm);
        int firstnz = 0;
        while (firstnz < d && abs(w[std::size_t(firstnz)]) < HPReal("1e-50")) ++firstnz;
        HPReal sign = (firstnz < d && w[std::size_t(firstnz)] < 0) ? HPReal(-1) : HPReal(1);

        std::vector<double> proj;
        proj.reserve(centers.size());
        for (const TorusPoint& c : centers) {
            HPReal p(0);
            for (int j = 0; j < d; ++j)
                p += w[std::size_t(j)] * HPReal(c.coords[std::size_t(j)].convert_to<double>());
            proj.push_back((sign * p / norm).convert_to<double>());
        }
        std::sort(proj.begin(), proj.end());
        double min_gap = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < proj.size(); ++i) {
            double g = proj[i] - proj[i - 1];
            if (g > 1e-12 && g < min_gap) min_gap = g;
        }
        if (!std::isfinite(min_gap)) min_gap = 0;

        SeparationRow row;
        row.eigenvalue_modulus = sd.moduli[std::size_t(e)];
        row.log_modulus = sd.log_moduli[std::size_t(e)];
        row.min_gap = min_gap;
        row.expected_gap = std::exp(-double(n) * row.log_modulus);
        row.ratio = row.expected_gap > 0 ? min_gap / row.expected_gap : 0;
        rep.rows.push_back(row);
    }
    return rep;
}

} // namespace st
