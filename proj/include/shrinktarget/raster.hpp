#pragma once
// Rasterization of T^{-n} B(z, e^{-n tau}) on a uniform grid over [0,1)^d.
//
// Each cell is probed at s^d regularly spaced sample points (midpoints of an
// s-fold refinement), so every sample coordinate is an odd multiple of
// 1/(2 m s).  Forward images under A^n are then exact integer vectors mod
// D = 2 m s, and the final distance check against e^{-n tau} uses lookup
// tables, one per output coordinate.  Cells containing exact preimages of z
// are marked unconditionally (when the preimage count is small enough to
// enumerate), so thin and point-like sets never vanish from the raster.

#include <cmath>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "errors.hpp"
#include "int_matrix.hpp"
#include "preimage.hpp"
#include "torus.hpp"

namespace st {

struct RasterGrid {
    int d = 0;
    int m = 0;                       // cells per side
    std::vector<std::uint8_t> mask;  // m^d entries, lexicographic in (i_0, ..., i_{d-1})
    long long marked = 0;

    std::size_t index(const std::vector<int>& cell) const {
        std::size_t idx = 0;
        for (int k = 0; k < d; ++k)
            idx = idx * std::size_t(m) + std::size_t(cell[std::size_t(k)]);
        return idx;
    }
};

inline int raster_cell_cap(int d) { return d == 2 ? 4096 : 256; }

namespace detail {

// A^n with every entry reduced into [0, q).
inline std::vector<std::vector<long long>> power_mod(const IntMatrix& A, int n, long long q) {
    const int d = A.dim();
    auto ident = [&] {
        std::vector<std::vector<long long>> I(std::size_t(d), std::vector<long long>(std::size_t(d), 0));
        for (int i = 0; i < d; ++i) I[std::size_t(i)][std::size_t(i)] = 1 % q;
        return I;
    };
    auto mul = [&](const std::vector<std::vector<long long>>& X, const std::vector<std::vector<long long>>& Y) {
        std::vector<std::vector<long long>> Z(std::size_t(d), std::vector<long long>(std::size_t(d), 0));
        for (int i = 0; i < d; ++i)
            for (int k = 0; k < d; ++k) {
                const long long x = X[std::size_t(i)][std::size_t(k)];
                if (x == 0) continue;
                for (int j = 0; j < d; ++j) {
                    auto& zij = Z[std::size_t(i)][std::size_t(j)];
                    zij = (zij + x * Y[std::size_t(k)][std::size_t(j)]) % q;
                }
            }
        return Z;
    };
    auto acc = ident();
    std::vector<std::vector<long long>> base(std::size_t(d), std::vector<long long>(std::size_t(d), 0));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            Int r = A.at(i, j) % q;
            if (r < 0) r += q;
            base[std::size_t(i)][std::size_t(j)] = r.convert_to<long long>();
        }
    int e = n;
    while (e > 0) {
        if (e & 1) acc = mul(acc, base);
        e >>= 1;
        if (e > 0) base = mul(base, base);
    }
    return acc;
}

}  // namespace detail

// Raster of the n-th preimage of B(z, e^{-n tau}).  Deterministic for given
// arguments; the thread count only partitions work, never the result.
inline RasterGrid rasterize(const IntMatrix& A, int n, const TorusPoint& z, double tau,
                            int m, int subsamples = 3, int threads = 1) {
    const int d = A.dim();
    if (d != 2 && d != 3) throw Unsupported("rasterize supports d = 2 or 3");
    if (z.dim() != d) throw DomainError("rasterize: center has dimension " + std::to_string(z.dim()) +
                                        " but the matrix is " + std::to_string(d) + "-dimensional");
    if (n < 0) throw DomainError("rasterize needs n >= 0");
    if (!(tau >= 0.0)) throw DomainError("rasterize needs tau >= 0");
    if (m < 1 || m > raster_cell_cap(d))
        throw DomainError("rasterize: grid size must lie in 1.." + std::to_string(raster_cell_cap(d)) +
                          " for d = " + std::to_string(d));
    if (subsamples < 1 || subsamples > 8)
        throw DomainError("rasterize: subsamples must lie in 1..8");
    if (det(A) == 0) throw SingularMatrix("rasterize needs det A != 0");
    if (threads < 1) threads = 1;

    const int s = subsamples;
    const long long D = 2LL * m * s;
    const long long J = 1LL * m * s;  // sample numerators per input coordinate are 2j+1, j in [0, J)
    const auto B = detail::power_mod(A, n, D);
    const double r = std::exp(-double(n) * tau);
    const double r2 = r * r;

    // col[c][k][j]: contribution of input coordinate c, numerator index j, to output coordinate k.
    std::vector<std::vector<std::vector<long long>>> col;
    col.assign(std::size_t(d), std::vector<std::vector<long long>>(std::size_t(d)));
    for (int c = 0; c < d; ++c)
        for (int k = 0; k < d; ++k) {
            auto& t = col[std::size_t(c)][std::size_t(k)];
            t.resize(std::size_t(J));
            for (long long j = 0; j < J; ++j)
                t[std::size_t(j)] = (B[std::size_t(k)][std::size_t(c)] * (2 * j + 1)) % D;
        }
    // distsq[k][q]: wrapped squared distance of q/D to z_k.
    std::vector<std::vector<double>> distsq;
    distsq.resize(std::size_t(d));
    for (int k = 0; k < d; ++k) {
        auto& t = distsq[std::size_t(k)];
        t.resize(std::size_t(D));
        const double zk = to_double(z.coords[std::size_t(k)]);
        for (long long q = 0; q < D; ++q) {
            double diff = double(q) / double(D) - zk;
            diff -= std::floor(diff + 0.5);
            t[std::size_t(q)] = diff * diff;
        }
    }

    RasterGrid g;
    g.d = d;
    g.m = m;
    std::size_t cells = 1;
    for (int k = 0; k < d; ++k) cells *= std::size_t(m);
    g.mask.assign(cells, 0);

    auto sweep = [&](int lo, int hi) {
        if (d == 2) {
            const long long* c00 = col[0][0].data();
            const long long* c01 = col[0][1].data();
            const long long* c10 = col[1][0].data();
            const long long* c11 = col[1][1].data();
            const double* d0 = distsq[0].data();
            const double* d1 = distsq[1].data();
            for (int i0 = lo; i0 < hi; ++i0) {
                const std::size_t row = std::size_t(i0) * std::size_t(m);
                for (int i1 = 0; i1 < m; ++i1) {
                    bool hit = false;
                    for (int a0 = 0; a0 < s && !hit; ++a0) {
                        const long long j0 = 1LL * i0 * s + a0;
                        const long long u0 = c00[j0], u1 = c01[j0];
                        for (int a1 = 0; a1 < s; ++a1) {
                            const long long j1 = 1LL * i1 * s + a1;
                            long long q0 = u0 + c10[j1];
                            if (q0 >= D) q0 -= D;
                            long long q1 = u1 + c11[j1];
                            if (q1 >= D) q1 -= D;
                            if (d0[q0] + d1[q1] <= r2) {
                                hit = true;
                                break;
                            }
                        }
                    }
                    if (hit) g.mask[row + std::size_t(i1)] = 1;
                }
            }
        } else {
            for (int i0 = lo; i0 < hi; ++i0)
                for (int i1 = 0; i1 < m; ++i1)
                    for (int i2 = 0; i2 < m; ++i2) {
                        bool hit = false;
                        for (int a0 = 0; a0 < s && !hit; ++a0)
                            for (int a1 = 0; a1 < s && !hit; ++a1)
                                for (int a2 = 0; a2 < s; ++a2) {
                                    const long long j0 = 1LL * i0 * s + a0;
                                    const long long j1 = 1LL * i1 * s + a1;
                                    const long long j2 = 1LL * i2 * s + a2;
                                    double acc = 0;
                                    for (int k = 0; k < d; ++k) {
                                        long long q = col[0][std::size_t(k)][std::size_t(j0)] +
                                                      col[1][std::size_t(k)][std::size_t(j1)] +
                                                      col[2][std::size_t(k)][std::size_t(j2)];
                                        q %= D;
                                        acc += distsq[std::size_t(k)][std::size_t(q)];
                                    }
                                    if (acc <= r2) {
                                        hit = true;
                                        break;
                                    }
                                }
                        if (hit)
                            g.mask[(std::size_t(i0) * std::size_t(m) + std::size_t(i1)) * std::size_t(m) +
                                   std::size_t(i2)] = 1;
                    }
        }
    };

    if (threads == 1 || m < 2 * threads) {
        sweep(0, m);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (m + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            const int lo = t * chunk;
            const int hi = std::min(m, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(sweep, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    // Mark the cells of the exact preimage points of z when enumerable.
    Int ad = det(A);
    if (ad < 0) ad = -ad;
    const Int pcount = boost::multiprecision::pow(ad, unsigned(n));
    if (pcount <= kDefaultPreimageCap) {
        for (const auto& p : preimage_points(A, n, z)) {
            std::vector<int> cell(std::size_t(d), 0);
            for (int k = 0; k < d; ++k)
                cell[std::size_t(k)] = int(rat_floor(p.coords[std::size_t(k)] * m).convert_to<long long>());
            g.mask[g.index(cell)] = 1;
        }
    }

    long long count = 0;
    for (auto b : g.mask) count += b;
    g.marked = count;
    return g;
}

// Binary PGM (P5) image of a 2-d raster: marked cells are black, the second
// torus coordinate increases upward.
inline std::string to_pgm(const RasterGrid& g) {
    if (g.d != 2) throw Unsupported("PGM output needs a 2-d raster");
    std::string out = "P5\n" + std::to_string(g.m) + " " + std::to_string(g.m) + "\n255\n";
    out.reserve(out.size() + std::size_t(g.m) * std::size_t(g.m));
    for (int row = 0; row < g.m; ++row) {
        const std::size_t i1 = std::size_t(g.m - 1 - row);
        for (int i0 = 0; i0 < g.m; ++i0)
            out.push_back(g.mask[std::size_t(i0) * std::size_t(g.m) + i1] ? '\0' : char(255));
    }
    return out;
}

// Marked cell indices in lexicographic order.
inline std::vector<std::vector<int>> marked_cells(const RasterGrid& g) {
    std::vector<std::vector<int>> out;
    std::vector<int> cell(std::size_t(g.d), 0);
    for (std::size_t idx = 0; idx < g.mask.size(); ++idx) {
        if (g.mask[idx]) out.push_back(cell);
        for (int k = g.d - 1; k >= 0; --k) {
            if (++cell[std::size_t(k)] < g.m) break;
            cell[std::size_t(k)] = 0;
        }
    }
    return out;
}

}  // namespace st
