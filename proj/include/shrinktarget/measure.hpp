#pragma once
// Monte-Carlo probes of the pullback measures mu_n = (T^n)^* (uniform on
// B(z, e^{-n tau})).  mu_n is exactly the equal-weight mixture of uniform
// distributions on the |det A|^n preimage ellipsoids, which is how the
// sampler draws: pick a center, then map a uniform ball point through A^{-n}.
//
// All estimators batch their draws over the 16 fixed logical streams, so the
// reported standard error comes from genuine between-batch scatter and every
// result is reproducible from the seed alone, whatever the thread count.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "errors.hpp"
#include "int_matrix.hpp"
#include "preimage.hpp"
#include "rng.hpp"
#include "spectral.hpp"
#include "torus.hpp"

namespace st {

namespace detail {

template <typename Fn>
inline void for_each_stream(int threads, Fn&& fn) {  // fn(int stream)
    if (threads <= 1) {
        for (int s = 0; s < kStreams; ++s) fn(s);
        return;
    }
    std::atomic<int> next{0};
    auto worker = [&] {
        for (;;) {
            int s = next.fetch_add(1);
            if (s >= kStreams) return;
            fn(s);
        }
    };
    std::vector<std::thread> pool;
    const int nw = std::min(threads, kStreams);
    pool.reserve(std::size_t(nw));
    for (int t = 0; t < nw; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

inline long long stream_share(long long total, int stream) {
    long long base = total / kStreams;
    return base + (stream < int(total % kStreams) ? 1 : 0);
}

inline double wrap_dist2(const std::vector<double>& x, const std::vector<double>& y) {
    double acc = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        double diff = x[k] - y[k];
        diff -= std::floor(diff + 0.5);
        acc += diff * diff;
    }
    return acc;
}

// mean / standard error of a batch-means vector
inline void batch_stats(const std::vector<double>& means, const std::vector<long long>& weights,
                        double& value, double& se) {
    double wsum = 0, acc = 0;
    for (std::size_t i = 0; i < means.size(); ++i) {
        wsum += double(weights[i]);
        acc += double(weights[i]) * means[i];
    }
    value = acc / wsum;
    double var = 0;
    for (std::size_t i = 0; i < means.size(); ++i) {
        const double dev = means[i] - value;
        var += double(weights[i]) / wsum * dev * dev;
    }
    se = std::sqrt(var / double(means.size() > 1 ? means.size() - 1 : 1));
}

}  // namespace detail

// Draws from mu_n in double precision.
class MuSampler {
public:
    MuSampler(const IntMatrix& A, int n, const TorusPoint& z, double tau,
              long long cap = kDefaultPreimageCap)
        : d_(A.dim()), r_(std::exp(-double(n) * tau)) {
        if (n < 0) throw DomainError("MuSampler needs n >= 0");
        if (!(tau >= 0.0)) throw DomainError("MuSampler needs tau >= 0");
        for (const auto& c : preimage_points(A, n, z, cap)) centers_.push_back(to_doubles(c));
        RatMatrix Minv = inverse_power(A, n);
        inv_.assign(std::size_t(d_), std::vector<double>(std::size_t(d_), 0.0));
        for (int i = 0; i < d_; ++i)
            for (int j = 0; j < d_; ++j) inv_[std::size_t(i)][std::size_t(j)] = to_double(Minv.at(i, j));
    }

    int dim() const { return d_; }
    std::size_t center_count() const { return centers_.size(); }
    double target_radius() const { return r_; }

    std::vector<double> sample(Rng& rng) const {
        const std::size_t ci =
            std::min(centers_.size() - 1, std::size_t(rng.uniform() * double(centers_.size())));
        const std::vector<double> u = rng.in_ball(d_);
        std::vector<double> x(std::size_t(d_), 0.0);
        for (int i = 0; i < d_; ++i) {
            double acc = centers_[ci][std::size_t(i)];
            for (int j = 0; j < d_; ++j) acc += inv_[std::size_t(i)][std::size_t(j)] * (r_ * u[std::size_t(j)]);
            x[std::size_t(i)] = acc - std::floor(acc);
        }
        return x;
    }

private:
    int d_;
    double r_;
    std::vector<std::vector<double>> centers_;
    std::vector<std::vector<double>> inv_;
};

struct MassEstimate {
    double value = 0;
    double std_error = 0;
    long long samples = 0;
};

// Monte-Carlo estimate of mu_n(B).
inline MassEstimate mu_n_ball(const IntMatrix& A, int n, const TorusPoint& z, double tau,
                              const Ball& B, long long samples, std::uint64_t seed, int threads = 1) {
    if (samples < kStreams) throw DomainError("mu_n_ball needs at least 16 samples");
    if (B.whole) return {1.0, 0.0, samples};  // the torus itself carries all the mass
    if (B.center.dim() != A.dim()) throw DomainError("mu_n_ball: ball dimension mismatch");
    MuSampler sampler(A, n, z, tau);
    const std::vector<double> bc = to_doubles(B.center);
    const double r2 = B.radius * B.radius;
    std::vector<double> means(std::size_t(kStreams), 0.0);
    std::vector<long long> weights(std::size_t(kStreams), 0);
    detail::for_each_stream(threads, [&](int s) {
        Rng rng = stream_rng(seed, s);
        const long long mine = detail::stream_share(samples, s);
        long long hits = 0;
        for (long long i = 0; i < mine; ++i)
            if (detail::wrap_dist2(sampler.sample(rng), bc) <= r2) ++hits;
        means[std::size_t(s)] = mine > 0 ? double(hits) / double(mine) : 0.0;
        weights[std::size_t(s)] = mine;
    });
    MassEstimate est;
    est.samples = samples;
    detail::batch_stats(means, weights, est.value, est.std_error);
    return est;
}

// --- regime boundaries -------------------------------------------------------

// The scales that separate qualitatively different ball-mass behavior around a
// point of E_n: below e^{-(tau + l_j) n} a ball sits inside the j-th ellipsoid
// axis, around e^{-n l_j} it matches the contracted unit scale, and above the
// slab separation e^{(tau - l_max) n} it averages over many slabs.
struct RegimeBoundaries {
    std::vector<double> contraction;  // e^{-(tau + l_j) n}, ascending in j
    std::vector<double> axis;         // e^{-n l_j}, ascending in j
    double separation = 0;            // e^{(tau - l_max) n}
};

inline RegimeBoundaries regime_boundaries(const IntMatrix& A, int n, double tau) {
    if (n < 0) throw DomainError("regime_boundaries needs n >= 0");
    SpectralData sd = spectral_data(A);
    RegimeBoundaries rb;
    for (double l : sd.log_moduli) {
        rb.contraction.push_back(std::exp(-(tau + l) * double(n)));
        rb.axis.push_back(std::exp(-l * double(n)));
    }
    rb.separation = std::exp((tau - sd.log_moduli.back()) * double(n));
    return rb;
}

// --- local scaling exponent --------------------------------------------------

struct HolderReport {
    std::vector<double> radii;  // log-spaced grid, ascending
    std::vector<double> mass;   // mu_n(B(y, r)) estimates on shared draws
    double slope = 0;           // least-squares d log mass / d log r
    double predicted = 0;       // heuristic exponent for the probed regime
    std::string regime;         // "slab", "bulk", or "solid"
    double separation = 0;      // e^{(tau - l_max) n}, spacing scale of the slabs
    long long samples = 0;
};

// Fit the local scaling exponent of mu_n around y over radii [r_lo, r_hi].
// The predicted exponent is heuristic guidance: below the slab separation a
// hyperbolic 2x2 map should show 2 l_2 / (tau + l_2); well above it the mass
// fills area and the exponent drifts toward 2.
inline HolderReport holder_slope(const IntMatrix& A, int n, const TorusPoint& z, double tau,
                                 const TorusPoint& y, double r_lo, double r_hi, int grid,
                                 long long samples, std::uint64_t seed, int threads = 1) {
    if (!(r_lo > 0) || !(r_hi > r_lo)) throw DomainError("holder_slope needs 0 < r_lo < r_hi");
    if (grid < 2) throw DomainError("holder_slope needs at least 2 radii");
    if (samples < kStreams) throw DomainError("holder_slope needs at least 16 samples");
    if (y.dim() != A.dim()) throw DomainError("holder_slope: probe point dimension mismatch");
    MuSampler sampler(A, n, z, tau);
    const std::vector<double> yc = to_doubles(y);

    std::vector<std::vector<double>> dists;
    dists.resize(std::size_t(kStreams));
    detail::for_each_stream(threads, [&](int s) {
        Rng rng = stream_rng(seed, s);
        const long long mine = detail::stream_share(samples, s);
        auto& mine_d = dists[std::size_t(s)];
        mine_d.reserve(std::size_t(mine));
        for (long long i = 0; i < mine; ++i)
            mine_d.push_back(detail::wrap_dist2(sampler.sample(rng), yc));
    });
    std::vector<double> all;
    all.reserve(std::size_t(samples));
    for (const auto& v : dists) all.insert(all.end(), v.begin(), v.end());
    std::sort(all.begin(), all.end());

    HolderReport rep;
    rep.samples = samples;
    for (int i = 0; i < grid; ++i) {
        const double t = grid == 1 ? 0.0 : double(i) / double(grid - 1);
        const double r = r_lo * std::pow(r_hi / r_lo, t);
        rep.radii.push_back(r);
        const auto it = std::upper_bound(all.begin(), all.end(), r * r);
        rep.mass.push_back(double(it - all.begin()) / double(samples));
    }

    int nonzero = 0;
    for (double m : rep.mass)
        if (m > 0) ++nonzero;
    if (nonzero < 2 || 2 * nonzero < grid)
        throw InsufficientMass("holder_slope: too many empty radii; enlarge the radii or the sample budget");

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (int i = 0; i < grid; ++i) {
        if (rep.mass[std::size_t(i)] <= 0) continue;
        const double lx = std::log(rep.radii[std::size_t(i)]);
        const double ly = std::log(rep.mass[std::size_t(i)]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++cnt;
    }
    rep.slope = (double(cnt) * sxy - sx * sy) / (double(cnt) * sxx - sx * sx);

    SpectralData sd = spectral_data(A);
    if (A.dim() == 2 && sd.is_hyperbolic && !sd.is_expanding) {
        const double l1 = sd.log_moduli[0], l2 = sd.log_moduli[1];
        rep.separation = regime_boundaries(A, n, tau).separation;
        const double r_geo = std::sqrt(r_lo * r_hi);
        if (tau < -l1 && r_geo <= 3.0 * rep.separation) {
            rep.regime = "slab";
            rep.predicted = 2 * l2 / (tau + l2);
        } else {
            rep.regime = "bulk";
            rep.predicted = 2.0;
        }
    } else {
        rep.regime = "solid";
        rep.predicted = double(A.dim());
        rep.separation = 0;
    }
    return rep;
}

// --- weak-convergence diagnostics --------------------------------------------

struct WeakConvergenceRow {
    Ball ball;
    double mu_n = 0;
    double std_error = 0;
    double lebesgue = 0;  // exact ball volume
    double ratio = 0;     // mu_n / lebesgue
};

struct WeakConvergenceReport {
    std::vector<WeakConvergenceRow> rows;
    double min_ratio = 0, max_ratio = 0;
    long long samples = 0;
};

namespace detail {

inline double unit_ball_volume(int d) {
    // omega_d = pi^{d/2} / Gamma(d/2 + 1)
    double v = 1.0;  // d = 0
    if (d % 2 == 0) {
        for (int k = 1; k <= d / 2; ++k) v *= 3.14159265358979323846 / double(k);
    } else {
        v = 2.0;
        for (int k = 1; k <= (d - 1) / 2; ++k)
            v *= 2.0 * 3.14159265358979323846 / double(2 * k + 1);
    }
    return v;
}

}  // namespace detail

// Ratios mu_n(B) / Leb(B) over a family of macroscopic balls, one shared
// sample set.  Radii below 0.05 are rejected: they probe local structure, not
// weak convergence.
inline WeakConvergenceReport weak_convergence_ratio(const IntMatrix& A, int n, const TorusPoint& z,
                                                    double tau, const std::vector<Ball>& balls,
                                                    long long samples, std::uint64_t seed,
                                                    int threads = 1) {
    if (n < 1) throw DomainError("weak_convergence_ratio needs n >= 1");
    if (balls.empty()) throw DomainError("weak_convergence_ratio needs at least one ball");
    if (samples < kStreams) throw DomainError("weak_convergence_ratio needs at least 16 samples");
    for (const auto& b : balls) {
        if (b.whole) throw DomainError("weak_convergence_ratio: use proper balls, not the whole torus");
        if (b.radius < 0.05)
            throw DomainError("weak_convergence_ratio: ball radius " + std::to_string(b.radius) +
                              " is below the macroscopic cutoff 0.05");
        if (b.center.dim() != A.dim()) throw DomainError("weak_convergence_ratio: ball dimension mismatch");
    }
    MuSampler sampler(A, n, z, tau);
    const std::size_t nb = balls.size();
    std::vector<std::vector<double>> centers;
    centers.reserve(nb);
    for (const auto& b : balls) centers.push_back(to_doubles(b.center));

    std::vector<std::vector<long long>> hits(std::size_t(kStreams), std::vector<long long>(nb, 0));
    std::vector<long long> weights(std::size_t(kStreams), 0);
    detail::for_each_stream(threads, [&](int s) {
        Rng rng = stream_rng(seed, s);
        const long long mine = detail::stream_share(samples, s);
        weights[std::size_t(s)] = mine;
        for (long long i = 0; i < mine; ++i) {
            const std::vector<double> x = sampler.sample(rng);
            for (std::size_t b = 0; b < nb; ++b)
                if (detail::wrap_dist2(x, centers[b]) <= balls[b].radius * balls[b].radius)
                    ++hits[std::size_t(s)][b];
        }
    });

    WeakConvergenceReport rep;
    rep.samples = samples;
    const double omega = detail::unit_ball_volume(A.dim());
    for (std::size_t b = 0; b < nb; ++b) {
        std::vector<double> means(std::size_t(kStreams), 0.0);
        for (int s = 0; s < kStreams; ++s)
            means[std::size_t(s)] =
                weights[std::size_t(s)] > 0 ? double(hits[std::size_t(s)][b]) / double(weights[std::size_t(s)]) : 0.0;
        WeakConvergenceRow row;
        row.ball = balls[b];
        detail::batch_stats(means, weights, row.mu_n, row.std_error);
        row.lebesgue = omega * std::pow(balls[b].radius, A.dim());
        row.ratio = row.mu_n / row.lebesgue;
        rep.rows.push_back(row);
    }
    rep.min_ratio = rep.rows.front().ratio;
    rep.max_ratio = rep.rows.front().ratio;
    for (const auto& row : rep.rows) {
        rep.min_ratio = std::min(rep.min_ratio, row.ratio);
        rep.max_ratio = std::max(rep.max_ratio, row.ratio);
    }
    return rep;
}

// --- Riesz energy ------------------------------------------------------------

struct EnergyEstimate {
    double s = 0;
    double value = 0;
    double std_error = 0;
    long long pairs = 0;
};

// I_s(mu_n) = double integral of dist(x, y)^{-s}, estimated from independent
// sample pairs.  s = 0 is exactly 1 by definition.
inline EnergyEstimate riesz_energy(const IntMatrix& A, int n, const TorusPoint& z, double tau,
                                   double s, long long pairs, std::uint64_t seed, int threads = 1) {
    if (s < 0) throw DomainError("riesz_energy needs s >= 0");
    if (pairs < kStreams) throw DomainError("riesz_energy needs at least 16 pairs");
    if (s == 0) return {0.0, 1.0, 0.0, pairs};
    MuSampler sampler(A, n, z, tau);
    std::vector<double> means(std::size_t(kStreams), 0.0);
    std::vector<long long> weights(std::size_t(kStreams), 0);
    detail::for_each_stream(threads, [&](int st_i) {
        Rng rng = stream_rng(seed, st_i);
        const long long mine = detail::stream_share(pairs, st_i);
        double acc = 0;
        for (long long i = 0; i < mine; ++i) {
            const std::vector<double> x = sampler.sample(rng);
            const std::vector<double> y = sampler.sample(rng);
            double dist = std::sqrt(detail::wrap_dist2(x, y));
            if (dist < 1e-300) dist = 1e-300;  // exact collisions have probability zero
            acc += std::pow(dist, -s);
        }
        means[std::size_t(st_i)] = mine > 0 ? acc / double(mine) : 0.0;
        weights[std::size_t(st_i)] = mine;
    });
    EnergyEstimate est;
    est.s = s;
    est.pairs = pairs;
    detail::batch_stats(means, weights, est.value, est.std_error);
    return est;
}

// --- scale-resolved Riesz energy ---------------------------------------------
//
// For a hyperbolic unimodular 2x2 map the support of mu_n is a single ellipse
// with axis ratio e^{2 n l_2}: almost no independent pair lands within the
// short-axis scale, so the plain estimator above cannot see the part of the
// energy that lives there (it is unbiased but needs ~ e^{2 n l_2} pairs).
// This variant integrates that part exactly and samples only the remainder.
//
// Writing a pair difference as G w with G = e^{-n tau} A^{-n} and w the
// difference of two uniform unit-ball points (radial density A_overlap(|w|) /
// pi^2), the energy splits at a cutoff t0:
//
//   I_s = int phi(|w|) dist(G w, Z^2)^{-s} dw
//       = [near: dist < t0, exact quadrature]  +  [far: censored Monte-Carlo].
//
// The near region is exactly {|G w| < t0} provided no nonzero lattice point
// comes within t0 of the difference ellipse G * B(0,2); the constructor
// verifies that by marching the integer points along the long axis and takes
// t0 under half the verified gap.  The near integral is then a fixed smooth
// two-dimensional quadrature in the singular frame of G.

struct ResolvedEnergy {
    double s = 0;
    double value = 0;       // near_value + far_value
    double near_value = 0;  // deterministic quadrature below the cutoff
    double far_value = 0;   // Monte-Carlo estimate of the censored remainder
    double std_error = 0;   // batch-means error of the far part
    double cutoff = 0;      // t0
    double lattice_gap = 0; // verified distance from Z^2 \ {0} to the difference ellipse
    double sigma_long = 0, sigma_short = 0;  // singular values of e^{-n tau} A^{-n}
    long long pairs = 0;
};

namespace detail {

// Radial density of the difference of two independent uniform unit-disk
// points: the overlap area of two unit disks at center distance t, over pi^2.
inline double disk_diff_density(double t) {
    if (t <= 0) return 1.0 / 3.14159265358979323846;
    if (t >= 2) return 0.0;
    const double pi = 3.14159265358979323846;
    return (2.0 * std::acos(0.5 * t) - 0.5 * t * std::sqrt(4.0 - t * t)) / (pi * pi);
}

// Quadrature of (4 / (s_hi s_lo)) * int over {xi^2 + eta^2 < t0^2, quarter
// plane, |m| <= 2} of phi(|m|) (xi^2 + eta^2)^{-s/2}, where m = (xi / s_hi,
// eta / s_lo) is the point in the unit-difference frame.
inline double near_energy_quadrature(double s, double s_hi, double s_lo, double t0) {
    const double pi = 3.14159265358979323846;
    // Gauss-Legendre nodes/weights on [0, 1], 32 points.
    static const double gx[32] = {
        0.0013680690752592, 0.0071942442273658, 0.0176188722062468, 0.0325469620311301,
        0.0518394221169739, 0.0753161931337150, 0.1027581020548946, 0.1339089406299558,
        0.1684778665347183, 0.2061421213927211, 0.2465500455138681, 0.2893243619347448,
        0.3340656988246180, 0.3803563188739922, 0.4277640192227456, 0.4758461672568446,
        0.5241538327431554, 0.5722359807772544, 0.6196436811260078, 0.6659343011753820,
        0.7106756380652552, 0.7534499544861319, 0.7938578786072789, 0.8315221334652817,
        0.8660910593700442, 0.8972418979451054, 0.9246838068662850, 0.9481605778830261,
        0.9674530379688699, 0.9823811277937532, 0.9928057557726342, 0.9986319309247408};
    static const double gw[32] = {
        0.0035093050047350, 0.0081371973654528, 0.0126960326546310, 0.0171369314565107,
        0.0214179490111133, 0.0254990296311881, 0.0293420467392678, 0.0329111113881809,
        0.0361728970544243, 0.0390969478935352, 0.0416559621134734, 0.0438260465022020,
        0.0455869393478819, 0.0469221995404022, 0.0478193600396374, 0.0482700442573639,
        0.0482700442573639, 0.0478193600396374, 0.0469221995404022, 0.0455869393478819,
        0.0438260465022020, 0.0416559621134734, 0.0390969478935352, 0.0361728970544243,
        0.0329111113881809, 0.0293420467392678, 0.0254990296311881, 0.0214179490111133,
        0.0171369314565107, 0.0126960326546310, 0.0081371973654528, 0.0035093050047350};

    // Core: polar over rho in (0, rho_c], full quadrant; here |m| <= 1 always.
    const double rho_c = std::min(s_lo, t0);
    double core = 0;
    {
        const double du = 0.05;
        const double u_max = 32.3 / (2.0 - s);  // integrand decays like e^{-(2-s)u}
        const int nu = int(u_max / du) + 1;
        for (int iu = 0; iu <= nu; ++iu) {
            const double u = du * double(iu);
            const double rho = rho_c * std::exp(-u);
            double jsum = 0;
            for (int it = 0; it < 32; ++it) {
                const double th = 0.5 * pi * gx[it];
                const double m1 = rho * std::cos(th) / s_hi;
                const double m2 = rho * std::sin(th) / s_lo;
                jsum += gw[it] * disk_diff_density(std::sqrt(m1 * m1 + m2 * m2));
            }
            jsum *= 0.5 * pi;
            // d rho = -rho du; integrand rho^{1-s} J -> rho^{2-s} J du
            const double f = std::pow(rho, 2.0 - s) * jsum;
            const double wgt = (iu == 0 || iu == nu) ? 0.5 : 1.0;
            core += wgt * f * du;
        }
    }

    // Shell: Cartesian strip xi in [xi_a, t0), eta from the core boundary up to
    // min(sqrt(t0^2 - xi^2), s_lo sqrt(4 - (xi/s_hi)^2)).
    double shell = 0;
    {
        const double xi_a = rho_c * 1e-6;
        const double dv = 0.02;
        const double v_max = std::log(t0 / xi_a);
        const int nv = int(v_max / dv) + 1;
        for (int iv = 0; iv <= nv; ++iv) {
            const double v = v_max * double(iv) / double(nv);
            const double xi = xi_a * std::exp(v);
            const double eta_lo = xi < rho_c ? std::sqrt(std::max(rho_c * rho_c - xi * xi, 0.0)) : 0.0;
            const double cap_disk = t0 * t0 - xi * xi;
            if (cap_disk <= 0) continue;
            const double m1 = xi / s_hi;
            const double cap_supp = s_lo * std::sqrt(std::max(4.0 - m1 * m1, 0.0));
            const double eta_hi = std::min(std::sqrt(cap_disk), cap_supp);
            if (eta_hi <= eta_lo) continue;
            double inner = 0;
            for (int ig = 0; ig < 32; ++ig) {
                const double eta = eta_lo + (eta_hi - eta_lo) * gx[ig];
                const double m2 = eta / s_lo;
                inner += gw[ig] * disk_diff_density(std::sqrt(m1 * m1 + m2 * m2)) *
                         std::pow(xi * xi + eta * eta, -0.5 * s);
            }
            inner *= (eta_hi - eta_lo);
            // log-spaced xi: d xi = xi dv'
            const double wgt = (iv == 0 || iv == nv) ? 0.5 : 1.0;
            shell += wgt * inner * xi * (v_max / double(nv));
        }
    }

    return 4.0 / (s_hi * s_lo) * (core + shell);
}

}  // namespace detail

inline ResolvedEnergy riesz_energy_resolved(const IntMatrix& A, int n, const TorusPoint& z,
                                            double tau, double s, long long pairs,
                                            std::uint64_t seed, int threads = 1) {
    if (A.dim() != 2) throw Unsupported("riesz_energy_resolved handles 2x2 maps only");
    if (boost::multiprecision::abs(det(A)) != 1)
        throw Unsupported("riesz_energy_resolved needs a unimodular matrix (single-component support)");
    if (n < 1) throw DomainError("riesz_energy_resolved needs n >= 1");
    if (!(s > 0.0) || !(s < 2.0))
        throw DomainError("riesz_energy_resolved needs 0 < s < 2 (the energy diverges at s >= 2)");
    if (pairs < kStreams) throw DomainError("riesz_energy_resolved needs at least 16 pairs");

    const double r = std::exp(-double(n) * tau);
    RatMatrix Minv = inverse_power(A, n);
    Eigen::Matrix2d G;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) G(i, j) = r * to_double(Minv.at(i, j));
    Eigen::JacobiSVD<Eigen::Matrix2d> svd(G, Eigen::ComputeFullU);
    const double s_hi = svd.singularValues()(0);
    const double s_lo = r * r / s_hi;  // |det G| = r^2 exactly for a unimodular map
    const Eigen::Vector2d axis = svd.matrixU().col(0);
    const double px = axis(0), py = axis(1);

    // Verified gap: no integer point other than the origin may come within the
    // cutoff of the difference ellipse (long half-axis 2 s_hi, short 2 s_lo).
    const double reach = 2.0 * s_hi + 1.5;
    if (reach > 1e7) throw ConstructionFailed("riesz_energy_resolved: difference ellipse too long to scan");
    double gap = 0.5;  // anything at impact parameter > 0.5 is irrelevant (t0 <= 0.01)
    for (double t = 0; t <= reach; t += 0.5) {
        const double cx = t * px, cy = t * py;
        const double fx = std::floor(cx), fy = std::floor(cy);
        for (int dx = 0; dx <= 1; ++dx)
            for (int dy = 0; dy <= 1; ++dy) {
                const double kx = fx + dx, ky = fy + dy;
                if (kx == 0 && ky == 0) continue;
                const double along = kx * px + ky * py;
                const double impact = std::abs(kx * py - ky * px);
                double lower;  // distance from (kx, ky) to the ellipse, from below
                if (std::abs(along) <= 2.0 * s_hi)
                    lower = impact - 2.0 * s_lo;
                else
                    lower = std::max(impact - 2.0 * s_lo, std::abs(along) - 2.0 * s_hi);
                gap = std::min(gap, std::max(lower, 0.0));
            }
    }
    if (!(gap > 0))
        throw ConstructionFailed("riesz_energy_resolved: a lattice point touches the difference ellipse");
    const double t0 = std::min(0.01, 0.5 * gap);

    ResolvedEnergy est;
    est.s = s;
    est.pairs = pairs;
    est.cutoff = t0;
    est.lattice_gap = gap;
    est.sigma_long = s_hi;
    est.sigma_short = s_lo;
    est.near_value = detail::near_energy_quadrature(s, s_hi, s_lo, t0);

    MuSampler sampler(A, n, z, tau);
    std::vector<double> means(std::size_t(kStreams), 0.0);
    std::vector<long long> weights(std::size_t(kStreams), 0);
    detail::for_each_stream(threads, [&](int st_i) {
        Rng rng = stream_rng(seed, st_i);
        const long long mine = detail::stream_share(pairs, st_i);
        double acc = 0;
        for (long long i = 0; i < mine; ++i) {
            const std::vector<double> x = sampler.sample(rng);
            const std::vector<double> y = sampler.sample(rng);
            const double dist = std::sqrt(detail::wrap_dist2(x, y));
            if (dist >= t0) acc += std::pow(dist, -s);
        }
        means[std::size_t(st_i)] = mine > 0 ? acc / double(mine) : 0.0;
        weights[std::size_t(st_i)] = mine;
    });
    detail::batch_stats(means, weights, est.far_value, est.std_error);
    est.value = est.near_value + est.far_value;
    return est;
}

}  // namespace st
