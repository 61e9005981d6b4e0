#pragma once
// Deterministic random streams for the Monte-Carlo probes.
//
// Every randomized routine draws from a fixed set of 16 logical streams
// seeded from the master seed via splitmix64, and work is partitioned by
// stream, never by thread.  Results therefore depend only on the seed and
// sample counts, not on the thread count.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace st {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t raw() { return eng_(); }

    // uniform in [0, 1) with 53 random bits
    double uniform() { return double(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // standard normal via the polar method
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2 * uniform() - 1;
            v = 2 * uniform() - 1;
            s = u * u + v * v;
        } while (s >= 1 || s == 0);
        const double f = std::sqrt(-2 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

    // uniform in the closed unit d-ball
    std::vector<double> in_ball(int d) {
        std::vector<double> x(std::size_t(d), 0.0);
        double norm2 = 0;
        do {
            norm2 = 0;
            for (auto& v : x) {
                v = gaussian();
                norm2 += v * v;
            }
        } while (norm2 == 0);
        const double scale = std::pow(uniform(), 1.0 / d) / std::sqrt(norm2);
        for (auto& v : x) v *= scale;
        return x;
    }

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0;
};

inline constexpr int kStreams = 16;

inline Rng stream_rng(std::uint64_t master_seed, int stream) {
    return Rng(splitmix64(master_seed ^ (0x9e3779b97f4a7c15ULL * std::uint64_t(stream) + 0x243f6a8885a308d3ULL)));
}

}  // namespace st
