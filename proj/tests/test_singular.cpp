#include <doctest.h>

#include <cmath>
#include <random>

#include "shrinktarget/singular.hpp"

using namespace st;

TEST_CASE("symmetric matrices: log sigma equals n*l exactly") {
    IntMatrix A{{2, 1}, {1, 1}};
    SpectralData sd = spectral_data(A);
    for (long long n : {1LL, 5LL, 14LL, 50LL, 100LL}) {
        SingularProfile sp = log_singular_values(A, n);
        REQUIRE(sp.log_sigma.size() == 2);
        CHECK(std::abs(sp.log_sigma[0] - double(n) * sd.log_moduli[0]) < 1e-8);
        CHECK(std::abs(sp.log_sigma[1] - double(n) * sd.log_moduli[1]) < 1e-8);
    }
}

TEST_CASE("diagonal matrices are exact") {
    SingularProfile sp = log_singular_values(IntMatrix{{2, 0}, {0, 3}}, 10);
    CHECK(sp.log_sigma[0] == doctest::Approx(10 * std::log(2.0)).epsilon(1e-12));
    CHECK(sp.log_sigma[1] == doctest::Approx(10 * std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("triangular [[1,1],[0,2]] against closed-form Gram oracle") {
    // A^n = [[1, 2^n - 1], [0, 2^n]]; Gram eigenvalues give the exact sigma.
    IntMatrix A{{1, 1}, {0, 2}};
    for (long long n : {5LL, 10LL, 20LL}) {
        long double M = std::pow(2.0L, (long double)n);
        long double m = M - 1;
        long double tr = 1 + m * m + M * M;
        long double dt = M * M; // det(A^n)^2 / ... det Gram = (det A^n)^2 = M^2? no: det = 2^n -> det Gram = 4^n
        dt = dt * dt;           // (2^n)^2 squared? careful below
        // Gram = [[1, m], [m, m^2 + M^2]], det Gram = (det A^n)^2 = M^2
        long double detG = M * M;
        long double lam_hi = (tr + std::sqrt(tr * tr - 4 * detG)) / 2;
        long double lam_lo = detG / lam_hi;
        double expected_hi = 0.5 * (double)std::log(lam_hi);
        double expected_lo = 0.5 * (double)std::log(lam_lo);

        SingularProfile sp = log_singular_values(A, n);
        CHECK(sp.log_sigma[1] == doctest::Approx(expected_hi).epsilon(1e-9));
        CHECK(sp.log_sigma[0] == doctest::Approx(expected_lo).epsilon(1e-9));
    }
}

TEST_CASE("log sigma sum telescopes to n log|det|") {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> ent(-4, 4);
    int done = 0;
    while (done < 25) {
        int d = 1 + int(rng() % 4);
        IntMatrix A(d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) A.at(i, j) = ent(rng);
        Int dt = det(A);
        if (dt == 0) continue;
        ++done;
        long long n = 1 + (long long)(rng() % 100);
        SingularProfile sp = log_singular_values(A, n);
        double sum = 0;
        for (double v : sp.log_sigma) sum += v;
        double target = double(n) * std::log(std::abs(dt.convert_to<double>()));
        CHECK(sum == doctest::Approx(target).epsilon(1e-8));
    }
}

TEST_CASE("right singular basis is orthonormal") {
    SingularProfile sp = log_singular_values(IntMatrix{{3, 1}, {1, 1}}, 12);
    Eigen::MatrixXd G = sp.right_vectors.transpose() * sp.right_vectors;
    CHECK((G - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("normal matrix with complex pair: both log sigma equal n*log|lambda|") {
    // [[1,-1],[1,1]] has eigenvalues 1 +- i, and is a scaled rotation
    IntMatrix A{{1, -1}, {1, 1}};
    SingularProfile sp = log_singular_values(A, 9);
    double target = 9 * 0.5 * std::log(2.0);
    CHECK(sp.log_sigma[0] == doctest::Approx(target).epsilon(1e-10));
    CHECK(sp.log_sigma[1] == doctest::Approx(target).epsilon(1e-10));
}

TEST_CASE("non-normal unimodular-spectrum matrix keeps zero sum and bounded parts") {
    // companion of x^2 - x + 1 (primitive 6th roots of unity)
    IntMatrix A{{0, -1}, {1, 1}};
    for (long long n : {4LL, 7LL, 30LL, 101LL}) {
        SingularProfile sp = log_singular_values(A, n);
        CHECK(std::abs(sp.log_sigma[0] + sp.log_sigma[1]) < 1e-9);
        CHECK(std::abs(sp.log_sigma[1]) < 2.0); // comparability constant, n-free
    }
}

TEST_CASE("1x1 profile") {
    SingularProfile sp = log_singular_values(IntMatrix{{-3}}, 4);
    CHECK(sp.log_sigma[0] == doctest::Approx(4 * std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("n = 0 gives the identity profile") {
    SingularProfile sp = log_singular_values(IntMatrix{{2, 1}, {1, 1}}, 0);
    CHECK(sp.log_sigma[0] == 0.0);
    CHECK(sp.log_sigma[1] == 0.0);
}

TEST_CASE("semiaxis ratio report") {
    // symmetric: deviations vanish
    SemiaxisRatioReport rep = semiaxis_ratio_report(IntMatrix{{2, 1}, {1, 1}}, {3, 20, 60});
    for (const auto& row : rep.rows) CHECK(row.max_dev < 1e-8);

    // scalar matrix: identically zero
    rep = semiaxis_ratio_report(IntMatrix{{3, 0}, {0, 3}}, {5, 9});
    for (const auto& row : rep.rows) CHECK(row.max_dev < 1e-10);

    // triangular: per-n deviation stays O(1), so deviation/n falls
    rep = semiaxis_ratio_report(IntMatrix{{1, 1}, {0, 2}}, {10, 20, 50});
    REQUIRE(rep.rows.size() == 3);
    CHECK(rep.rows[0].max_dev_over_n > rep.rows[1].max_dev_over_n);
    CHECK(rep.rows[1].max_dev_over_n > rep.rows[2].max_dev_over_n);
    CHECK(rep.rows[2].max_dev_over_n <= 0.05);
}

TEST_CASE("rejects singular matrices and negative n") {
    CHECK_THROWS_AS(log_singular_values(IntMatrix{{1, 1}, {1, 1}}, 3), SingularMatrix);
    CHECK_THROWS_AS(log_singular_values(IntMatrix{{2, 1}, {1, 1}}, -1), DomainError);
}
