#include <doctest.h>

#include <random>

#include "shrinktarget/preimage.hpp"

using namespace st;

static TorusPoint tp(std::initializer_list<Rat> c) { return TorusPoint{std::vector<Rat>(c)}; }

TEST_CASE("smith normal form: shape and exactness") {
    std::mt19937_64 rng(5150);
    std::uniform_int_distribution<int> ent(-6, 6);
    int done = 0;
    while (done < 40) {
        int d = 1 + int(rng() % 4);
        IntMatrix M(d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) M.at(i, j) = ent(rng);
        if (det(M) == 0) continue;
        ++done;
        SmithForm f = smith_normal_form(M);
        CHECK(f.U * f.S * f.V == M);
        Int du = det(f.U), dv = det(f.V);
        CHECK((du == 1 || du == -1));
        CHECK((dv == 1 || dv == -1));
        for (int i = 0; i < d; ++i) {
            CHECK(f.S.at(i, i) > 0);
            if (i + 1 < d) CHECK(f.S.at(i + 1, i + 1) % f.S.at(i, i) == 0);
            for (int j = 0; j < d; ++j)
                if (i != j) CHECK(f.S.at(i, j) == 0);
        }
    }
    CHECK(smith_normal_form(IntMatrix{{2, 0}, {0, 3}}).S.at(1, 1) == 6);
}

TEST_CASE("preimage points: diagonal 2x3 lattice") {
    auto pts = preimage_points(IntMatrix{{2, 0}, {0, 3}}, 1, tp({Rat(0), Rat(0)}));
    REQUIRE(pts.size() == 6);
    CHECK(pts[0] == tp({Rat(0), Rat(0)}));
    CHECK(pts[1] == tp({Rat(0), Rat(1, 3)}));
    CHECK(pts[2] == tp({Rat(0), Rat(2, 3)}));
    CHECK(pts[3] == tp({Rat(1, 2), Rat(0)}));
    CHECK(pts[4] == tp({Rat(1, 2), Rat(1, 3)}));
    CHECK(pts[5] == tp({Rat(1, 2), Rat(2, 3)}));
}

TEST_CASE("preimage points: cat map is a bijection") {
    auto pts = preimage_points(IntMatrix{{2, 1}, {1, 1}}, 2, tp({Rat(1, 2), Rat(1, 2)}));
    REQUIRE(pts.size() == 1);
    CHECK(pts[0] == tp({Rat(1, 2), Rat(0)}));

    pts = preimage_points(IntMatrix{{2, 1}, {1, 1}}, 5, tp({Rat(0), Rat(0)}));
    REQUIRE(pts.size() == 1);
    CHECK(pts[0] == tp({Rat(0), Rat(0)}));
}

TEST_CASE("preimage points: count, distinctness, forward verification") {
    std::vector<IntMatrix> mats{
        IntMatrix{{2, 1}, {1, 1}}, IntMatrix{{3, 1}, {1, 1}}, IntMatrix{{2, 1}, {1, 2}},
        IntMatrix{{1, 1, 0}, {0, 1, 1}, {1, 0, 1}}, IntMatrix{{2, 0, 1}, {0, 1, 1}, {1, 1, 1}}};
    TorusPoint z = tp({Rat(1, 3), Rat(1, 7)});
    TorusPoint z3 = tp({Rat(1, 3), Rat(1, 7), Rat(2, 5)});
    for (const IntMatrix& A : mats) {
        TorusPoint target = A.dim() == 2 ? z : z3;
        for (long long n : {1LL, 2LL, 3LL}) {
            auto pts = preimage_points(A, n, target);
            Int dt = det(matrix_power_exact(A, n));
            Int cnt = dt < 0 ? Int(-dt) : dt;
            CHECK(Int(pts.size()) == cnt);
            for (std::size_t i = 1; i < pts.size(); ++i) CHECK(pts[i - 1] < pts[i]);
            IntMatrix M = matrix_power_exact(A, n);
            for (const TorusPoint& p : pts) {
                std::vector<Rat> img(std::size_t(A.dim()), Rat(0));
                for (int i = 0; i < A.dim(); ++i)
                    for (int j = 0; j < A.dim(); ++j)
                        img[std::size_t(i)] += Rat(M.at(i, j)) * p.coords[std::size_t(j)];
                CHECK(TorusPoint(img) == target);
            }
        }
    }
}

TEST_CASE("preimage points: n = 0 and cap") {
    auto pts = preimage_points(IntMatrix{{2, 0}, {0, 2}}, 0, tp({Rat(1, 5), Rat(2, 5)}));
    REQUIRE(pts.size() == 1);
    CHECK(pts[0] == tp({Rat(1, 5), Rat(2, 5)}));

    CHECK_THROWS_AS(preimage_points(IntMatrix{{2, 0}, {0, 2}}, 11, tp({Rat(0), Rat(0)})),
                    CapExceeded);
    CHECK_THROWS_AS(preimage_points(IntMatrix{{2, 4}, {1, 2}}, 1, tp({Rat(0), Rat(0)})),
                    SingularMatrix);
}

TEST_CASE("preimage set: expanding ball geometry") {
    PreimageSet ps = preimage_set(IntMatrix{{2, 0}, {0, 2}}, 2, tp({Rat(0), Rat(0)}), std::log(2.0));
    CHECK(ps.centers.size() == 16);
    CHECK(ps.shape.radius == doctest::Approx(0.25).epsilon(1e-12));
    REQUIRE(ps.shape.semi_axes.size() == 2);
    CHECK(ps.shape.semi_axes[0] == doctest::Approx(1.0 / 16).epsilon(1e-10));
    CHECK(ps.shape.semi_axes[1] == doctest::Approx(1.0 / 16).epsilon(1e-10));
    CHECK(!ps.shape.long_axis);
    CHECK(ps.shape.semi_axes[0] >= ps.shape.semi_axes[1]);
}

TEST_CASE("preimage set: long axis flag and radius guard") {
    // cat map, n=1, tau=1: thin strip longer than 1/2
    PreimageSet ps = preimage_set(IntMatrix{{2, 1}, {1, 1}}, 1, tp({Rat(0), Rat(0)}), 1.0);
    CHECK(ps.shape.long_axis);
    CHECK(ps.shape.semi_axes[0] == doctest::Approx(std::exp(-1.0) / 0.3819660112501051).epsilon(1e-9));
    CHECK(ps.shape.semi_axes[1] == doctest::Approx(std::exp(-1.0) / 2.618033988749895).epsilon(1e-9));

    CHECK_THROWS_AS(preimage_set(IntMatrix{{2, 1}, {1, 1}}, 1, tp({Rat(0), Rat(0)}), 0.05),
                    RadiusTooLarge);
}

TEST_CASE("preimage set: volume identity") {
    // product of semi-axes times |det|^n equals r^d
    PreimageSet ps = preimage_set(IntMatrix{{3, 1}, {1, 1}}, 4, tp({Rat(0), Rat(0)}), 0.9);
    double prod = ps.shape.semi_axes[0] * ps.shape.semi_axes[1];
    double lhs = prod * std::pow(2.0, 4);
    CHECK(lhs == doctest::Approx(ps.shape.radius * ps.shape.radius).epsilon(1e-6));
}

TEST_CASE("membership: hand examples") {
    IntMatrix A{{2, 0}, {0, 2}};
    TorusPoint z = tp({Rat(0), Rat(0)});
    double tau = std::log(2.0);
    CHECK(membership(A, 1, z, tau, tp({Rat(13, 100), Rat(12, 100)})));
    CHECK(!membership(A, 1, z, tau, tp({Rat(1, 4), Rat(1, 4)})));
    // boundary counts as member: A x = (1/2, 0), distance exactly 1/2 = r
    CHECK(membership(A, 1, z, tau, tp({Rat(1, 4), Rat(0)})));
}

TEST_CASE("membership: every enumerated center belongs") {
    IntMatrix A{{3, 1}, {1, 1}};
    TorusPoint z = tp({Rat(1, 3), Rat(2, 7)});
    PreimageSet ps = preimage_set(A, 3, z, 0.8);
    for (const TorusPoint& c : ps.centers) CHECK(membership(A, 3, z, 0.8, c));
}

TEST_CASE("membership: one-step nesting") {
    // x in T^{-(n+1)}B implies Tx in T^{-n}B
    IntMatrix A{{2, 1}, {1, 1}};
    TorusPoint z = tp({Rat(1, 5), Rat(3, 5)});
    double tau = 0.6;
    auto pts = preimage_points(A, 4, z);
    for (const TorusPoint& p : pts) {
        if (!membership(A, 4, z, tau, p)) continue;
        std::vector<Rat> img(2, Rat(0));
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) img[std::size_t(i)] += Rat(A.at(i, j)) * p.coords[std::size_t(j)];
        CHECK(membership(A, 3, z, tau, TorusPoint(img)));
    }
}

TEST_CASE("separation report: diagonal lattices") {
    IntMatrix A{{4, 0}, {0, 9}};
    auto centers = preimage_points(A, 1, tp({Rat(0), Rat(0)}));
    REQUIRE(centers.size() == 36);
    SeparationReport rep = separation_report(A, 1, centers);
    REQUIRE(rep.rows.size() == 2);
    CHECK(rep.rows[0].min_gap == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(rep.rows[1].min_gap == doctest::Approx(1.0 / 9).epsilon(1e-10));
    CHECK(rep.rows[0].ratio == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rep.rows[1].ratio == doctest::Approx(1.0).epsilon(1e-9));

    IntMatrix B{{2, 0}, {0, 2}};
    SeparationReport rb = separation_report(B, 1, preimage_points(B, 1, tp({Rat(0), Rat(0)})));
    CHECK(rb.rows[0].min_gap == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(rb.rows[1].min_gap == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("separation report: guards") {
    IntMatrix cat{{2, 1}, {1, 1}};
    auto centers = preimage_points(cat, 3, tp({Rat(0), Rat(0)}));
    CHECK_THROWS_AS(separation_report(cat, 3, centers), TooFewCenters);

    IntMatrix rot{{0, -1}, {1, 0}};
    auto rc = preimage_points(IntMatrix{{2, 0}, {0, 2}}, 1, tp({Rat(0), Rat(0)}));
    CHECK_THROWS_AS(separation_report(rot, 1, rc), DomainError);
}
