#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <shrinktarget/raster.hpp>

using namespace st;

namespace {

TorusPoint tp2(Rat a, Rat b) { return TorusPoint({a, b}); }
TorusPoint tp3(Rat a, Rat b, Rat c) { return TorusPoint({a, b, c}); }

}  // namespace

TEST_CASE("raster matches a direct per-cell oracle for a diagonal doubling map") {
    IntMatrix A{{2, 0}, {0, 2}};
    const double tau = 1.2;
    RasterGrid g = rasterize(A, 1, tp2(Rat(0), Rat(0)), tau, 8, 1);
    CHECK(g.d == 2);
    CHECK(g.m == 8);

    // With one sample per cell the sample is the cell midpoint (2i+1)/16.
    const double r2 = std::exp(-2.0 * tau);
    std::set<std::pair<int, int>> expected;
    for (int i0 = 0; i0 < 8; ++i0)
        for (int i1 = 0; i1 < 8; ++i1) {
            double acc = 0;
            const int idx[2] = {i0, i1};
            for (int k = 0; k < 2; ++k) {
                double y = 2.0 * (2 * idx[k] + 1) / 16.0;
                y -= std::floor(y);
                double diff = y - std::floor(y + 0.5);
                acc += diff * diff;
            }
            if (acc <= r2) expected.insert({i0, i1});
        }
    // Cells holding the four exact preimages of 0 are marked as well.
    expected.insert({0, 0});
    expected.insert({0, 4});
    expected.insert({4, 0});
    expected.insert({4, 4});

    std::set<std::pair<int, int>> got;
    for (int i0 = 0; i0 < 8; ++i0)
        for (int i1 = 0; i1 < 8; ++i1)
            if (g.mask[std::size_t(i0) * 8 + std::size_t(i1)]) got.insert({i0, i1});
    CHECK(got == expected);
    CHECK(g.marked == (long long)expected.size());

    // For this map, membership factors per coordinate: small wrapped offset only.
    std::set<std::pair<int, int>> product;
    for (int a : {0, 3, 4, 7})
        for (int b : {0, 3, 4, 7}) product.insert({a, b});
    CHECK(got == product);
}

TEST_CASE("point-like target rasterizes to exactly the preimage cells") {
    IntMatrix A{{2, 1}, {1, 1}};
    TorusPoint z = tp2(Rat(1, 3), Rat(1, 7));
    RasterGrid g = rasterize(A, 3, z, 30.0, 64, 3);
    CHECK(g.marked == 1);  // |det| = 1, one exact preimage, no sample can hit e^{-90}

    auto pts = preimage_points(A, 3, z);
    REQUIRE(pts.size() == 1);
    std::vector<int> cell(2);
    for (int k = 0; k < 2; ++k)
        cell[std::size_t(k)] = int(rat_floor(pts[0].coords[std::size_t(k)] * 64).convert_to<long long>());
    CHECK(g.mask[g.index(cell)] == 1);
}

TEST_CASE("marked cell counts shrink with n and start from the full grid") {
    IntMatrix A{{2, 1}, {1, 1}};
    TorusPoint z = tp2(Rat(1, 2), Rat(1, 2));
    std::vector<long long> counts;
    for (int n = 0; n <= 4; ++n) counts.push_back(rasterize(A, n, z, 0.7, 512, 3).marked);
    CHECK(counts[0] == 512LL * 512);  // radius 1 covers the torus
    for (std::size_t i = 1; i < counts.size(); ++i) CHECK(counts[i] <= counts[i - 1]);
    CHECK(counts.back() > 0);
    CHECK(counts.back() < 512LL * 512 * 3 / 10);
}

TEST_CASE("every preimage center cell is marked") {
    IntMatrix A{{3, 1}, {1, 1}};
    TorusPoint z = tp2(Rat(1, 3), Rat(2, 3));
    RasterGrid g = rasterize(A, 3, z, 0.9, 128, 2);
    auto pts = preimage_points(A, 3, z);
    REQUIRE(pts.size() == 8);  // |det| = 2
    for (const auto& p : pts) {
        std::vector<int> cell(2);
        for (int k = 0; k < 2; ++k)
            cell[std::size_t(k)] = int(rat_floor(p.coords[std::size_t(k)] * 128).convert_to<long long>());
        CHECK(g.mask[g.index(cell)] == 1);
    }
}

TEST_CASE("pgm output is deterministic and mirrors the mask with the vertical flip") {
    IntMatrix A{{2, 1}, {1, 1}};
    RasterGrid g = rasterize(A, 2, tp2(Rat(1, 4), Rat(0)), 0.8, 32, 2);
    std::string img1 = to_pgm(g);
    std::string img2 = to_pgm(g);
    CHECK(img1 == img2);

    const std::string header = "P5\n32 32\n255\n";
    REQUIRE(img1.size() == header.size() + 32 * 32);
    CHECK(img1.substr(0, header.size()) == header);
    long long black = 0;
    for (int row = 0; row < 32; ++row)
        for (int col = 0; col < 32; ++col) {
            char byte = img1[header.size() + std::size_t(row) * 32 + std::size_t(col)];
            bool cell_marked = g.mask[std::size_t(col) * 32 + std::size_t(31 - row)] != 0;
            CHECK(byte == (cell_marked ? '\0' : char(255)));
            if (byte == '\0') ++black;
        }
    CHECK(black == g.marked);
}

TEST_CASE("3-d raster: exact point-like case and sanity on a block map") {
    IntMatrix A{{2, 0, 0}, {0, 2, 0}, {0, 0, 2}};
    RasterGrid g = rasterize(A, 1, tp3(Rat(0), Rat(0), Rat(0)), 30.0, 16, 3);
    CHECK(g.marked == 8);  // preimages of 0 are {0, 1/2}^3
    auto cells = marked_cells(g);
    REQUIRE(cells.size() == 8);
    std::vector<std::vector<int>> want;
    for (int a : {0, 8})
        for (int b : {0, 8})
            for (int c : {0, 8}) want.push_back({a, b, c});
    CHECK(cells == want);

    IntMatrix Ablk{{2, 0, 0}, {0, 2, 1}, {0, 1, 1}};
    RasterGrid h = rasterize(Ablk, 2, tp3(Rat(0), Rat(0), Rat(0)), 0.8, 32, 2);
    CHECK(h.marked > 0);
    CHECK(h.marked < 32LL * 32 * 32);
}

TEST_CASE("thread count does not change the raster") {
    IntMatrix A{{2, 1}, {1, 1}};
    TorusPoint z = tp2(Rat(1, 5), Rat(2, 5));
    RasterGrid a = rasterize(A, 3, z, 0.7, 64, 3, 1);
    RasterGrid b = rasterize(A, 3, z, 0.7, 64, 3, 3);
    RasterGrid c = rasterize(A, 3, z, 0.7, 64, 3, 8);
    CHECK(a.mask == b.mask);
    CHECK(a.mask == c.mask);
    CHECK(a.marked == b.marked);

    IntMatrix Ablk{{2, 0, 0}, {0, 2, 1}, {0, 1, 1}};
    TorusPoint z3 = tp3(Rat(0), Rat(1, 3), Rat(0));
    CHECK(rasterize(Ablk, 2, z3, 0.6, 24, 2, 1).mask == rasterize(Ablk, 2, z3, 0.6, 24, 2, 4).mask);
}

TEST_CASE("raster input validation") {
    IntMatrix A{{2, 1}, {1, 1}};
    TorusPoint z = tp2(Rat(0), Rat(0));
    CHECK_THROWS_AS(rasterize(A, 1, z, 0.5, 5000), DomainError);
    CHECK_THROWS_AS(rasterize(A, 1, z, 0.5, 0), DomainError);
    CHECK_THROWS_AS(rasterize(A, -1, z, 0.5, 16), DomainError);
    CHECK_THROWS_AS(rasterize(A, 1, z, -0.1, 16), DomainError);
    CHECK_THROWS_AS(rasterize(A, 1, z, 0.5, 16, 0), DomainError);
    CHECK_THROWS_AS(rasterize(A, 1, z, 0.5, 16, 9), DomainError);
    CHECK_THROWS_AS(rasterize(A, 1, TorusPoint({Rat(0)}), 0.5, 16), DomainError);

    IntMatrix A3{{2, 0, 0}, {0, 2, 1}, {0, 1, 1}};
    CHECK_THROWS_AS(rasterize(A3, 1, tp3(Rat(0), Rat(0), Rat(0)), 0.5, 300), DomainError);

    IntMatrix A1{{2}};
    CHECK_THROWS_AS(rasterize(A1, 1, TorusPoint({Rat(0)}), 0.5, 16), Unsupported);
    IntMatrix A4{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}};
    CHECK_THROWS_AS(rasterize(A4, 1, TorusPoint({Rat(0), Rat(0), Rat(0), Rat(0)}), 0.5, 16), Unsupported);

    IntMatrix S{{1, 1}, {1, 1}};
    CHECK_THROWS_AS(rasterize(S, 1, z, 0.5, 16), SingularMatrix);

    RasterGrid g3 = rasterize(A3, 0, tp3(Rat(0), Rat(0), Rat(0)), 0.5, 4, 1);
    CHECK_THROWS_AS(to_pgm(g3), Unsupported);
}
