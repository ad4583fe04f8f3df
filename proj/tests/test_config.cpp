#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "srint/neighbor_index.hpp"
#include "srint/point_config.hpp"

using namespace srint;

namespace {

// test-side brute-force oracle, independent of NeighborIndex
std::vector<int> brute_knn(const PointConfig& c, int i, int k) {
    std::vector<std::pair<double, int>> cand;
    for (std::size_t j = 0; j < c.size(); ++j)
        if (static_cast<int>(j) != i) cand.push_back({c.distance2(i, j), static_cast<int>(j)});
    std::sort(cand.begin(), cand.end());
    std::vector<int> out;
    for (int m = 0; m < k; ++m) out.push_back(cand[m].second);
    return out;
}

}  // namespace

TEST_CASE("csv round trip") {
    PointConfig c = PointConfig::from_coords(2, {0.125, 0.25, 1.0 / 3.0, 2.0 / 3.0});
    std::stringstream ss;
    write_points_csv(ss, c);
    std::string text = ss.str();
    CHECK(text.substr(0, 12) == "# dim=2 n=2\n");
    std::stringstream in(text);
    PointConfig back = read_points_csv(in);
    CHECK(back.coords() == c.coords());
}

TEST_CASE("knn hand cases") {
    PointConfig c = PointConfig::from_coords(1, {0.0, 1.0, 3.0});
    NeighborIndex idx = NeighborIndex::build(c);
    CHECK(idx.knn(1, 2) == std::vector<int>{0, 2});

    // duplicates: the coincident point is the nearest neighbor at distance 0
    PointConfig dup = PointConfig::from_coords(1, {0.0, 0.0, 1.0});
    NeighborIndex idup = NeighborIndex::build(dup);
    CHECK(idup.knn(0, 1) == std::vector<int>{1});
    CHECK(dup.distance2(0, 1) == 0.0);

    CHECK_THROWS(idx.knn(0, 3));  // k >= N
    PointConfig single = PointConfig::from_coords(1, {0.0});
    CHECK_THROWS(NeighborIndex::build(single));
}

TEST_CASE("knn circle and grid cases") {
    PointConfig ring = PointConfig::from_coords(1, {0.0, 0.25, 0.5, 0.75}, Metric::circle_periodic);
    NeighborIndex idx = NeighborIndex::build(ring);
    // both neighbors at wrap distance 1/4; tie-break gives ascending indices
    CHECK(idx.knn(0, 2) == std::vector<int>{1, 3});

    // 3x3 unit grid, center point, 4 axis neighbors
    std::vector<double> coords;
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 3; ++x) {
            coords.push_back(x);
            coords.push_back(y);
        }
    PointConfig grid = PointConfig::from_coords(2, coords);
    NeighborIndex gi = NeighborIndex::build(grid);
    auto nb = gi.knn(4, 4);
    std::sort(nb.begin(), nb.end());
    CHECK(nb == std::vector<int>{1, 3, 5, 7});

    // k = N-1 returns everything sorted by distance
    auto all = gi.knn(0, 8);
    CHECK(all.size() == 8);
    CHECK(all == brute_knn(grid, 0, 8));
}

TEST_CASE("knn equals brute force on random configurations") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 50; ++trial) {
        int d = 1 + static_cast<int>(rng() % 3);
        int n = 65 + static_cast<int>(rng() % 136);  // exercise the tree path
        std::vector<double> coords(static_cast<std::size_t>(n) * d);
        for (double& v : coords) v = uniform01(rng);
        if (trial % 7 == 0) {
            // inject duplicates to exercise tie handling
            for (int j = 0; j < d; ++j) coords[static_cast<std::size_t>(d) + j] = coords[j];
        }
        PointConfig c = PointConfig::from_coords(d, std::move(coords));
        NeighborIndex idx = NeighborIndex::build(c);
        for (int k = 1; k <= 10; ++k)
            for (int i = 0; i < n; i += 17)
                REQUIRE(idx.knn(i, k) == brute_knn(c, i, k));
    }
}

TEST_CASE("ring index equals brute force") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 8 + static_cast<int>(rng() % 120);
        std::vector<double> coords(n);
        for (double& v : coords) v = uniform01(rng);
        PointConfig c = PointConfig::from_coords(1, std::move(coords), Metric::circle_periodic);
        NeighborIndex idx = NeighborIndex::build(c);
        for (int k : {1, 2, 3, 7})
            if (k < n)
                for (int i = 0; i < n; i += 5) REQUIRE(idx.knn(i, k) == brute_knn(c, i, k));
    }
}

TEST_CASE("separation") {
    PointConfig c = PointConfig::from_coords(1, {0.0, 0.25, 0.5, 0.75, 1.0});
    CHECK(separation(c) == Catch::Approx(0.25));

    PointConfig dup = PointConfig::from_coords(1, {0.0, 0.0, 1.0});
    CHECK(separation(dup) == 0.0);

    std::vector<double> ring(8);
    for (int i = 0; i < 8; ++i) ring[i] = i / 8.0;
    PointConfig rc = PointConfig::from_coords(1, std::move(ring), Metric::circle_periodic);
    CHECK(separation(rc) == Catch::Approx(0.125));
}

TEST_CASE("covering radius") {
    // midpoints of N equal cells: exact 1D value 1/(2N)
    const int n = 10;
    std::vector<double> mids(n);
    for (int i = 0; i < n; ++i) mids[i] = (2.0 * i + 1) / (2.0 * n);
    PointConfig c = PointConfig::from_coords(1, std::move(mids));
    Region interval = Region::box({0.0}, 1.0);
    CHECK(covering_radius(c, interval, 1, 1) == Catch::Approx(1.0 / (2 * n)));

    // single point at the square's center: probe estimate near sqrt(2)/2
    PointConfig center = PointConfig::from_coords(2, {0.5, 0.5});
    Region sq = Region::box({0.0, 0.0}, 1.0);
    double est = covering_radius(center, sq, 10000, 3);
    CHECK(est > std::sqrt(2.0) / 2 * 0.95);
    CHECK(est <= std::sqrt(2.0) / 2 + 1e-12);

    // a dense 32x32 grid of cell centers covers within sqrt(2)/64 exactly
    std::vector<double> coords;
    for (int i = 0; i < 32; ++i)
        for (int j = 0; j < 32; ++j) {
            coords.push_back((i + 0.5) / 32);
            coords.push_back((j + 0.5) / 32);
        }
    PointConfig grid = PointConfig::from_coords(2, std::move(coords));
    CHECK(covering_radius(grid, sq, 20000, 9) <= std::sqrt(2.0) / 64 * (1 + 1e-9));
}
