#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "srint/region.hpp"

using namespace srint;

TEST_CASE("box membership") {
    Region r = Region::box({0.0, 0.0}, 1.0);
    CHECK(r.contains(std::vector{0.5, 0.5}));
    CHECK(r.contains(std::vector{1.0, 0.5}));  // closed set: boundary included
    CHECK_FALSE(r.contains(std::vector{1.1, 0.5}));
    CHECK_THROWS(r.contains(std::vector{0.5}));
}

TEST_CASE("ball membership") {
    Region r = Region::ball({0.0, 0.0}, 1.0);
    CHECK(r.contains(std::vector{0.3, 0.4}));
    CHECK_FALSE(r.contains(std::vector{1.1, 0.0}));
}

TEST_CASE("projection") {
    Region box = Region::box({0.0, 0.0}, 1.0);
    auto y = box.project(std::vector{1.4, -0.2});
    CHECK(y[0] == 1.0);
    CHECK(y[1] == 0.0);

    Region sph = Region::sphere({0.0, 0.0, 0.0}, 1.0);
    auto z = sph.project(std::vector{0.0, 0.0, 2.0});
    CHECK(z[0] == 0.0);
    CHECK(z[1] == 0.0);
    CHECK(z[2] == Catch::Approx(1.0));

    // identity on A
    std::vector<double> inside{0.25, 0.75};
    auto w = box.project(inside);
    CHECK(w == inside);
}

TEST_CASE("projection idempotence and membership of projections") {
    std::mt19937_64 rng(99);
    std::vector<Region> regions;
    regions.push_back(Region::box({0.0, 0.0}, 1.0));
    regions.push_back(Region::ball({0.5, 0.5}, 0.4));
    regions.push_back(Region::box_union({Region::box({0.0}, 1.0), Region::box({2.0}, 1.0)}));
    regions.push_back(Region::circle());
    regions.push_back(Region::sphere({0.0, 0.0, 0.0}, 2.0));
    for (const Region& r : regions) {
        auto bb = r.bounding_box();
        for (int t = 0; t < 200; ++t) {
            std::vector<double> x(r.dim());
            for (int m = 0; m < r.dim(); ++m)
                x[m] = bb.lo[m] + (bb.hi[m] - bb.lo[m]) * uniform01(rng);
            auto p = r.project(x);
            CHECK(r.contains(p));
            CHECK(r.project(p) == p);  // exact idempotence
        }
    }
}

TEST_CASE("measures") {
    CHECK(Region::box({0.0, 0.0}, 2.0).measure() == 4.0);
    CHECK(Region::ball({0.0, 0.0}, 1.0).measure() == Catch::Approx(std::numbers::pi));
    CHECK(Region::sphere({0.0, 0.0, 0.0}, 1.0).measure() == Catch::Approx(4 * std::numbers::pi));
    CHECK(Region::circle().measure() == 1.0);
    Region u = Region::box_union({Region::box({0.0}, 1.0), Region::box({2.0}, 1.0)});
    CHECK(u.measure() == 2.0);
}

TEST_CASE("sampling determinism and support") {
    Region r = Region::box({0.0}, 1.0);
    PointConfig a = r.sample_uniform(3, 7);
    PointConfig b = r.sample_uniform(3, 7);
    CHECK(a.coords() == b.coords());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(r.contains(a.point(i)));
    CHECK_THROWS(r.sample_uniform(0, 7));
}

TEST_CASE("sampling statistics") {
    Region sq = Region::box({0.0, 0.0}, 1.0);
    PointConfig pts = sq.sample_uniform(100000, 42);
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        mx += pts.point(i)[0];
        my += pts.point(i)[1];
    }
    mx /= pts.size();
    my /= pts.size();
    CHECK(std::abs(mx - 0.5) < 0.01);
    CHECK(std::abs(my - 0.5) < 0.01);

    // fraction falling in a half-measure sub-box
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (pts.point(i)[0] < 0.5) ++hits;
    CHECK(std::abs(hits / double(pts.size()) - 0.5) < 0.01);

    Region sph = Region::sphere({0.0, 0.0, 0.0}, 1.0);
    PointConfig sp = sph.sample_uniform(100000, 5);
    double c[3] = {0, 0, 0};
    for (std::size_t i = 0; i < sp.size(); ++i)
        for (int m = 0; m < 3; ++m) c[m] += sp.point(i)[m];
    for (int m = 0; m < 3; ++m) CHECK(std::abs(c[m] / sp.size()) < 0.02);
}

TEST_CASE("ball sampling stays inside and fills") {
    Region b = Region::ball({1.0, -1.0, 0.5}, 0.7);
    PointConfig pts = b.sample_uniform(2000, 3);
    for (std::size_t i = 0; i < pts.size(); ++i) CHECK(b.contains(pts.point(i)));
}

TEST_CASE("box union validation") {
    CHECK_THROWS(Region::box_union({Region::box({0.0}, 1.0), Region::box({0.5}, 1.0)}));
    // shared faces are fine
    CHECK_NOTHROW(Region::box_union({Region::box({0.0}, 1.0), Region::box({1.0}, 1.0)}));
}

TEST_CASE("box union projection tie-break") {
    Region u = Region::box_union({Region::box({0.0}, 1.0), Region::box({2.0}, 1.0)});
    // 1.5 is equidistant; the lower-index member wins
    auto p = u.project(std::vector{1.5});
    CHECK(p[0] == 1.0);
}

TEST_CASE("rejection sampling cap detects hopeless acceptance rates") {
    // two sliver members: acceptance ~ 1e-9 of the bounding box
    Region u = Region::box_union(
        {Region::box({0.0}, 1e-9), Region::box({2.0}, 1e-9)});
    CHECK_THROWS_AS(u.sample_uniform(4, 1), std::runtime_error);
}

TEST_CASE("circle region wraps") {
    Region c = Region::circle();
    CHECK(c.contains(std::vector{0.0}));
    CHECK_FALSE(c.contains(std::vector{1.0}));
    CHECK(c.project(std::vector{1.25})[0] == Catch::Approx(0.25));
    CHECK(c.project(std::vector{-0.25})[0] == Catch::Approx(0.75));
}
