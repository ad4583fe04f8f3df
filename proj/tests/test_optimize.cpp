#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "srint/optimize.hpp"

using namespace srint;

TEST_CASE("two repelling points run to the interval endpoints") {
    RieszSpec spec{2.0, 1, 1};
    Region interval = Region::box({0.0}, 1.0);
    PointConfig start = PointConfig::from_coords(1, {0.4, 0.55});
    OptimizeOptions opts;
    opts.max_iters = 500;
    opts.tol_energy = 1e-14;
    OptResult res = minimize(riesz_objective(spec), start, interval, opts);
    CHECK(res.energy == Catch::Approx(2.0));
    std::vector<double> xs(res.config.coords());
    std::sort(xs.begin(), xs.end());
    CHECK(xs[0] == Catch::Approx(0.0).margin(1e-6));
    CHECK(xs[1] == Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("circle minimizer attains the equal-spacing energy") {
    RieszSpec spec{2.0, 2, 1};
    Region circ = Region::circle();
    OptimizeOptions opts;
    opts.max_iters = 20000;
    opts.tol_energy = 1e-15;
    opts.restarts = 5;
    opts.seed = 42;
    PointConfig start = circ.sample_uniform(5, 7);
    OptResult res = minimize(riesz_objective(spec), start, circ, opts);
    double exact = circle_optimal_energy(5, 2.0, 2);
    CHECK(std::abs(res.energy - exact) <= 1e-6 * exact);
}

TEST_CASE("trace is monotone and iterates stay feasible") {
    RieszSpec spec{3.0, 2, 2};
    Region square = Region::box({0.0, 0.0}, 1.0);
    PointConfig start = square.sample_uniform(24, 3);
    OptimizeOptions opts;
    opts.max_iters = 200;
    OptResult res = minimize(riesz_objective(spec), start, square, opts);
    for (std::size_t i = 1; i < res.trace.size(); ++i)
        CHECK(res.trace[i].energy <= res.trace[i - 1].energy);
    for (std::size_t i = 0; i < res.config.size(); ++i)
        CHECK(square.contains(res.config.point(i)));
    CHECK((res.termination == "grad-tol" || res.termination == "energy-tol" ||
           res.termination == "max-iters"));
}

TEST_CASE("determinism") {
    RieszSpec spec{2.0, 1, 2};
    Region square = Region::box({0.0, 0.0}, 1.0);
    PointConfig start = square.sample_uniform(16, 9);
    OptimizeOptions opts;
    opts.max_iters = 120;
    opts.restarts = 3;
    opts.seed = 5;
    OptResult a = minimize(riesz_objective(spec), start, square, opts);
    OptResult b = minimize(riesz_objective(spec), start, square, opts);
    CHECK(a.config.coords() == b.config.coords());
    CHECK(a.energy == b.energy);
    CHECK(a.restart == b.restart);
}

TEST_CASE("maximize mode produces a nondecreasing trace") {
    // concave toy objective: maximize -sum |x_i - 1/2|^2 over [0,1]
    Objective obj{
        [](const PointConfig& c) {
            double e = 0.0;
            for (double v : c.coords()) e -= sq(v - 0.5);
            return e;
        },
        [](const PointConfig& c) {
            double e = 0.0;
            std::vector<double> g(c.coords().size());
            for (std::size_t i = 0; i < c.coords().size(); ++i) {
                e -= sq(c.coords()[i] - 0.5);
                g[i] = -2.0 * (c.coords()[i] - 0.5);
            }
            return std::make_pair(e, g);
        },
        nullptr};
    Region interval = Region::box({0.0}, 1.0);
    PointConfig start = interval.sample_uniform(6, 11);
    OptimizeOptions opts;
    opts.mode = OptMode::maximize;
    opts.max_iters = 100;
    OptResult res = minimize(obj, start, interval, opts);
    for (std::size_t i = 1; i < res.trace.size(); ++i)
        CHECK(res.trace[i].energy >= res.trace[i - 1].energy);
    CHECK(res.energy == Catch::Approx(0.0).margin(1e-6));
}

TEST_CASE("singular start raises") {
    RieszSpec spec{2.0, 1, 1};
    Region interval = Region::box({0.0}, 1.0);
    PointConfig bad = PointConfig::from_coords(1, {0.5, 0.5});
    OptimizeOptions opts;
    CHECK_THROWS_AS(minimize(riesz_objective(spec), bad, interval, opts), std::runtime_error);
}

TEST_CASE("sphere-surface minimization stays on the sphere and separates") {
    RieszSpec spec{2.0, 3, 2};  // intrinsic dimension 2
    Region sph = Region::sphere({0.0, 0.0, 0.0}, 1.0);
    PointConfig start = sph.sample_uniform(40, 4);
    OptimizeOptions opts;
    opts.max_iters = 400;
    opts.seed = 4;
    OptResult res = minimize(riesz_objective(spec), start, sph, opts);
    for (std::size_t i = 0; i < res.config.size(); ++i) CHECK(sph.contains(res.config.point(i)));
    // separation should be on the order of N^{-1/2} for minimizers
    CHECK(separation(res.config) * std::sqrt(40.0) > 0.5);
}
