#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "srint/region.hpp"

namespace srint {

/// Composite Simpson rule on [a,b] with an even number of intervals.
/// The 1D quadrature backend is deterministic by construction; 2048
/// intervals is the default used by the density routines.
template <class F>
double simpson(F&& f, double a, double b, int intervals = 2048) {
    if (intervals < 2) intervals = 2;
    if (intervals % 2) ++intervals;
    const double h = (b - a) / intervals;
    std::vector<double> terms;
    terms.reserve(intervals + 1);
    for (int i = 0; i <= intervals; ++i) {
        double x = a + i * h;
        double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        terms.push_back(w * f(x));
    }
    return pairwise_sum(terms) * h / 3.0;
}

/// Cumulative Simpson antiderivative sampled on intervals+1 equispaced nodes;
/// values[i] approximates the integral of f over [a, a + i*h].
template <class F>
std::vector<double> simpson_cumulative(F&& f, double a, double b, int intervals = 2048) {
    if (intervals < 2) intervals = 2;
    if (intervals % 2) ++intervals;
    const double h = (b - a) / intervals;
    std::vector<double> out(intervals + 1, 0.0);
    double prev = f(a);
    for (int i = 1; i <= intervals; ++i) {
        double x1 = a + (i - 0.5) * h;
        double cur = f(a + i * h);
        out[i] = out[i - 1] + (prev + 4.0 * f(x1) + cur) * h / 6.0;
        prev = cur;
    }
    return out;
}

/// Monte Carlo integral of f over the region: measure(A) times the sample
/// mean, with a deterministic pairwise reduction. Same seed, same value.
template <class F>
double mc_integral(const Region& region, F&& f, std::size_t samples, std::uint64_t seed) {
    if (samples < 1) throw std::invalid_argument("mc_integral: samples must be >= 1");
    PointConfig pts = region.sample_uniform(samples, seed);
    double mean = chunked_sum(samples, [&](std::size_t i) { return f(pts.point(i)); }) /
                  static_cast<double>(samples);
    return region.measure() * mean;
}

/// Midpoint tensor grid over the bounding box, filtered by membership, plus
/// the volume of one grid cell. Deterministic alternative to Monte Carlo.
inline std::pair<PointConfig, double> grid_points(const Region& region,
                                                  std::size_t target_samples) {
    const int d = region.dim();
    auto bb = region.bounding_box();
    int per_axis = std::max(2, static_cast<int>(std::llround(
                                   std::ceil(std::pow(static_cast<double>(target_samples), 1.0 / d)))));
    double cell = 1.0;
    for (int m = 0; m < d; ++m) cell *= (bb.hi[m] - bb.lo[m]) / per_axis;

    PointConfig pts(d, region.metric());
    std::vector<int> digit(d, 0);
    std::vector<double> x(d);
    for (;;) {
        for (int m = 0; m < d; ++m)
            x[m] = bb.lo[m] + (digit[m] + 0.5) * (bb.hi[m] - bb.lo[m]) / per_axis;
        if (region.contains(x)) pts.push_back(x);
        int m = 0;
        while (m < d && ++digit[m] == per_axis) digit[m++] = 0;
        if (m == d) break;
    }
    return {std::move(pts), cell};
}

template <class F>
double grid_integral(const Region& region, F&& f, std::size_t target_samples) {
    auto [pts, cell] = grid_points(region, target_samples);
    double s = chunked_sum(pts.size(), [&](std::size_t i) { return f(pts.point(i)); });
    return s * cell;
}

}  // namespace srint
