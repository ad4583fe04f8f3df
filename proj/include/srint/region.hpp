#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "srint/point_config.hpp"

namespace srint {

enum class RegionKind { box, ball, box_union, circle_periodic, sphere_surface };

/// A compact set A in ambient dimension dim(), of intrinsic dimension
/// intrinsic_dim(). Immutable after construction; sampling takes an explicit
/// seed, so Region values can be shared freely across threads.
///
/// Boundary comparisons use an absolute tolerance of 1e-12.
class Region {
  public:
    static constexpr double kBoundaryTol = 1e-12;
    static constexpr std::size_t kRejectionCap = 1000000;

    struct Box {
        std::vector<double> lo, hi;
    };

    static Region box(std::vector<double> corner, std::vector<double> sides) {
        Region r;
        r.kind_ = RegionKind::box;
        r.dim_ = static_cast<int>(corner.size());
        r.intrinsic_dim_ = r.dim_;
        if (sides.size() != corner.size())
            throw std::invalid_argument("region: corner/side size mismatch");
        for (double s : sides)
            if (!(s > 0)) throw std::invalid_argument("region: box sides must be positive");
        r.corner_ = std::move(corner);
        r.sides_ = std::move(sides);
        return r;
    }
    static Region box(std::vector<double> corner, double side) {
        std::vector<double> sides(corner.size(), side);
        return box(std::move(corner), std::move(sides));
    }

    static Region ball(std::vector<double> center, double radius) {
        Region r;
        r.kind_ = RegionKind::ball;
        r.dim_ = static_cast<int>(center.size());
        r.intrinsic_dim_ = r.dim_;
        if (!(radius > 0)) throw std::invalid_argument("region: ball radius must be positive");
        r.center_ = std::move(center);
        r.radius_ = radius;
        return r;
    }

    /// Union of boxes with pairwise disjoint interiors (validated here).
    static Region box_union(std::vector<Region> members) {
        Region r;
        r.kind_ = RegionKind::box_union;
        if (members.empty()) throw std::invalid_argument("region: empty box union");
        r.dim_ = members.front().dim_;
        r.intrinsic_dim_ = r.dim_;
        for (const Region& m : members) {
            if (m.kind_ != RegionKind::box) throw std::invalid_argument("region: union members must be boxes");
            if (m.dim_ != r.dim_) throw std::invalid_argument("region: union members dim mismatch");
        }
        for (std::size_t a = 0; a < members.size(); ++a)
            for (std::size_t b = a + 1; b < members.size(); ++b) {
                bool overlap = true;
                for (int m = 0; m < r.dim_; ++m) {
                    double lo = std::max(members[a].corner_[m], members[b].corner_[m]);
                    double hi = std::min(members[a].corner_[m] + members[a].sides_[m],
                                         members[b].corner_[m] + members[b].sides_[m]);
                    if (!(lo < hi - kBoundaryTol)) { overlap = false; break; }
                }
                if (overlap) throw std::invalid_argument("region: union members have overlapping interiors");
            }
        r.members_ = std::move(members);
        return r;
    }

    /// The periodized unit interval [0,1) with wrap distance.
    static Region circle() {
        Region r;
        r.kind_ = RegionKind::circle_periodic;
        r.dim_ = 1;
        r.intrinsic_dim_ = 1;
        return r;
    }

    /// Sphere surface in R^3 (intrinsic dimension 2).
    static Region sphere(std::vector<double> center, double radius) {
        Region r;
        r.kind_ = RegionKind::sphere_surface;
        if (center.size() != 3) throw std::invalid_argument("region: sphere center must be 3d");
        if (!(radius > 0)) throw std::invalid_argument("region: sphere radius must be positive");
        r.dim_ = 3;
        r.intrinsic_dim_ = 2;
        r.center_ = std::move(center);
        r.radius_ = radius;
        return r;
    }

    RegionKind kind() const { return kind_; }
    int dim() const { return dim_; }
    int intrinsic_dim() const { return intrinsic_dim_; }
    Metric metric() const {
        return kind_ == RegionKind::circle_periodic ? Metric::circle_periodic : Metric::euclidean;
    }
    const std::vector<Region>& members() const { return members_; }
    const std::vector<double>& corner() const { return corner_; }
    const std::vector<double>& sides() const { return sides_; }
    const std::vector<double>& center() const { return center_; }
    double radius() const { return radius_; }

    bool contains(std::span<const double> x) const {
        check_dim(x);
        switch (kind_) {
            case RegionKind::box: {
                for (int m = 0; m < dim_; ++m)
                    if (x[m] < corner_[m] - kBoundaryTol || x[m] > corner_[m] + sides_[m] + kBoundaryTol)
                        return false;
                return true;
            }
            case RegionKind::ball:
                return dist_to_center(x) <= radius_ + kBoundaryTol;
            case RegionKind::box_union: {
                for (const Region& m : members_)
                    if (m.contains(x)) return true;
                return false;
            }
            case RegionKind::circle_periodic:
                return x[0] >= -kBoundaryTol && x[0] < 1.0;
            case RegionKind::sphere_surface:
                return std::abs(dist_to_center(x) - radius_) <= kBoundaryTol;
        }
        return false;
    }

    /// Metric projection onto A. Identity whenever contains(x), so projection
    /// is exactly idempotent.
    std::vector<double> project(std::span<const double> x) const {
        check_dim(x);
        if (contains(x)) return {x.begin(), x.end()};
        switch (kind_) {
            case RegionKind::box:
                return clamp_to_box(x, corner_, sides_);
            case RegionKind::ball: {
                double d = dist_to_center(x);
                std::vector<double> y(x.begin(), x.end());
                if (d > radius_) {
                    for (int m = 0; m < dim_; ++m)
                        y[m] = center_[m] + (x[m] - center_[m]) * (radius_ / d);
                }
                return y;
            }
            case RegionKind::box_union: {
                // Nearest over members, lowest index winning ties.
                std::vector<double> best;
                double best_d2 = std::numeric_limits<double>::infinity();
                for (const Region& m : members_) {
                    auto y = clamp_to_box(x, m.corner_, m.sides_);
                    double d2 = 0.0;
                    for (int j = 0; j < dim_; ++j) d2 += sq(y[j] - x[j]);
                    if (best.empty() || d2 < best_d2) {
                        best_d2 = d2;
                        best = std::move(y);
                    }
                }
                return best;
            }
            case RegionKind::circle_periodic: {
                double v = x[0] - std::floor(x[0]);
                if (v >= 1.0) v = 0.0;
                return {v};
            }
            case RegionKind::sphere_surface: {
                double d = dist_to_center(x);
                std::vector<double> y(3);
                if (d <= kBoundaryTol) {
                    // Center projects to an arbitrary fixed surface point.
                    y = center_;
                    y[2] += radius_;
                    return y;
                }
                for (int m = 0; m < 3; ++m)
                    y[m] = center_[m] + (x[m] - center_[m]) * (radius_ / d);
                return y;
            }
        }
        throw std::logic_error("region: unsupported kind");
    }

    /// Intrinsic-dimensional measure: Lebesgue for full-dimensional kinds,
    /// surface area 4*pi*r^2 for the sphere.
    double measure() const {
        switch (kind_) {
            case RegionKind::box: {
                double v = 1.0;
                for (double s : sides_) v *= s;
                return v;
            }
            case RegionKind::ball:
                return unit_ball_volume(dim_) * std::pow(radius_, dim_);
            case RegionKind::box_union: {
                double v = 0.0;
                for (const Region& m : members_) v += m.measure();
                return v;
            }
            case RegionKind::circle_periodic:
                return 1.0;
            case RegionKind::sphere_surface:
                return 4.0 * std::numbers::pi * radius_ * radius_;
        }
        throw std::logic_error("region: unsupported kind");
    }

    Box bounding_box() const {
        Box b;
        switch (kind_) {
            case RegionKind::box:
                b.lo = corner_;
                b.hi = corner_;
                for (int m = 0; m < dim_; ++m) b.hi[m] += sides_[m];
                return b;
            case RegionKind::ball:
            case RegionKind::sphere_surface:
                b.lo = center_;
                b.hi = center_;
                for (int m = 0; m < dim_; ++m) {
                    b.lo[m] -= radius_;
                    b.hi[m] += radius_;
                }
                return b;
            case RegionKind::box_union: {
                b = members_.front().bounding_box();
                for (const Region& m : members_) {
                    Box mb = m.bounding_box();
                    for (int j = 0; j < dim_; ++j) {
                        b.lo[j] = std::min(b.lo[j], mb.lo[j]);
                        b.hi[j] = std::max(b.hi[j], mb.hi[j]);
                    }
                }
                return b;
            }
            case RegionKind::circle_periodic:
                b.lo = {0.0};
                b.hi = {1.0};
                return b;
        }
        throw std::logic_error("region: unsupported kind");
    }

    /// Largest distance realized in A under the region metric.
    double diameter() const {
        if (kind_ == RegionKind::circle_periodic) return 0.5;
        Box b = bounding_box();
        double d2 = 0.0;
        for (int m = 0; m < dim_; ++m) d2 += sq(b.hi[m] - b.lo[m]);
        return std::sqrt(d2);
    }

    /// n i.i.d. points uniform w.r.t. measure(); deterministic for a fixed
    /// seed. Boxes and the circle sample directly, the sphere uses the
    /// area-preserving cylinder map, the rest rejection-sample from the
    /// bounding box (capped at kRejectionCap attempts).
    PointConfig sample_uniform(std::size_t n, std::uint64_t seed) const {
        if (n < 1) throw std::invalid_argument("sample_uniform: n must be >= 1");
        std::mt19937_64 rng(mix_seed(seed, 0x5eed));
        PointConfig out(dim_, metric());
        std::vector<double> x(dim_);
        switch (kind_) {
            case RegionKind::box:
                for (std::size_t i = 0; i < n; ++i) {
                    for (int m = 0; m < dim_; ++m) x[m] = corner_[m] + sides_[m] * uniform01(rng);
                    out.push_back(x);
                }
                return out;
            case RegionKind::circle_periodic:
                for (std::size_t i = 0; i < n; ++i) {
                    x[0] = uniform01(rng);
                    out.push_back(x);
                }
                return out;
            case RegionKind::sphere_surface:
                for (std::size_t i = 0; i < n; ++i) {
                    double z = 2.0 * uniform01(rng) - 1.0;
                    double phi = 2.0 * std::numbers::pi * uniform01(rng);
                    double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
                    x[0] = center_[0] + radius_ * rho * std::cos(phi);
                    x[1] = center_[1] + radius_ * rho * std::sin(phi);
                    x[2] = center_[2] + radius_ * z;
                    out.push_back(x);
                }
                return out;
            default: {
                Box b = bounding_box();
                std::size_t attempts = 0;
                for (std::size_t i = 0; i < n;) {
                    if (++attempts > kRejectionCap)
                        throw std::runtime_error("sample_uniform: rejection cap exceeded");
                    for (int m = 0; m < dim_; ++m)
                        x[m] = b.lo[m] + (b.hi[m] - b.lo[m]) * uniform01(rng);
                    if (contains(x)) {
                        out.push_back(x);
                        ++i;
                    }
                }
                return out;
            }
        }
    }

    static double unit_ball_volume(int d) {
        return std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
    }

  private:
    void check_dim(std::span<const double> x) const {
        if (x.size() != static_cast<std::size_t>(dim_))
            throw std::invalid_argument("region: point dimension mismatch");
    }
    double dist_to_center(std::span<const double> x) const {
        double d2 = 0.0;
        for (int m = 0; m < dim_; ++m) d2 += sq(x[m] - center_[m]);
        return std::sqrt(d2);
    }
    static std::vector<double> clamp_to_box(std::span<const double> x,
                                            const std::vector<double>& corner,
                                            const std::vector<double>& sides) {
        std::vector<double> y(x.begin(), x.end());
        for (std::size_t m = 0; m < corner.size(); ++m)
            y[m] = std::clamp(y[m], corner[m], corner[m] + sides[m]);
        return y;
    }

    RegionKind kind_ = RegionKind::box;
    int dim_ = 1;
    int intrinsic_dim_ = 1;
    std::vector<double> corner_, sides_;
    std::vector<double> center_;
    double radius_ = 0.0;
    std::vector<Region> members_;
};

}  // namespace srint
