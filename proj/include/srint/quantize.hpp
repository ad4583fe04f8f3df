#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "srint/expr.hpp"
#include "srint/neighbor_index.hpp"
#include "srint/quadrature.hpp"

namespace srint {

enum class QuadMode { monte_carlo, grid, exact_1d };

struct QuadSpec {
    QuadMode mode = QuadMode::monte_carlo;
    std::size_t samples = 65536;
    std::uint64_t seed = 1;
};

/// Parameters of the weighted quantization error
///
///   E_Q(omega; eta, xi) = int_A eta(y) min_i |y - x_i|^p dy
///                         + N^{p/d-1} sum_i xi(x_i).
///
/// Voronoi cells are never constructed; every integral runs through
/// nearest-site assignment of quadrature samples. exact_1d evaluates the
/// per-cell integrals in closed form (1D boxes, constant eta only).
struct QuantSpec {
    double p = 2.0;
    Expr eta = Expr::constant(1.0);
    Expr xi = Expr::constant(0.0);
    QuadSpec quad;

    void validate() const {
        if (!(p > 0)) throw std::invalid_argument("quantize: p must be > 0");
        if (quad.mode == QuadMode::monte_carlo && quad.samples < 1000)
            throw std::invalid_argument("quantize: monte-carlo mode needs >= 1000 samples");
    }
    bool constant_eta() const { return eta.is_constant(); }
    bool zero_xi() const { return xi.is_constant() && xi.constant_value() == 0.0; }
};

/// Nearest-site index for every sample point; exact ties go to the smaller
/// site index. Realizes Voronoi membership without building cells.
inline std::vector<int> assign_sites(const PointConfig& samples, const PointConfig& sites) {
    if (sites.size() == 0) throw std::invalid_argument("assign_sites: empty site set");
    std::vector<int> owner(samples.size(), 0);
    if (sites.size() == 1) return owner;
    NeighborIndex index = NeighborIndex::build(sites);
    for (std::size_t i = 0; i < samples.size(); ++i)
        owner[i] = index.nearest(samples.point(i));
    return owner;
}

namespace detail {

struct Cells1D {
    std::vector<int> order;        // site indices sorted by coordinate
    std::vector<double> lo, hi;    // cell of order[r] is [lo[r], hi[r]]
};

inline Cells1D cells_1d(const PointConfig& sites, double a, double b) {
    Cells1D c;
    const std::size_t n = sites.size();
    c.order.resize(n);
    for (std::size_t i = 0; i < n; ++i) c.order[i] = static_cast<int>(i);
    std::sort(c.order.begin(), c.order.end(), [&](int u, int v) {
        double xu = sites.point(u)[0], xv = sites.point(v)[0];
        return xu < xv || (xu == xv && u < v);
    });
    c.lo.resize(n);
    c.hi.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
        double x = sites.point(c.order[r])[0];
        double left = r == 0 ? a : 0.5 * (sites.point(c.order[r - 1])[0] + x);
        double right = r + 1 == n ? b : 0.5 * (x + sites.point(c.order[r + 1])[0]);
        c.lo[r] = std::clamp(left, a, b);
        c.hi[r] = std::clamp(right, a, b);
    }
    return c;
}

// int_{lo}^{hi} |y - x|^p dy with x inside [lo, hi]
inline double cell_moment(double x, double lo, double hi, double p) {
    return (std::pow(x - lo, p + 1.0) + std::pow(hi - x, p + 1.0)) / (p + 1.0);
}

inline void require_exact_1d(const Region& region, const QuantSpec& spec) {
    if (region.kind() != RegionKind::box || region.dim() != 1)
        throw std::invalid_argument("quantize: exact-1d mode requires a 1D box region");
    if (!spec.constant_eta())
        throw std::invalid_argument("quantize: exact-1d mode requires constant eta");
}

}  // namespace detail

/// Quantization error split into its quadrature and field parts. The field
/// scaling N^{p/d-1} interacts with quadrature noise at small N, so the two
/// terms are kept separately reportable.
struct QuantEnergyTerms {
    double main = 0.0;
    double field = 0.0;
    double total() const { return main + field; }
};

inline QuantEnergyTerms quant_energy_terms(const PointConfig& sites, const Region& region,
                                           const QuantSpec& spec) {
    spec.validate();
    if (sites.size() == 0) throw std::invalid_argument("quant_energy: empty configuration");
    const double n = static_cast<double>(sites.size());
    const int d = region.intrinsic_dim();

    double main = 0.0;
    if (spec.quad.mode == QuadMode::exact_1d) {
        detail::require_exact_1d(region, spec);
        double a = region.corner()[0], b = a + region.sides()[0];
        auto cells = detail::cells_1d(sites, a, b);
        std::vector<double> terms(sites.size());
        for (std::size_t r = 0; r < sites.size(); ++r) {
            double x = std::clamp(sites.point(cells.order[r])[0], cells.lo[r], cells.hi[r]);
            terms[r] = detail::cell_moment(x, cells.lo[r], cells.hi[r], spec.p);
        }
        main = spec.eta.constant_value() * pairwise_sum(terms);
    } else {
        auto integrand = [&](std::span<const double> y) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < sites.size(); ++i)
                best = std::min(best, sites.distance2_to(i, y));
            double w = spec.constant_eta() ? spec.eta.constant_value() : spec.eta.eval(y);
            return w * std::pow(best, 0.5 * spec.p);
        };
        if (spec.quad.mode == QuadMode::monte_carlo) {
            // nearest-site search via the index when the site set is large
            if (sites.size() > 64) {
                NeighborIndex index = NeighborIndex::build(sites);
                PointConfig pts = region.sample_uniform(spec.quad.samples, spec.quad.seed);
                double mean = chunked_sum(pts.size(), [&](std::size_t i) {
                    auto y = pts.point(i);
                    double w = spec.constant_eta() ? spec.eta.constant_value() : spec.eta.eval(y);
                    return w * std::pow(index.nearest_distance(y), spec.p);
                }) / static_cast<double>(pts.size());
                main = region.measure() * mean;
            } else {
                main = mc_integral(region, integrand, spec.quad.samples, spec.quad.seed);
            }
        } else {
            if (sites.size() > 64) {
                NeighborIndex index = NeighborIndex::build(sites);
                main = grid_integral(region, [&](std::span<const double> y) {
                    double w = spec.constant_eta() ? spec.eta.constant_value() : spec.eta.eval(y);
                    return w * std::pow(index.nearest_distance(y), spec.p);
                }, spec.quad.samples);
            } else {
                main = grid_integral(region, integrand, spec.quad.samples);
            }
        }
    }

    double field = 0.0;
    if (!spec.zero_xi()) {
        std::vector<double> terms(sites.size());
        for (std::size_t i = 0; i < sites.size(); ++i) terms[i] = spec.xi.eval(sites.point(i));
        field = std::pow(n, spec.p / d - 1.0) * pairwise_sum(terms);
    }
    return {main, field};
}

inline double quant_energy(const PointConfig& sites, const Region& region,
                           const QuantSpec& spec) {
    return quant_energy_terms(sites, region, spec).total();
}

namespace detail {

// p-centroid of one sampled cell: eta-weighted mean for p = 2, otherwise a
// bisected line search along the descent direction of the per-cell moment.
inline std::vector<double> cell_centroid(const PointConfig& samples,
                                         std::span<const int> members,
                                         std::span<const double> site, double p,
                                         const QuantSpec& spec, double diam) {
    const int dim = samples.dim();
    std::vector<double> c(site.begin(), site.end());
    if (p == 2.0) {
        std::vector<double> num(dim, 0.0);
        double den = 0.0;
        for (int m : members) {
            auto y = samples.point(static_cast<std::size_t>(m));
            double w = spec.constant_eta() ? spec.eta.constant_value() : spec.eta.eval(y);
            for (int j = 0; j < dim; ++j) num[j] += w * y[j];
            den += w;
        }
        if (den > 0)
            for (int j = 0; j < dim; ++j) c[j] = num[j] / den;
        return c;
    }

    auto grad_at = [&](std::span<const double> z, std::vector<double>& g) {
        g.assign(dim, 0.0);
        for (int m : members) {
            auto y = samples.point(static_cast<std::size_t>(m));
            double r2 = 0.0;
            for (int j = 0; j < dim; ++j) r2 += sq(z[j] - y[j]);
            if (r2 == 0.0) continue;
            double w = spec.constant_eta() ? spec.eta.constant_value() : spec.eta.eval(y);
            double coef = w * p * std::pow(r2, 0.5 * p - 1.0);
            for (int j = 0; j < dim; ++j) g[j] += coef * (z[j] - y[j]);
        }
    };

    std::vector<double> g(dim), z(dim), gz(dim);
    grad_at(c, g);
    double gnorm = 0.0;
    for (double v : g) gnorm += v * v;
    gnorm = std::sqrt(gnorm);
    if (gnorm == 0.0) return c;
    std::vector<double> u(dim);
    for (int j = 0; j < dim; ++j) u[j] = -g[j] / gnorm;

    auto dderiv = [&](double t) {
        for (int j = 0; j < dim; ++j) z[j] = c[j] + t * u[j];
        grad_at(z, gz);
        double s = 0.0;
        for (int j = 0; j < dim; ++j) s += gz[j] * u[j];
        return s;
    };

    // bracket the sign change of the directional derivative, then bisect
    double hi = 1e-6 * diam;
    int guard = 0;
    while (dderiv(hi) < 0 && guard++ < 60) hi *= 2.0;
    double lo = 0.0;
    for (int it = 0; it < 20 && hi - lo > 1e-10 * diam; ++it) {
        double mid = 0.5 * (lo + hi);
        (dderiv(mid) < 0 ? lo : hi) = mid;
    }
    double t = 0.5 * (lo + hi);
    for (int j = 0; j < dim; ++j) c[j] += t * u[j];
    return c;
}

}  // namespace detail

/// One Lloyd-type descent step: every site moves to the weighted p-centroid
/// of its sampled cell, then is projected back into A. Empty cells are
/// re-seeded at a uniform sample. Pure function of (config, spec): the sample
/// set is regenerated from spec.quad.seed, so repeated steps descend a fixed
/// empirical objective.
inline PointConfig lloyd_step(const PointConfig& sites, const Region& region,
                              const QuantSpec& spec) {
    spec.validate();
    if (sites.size() == 0) throw std::invalid_argument("lloyd_step: empty configuration");
    PointConfig out = sites;

    if (spec.quad.mode == QuadMode::exact_1d) {
        detail::require_exact_1d(region, spec);
        double a = region.corner()[0], b = a + region.sides()[0];
        auto cells = detail::cells_1d(sites, a, b);
        // the p-moment over an interval is minimized at the midpoint for any p
        for (std::size_t r = 0; r < sites.size(); ++r)
            out.point(static_cast<std::size_t>(cells.order[r]))[0] =
                0.5 * (cells.lo[r] + cells.hi[r]);
        return out;
    }

    PointConfig samples = spec.quad.mode == QuadMode::monte_carlo
                              ? region.sample_uniform(spec.quad.samples, spec.quad.seed)
                              : grid_points(region, spec.quad.samples).first;

    std::vector<int> owner = assign_sites(samples, sites);
    std::vector<std::vector<int>> cell_members(sites.size());
    for (std::size_t m = 0; m < owner.size(); ++m)
        cell_members[static_cast<std::size_t>(owner[m])].push_back(static_cast<int>(m));

    const double diam = region.diameter();
    for (std::size_t i = 0; i < sites.size(); ++i) {
        std::vector<double> target;
        if (cell_members[i].empty()) {
            auto re = region.sample_uniform(1, mix_seed(spec.quad.seed, 7777 + i));
            target.assign(re.point(0).begin(), re.point(0).end());
        } else {
            target = detail::cell_centroid(samples, cell_members[i], sites.point(i), spec.p,
                                           spec, diam);
        }
        auto projected = region.project(target);
        std::copy(projected.begin(), projected.end(), out.point(i).begin());
    }
    return out;
}

}  // namespace srint
