#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "srint/expr.hpp"
#include "srint/quadrature.hpp"

namespace srint {

enum class DensityFamily { riesz, quantizer };

/// Limiting density of energy minimizers,
///
///   phi(x) = ((L1 - xi(x)) / (F(1) (1+sigma) eta(x)))_+^{1/sigma},
///
/// with L1 normalizing phi to a probability density. For the Riesz family
/// sigma = s/d and the exponent 1/sigma = d/s; for quantizers
/// sigma = -1-p/d < -1 and the formula is rearranged with the positive
/// exponent d/(p+d), avoiding negative-power branch mistakes:
///
///   phi(x) = ((p/d) F(1) eta(x) / (xi(x) - L1))_+^{d/(p+d)}.
struct DensityModel {
    DensityFamily family = DensityFamily::riesz;
    double sigma = 1.0;   // s/d or -1-p/d
    double expo = 1.0;    // d/s or d/(p+d), always positive
    double f1 = 1.0;      // leading constant F(1)
    Expr eta = Expr::constant(1.0);
    Expr xi = Expr::constant(0.0);
    int d = 1;
    Region region = Region::box({0.0}, 1.0);
    std::optional<double> l1;

    static DensityModel riesz(double s, int d, double f1, Expr eta, Expr xi, Region region) {
        if (!(s > 0) || d < 1) throw std::invalid_argument("density: require s > 0, d >= 1");
        DensityModel m;
        m.family = DensityFamily::riesz;
        m.sigma = s / d;
        m.expo = d / s;
        m.f1 = f1;
        m.eta = std::move(eta);
        m.xi = std::move(xi);
        m.d = d;
        m.region = std::move(region);
        return m;
    }
    static DensityModel quantizer(double p, int d, double f1, Expr eta, Expr xi, Region region) {
        if (!(p > 0) || d < 1) throw std::invalid_argument("density: require p > 0, d >= 1");
        DensityModel m;
        m.family = DensityFamily::quantizer;
        m.sigma = -1.0 - p / d;
        m.expo = d / (p + d);
        m.f1 = f1;
        m.eta = std::move(eta);
        m.xi = std::move(xi);
        m.d = d;
        m.region = std::move(region);
        return m;
    }

    double phi_at(std::span<const double> x, double l1_value) const {
        double e = eta.eval(x);
        double q = xi.eval(x);
        if (family == DensityFamily::riesz) {
            double base = (l1_value - q) / (f1 * (1.0 + sigma) * e);
            return base > 0 ? std::pow(base, expo) : 0.0;
        }
        double pd = -(1.0 + sigma);  // p/d
        double den = q - l1_value;
        if (den == 0.0) return std::numeric_limits<double>::infinity();
        double base = pd * f1 * e / den;
        return base > 0 ? std::pow(base, expo) : 0.0;
    }
};

namespace detail {

/// Integral of phi(.; L1) over the region: composite Simpson (2048 panels)
/// in 1D for determinism, Monte Carlo otherwise with one fixed sample set.
inline double phi_mass(const DensityModel& m, double l1_value, std::size_t quad_samples,
                       std::uint64_t seed) {
    if (m.region.dim() == 1) {
        auto bb = m.region.bounding_box();
        return simpson(
            [&](double x) {
                std::vector<double> p{x};
                return m.region.contains(p) || (m.region.kind() == RegionKind::circle_periodic)
                           ? m.phi_at(p, l1_value)
                           : 0.0;
            },
            bb.lo[0], bb.hi[0]);
    }
    return mc_integral(
        m.region, [&](std::span<const double> x) { return m.phi_at(x, l1_value); },
        quad_samples, seed);
}

inline double sampled_extreme(const Expr& e, const Region& region, bool want_max) {
    PointConfig pts = region.sample_uniform(2048, 424242);
    double best = want_max ? -std::numeric_limits<double>::infinity()
                           : std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double v = e.eval(pts.point(i));
        best = want_max ? std::max(best, v) : std::min(best, v);
    }
    return best;
}

}  // namespace detail

/// Solve for the normalizing constant L1 by bisection so that the mass of phi
/// equals 1 within 1e-8. The bracket grows geometrically from min xi in the
/// direction of F(1)(1+sigma) (upward for the Riesz family, downward for
/// quantizers; the mass is increasing in L1 in both cases).
inline double solve_l1(DensityModel& model, std::size_t quad_samples = 65536,
                       std::uint64_t seed = 1) {
    if (sampled_min(model.eta, model.region) <= 0)
        throw std::invalid_argument("solve_l1: eta must be positive on the region");
    double xi_min = detail::sampled_extreme(model.xi, model.region, false);
    double eta_max = detail::sampled_extreme(model.eta, model.region, true);
    double span0 = model.f1 * (1.0 + model.sigma) * eta_max *
                   std::pow(model.region.measure(), -model.sigma);

    auto mass = [&](double l1) { return detail::phi_mass(model, l1, quad_samples, seed); };

    // mass(min xi) is 0 for the Riesz branch and arbitrarily large for the
    // quantizer branch; grow the far end until the unit mass is bracketed
    double near_end = xi_min;
    double far_end = 0.0;
    bool ok = false;
    for (int j = 0; j < 64; ++j) {
        far_end = xi_min + span0 * std::pow(2.0, j);
        double mfar = mass(far_end);
        if (model.family == DensityFamily::riesz ? mfar >= 1.0 : mfar <= 1.0) {
            ok = true;
            break;
        }
    }
    if (!ok) throw std::runtime_error("solve_l1: cannot bracket the normalizer");

    double lo = std::min(near_end, far_end), hi = std::max(near_end, far_end);
    double l1 = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        l1 = 0.5 * (lo + hi);
        double m = mass(l1);
        if (std::abs(m - 1.0) <= 1e-8) break;
        if (m < 1.0) lo = l1;  // mass is increasing in L1
        else hi = l1;
    }
    model.l1 = l1;
    return l1;
}

/// Pointwise value of the solved density.
inline double phi(std::span<const double> x, const DensityModel& model) {
    if (!model.l1) throw std::logic_error("phi: model not solved; call solve_l1 first");
    return model.phi_at(x, *model.l1);
}

/// Gamma-limit functional S(rho) = C_e int eta rho^{1+sigma} + int xi rho.
/// Returns the +infinity sentinel for densities that are not normalized.
struct GammaFunctional {
    double c_e = 1.0;  // = F(1)
    double sigma = 1.0;
    Region region = Region::box({0.0}, 1.0);
    Expr eta = Expr::constant(1.0);
    Expr xi = Expr::constant(0.0);
};

inline double gamma_functional(const std::function<double(std::span<const double>)>& density,
                               const GammaFunctional& gf, std::size_t quad_samples = 65536,
                               std::uint64_t seed = 1) {
    auto integrate = [&](auto&& f) {
        if (gf.region.dim() == 1) {
            auto bb = gf.region.bounding_box();
            return simpson([&](double x) { return f(std::vector<double>{x}); }, bb.lo[0],
                           bb.hi[0]);
        }
        return mc_integral(gf.region, f, quad_samples, seed);
    };
    double mass = integrate([&](std::span<const double> x) { return density(x); });
    if (std::abs(mass - 1.0) > 0.01) return kInfiniteEnergy;
    const bool zero_xi = gf.xi.is_constant() && gf.xi.constant_value() == 0.0;
    double value = integrate([&](std::span<const double> x) {
        double rho = density(x);
        double weighted = gf.c_e * gf.eta.eval(x) * std::pow(rho, 1.0 + gf.sigma);
        return weighted + (zero_xi ? 0.0 : gf.xi.eval(x) * rho);
    });
    return value;
}

/// Empirical-vs-theoretical comparison: Kolmogorov-Smirnov distance against
/// the phi CDF in 1D, total-variation on a ceil(N^{1/d}/2)^d binning above.
struct DensityReport {
    double l1 = 0.0, f1 = 0.0, sigma = 0.0;
    std::string divergence_kind;  // "ks" or "tv"
    double divergence = 0.0;
    struct Bin {
        std::vector<double> lo, hi;
        std::size_t count = 0;
        double expected = 0.0;
    };
    std::vector<Bin> bins;
};

inline DensityReport compare_density(const PointConfig& config, const DensityModel& model,
                                     std::size_t quad_samples = 200000, std::uint64_t seed = 1) {
    if (!model.l1) throw std::logic_error("compare_density: model not solved");
    DensityReport report;
    report.l1 = *model.l1;
    report.f1 = model.f1;
    report.sigma = model.sigma;
    const std::size_t n = config.size();
    auto bb = model.region.bounding_box();

    if (model.region.dim() == 1) {
        report.divergence_kind = "ks";
        const int panels = 2048;
        auto cdf_grid = simpson_cumulative(
            [&](double x) {
                std::vector<double> p{x};
                return phi(p, model);
            },
            bb.lo[0], bb.hi[0], panels);
        double total = cdf_grid.back();
        auto cdf = [&](double x) {
            double t = (x - bb.lo[0]) / (bb.hi[0] - bb.lo[0]) * panels;
            int i = std::clamp(static_cast<int>(t), 0, panels - 1);
            double frac = t - i;
            return (cdf_grid[i] * (1 - frac) + cdf_grid[i + 1] * frac) / total;
        };
        std::vector<double> xs(config.coords());
        std::sort(xs.begin(), xs.end());
        double ks = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            double F = cdf(xs[i]);
            ks = std::max(ks, std::abs(F - static_cast<double>(i) / n));
            ks = std::max(ks, std::abs(F - static_cast<double>(i + 1) / n));
        }
        report.divergence = ks;

        // 16-bin histogram for the report
        const int B = 16;
        report.bins.resize(B);
        for (int b = 0; b < B; ++b) {
            double lo = bb.lo[0] + (bb.hi[0] - bb.lo[0]) * b / B;
            double hi = bb.lo[0] + (bb.hi[0] - bb.lo[0]) * (b + 1) / B;
            report.bins[b].lo = {lo};
            report.bins[b].hi = {hi};
            report.bins[b].expected = cdf(hi) - cdf(lo);
        }
        for (double x : xs) {
            int b = std::clamp(static_cast<int>((x - bb.lo[0]) / (bb.hi[0] - bb.lo[0]) * B), 0,
                               B - 1);
            report.bins[b].count++;
        }
        return report;
    }

    report.divergence_kind = "tv";
    const int d = model.region.dim();
    const int per_axis = std::max<int>(
        1, static_cast<int>(std::ceil(std::pow(static_cast<double>(n), 1.0 / d) / 2.0)));
    int nbins = 1;
    for (int m = 0; m < d; ++m) nbins *= per_axis;

    auto bin_of = [&](std::span<const double> x) {
        int idx = 0;
        for (int m = 0; m < d; ++m) {
            double t = (x[m] - bb.lo[m]) / (bb.hi[m] - bb.lo[m]);
            int b = std::clamp(static_cast<int>(t * per_axis), 0, per_axis - 1);
            idx = idx * per_axis + b;
        }
        return idx;
    };

    std::vector<double> expected(nbins, 0.0);
    PointConfig qs = model.region.sample_uniform(quad_samples, seed);
    double total = 0.0;
    for (std::size_t i = 0; i < qs.size(); ++i) {
        double v = phi(qs.point(i), model);
        expected[static_cast<std::size_t>(bin_of(qs.point(i)))] += v;
        total += v;
    }
    for (double& e : expected) e /= total;

    std::vector<std::size_t> counts(nbins, 0);
    for (std::size_t i = 0; i < n; ++i) counts[static_cast<std::size_t>(bin_of(config.point(i)))]++;

    double tv = 0.0;
    for (int b = 0; b < nbins; ++b)
        tv += std::abs(static_cast<double>(counts[b]) / n - expected[b]);
    report.divergence = tv / 2;

    report.bins.resize(nbins);
    for (int b = 0; b < nbins; ++b) {
        report.bins[b].count = counts[b];
        report.bins[b].expected = expected[b];
        int rem = b;
        report.bins[b].lo.resize(d);
        report.bins[b].hi.resize(d);
        for (int m = d - 1; m >= 0; --m) {
            int axis_bin = rem % per_axis;
            rem /= per_axis;
            report.bins[b].lo[m] = bb.lo[m] + (bb.hi[m] - bb.lo[m]) * axis_bin / per_axis;
            report.bins[b].hi[m] = bb.lo[m] + (bb.hi[m] - bb.lo[m]) * (axis_bin + 1) / per_axis;
        }
    }
    return report;
}

}  // namespace srint
