#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "srint/density.hpp"
#include "srint/optimize.hpp"
#include "srint/quantize.hpp"

namespace srint {

/// Least-squares fit of log|E| against log N. exponent estimates the rate
/// exponent 1+sigma; f1_estimate averages |E|/N^{1+sigma} over the largest
/// half of the N-grid, using the theory exponent when supplied and the
/// fitted one otherwise.
struct AsymptoticsFit {
    double exponent = 0.0;
    double f1_estimate = 0.0;
    std::optional<double> theory_exponent;
    std::vector<double> residuals;
    std::vector<double> n_grid;
};

inline AsymptoticsFit fit_rate(std::span<const std::pair<double, double>> series,
                               std::optional<double> theory_exponent = {}) {
    if (series.size() < 4) throw std::invalid_argument("fit_rate: need at least 4 points");
    bool all_pos = true, all_neg = true;
    for (auto [n, e] : series) {
        if (!(n > 0)) throw std::invalid_argument("fit_rate: N must be positive");
        all_pos &= e > 0;
        all_neg &= e < 0;
    }
    if (!all_pos && !all_neg)
        throw std::invalid_argument("fit_rate: energies must have one strict sign");
    for (std::size_t i = 1; i < series.size(); ++i)
        if (!(series[i].first > series[i - 1].first))
            throw std::invalid_argument("fit_rate: N grid must be strictly increasing");

    const std::size_t m = series.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [n, e] : series) {
        double x = std::log(n), y = std::log(std::abs(e));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    AsymptoticsFit fit;
    fit.theory_exponent = theory_exponent;
    fit.exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    double intercept = (sy - fit.exponent * sx) / m;
    for (auto [n, e] : series) {
        fit.residuals.push_back(std::log(std::abs(e)) - (intercept + fit.exponent * std::log(n)));
        fit.n_grid.push_back(n);
    }
    double expo = theory_exponent.value_or(fit.exponent);
    std::size_t half = m / 2;
    double acc = 0;
    for (std::size_t i = half; i < m; ++i)
        acc += std::abs(series[i].second) / std::pow(series[i].first, expo);
    fit.f1_estimate = acc / static_cast<double>(m - half);
    return fit;
}

/// Minimal k-NN Riesz energies over an N grid (multi-start minimizer, best
/// energy kept per N).
struct RieszSeriesParams {
    Region region = Region::circle();
    RieszSpec spec;
    OptimizeOptions opts;
};

inline std::vector<std::pair<double, double>> riesz_energy_series(
    const RieszSeriesParams& params, std::span<const int> n_grid) {
    std::vector<std::pair<double, double>> out;
    for (int n : n_grid) {
        PointConfig start = params.region.sample_uniform(n, mix_seed(params.opts.seed, 1000 + n));
        OptResult res = minimize(riesz_objective(params.spec, params.region), start, params.region, params.opts);
        out.push_back({static_cast<double>(n), res.energy});
    }
    return out;
}

/// Lloyd-converged quantization energies over an N grid.
struct QuantSeriesParams {
    Region region = Region::box({0.0, 0.0}, 1.0);
    QuantSpec spec;
    int max_steps = 200;
    double tol = 1e-9;  // relative energy improvement per step
    int restarts = 1;
    std::uint64_t seed = 0;
};

inline double lloyd_converge(PointConfig& sites, const Region& region, const QuantSpec& spec,
                             int max_steps, double tol) {
    double prev = quant_energy(sites, region, spec);
    for (int it = 0; it < max_steps; ++it) {
        PointConfig next = lloyd_step(sites, region, spec);
        double e = quant_energy(next, region, spec);
        if (e > prev) break;  // empirical objective exhausted
        sites = std::move(next);
        if ((prev - e) <= tol * std::abs(prev)) {
            prev = e;
            break;
        }
        prev = e;
    }
    return prev;
}

inline std::vector<std::pair<double, double>> quant_energy_series(
    const QuantSeriesParams& params, std::span<const int> n_grid) {
    std::vector<std::pair<double, double>> out;
    for (int n : n_grid) {
        double best = std::numeric_limits<double>::infinity();
        PointConfig best_sites(params.region.dim());
        for (int r = 0; r < params.restarts; ++r) {
            PointConfig sites =
                params.region.sample_uniform(n, mix_seed(params.seed, 2000 + 31 * n + r));
            double e = lloyd_converge(sites, params.region, params.spec, params.max_steps,
                                      params.tol);
            if (e < best) {
                best = e;
                best_sites = sites;
            }
        }
        out.push_back({static_cast<double>(n), best});
    }
    return out;
}

/// Short-range split probe: optimize on the union of two separated regions,
/// split the configuration, and compare the sum of part energies with the
/// whole. The ratio tends to 1; part_fraction records N_1/N.
struct SplitProbeParams {
    DensityFamily family = DensityFamily::riesz;
    RieszSpec riesz_spec;
    OptimizeOptions opts;     // riesz family
    QuantSpec quant_spec;     // quantizer family
    int lloyd_steps = 100;
    int lloyd_restarts = 1;
    std::uint64_t seed = 0;
};

struct SplitProbeResult {
    std::vector<double> n;
    std::vector<double> ratio;
    std::vector<double> part_fraction;
};

inline SplitProbeResult shortrange_split_probe(const Region& region_a, const Region& region_b,
                                               const SplitProbeParams& params,
                                               std::span<const int> n_grid) {
    if (region_a.kind() != RegionKind::box || region_b.kind() != RegionKind::box)
        throw std::invalid_argument("split_probe: regions must be boxes");
    // positive separation gap required
    {
        auto ba = region_a.bounding_box(), bb = region_b.bounding_box();
        double gap2 = 0.0;
        for (int m = 0; m < region_a.dim(); ++m) {
            double g = std::max({0.0, ba.lo[m] - bb.hi[m], bb.lo[m] - ba.hi[m]});
            gap2 += g * g;
        }
        if (!(gap2 > 0)) throw std::invalid_argument("split_probe: regions must be separated");
    }
    Region whole = Region::box_union({region_a, region_b});

    SplitProbeResult out;
    for (int n : n_grid) {
        PointConfig omega(whole.dim());
        double whole_energy = 0.0;
        if (params.family == DensityFamily::riesz) {
            PointConfig start = whole.sample_uniform(n, mix_seed(params.seed, 13 * n));
            OptResult res =
                minimize(riesz_objective(params.riesz_spec, whole), start, whole, params.opts);
            omega = std::move(res.config);
            whole_energy = res.energy;
        } else {
            double best = std::numeric_limits<double>::infinity();
            for (int r = 0; r < params.lloyd_restarts; ++r) {
                PointConfig sites = whole.sample_uniform(n, mix_seed(params.seed, 13 * n + r));
                double e = lloyd_converge(sites, whole, params.quant_spec, params.lloyd_steps,
                                          1e-9);
                if (e < best) {
                    best = e;
                    omega = sites;
                }
            }
            whole_energy = best;
        }

        PointConfig part_a(whole.dim()), part_b(whole.dim());
        for (std::size_t i = 0; i < omega.size(); ++i)
            (region_a.contains(omega.point(i)) ? part_a : part_b).push_back(omega.point(i));

        double parts_energy;
        if (params.family == DensityFamily::riesz) {
            if (static_cast<int>(part_a.size()) <= params.riesz_spec.k ||
                static_cast<int>(part_b.size()) <= params.riesz_spec.k)
                throw std::runtime_error("split_probe: degenerate split");
            parts_energy =
                energy_knn(part_a, params.riesz_spec, NeighborIndex::build(part_a)) +
                energy_knn(part_b, params.riesz_spec, NeighborIndex::build(part_b));
        } else {
            if (part_a.size() == 0 || part_b.size() == 0)
                throw std::runtime_error("split_probe: degenerate split");
            parts_energy = quant_energy(part_a, region_a, params.quant_spec) +
                           quant_energy(part_b, region_b, params.quant_spec);
        }
        out.n.push_back(n);
        out.ratio.push_back(parts_energy / whole_energy);
        out.part_fraction.push_back(static_cast<double>(part_a.size()) / omega.size());
    }
    return out;
}

}  // namespace srint
