#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "srint/neighbor_index.hpp"
#include "srint/region.hpp"
#include "srint/riesz.hpp"

namespace srint {

enum class OptMode { minimize, maximize };

struct OptimizeOptions {
    OptMode mode = OptMode::minimize;
    int max_iters = 2000;
    double step0 = 0.0;       // 0 => 0.1 * N^{-1/d} * diam(A)
    double backtrack = 0.5;
    int max_halvings = 30;
    double armijo_c = 1e-4;
    double tol_grad = 0.0;    // infinity-norm threshold; 0 disables
    double tol_energy = 1e-12;  // relative improvement threshold
    int restarts = 1;
    std::uint64_t seed = 0;

    void validate() const {
        if (max_iters < 1 || max_halvings < 1 || restarts < 1)
            throw std::invalid_argument("optimize: counts must be >= 1");
        if (!(backtrack > 0 && backtrack < 1))
            throw std::invalid_argument("optimize: backtrack factor must be in (0,1)");
        if (tol_grad < 0 || tol_energy < 0 || step0 < 0)
            throw std::invalid_argument("optimize: tolerances must be >= 0");
    }
};

/// Energy handle driven by the optimizer. value() is the true (piecewise
/// smooth) objective; value_and_grad() additionally returns the gradient
/// convention of the family (fixed neighbor graph for the truncated Riesz
/// energy, repulsive spring forces for the mesh functional).
///
/// auxiliary_directions, when set, proposes extra descent directions (in
/// gradient orientation: the step is x - t * dir). They are only ever taken
/// when the Armijo test on the true energy accepts them; used to hop over
/// the abundant local minima of the k = 1 nearest-neighbor landscape.
struct Objective {
    std::function<double(const PointConfig&)> value;
    std::function<std::pair<double, std::vector<double>>(const PointConfig&)> value_and_grad;
    std::function<std::vector<std::vector<double>>(const PointConfig&)> auxiliary_directions;
};

struct TraceRow {
    int iter;
    double energy;
    double grad_norm;
    double step;
};

struct OptResult {
    PointConfig config;
    double energy = 0.0;
    std::string termination;  // grad-tol | energy-tol | max-iters
    std::vector<TraceRow> trace;
    int restart = 0;
};

namespace detail {

inline void project_all(PointConfig& config, const Region& region) {
    for (std::size_t i = 0; i < config.size(); ++i) {
        auto y = region.project(config.point(i));
        auto p = config.point(i);
        std::copy(y.begin(), y.end(), p.begin());
    }
}

inline OptResult descend(const Objective& objective, PointConfig x, const Region& region,
                         const OptimizeOptions& opts) {
    const double sgn = opts.mode == OptMode::minimize ? 1.0 : -1.0;
    const std::size_t n = x.size();
    const int dim = x.dim();

    project_all(x, region);
    auto [energy, grad] = objective.value_and_grad(x);
    if (std::isinf(energy)) throw std::runtime_error("optimize: stuck at singularity");

    double step = opts.step0 > 0
                      ? opts.step0
                      : 0.1 * std::pow(static_cast<double>(n), -1.0 / region.intrinsic_dim()) *
                            region.diameter();

    OptResult result;
    result.termination = "max-iters";
    result.trace.push_back({0, energy, 0.0, 0.0});

    PointConfig trial = x;
    std::vector<double> direction;

    // Backtracking line search along `dir` scaled by `lambda` (the gradient
    // path normalizes by the infinity norm, so t is a displacement length).
    // Accept on improvement by at least (c/t) * |x' - x|^2; the accepted
    // configuration is left in `trial`.
    auto line_search = [&](const std::vector<double>& dir, double lambda, double t0,
                           double& t_out, double& e_out) {
        double t = t0;
        for (int h = 0; h <= opts.max_halvings; ++h, t *= opts.backtrack) {
            trial.coords() = x.coords();
            for (std::size_t i = 0; i < n * static_cast<std::size_t>(dim); ++i)
                trial.coords()[i] -= sgn * t * lambda * dir[i];
            project_all(trial, region);
            double moved2 = 0.0;
            for (std::size_t i = 0; i < n * static_cast<std::size_t>(dim); ++i)
                moved2 += sq(trial.coords()[i] - x.coords()[i]);
            if (moved2 == 0.0) continue;
            double e = objective.value(trial);
            if (std::isfinite(e) && sgn * e <= sgn * energy - (opts.armijo_c / t) * moved2) {
                t_out = t;
                e_out = e;
                return true;
            }
        }
        return false;
    };

    auto grad_max = [&] {
        double gn = 0.0;
        for (double g : grad) gn = std::max(gn, std::abs(g));
        return gn;
    };

    // Auxiliary jump proposals (uniform re-spacings and the like). These hop
    // between basins of the piecewise-smooth landscape; the Armijo test
    // still guards every move.
    auto try_auxiliary = [&](double& t_out, double& e_out) {
        if (!objective.auxiliary_directions) return false;
        for (auto& dir : objective.auxiliary_directions(x))
            if (line_search(dir, 1.0, 1.0, t_out, e_out)) return true;
        return false;
    };

    // At neighbor-swap kinks the full gradient can point uphill for every
    // step size even though moving a subset of the points improves. Probe
    // single-point moves and retry along the restricted direction.
    auto try_restricted = [&](double& t_out, double& e_out) {
        double gn = grad_max();
        if (gn == 0.0) return false;
        for (double scale : {1.0, 1.0 / 32, 1.0 / 1024}) {
            direction.assign(grad.size(), 0.0);
            bool any = false;
            for (std::size_t p = 0; p < n; ++p) {
                trial.coords() = x.coords();
                for (int m = 0; m < dim; ++m)
                    trial.coords()[p * dim + m] -= sgn * step * scale * grad[p * dim + m] / gn;
                auto proj = region.project(trial.point(p));
                std::copy(proj.begin(), proj.end(), trial.point(p).begin());
                double e = objective.value(trial);
                if (std::isfinite(e) && sgn * e < sgn * energy) {
                    for (int m = 0; m < dim; ++m) direction[p * dim + m] = grad[p * dim + m];
                    any = true;
                }
            }
            if (any && line_search(direction, 1.0 / gn, step * scale * 2, t_out, e_out))
                return true;
        }
        return false;
    };

    // gradient_step = false leaves the gradient step memory alone (auxiliary
    // jumps live in absolute displacement units, not gradient units)
    auto apply_step = [&](int iter, double t, bool gradient_step) {
        x.coords() = trial.coords();
        if (gradient_step) step = t;
        std::tie(energy, grad) = objective.value_and_grad(x);
        result.trace.push_back({iter, energy, grad_max(), t});
    };

    for (int iter = 1; iter <= opts.max_iters; ++iter) {
        double gnorm = grad_max();
        if (opts.tol_grad > 0 && gnorm <= opts.tol_grad) {
            result.termination = "grad-tol";
            break;
        }

        double t = 0.0, new_energy = 0.0;
        double before = energy;
        if (gnorm > 0 &&
            line_search(grad, 1.0 / gnorm, iter == 1 ? step : 2.0 * step, t, new_energy)) {
            apply_step(iter, t, true);
            double rel = std::abs(before - new_energy) / std::max(std::abs(before), 1e-300);
            if (rel >= opts.tol_energy) continue;
            // progress has flattened out; a basin jump may still help
            if (try_auxiliary(t, new_energy) &&
                std::abs(energy - new_energy) / std::max(std::abs(energy), 1e-300) >=
                    opts.tol_energy) {
                apply_step(iter, t, false);
                continue;
            }
            result.termination = "energy-tol";
            break;
        }
        if (try_auxiliary(t, new_energy)) {
            apply_step(iter, t, false);
            continue;
        }
        if (try_restricted(t, new_energy)) {
            apply_step(iter, t, true);
            continue;
        }
        result.termination = "energy-tol";
        break;
    }

    result.config = std::move(x);
    result.energy = energy;
    return result;
}

}  // namespace detail

/// Projected first-order descent (or ascent, in maximize mode) with Armijo
/// backtracking. Every accepted step improves the energy in the mode
/// direction and keeps all points inside A. Restarts beyond the first draw
/// fresh uniform starts from the region; the best final energy wins, ties to
/// the earliest restart.
inline OptResult minimize(const Objective& objective, const PointConfig& start,
                          const Region& region, const OptimizeOptions& opts) {
    opts.validate();
    const double sgn = opts.mode == OptMode::minimize ? 1.0 : -1.0;
    std::optional<OptResult> best;
    std::string first_error;
    for (int r = 0; r < opts.restarts; ++r) {
        PointConfig x0 = r == 0 ? start : region.sample_uniform(start.size(), mix_seed(opts.seed, r));
        x0.set_metric(region.metric());
        try {
            OptResult res = detail::descend(objective, std::move(x0), region, opts);
            res.restart = r;
            if (!best || sgn * res.energy < sgn * best->energy) best = std::move(res);
        } catch (const std::runtime_error& e) {
            if (first_error.empty()) first_error = e.what();
        }
    }
    if (!best) throw std::runtime_error(first_error.empty() ? "optimize: no restart succeeded"
                                                            : first_error);
    return *best;
}

namespace detail {

/// Uniform re-spacing proposals for 1D regions: map the sorted points onto
/// equally spaced targets (anchored at the first point on the circle; with
/// and without the endpoints on intervals and unions, split by measure).
/// Returned in gradient orientation, dir = x - target.
inline std::vector<std::vector<double>> respacing_directions(const PointConfig& config,
                                                             const Region& region) {
    const std::size_t n = config.size();
    std::vector<int> rank(n);
    std::iota(rank.begin(), rank.end(), 0);
    std::sort(rank.begin(), rank.end(), [&](int a, int b) {
        return config.point(a)[0] < config.point(b)[0] ||
               (config.point(a)[0] == config.point(b)[0] && a < b);
    });

    std::vector<std::vector<double>> dirs;
    auto push_targets = [&](const std::vector<double>& targets) {
        std::vector<double> dir(n, 0.0);
        for (std::size_t r = 0; r < n; ++r) {
            double d = config.point(rank[r])[0] - targets[r];
            if (region.kind() == RegionKind::circle_periodic) d -= std::floor(d + 0.5);
            dir[static_cast<std::size_t>(rank[r])] = d;
        }
        dirs.push_back(std::move(dir));
    };

    std::vector<double> targets(n);
    if (region.kind() == RegionKind::circle_periodic) {
        double anchor = config.point(rank[0])[0];
        for (std::size_t r = 0; r < n; ++r) {
            double t = anchor + static_cast<double>(r) / n;
            targets[r] = t - std::floor(t);
        }
        push_targets(targets);
    } else if (region.kind() == RegionKind::box) {
        double a = region.corner()[0], len = region.sides()[0];
        for (std::size_t r = 0; r < n; ++r) targets[r] = a + (r + 0.5) * len / n;
        push_targets(targets);
        if (n >= 2) {
            for (std::size_t r = 0; r < n; ++r)
                targets[r] = a + static_cast<double>(r) * len / (n - 1);
            push_targets(targets);
        }
    } else if (region.kind() == RegionKind::box_union) {
        std::vector<const Region*> members;
        for (const Region& m : region.members()) members.push_back(&m);
        std::sort(members.begin(), members.end(),
                  [](const Region* a, const Region* b) { return a->corner()[0] < b->corner()[0]; });
        double total = region.measure();
        // walk equal-mass midpoints through the members in spatial order
        std::size_t r = 0;
        double consumed = 0.0;
        for (const Region* m : members) {
            double len = m->sides()[0];
            while (r < n) {
                double s = (r + 0.5) * total / n;
                if (s > consumed + len) break;
                targets[r++] = m->corner()[0] + (s - consumed);
            }
            consumed += len;
        }
        while (r < n) targets[r++] = members.back()->corner()[0] + members.back()->sides()[0];
        push_targets(targets);
    }
    return dirs;
}

}  // namespace detail

/// Objective handle for the k-NN truncated Riesz energy; the index is rebuilt
/// on every evaluation so the gradient is consistent with the current graph.
inline Objective riesz_objective(const RieszSpec& spec) {
    return Objective{
        [spec](const PointConfig& c) {
            NeighborIndex idx = NeighborIndex::build(c);
            return energy_knn(c, spec, idx);
        },
        [spec](const PointConfig& c) {
            NeighborIndex idx = NeighborIndex::build(c);
            double e = energy_knn(c, spec, idx);
            if (std::isinf(e)) return std::make_pair(e, std::vector<double>());
            return std::make_pair(e, gradient_knn(c, spec, idx));
        },
        nullptr};
}

/// Region-aware overload: in one dimension it adds the uniform re-spacing
/// fallback directions.
inline Objective riesz_objective(const RieszSpec& spec, const Region& region) {
    Objective obj = riesz_objective(spec);
    if (region.dim() == 1)
        obj.auxiliary_directions = [region](const PointConfig& c) {
            return detail::respacing_directions(c, region);
        };
    return obj;
}

}  // namespace srint
