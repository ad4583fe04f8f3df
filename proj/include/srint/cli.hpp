#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "srint/asymptotics.hpp"
#include "srint/density.hpp"
#include "srint/meshing.hpp"
#include "srint/svg.hpp"

namespace srint::cli {

using nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

/// Configuration problems exit with code 2; numerical failures with 1.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void reject_unknown(const json& obj, const std::string& where,
                           const std::set<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("unknown key '" + where + "/" + it.key() + "'");
}

inline const json& need(const json& obj, const std::string& where, const std::string& key) {
    if (!obj.contains(key)) throw ConfigError("missing key '" + where + "/" + key + "'");
    return obj.at(key);
}

inline double num_at(const json& obj, const std::string& where, const std::string& key) {
    const json& v = need(obj, where, key);
    if (!v.is_number()) throw ConfigError("'" + where + "/" + key + "' must be a number");
    return v.get<double>();
}

inline double num_or(const json& obj, const std::string& where, const std::string& key,
                     double fallback) {
    if (!obj.contains(key)) return fallback;
    return num_at(obj, where, key);
}

inline long long int_at(const json& obj, const std::string& where, const std::string& key) {
    const json& v = need(obj, where, key);
    if (!v.is_number_integer()) throw ConfigError("'" + where + "/" + key + "' must be an integer");
    return v.get<long long>();
}

inline long long int_or(const json& obj, const std::string& where, const std::string& key,
                        long long fallback) {
    if (!obj.contains(key)) return fallback;
    return int_at(obj, where, key);
}

inline std::string str_at(const json& obj, const std::string& where, const std::string& key) {
    const json& v = need(obj, where, key);
    if (!v.is_string()) throw ConfigError("'" + where + "/" + key + "' must be a string");
    return v.get<std::string>();
}

inline std::string str_or(const json& obj, const std::string& where, const std::string& key,
                          const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    return str_at(obj, where, key);
}

inline bool bool_or(const json& obj, const std::string& where, const std::string& key,
                    bool fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_boolean()) throw ConfigError("'" + where + "/" + key + "' must be a boolean");
    return v.get<bool>();
}

inline std::vector<double> vec_at(const json& obj, const std::string& where,
                                  const std::string& key) {
    const json& v = need(obj, where, key);
    if (!v.is_array()) throw ConfigError("'" + where + "/" + key + "' must be an array");
    std::vector<double> out;
    for (const json& e : v) {
        if (!e.is_number()) throw ConfigError("'" + where + "/" + key + "' must hold numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

inline Region parse_region(const json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError("'" + where + "' must be an object");
    std::string kind = str_at(j, where, "kind");
    if (kind == "box") {
        reject_unknown(j, where, {"kind", "dim", "corner", "side"});
        std::vector<double> corner = vec_at(j, where, "corner");
        if (j.contains("dim") && int_at(j, where, "dim") != static_cast<long long>(corner.size()))
            throw ConfigError("'" + where + "/dim' disagrees with the corner length");
        const json& side = need(j, where, "side");
        if (side.is_number()) return Region::box(corner, side.get<double>());
        return Region::box(corner, vec_at(j, where, "side"));
    }
    if (kind == "ball") {
        reject_unknown(j, where, {"kind", "dim", "center", "radius"});
        return Region::ball(vec_at(j, where, "center"), num_at(j, where, "radius"));
    }
    if (kind == "box-union") {
        reject_unknown(j, where, {"kind", "members"});
        const json& members = need(j, where, "members");
        if (!members.is_array()) throw ConfigError("'" + where + "/members' must be an array");
        std::vector<Region> parts;
        for (std::size_t i = 0; i < members.size(); ++i)
            parts.push_back(parse_region(members[i], where + "/members/" + std::to_string(i)));
        return Region::box_union(std::move(parts));
    }
    if (kind == "circle-periodic") {
        reject_unknown(j, where, {"kind", "dim"});
        return Region::circle();
    }
    if (kind == "sphere-surface") {
        reject_unknown(j, where, {"kind", "dim", "center", "radius"});
        return Region::sphere(vec_at(j, where, "center"), num_at(j, where, "radius"));
    }
    throw ConfigError("'" + where + "/kind' must be one of box, ball, box-union, "
                      "circle-periodic, sphere-surface");
}

inline Expr parse_expr_key(const json& cfg, const std::string& where, const std::string& key,
                           const char* fallback) {
    std::string text = str_or(cfg, where, key, fallback);
    try {
        return Expr::parse(text);
    } catch (const Expr::ParseError& e) {
        throw ConfigError("'" + where + "/" + key + "': " + e.what());
    }
}

inline QuadSpec parse_quad(const json& cfg, const std::string& where) {
    QuadSpec quad{QuadMode::grid, 65536, 1};
    if (!cfg.contains("quad")) return quad;
    const json& q = cfg.at("quad");
    if (!q.is_object()) throw ConfigError("'" + where + "/quad' must be an object");
    reject_unknown(q, where + "/quad", {"mode", "samples", "seed"});
    std::string mode = str_or(q, where + "/quad", "mode", "grid");
    if (mode == "monte-carlo") quad.mode = QuadMode::monte_carlo;
    else if (mode == "grid") quad.mode = QuadMode::grid;
    else if (mode == "exact-1d") quad.mode = QuadMode::exact_1d;
    else throw ConfigError("'" + where + "/quad/mode' must be monte-carlo, grid or exact-1d");
    quad.samples = static_cast<std::size_t>(int_or(q, where + "/quad", "samples", 65536));
    quad.seed = static_cast<std::uint64_t>(int_or(q, where + "/quad", "seed", 1));
    return quad;
}

inline std::vector<int> parse_n_grid(const json& cfg, const std::string& where,
                                     std::vector<int> fallback) {
    if (!cfg.contains("n_grid")) return fallback;
    const json& v = cfg.at("n_grid");
    if (!v.is_array()) throw ConfigError("'" + where + "/n_grid' must be an array");
    std::vector<int> out;
    for (const json& e : v) {
        if (!e.is_number_integer())
            throw ConfigError("'" + where + "/n_grid' must hold integers");
        out.push_back(e.get<int>());
    }
    return out;
}

inline OptimizeOptions parse_opts(const json& cfg, const std::string& where, int default_iters) {
    OptimizeOptions opts;
    opts.max_iters = static_cast<int>(int_or(cfg, where, "max_iters", default_iters));
    opts.tol_grad = num_or(cfg, where, "tol_grad", 0.0);
    opts.tol_energy = num_or(cfg, where, "tol_energy", 1e-13);
    opts.step0 = num_or(cfg, where, "step0", 0.0);
    opts.restarts = static_cast<int>(int_or(cfg, where, "restarts", 1));
    opts.seed = static_cast<std::uint64_t>(int_or(cfg, where, "seed", 0));
    return opts;
}

inline PointConfig initial_config(const Region& region, std::size_t n, std::uint64_t seed,
                                  const std::string& init, const std::string& where) {
    if (init == "random") return region.sample_uniform(n, seed);
    if (init == "uniform-spacing") {
        if (region.dim() != 1)
            throw ConfigError("'" + where + "/init' uniform-spacing requires a 1D region");
        auto bb = region.bounding_box();
        PointConfig c(1, region.metric());
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> x{bb.lo[0] + (i + 0.5) * (bb.hi[0] - bb.lo[0]) / n};
            c.push_back(region.project(x));
        }
        return c;
    }
    throw ConfigError("'" + where + "/init' must be random or uniform-spacing");
}

inline void write_opt_trace(const std::string& path, const std::vector<TraceRow>& trace) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << "iter,energy,grad_norm,step\n";
    char buf[160];
    for (const TraceRow& row : trace) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", row.iter, row.energy,
                      row.grad_norm, row.step);
        os << buf;
    }
}

inline void write_energy_trace(const std::string& path, const std::vector<double>& energies) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << "iter,energy\n";
    char buf[80];
    for (std::size_t i = 0; i < energies.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i, energies[i]);
        os << buf;
    }
}

inline json density_report_json(const DensityReport& report) {
    json bins = json::array();
    for (const auto& b : report.bins)
        bins.push_back({{"lo", b.lo}, {"hi", b.hi}, {"count", b.count}, {"expected", b.expected}});
    return json{{"l1", report.l1},
                {"f1", report.f1},
                {"sigma", report.sigma},
                {"divergence", {{report.divergence_kind, report.divergence}}},
                {"bins", bins}};
}

inline json fit_json(const AsymptoticsFit& fit) {
    json j{{"exponent", fit.exponent},
           {"f1_estimate", fit.f1_estimate},
           {"n_grid", fit.n_grid},
           {"residuals", fit.residuals}};
    if (fit.theory_exponent) j["theory_exponent"] = *fit.theory_exponent;
    return j;
}

struct OutputSink {
    std::filesystem::path dir;
    std::vector<std::string> names;

    explicit OutputSink(const std::string& out) : dir(out) {
        std::filesystem::create_directories(dir);
    }
    std::string path(const std::string& name) {
        names.push_back(name);
        return (dir / name).string();
    }
    void manifest(const std::string& command, const json& config) {
        json m{{"tool", "srint"},
               {"version", kVersion},
               {"command", command},
               {"threads", thread_count()},
               {"config", config},
               {"outputs", names}};
        std::ofstream os(dir / "manifest.json");
        os << m.dump(2) << "\n";
    }
};

inline void validate_positive_weight(const Expr& e, const Region& region,
                                     const std::string& where) {
    if (sampled_min(e.uses_y() ? e.with_y_as_x() : e, region) <= 0)
        throw ConfigError("'" + where + "' must be positive on the region");
}

inline void validate_nonnegative_field(const Expr& e, const Region& region,
                                       const std::string& where) {
    if (sampled_min(e, region) < 0)
        throw ConfigError("'" + where + "' must be nonnegative on the region");
}

// ---------------------------------------------------------------- commands

inline int run_riesz_min(const json& cfg, OutputSink& out) {
    reject_unknown(cfg, "", {"command", "region", "n", "s", "k", "weight", "field", "seed",
                             "restarts", "max_iters", "tol_grad", "tol_energy", "step0",
                             "emit_svg", "init"});
    Region region = parse_region(need(cfg, "", "region"), "region");
    RieszSpec spec;
    spec.s = num_at(cfg, "", "s");
    spec.k = static_cast<int>(int_at(cfg, "", "k"));
    spec.d = region.intrinsic_dim();
    spec.kappa = parse_expr_key(cfg, "", "weight", "1");
    spec.xi = parse_expr_key(cfg, "", "field", "0");
    spec.validate();
    validate_positive_weight(spec.kappa, region, "weight");
    validate_nonnegative_field(spec.xi, region, "field");

    std::size_t n = static_cast<std::size_t>(int_at(cfg, "", "n"));
    OptimizeOptions opts = parse_opts(cfg, "", 2000);
    PointConfig start = initial_config(region, n, mix_seed(opts.seed, 555),
                                       str_or(cfg, "", "init", "random"), "");
    OptResult res = minimize(riesz_objective(spec, region), start, region, opts);

    write_points_csv(out.path("points.csv"), res.config);
    write_opt_trace(out.path("trace.csv"), res.trace);
    if (bool_or(cfg, "", "emit_svg", false))
        write_scatter_svg(out.path("scatter.svg"), res.config, region);
    json report{{"energy", res.energy},
                {"termination", res.termination},
                {"restart", res.restart},
                {"iterations", res.trace.empty() ? 0 : res.trace.back().iter}};
    std::ofstream(out.path("report.json")) << report.dump(2) << "\n";
    return 0;
}

inline int run_quantize(const json& cfg, OutputSink& out) {
    reject_unknown(cfg, "", {"command", "region", "n", "p", "weight", "field", "quad", "iters",
                             "seed", "restarts", "emit_svg", "init"});
    Region region = parse_region(need(cfg, "", "region"), "region");
    QuantSpec spec;
    spec.p = num_at(cfg, "", "p");
    spec.eta = parse_expr_key(cfg, "", "weight", "1");
    spec.xi = parse_expr_key(cfg, "", "field", "0");
    spec.quad = parse_quad(cfg, "");
    spec.validate();
    validate_positive_weight(spec.eta, region, "weight");
    validate_nonnegative_field(spec.xi, region, "field");

    std::size_t n = static_cast<std::size_t>(int_at(cfg, "", "n"));
    int iters = static_cast<int>(int_or(cfg, "", "iters", 200));
    int restarts = static_cast<int>(int_or(cfg, "", "restarts", 1));
    std::uint64_t seed = static_cast<std::uint64_t>(int_or(cfg, "", "seed", 0));
    std::string init = str_or(cfg, "", "init", "random");

    double best_energy = std::numeric_limits<double>::infinity();
    PointConfig best(region.dim());
    std::vector<double> best_trace;
    for (int r = 0; r < restarts; ++r) {
        PointConfig sites = initial_config(region, n, mix_seed(seed, r), init, "");
        std::vector<double> trace{quant_energy(sites, region, spec)};
        for (int it = 0; it < iters; ++it) {
            PointConfig next = lloyd_step(sites, region, spec);
            double e = quant_energy(next, region, spec);
            if (e > trace.back()) break;
            sites = std::move(next);
            trace.push_back(e);
        }
        if (trace.back() < best_energy) {
            best_energy = trace.back();
            best = std::move(sites);
            best_trace = std::move(trace);
        }
    }

    write_points_csv(out.path("points.csv"), best);
    write_energy_trace(out.path("trace.csv"), best_trace);
    if (bool_or(cfg, "", "emit_svg", false))
        write_scatter_svg(out.path("scatter.svg"), best, region);
    QuantEnergyTerms terms = quant_energy_terms(best, region, spec);
    json report{{"energy", best_energy},
                {"quadrature_term", terms.main},
                {"field_term", terms.field},
                {"steps", best_trace.size() - 1}};
    std::ofstream(out.path("report.json")) << report.dump(2) << "\n";
    return 0;
}

inline int run_mesh_relax(const json& cfg, OutputSink& out) {
    reject_unknown(cfg, "", {"command", "region", "n", "pressure", "dt", "iters", "seed",
                             "emit_svg"});
    Region region = parse_region(need(cfg, "", "region"), "region");
    if (region.dim() != 2) throw ConfigError("'region' must be two-dimensional for mesh-relax");
    std::size_t n = static_cast<std::size_t>(int_at(cfg, "", "n"));
    double pressure = num_at(cfg, "", "pressure");
    double dt = num_at(cfg, "", "dt");
    int iters = static_cast<int>(int_at(cfg, "", "iters"));
    std::uint64_t seed = static_cast<std::uint64_t>(int_or(cfg, "", "seed", 0));

    PointConfig start = region.sample_uniform(n, mix_seed(seed, 777));
    RelaxResult res = relax(start, region, pressure, dt, iters);
    MeshState mesh = delaunay2d(res.config, pressure);

    write_points_csv(out.path("points.csv"), res.config);
    write_energy_trace(out.path("trace.csv"), res.trace);
    write_off(out.path("mesh.off"), mesh);
    if (bool_or(cfg, "", "emit_svg", false))
        write_scatter_svg(out.path("scatter.svg"), res.config, region);
    json report{{"energy", res.trace.back()},
                {"m2", mesh.m2},
                {"triangles", mesh.triangles.size()}};
    std::ofstream(out.path("report.json")) << report.dump(2) << "\n";
    return 0;
}

inline int run_estimate_constant(const json& cfg, OutputSink& out) {
    reject_unknown(cfg, "", {"command", "family", "region", "s", "k", "p", "weight", "field",
                             "quad", "n_grid", "seed", "restarts", "max_iters", "tol_energy",
                             "lloyd_steps"});
    std::string family = str_at(cfg, "", "family");
    Region region = parse_region(need(cfg, "", "region"), "region");
    std::vector<int> n_grid = parse_n_grid(cfg, "", {64, 96, 128, 192, 256, 384, 512});
    json report;

    if (family == "riesz") {
        RieszSeriesParams params;
        params.region = region;
        params.spec.s = num_at(cfg, "", "s");
        params.spec.k = static_cast<int>(int_at(cfg, "", "k"));
        params.spec.d = region.intrinsic_dim();
        params.spec.kappa = parse_expr_key(cfg, "", "weight", "1");
        params.spec.xi = parse_expr_key(cfg, "", "field", "0");
        params.spec.validate();
        params.opts = parse_opts(cfg, "", region.intrinsic_dim() == 1 ? 6000 : 1200);
        if (!cfg.contains("restarts")) params.opts.restarts = 5;
        auto series = riesz_energy_series(params, n_grid);
        double theory = 1.0 + params.spec.s / params.spec.d;
        AsymptoticsFit fit = fit_rate(series, theory);
        report = fit_json(fit);
        json energies = json::array();
        for (auto [n, e] : series) energies.push_back({{"n", n}, {"energy", e}});
        report["energies"] = energies;
        if (params.spec.d == 1)
            report["reference_constant"] = circle_constant(params.spec.s, params.spec.k);
    } else if (family == "quantizer") {
        QuantSeriesParams params;
        params.region = region;
        params.spec.p = num_at(cfg, "", "p");
        params.spec.eta = parse_expr_key(cfg, "", "weight", "1");
        params.spec.xi = parse_expr_key(cfg, "", "field", "0");
        params.spec.quad = parse_quad(cfg, "");
        params.spec.validate();
        params.max_steps = static_cast<int>(int_or(cfg, "", "lloyd_steps", 400));
        params.restarts = static_cast<int>(int_or(cfg, "", "restarts", 3));
        params.seed = static_cast<std::uint64_t>(int_or(cfg, "", "seed", 0));
        auto series = quant_energy_series(params, n_grid);
        double theory = -params.spec.p / region.intrinsic_dim();
        AsymptoticsFit fit = fit_rate(series, theory);
        report = fit_json(fit);
        json energies = json::array();
        for (auto [n, e] : series) energies.push_back({{"n", n}, {"energy", e}});
        report["energies"] = energies;
    } else {
        throw ConfigError("'family' must be riesz or quantizer");
    }
    std::ofstream(out.path("report.json")) << report.dump(2) << "\n";
    return 0;
}

inline int run_verify_density(const json& cfg, OutputSink& out) {
    reject_unknown(cfg, "", {"command", "family", "region", "n", "s", "k", "p", "f1", "weight",
                             "field", "quad", "quad_samples", "seed", "restarts", "max_iters",
                             "tol_energy", "iters", "emit_svg", "init"});
    std::string family = str_at(cfg, "", "family");
    Region region = parse_region(need(cfg, "", "region"), "region");
    std::size_t n = static_cast<std::size_t>(int_at(cfg, "", "n"));
    std::size_t quad_samples =
        static_cast<std::size_t>(int_or(cfg, "", "quad_samples", 200000));
    const int d = region.intrinsic_dim();

    PointConfig points(region.dim());
    DensityModel model = DensityModel::riesz(1, 1, 1, Expr::constant(1.0), Expr::constant(0.0),
                                             region);
    if (family == "riesz") {
        RieszSpec spec;
        spec.s = num_at(cfg, "", "s");
        spec.k = static_cast<int>(int_at(cfg, "", "k"));
        spec.d = d;
        spec.kappa = parse_expr_key(cfg, "", "weight", "1");
        spec.xi = parse_expr_key(cfg, "", "field", "0");
        spec.validate();
        validate_positive_weight(spec.kappa, region, "weight");
        OptimizeOptions opts = parse_opts(cfg, "", d == 1 ? 6000 : 1500);
        if (!cfg.contains("restarts")) opts.restarts = 5;
        PointConfig start = initial_config(region, n, mix_seed(opts.seed, 555),
                                           str_or(cfg, "", "init", "random"), "");
        OptResult res = minimize(riesz_objective(spec, region), start, region, opts);
        points = std::move(res.config);
        double f1 = num_or(cfg, "", "f1",
                           d == 1 ? circle_constant(spec.s, spec.k) : 1.0);
        model = DensityModel::riesz(spec.s, d, f1, spec.kappa.with_y_as_x(), spec.xi, region);
    } else if (family == "quantizer") {
        QuantSpec spec;
        spec.p = num_at(cfg, "", "p");
        spec.eta = parse_expr_key(cfg, "", "weight", "1");
        spec.xi = parse_expr_key(cfg, "", "field", "0");
        spec.quad = parse_quad(cfg, "");
        spec.validate();
        validate_positive_weight(spec.eta, region, "weight");
        int steps = static_cast<int>(int_or(cfg, "", "iters", 2000));
        std::uint64_t seed = static_cast<std::uint64_t>(int_or(cfg, "", "seed", 0));
        PointConfig sites = initial_config(region, n, mix_seed(seed, 555),
                                           str_or(cfg, "", "init", "random"), "");
        lloyd_converge(sites, region, spec, steps, 0.0);
        points = std::move(sites);
        // c_{p,1} on the unit interval: midpoint cells give 1/(2^p (p+1))
        double f1_default = d == 1 ? 1.0 / (std::pow(2.0, spec.p) * (spec.p + 1)) : 1.0;
        double f1 = num_or(cfg, "", "f1", f1_default);
        model = DensityModel::quantizer(spec.p, d, f1, spec.eta, spec.xi, region);
    } else {
        throw ConfigError("'family' must be riesz or quantizer");
    }

    solve_l1(model, quad_samples, 1);
    DensityReport report = compare_density(points, model, quad_samples, 1);
    write_points_csv(out.path("points.csv"), points);
    if (bool_or(cfg, "", "emit_svg", false))
        write_scatter_svg(out.path("scatter.svg"), points, region);
    std::ofstream(out.path("report.json")) << density_report_json(report).dump(2) << "\n";
    return 0;
}

inline int run_split_probe(const json& cfg, OutputSink& out) {
    reject_unknown(cfg, "", {"command", "family", "region_a", "region_b", "s", "k", "p", "quad",
                             "n_grid", "seed", "restarts", "max_iters", "tol_energy",
                             "lloyd_steps"});
    std::string family = str_at(cfg, "", "family");
    Region region_a = parse_region(need(cfg, "", "region_a"), "region_a");
    Region region_b = parse_region(need(cfg, "", "region_b"), "region_b");
    std::vector<int> n_grid = parse_n_grid(cfg, "", {64, 128, 256, 512});

    SplitProbeParams params;
    params.seed = static_cast<std::uint64_t>(int_or(cfg, "", "seed", 0));
    if (family == "riesz") {
        params.family = DensityFamily::riesz;
        params.riesz_spec.s = num_at(cfg, "", "s");
        params.riesz_spec.k = static_cast<int>(int_at(cfg, "", "k"));
        params.riesz_spec.d = region_a.intrinsic_dim();
        params.riesz_spec.validate();
        params.opts = parse_opts(cfg, "", region_a.intrinsic_dim() == 1 ? 6000 : 1200);
        if (!cfg.contains("restarts")) params.opts.restarts = 3;
    } else if (family == "quantizer") {
        params.family = DensityFamily::quantizer;
        params.quant_spec.p = num_at(cfg, "", "p");
        params.quant_spec.quad = parse_quad(cfg, "");
        params.quant_spec.validate();
        params.lloyd_steps = static_cast<int>(int_or(cfg, "", "lloyd_steps", 200));
        params.lloyd_restarts = static_cast<int>(int_or(cfg, "", "restarts", 3));
    } else {
        throw ConfigError("'family' must be riesz or quantizer");
    }

    SplitProbeResult result = shortrange_split_probe(region_a, region_b, params, n_grid);
    json report{{"n_grid", result.n},
                {"ratio", result.ratio},
                {"part_fraction", result.part_fraction}};
    std::ofstream(out.path("report.json")) << report.dump(2) << "\n";
    return 0;
}

}  // namespace detail

/// Batch front end. argv-style arguments without the program name:
///   srint <command> --config job.json [--out dir] [overrides...]
/// Exit codes: 0 success, 1 numerical failure, 2 configuration error.
inline int run(std::vector<std::string> args) {
    CLI::App app{"short-range interaction toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    std::string config_path, out_dir = ".";
    int threads = -1;
    // flag-form overrides; flags win over the JSON config
    double s = 0, p = 0, pressure = 0, dt = 0;
    long long n = 0, k = 0, iters = 0, seed = 0, restarts = 0, samples = 0, max_iters = 0;
    bool emit_svg = false;

    std::vector<CLI::App*> subs;
    for (const char* name : {"riesz-min", "quantize", "mesh-relax", "estimate-constant",
                             "verify-density", "split-probe"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path)->required();
        sub->add_option("--out", out_dir);
        sub->add_option("--threads", threads);
        sub->add_option("--n", n);
        sub->add_option("--s", s);
        sub->add_option("--k", k);
        sub->add_option("--p", p);
        sub->add_option("--pressure", pressure);
        sub->add_option("--dt", dt);
        sub->add_option("--iters", iters);
        sub->add_option("--max-iters", max_iters);
        sub->add_option("--seed", seed);
        sub->add_option("--restarts", restarts);
        sub->add_option("--samples", samples);
        sub->add_flag("--emit-svg", emit_svg);
        subs.push_back(sub);
    }

    std::vector<const char*> argv{"srint"};
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    const std::string command = sub->get_name();

    if (threads > 0) set_thread_count(threads);
    else if (const char* env = std::getenv("SRINT_THREADS"))
        set_thread_count(std::atoi(env));
    else
        set_thread_count(static_cast<int>(std::thread::hardware_concurrency()));

    try {
        json cfg;
        {
            std::ifstream is(config_path);
            if (!is) throw ConfigError("cannot open config file '" + config_path + "'");
            try {
                cfg = json::parse(is);
            } catch (const json::parse_error& e) {
                throw ConfigError(std::string("config is not valid JSON: ") + e.what());
            }
        }
        if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
        if (cfg.contains("command") && cfg.at("command") != command)
            throw ConfigError("'command' in the config disagrees with the subcommand");
        cfg["command"] = command;

        // apply explicit flag overrides
        auto count = [&](const std::string& f) { return sub->count("--" + f) > 0; };
        if (count("n")) cfg["n"] = n;
        if (count("s")) cfg["s"] = s;
        if (count("k")) cfg["k"] = k;
        if (count("p")) cfg["p"] = p;
        if (count("pressure")) cfg["pressure"] = pressure;
        if (count("dt")) cfg["dt"] = dt;
        if (count("iters")) cfg["iters"] = iters;
        if (count("max-iters")) cfg["max_iters"] = max_iters;
        if (count("seed")) cfg["seed"] = seed;
        if (count("restarts")) cfg["restarts"] = restarts;
        if (count("samples")) cfg["quad"]["samples"] = samples;
        if (count("emit-svg")) cfg["emit_svg"] = true;

        detail::OutputSink out(out_dir);
        int rc;
        if (command == "riesz-min") rc = detail::run_riesz_min(cfg, out);
        else if (command == "quantize") rc = detail::run_quantize(cfg, out);
        else if (command == "mesh-relax") rc = detail::run_mesh_relax(cfg, out);
        else if (command == "estimate-constant") rc = detail::run_estimate_constant(cfg, out);
        else if (command == "verify-density") rc = detail::run_verify_density(cfg, out);
        else rc = detail::run_split_probe(cfg, out);
        out.manifest(command, cfg);
        return rc;
    } catch (const ConfigError& e) {
        std::cerr << "srint: config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        // precondition violations on config-derived values (n <= k, bad
        // exponents, ...) are configuration problems, not numerical ones
        std::cerr << "srint: config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "srint: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace srint::cli
