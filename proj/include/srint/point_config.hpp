#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "srint/common.hpp"

namespace srint {

/// Distance convention of a configuration. circle_periodic wraps every
/// coordinate on [0,1) with distance min(|dx|, 1-|dx|); it is used for the
/// periodized unit interval (d = 1).
enum class Metric { euclidean, circle_periodic };

/// A multiset of N points in R^dim, stored as a flat row-major array.
/// Repeated points are allowed.
class PointConfig {
  public:
    PointConfig() = default;
    PointConfig(int dim, Metric metric = Metric::euclidean) : dim_(dim), metric_(metric) {
        if (dim < 1) throw std::invalid_argument("PointConfig: dim must be >= 1");
    }
    static PointConfig from_coords(int dim, std::vector<double> coords,
                                   Metric metric = Metric::euclidean) {
        PointConfig c(dim, metric);
        if (coords.empty() || coords.size() % static_cast<std::size_t>(dim) != 0)
            throw std::invalid_argument("PointConfig: coordinate count not a multiple of dim");
        c.coords_ = std::move(coords);
        c.validate();
        return c;
    }

    int dim() const { return dim_; }
    Metric metric() const { return metric_; }
    void set_metric(Metric m) { metric_ = m; }
    std::size_t size() const { return coords_.size() / static_cast<std::size_t>(dim_); }

    std::span<const double> point(std::size_t i) const {
        return {coords_.data() + i * dim_, static_cast<std::size_t>(dim_)};
    }
    std::span<double> point(std::size_t i) {
        return {coords_.data() + i * dim_, static_cast<std::size_t>(dim_)};
    }
    void push_back(std::span<const double> x) {
        if (x.size() != static_cast<std::size_t>(dim_))
            throw std::invalid_argument("PointConfig: point has wrong dimension");
        coords_.insert(coords_.end(), x.begin(), x.end());
    }

    std::vector<double>& coords() { return coords_; }
    const std::vector<double>& coords() const { return coords_; }

    void validate() const {
        if (size() < 1) throw std::invalid_argument("PointConfig: N must be >= 1");
        for (double v : coords_)
            if (!std::isfinite(v)) throw std::invalid_argument("PointConfig: non-finite coordinate");
    }

    /// Componentwise displacement x_i - x_j under the configuration metric,
    /// written to out; returns the squared distance.
    double displacement(std::size_t i, std::size_t j, std::span<double> out) const {
        const double* a = coords_.data() + i * dim_;
        const double* b = coords_.data() + j * dim_;
        double r2 = 0.0;
        for (int m = 0; m < dim_; ++m) {
            double d = a[m] - b[m];
            if (metric_ == Metric::circle_periodic) d -= std::floor(d + 0.5);
            out[m] = d;
            r2 += d * d;
        }
        return r2;
    }

    double distance2(std::size_t i, std::size_t j) const {
        const double* a = coords_.data() + i * dim_;
        const double* b = coords_.data() + j * dim_;
        double r2 = 0.0;
        for (int m = 0; m < dim_; ++m) {
            double d = a[m] - b[m];
            if (metric_ == Metric::circle_periodic) d -= std::floor(d + 0.5);
            r2 += d * d;
        }
        return r2;
    }

    double distance2_to(std::size_t i, std::span<const double> y) const {
        const double* a = coords_.data() + i * dim_;
        double r2 = 0.0;
        for (int m = 0; m < dim_; ++m) {
            double d = a[m] - y[m];
            if (metric_ == Metric::circle_periodic) d -= std::floor(d + 0.5);
            r2 += d * d;
        }
        return r2;
    }

    /// Axis-aligned bounding box of the points.
    void bounds(std::vector<double>& lo, std::vector<double>& hi) const {
        lo.assign(dim_, std::numeric_limits<double>::infinity());
        hi.assign(dim_, -std::numeric_limits<double>::infinity());
        for (std::size_t i = 0; i < size(); ++i) {
            auto p = point(i);
            for (int m = 0; m < dim_; ++m) {
                lo[m] = std::min(lo[m], p[m]);
                hi[m] = std::max(hi[m], p[m]);
            }
        }
    }

    double bbox_diameter() const {
        std::vector<double> lo, hi;
        bounds(lo, hi);
        double d2 = 0.0;
        for (int m = 0; m < dim_; ++m) d2 += sq(hi[m] - lo[m]);
        return std::sqrt(d2);
    }

  private:
    int dim_ = 1;
    Metric metric_ = Metric::euclidean;
    std::vector<double> coords_;
};

/// CSV format: header "# dim=d n=N", then one row per point with 17
/// significant digits.
inline void write_points_csv(std::ostream& os, const PointConfig& config) {
    os << "# dim=" << config.dim() << " n=" << config.size() << "\n";
    char buf[64];
    for (std::size_t i = 0; i < config.size(); ++i) {
        auto p = config.point(i);
        for (int m = 0; m < config.dim(); ++m) {
            std::snprintf(buf, sizeof buf, "%.17g", p[m]);
            os << (m ? "," : "") << buf;
        }
        os << "\n";
    }
}

inline void write_points_csv(const std::string& path, const PointConfig& config) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    write_points_csv(os, config);
}

inline PointConfig read_points_csv(std::istream& is, Metric metric = Metric::euclidean) {
    std::string header;
    if (!std::getline(is, header)) throw std::runtime_error("points csv: empty file");
    int dim = 0;
    std::size_t n = 0;
    if (std::sscanf(header.c_str(), "# dim=%d n=%zu", &dim, &n) != 2)
        throw std::runtime_error("points csv: bad header");
    PointConfig config(dim, metric);
    std::string line;
    std::vector<double> row(dim);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        for (int m = 0; m < dim; ++m) {
            if (!std::getline(ss, cell, ',')) throw std::runtime_error("points csv: short row");
            row[m] = std::stod(cell);
        }
        config.push_back(row);
    }
    if (config.size() != n) throw std::runtime_error("points csv: row count mismatch");
    return config;
}

inline PointConfig read_points_csv(const std::string& path, Metric metric = Metric::euclidean) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    return read_points_csv(is, metric);
}

}  // namespace srint
