#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include "srint/point_config.hpp"
#include "srint/region.hpp"

namespace srint {

/// Scatter plot of a configuration as a standalone SVG: hand-written circles
/// on a viewBox, no plotting dependencies. 1D configurations sit on a line,
/// 3D ones (sphere surface) are drawn in x/y orthographic projection.
inline void write_scatter_svg(std::ostream& os, const PointConfig& config, const Region& region) {
    auto bb = region.bounding_box();
    double lox = bb.lo[0], hix = bb.hi[0];
    double loy = region.dim() >= 2 ? bb.lo[1] : -0.5;
    double hiy = region.dim() >= 2 ? bb.hi[1] : 0.5;
    double w = hix - lox, h = hiy - loy;
    double pad = 0.05 * std::max(w, h);
    double r = 0.008 * std::max(w, h);

    char buf[256];
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"%.6g %.6g %.6g %.6g\">\n",
                  lox - pad, loy - pad, w + 2 * pad, h + 2 * pad);
    os << buf;
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%.6g\" y=\"%.6g\" width=\"%.6g\" height=\"%.6g\" fill=\"white\"/>\n",
                  lox - pad, loy - pad, w + 2 * pad, h + 2 * pad);
    os << buf;
    for (std::size_t i = 0; i < config.size(); ++i) {
        auto p = config.point(i);
        double x = p[0];
        double y = config.dim() >= 2 ? p[1] : 0.0;
        // SVG's y axis points down; flip into plot coordinates
        std::snprintf(buf, sizeof buf, "<circle cx=\"%.6g\" cy=\"%.6g\" r=\"%.6g\"/>\n", x,
                      hiy + loy - y, r);
        os << buf;
    }
    os << "</svg>\n";
}

inline void write_scatter_svg(const std::string& path, const PointConfig& config,
                              const Region& region) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    write_scatter_svg(os, config, region);
}

}  // namespace srint
