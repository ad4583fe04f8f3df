#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "srint/point_config.hpp"
#include "srint/region.hpp"

namespace srint {

/// Delaunay triangulation of a planar configuration together with the data
/// the spring functional needs: symmetric adjacency T_i and the mean squared
/// Delaunay edge length m2 (average over directed edges).
struct MeshState {
    PointConfig config;
    std::vector<std::array<int, 3>> triangles;
    std::vector<std::vector<int>> adjacency;
    double m2 = 0.0;
    double pressure = 0.0;
};

namespace delaunay_detail {

// Geometric predicates: evaluated in double first and re-run in quad
// precision whenever the double result is within its rounding-error bound.
// Products of doubles are exact in __float128, so the fallback sign is
// trustworthy for every non-degenerate input.

inline double orient(const double* a, const double* b, const double* c) {
    double det = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    double mag = (std::abs(b[0] - a[0]) + std::abs(c[0] - a[0])) *
                 (std::abs(b[1] - a[1]) + std::abs(c[1] - a[1]));
    if (std::abs(det) > 1e-12 * mag) return det;
    __float128 bx = static_cast<__float128>(b[0]) - a[0];
    __float128 by = static_cast<__float128>(b[1]) - a[1];
    __float128 cx = static_cast<__float128>(c[0]) - a[0];
    __float128 cy = static_cast<__float128>(c[1]) - a[1];
    __float128 q = bx * cy - by * cx;
    return q > 0 ? 1e-30 : (q < 0 ? -1e-30 : 0.0);
}

inline double local_scale4(const double* a, const double* b, const double* c, const double* d) {
    double m = 0.0;
    for (const double* p : {a, b, c}) {
        m = std::max(m, (p[0] - d[0]) * (p[0] - d[0]) + (p[1] - d[1]) * (p[1] - d[1]));
    }
    return m * m;
}

// in-circle determinant, positive when d lies strictly inside the circumcircle
// of ccw triangle (a,b,c); magnitude scales like (local length)^4
inline double incircle(const double* a, const double* b, const double* c, const double* d) {
    double adx = a[0] - d[0], ady = a[1] - d[1];
    double bdx = b[0] - d[0], bdy = b[1] - d[1];
    double cdx = c[0] - d[0], cdy = c[1] - d[1];
    double ad2 = adx * adx + ady * ady;
    double bd2 = bdx * bdx + bdy * bdy;
    double cd2 = cdx * cdx + cdy * cdy;
    double det = adx * (bdy * cd2 - cdy * bd2) - ady * (bdx * cd2 - cdx * bd2) +
                 ad2 * (bdx * cdy - cdx * bdy);
    double s4 = local_scale4(a, b, c, d);
    if (std::abs(det) > 1e-13 * s4) return det;
    __float128 ax = static_cast<__float128>(a[0]) - d[0], ay = static_cast<__float128>(a[1]) - d[1];
    __float128 bx = static_cast<__float128>(b[0]) - d[0], by = static_cast<__float128>(b[1]) - d[1];
    __float128 cx = static_cast<__float128>(c[0]) - d[0], cy = static_cast<__float128>(c[1]) - d[1];
    __float128 a2 = ax * ax + ay * ay;
    __float128 b2 = bx * bx + by * by;
    __float128 c2 = cx * cx + cy * cy;
    __float128 q = ax * (by * c2 - cy * b2) - ay * (bx * c2 - cx * b2) + a2 * (bx * cy - cx * by);
    // correct sign, with a magnitude kept inside the cocircularity tolerance
    // band so the toleranced flip passes still classify these as ties
    if (q == 0) return 0.0;
    return q > 0 ? 1e-13 * s4 : -1e-13 * s4;
}

struct Triangle {
    std::array<int, 3> v;
    std::array<int, 3> nbr;  // nbr[i] is across the edge opposite v[i]
    bool alive = true;
};

/// Incremental Bowyer-Watson with walking point location. Points are inserted
/// in a spatially sorted order; the cavity uses the strict in-circle predicate
/// (tolerance 1e-10 relative to the local scale), so exactly cocircular blocks
/// are resolved later by the flip pass.
class Builder {
  public:
    static constexpr double kTol = 1e-10;

    Builder(const std::vector<double>& xy, int n) : xy_(xy), n_(n) {
        double lox = xy[0], hix = xy[0], loy = xy[1], hiy = xy[1];
        for (int i = 0; i < n; ++i) {
            lox = std::min(lox, xy[2 * i]);
            hix = std::max(hix, xy[2 * i]);
            loy = std::min(loy, xy[2 * i + 1]);
            hiy = std::max(hiy, xy[2 * i + 1]);
        }
        double cx = 0.5 * (lox + hix), cy = 0.5 * (loy + hiy);
        double m = 10.0 * std::max({hix - lox, hiy - loy, 1e-12});
        super_ = {cx - 3 * m, cy - m, cx + 3 * m, cy - m, cx, cy + 3 * m};
        tris_.push_back({{n, n + 1, n + 2}, {-1, -1, -1}, true});
    }

    const double* pt(int i) const { return i < n_ ? &xy_[2 * i] : &super_[2 * (i - n_)]; }

    void insert_all() {
        std::vector<int> order(n_);
        std::iota(order.begin(), order.end(), 0);
        // Morton-ish ordering for walk locality: sort by interleaved grid cell
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return morton(a) < morton(b) || (morton(a) == morton(b) && a < b);
        });
        for (int i : order) insert(i);
    }

    std::vector<std::array<int, 3>> finish() {
        std::vector<std::array<int, 3>> out;
        for (const Triangle& t : tris_) {
            if (!t.alive) continue;
            if (t.v[0] >= n_ || t.v[1] >= n_ || t.v[2] >= n_) continue;
            out.push_back(t.v);
        }
        return out;
    }

  private:
    const std::vector<double>& xy_;
    int n_;
    std::array<double, 6> super_{};
    std::vector<Triangle> tris_;
    int last_alive_ = 0;

    std::uint64_t morton(int i) const {
        auto spread = [](std::uint32_t x) {
            std::uint64_t v = x;
            v = (v | (v << 16)) & 0x0000FFFF0000FFFFULL;
            v = (v | (v << 8)) & 0x00FF00FF00FF00FFULL;
            v = (v | (v << 4)) & 0x0F0F0F0F0F0F0F0FULL;
            v = (v | (v << 2)) & 0x3333333333333333ULL;
            v = (v | (v << 1)) & 0x5555555555555555ULL;
            return v;
        };
        double sx = (xy_[2 * i] - super_[0]) / (super_[2] - super_[0] + 1e-300);
        double sy = (xy_[2 * i + 1] - super_[1]) / (super_[5] - super_[1] + 1e-300);
        auto q = [](double t) {
            return static_cast<std::uint32_t>(std::clamp(t, 0.0, 1.0) * 65535.0);
        };
        return spread(q(sx)) | (spread(q(sy)) << 1);
    }

    bool strictly_inside_circumcircle(const Triangle& t, int p) const {
        // No tolerance margin here: exactly cocircular points fall outside the
        // cavity and are renormalized by the flip passes afterwards.
        const double *a = pt(t.v[0]), *b = pt(t.v[1]), *c = pt(t.v[2]);
        double det = incircle(a, b, c, pt(p));
        if (orient(a, b, c) < 0) det = -det;
        return det > 0.0;
    }

    int locate(int p) {
        int cur = last_alive_;
        if (!tris_[cur].alive)
            for (cur = 0; cur < static_cast<int>(tris_.size()) && !tris_[cur].alive; ++cur) {}
        const double* q = pt(p);
        int steps = 0;
        const int cap = 4 * static_cast<int>(tris_.size()) + 64;
        for (;;) {
            if (++steps > cap) break;  // fall back to a scan below
            const Triangle& t = tris_[cur];
            bool moved = false;
            for (int e = 0; e < 3; ++e) {
                const double* a = pt(t.v[(e + 1) % 3]);
                const double* b = pt(t.v[(e + 2) % 3]);
                double side = orient(a, b, q);
                double inner = orient(a, b, pt(t.v[e]));
                if (side * inner < 0 && t.nbr[e] >= 0) {
                    cur = t.nbr[e];
                    moved = true;
                    break;
                }
            }
            if (!moved) return cur;
        }
        for (int i = 0; i < static_cast<int>(tris_.size()); ++i)
            if (tris_[i].alive && contains_tri(i, q)) return i;
        throw std::runtime_error("delaunay2d: point location failed");
    }

    bool contains_tri(int ti, const double* q) const {
        const Triangle& t = tris_[ti];
        double s1 = orient(pt(t.v[0]), pt(t.v[1]), q);
        double s2 = orient(pt(t.v[1]), pt(t.v[2]), q);
        double s3 = orient(pt(t.v[2]), pt(t.v[0]), q);
        return (s1 >= 0 && s2 >= 0 && s3 >= 0) || (s1 <= 0 && s2 <= 0 && s3 <= 0);
    }

    void insert(int p) {
        int seed = locate(p);
        // grow the cavity of triangles whose circumcircle strictly contains p
        std::vector<int> cavity;
        std::vector<int> stack{seed};
        std::vector<char> mark(tris_.size(), 0);
        mark[seed] = 1;
        while (!stack.empty()) {
            int ti = stack.back();
            stack.pop_back();
            if (!tris_[ti].alive) continue;
            if (ti != seed && !strictly_inside_circumcircle(tris_[ti], p)) continue;
            if (ti == seed && !strictly_inside_circumcircle(tris_[ti], p)) {
                // p may sit exactly on an edge/cocircular: still remove the
                // located triangle so insertion proceeds
            }
            cavity.push_back(ti);
            for (int e = 0; e < 3; ++e) {
                int nb = tris_[ti].nbr[e];
                if (nb >= 0 && !mark[nb]) {
                    mark[nb] = 1;
                    stack.push_back(nb);
                }
            }
        }
        for (int ti : cavity) tris_[ti].alive = false;

        // boundary edges of the cavity, oriented (u, v) with outside neighbor
        struct BEdge {
            int u, v, outside;
        };
        std::vector<BEdge> boundary;
        for (int ti : cavity) {
            const Triangle& t = tris_[ti];
            for (int e = 0; e < 3; ++e) {
                int nb = t.nbr[e];
                bool nb_dead = nb >= 0 && !tris_[nb].alive;
                if (nb >= 0 && nb_dead) continue;  // internal cavity edge
                boundary.push_back({t.v[(e + 1) % 3], t.v[(e + 2) % 3], nb});
            }
        }

        // fan of new triangles around p; link neighbors by shared edges
        std::map<std::pair<int, int>, int> open_edge;
        for (const BEdge& be : boundary) {
            Triangle nt;
            nt.v = {p, be.u, be.v};
            nt.nbr = {be.outside, -1, -1};
            int id = static_cast<int>(tris_.size());
            if (be.outside >= 0) {
                Triangle& out = tris_[be.outside];
                for (int e = 0; e < 3; ++e) {
                    int a = out.v[(e + 1) % 3], b = out.v[(e + 2) % 3];
                    if ((a == be.u && b == be.v) || (a == be.v && b == be.u)) out.nbr[e] = id;
                }
            }
            // edges (p, u) and (p, v) pair up with sibling fan triangles
            auto link = [&](int a, int b, int slot) {
                auto key = std::minmax(a, b);
                auto it = open_edge.find(key);
                if (it == open_edge.end()) {
                    open_edge[key] = id * 4 + slot;
                } else {
                    int other = it->second / 4, oslot = it->second % 4;
                    nt.nbr[slot] = other;
                    tris_[other].nbr[oslot] = id;
                    open_edge.erase(it);
                }
            };
            link(p, be.v, 1);  // edge opposite vertex u is (v, p)
            link(p, be.u, 2);  // edge opposite vertex v is (p, u)
            tris_.push_back(nt);
            last_alive_ = id;
        }
    }
};

}  // namespace delaunay_detail

inline double spring_energy_frozen(const PointConfig& config,
                                   const std::vector<std::vector<int>>& adjacency, double m2,
                                   double pressure);

namespace delaunay_detail {

struct EdgeKey {
    int a, b;
    bool operator<(const EdgeKey& o) const { return a < o.a || (a == o.a && b < o.b); }
};

inline EdgeKey make_edge(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

/// Lawson flip pass: repair any interior edge that strictly violates the
/// empty-circumcircle property (beyond the 1e-10 tolerance), so rounding
/// noise during incremental insertion cannot leave slivers behind.
inline void lawson_repair(const PointConfig& config, std::vector<std::array<int, 3>>& tris) {
    for (int pass = 0; pass < 200; ++pass) {
        std::map<EdgeKey, std::vector<int>> edge_tris;
        for (int ti = 0; ti < static_cast<int>(tris.size()); ++ti)
            for (int e = 0; e < 3; ++e)
                edge_tris[make_edge(tris[ti][e], tris[ti][(e + 1) % 3])].push_back(ti);
        std::vector<char> dirty(tris.size(), 0);
        bool flipped = false;
        for (const auto& [edge, owners] : edge_tris) {
            if (owners.size() != 2) continue;
            if (dirty[owners[0]] || dirty[owners[1]]) continue;
            auto opposite = [&](int ti) {
                for (int v : tris[ti])
                    if (v != edge.a && v != edge.b) return v;
                return -1;
            };
            int w = opposite(owners[0]), z = opposite(owners[1]);
            if (w < 0 || z < 0 || w == z) continue;
            const double* pa = config.point(edge.a).data();
            const double* pb = config.point(edge.b).data();
            const double* pw = config.point(w).data();
            const double* pz = config.point(z).data();
            double det = incircle(pa, pb, pw, pz);
            if (orient(pa, pb, pw) < 0) det = -det;
            if (det <= Builder::kTol * local_scale4(pa, pb, pw, pz)) continue;
            if (orient(pw, pz, pa) * orient(pw, pz, pb) >= 0) continue;  // not flippable
            tris[owners[0]] = {w, z, edge.a};
            tris[owners[1]] = {w, z, edge.b};
            dirty[owners[0]] = dirty[owners[1]] = 1;
            flipped = true;
        }
        if (!flipped) return;
    }
}

/// Flip pass for exactly cocircular quads: among the two diagonals pick the
/// one maximizing the spring energy of the whole mesh; exact ties go to the
/// lexicographically smaller diagonal. Realizes the upper-semicontinuous
/// envelope rule blockwise.
inline void normalize_cocircular(const PointConfig& config,
                                 std::vector<std::array<int, 3>>& tris, double pressure) {
    auto adjacency_of = [&](const std::vector<std::array<int, 3>>& ts) {
        std::vector<std::vector<int>> adj(config.size());
        auto add = [&](int a, int b) {
            auto& v = adj[static_cast<std::size_t>(a)];
            if (std::find(v.begin(), v.end(), b) == v.end()) v.push_back(b);
        };
        for (const auto& t : ts)
            for (int e = 0; e < 3; ++e) {
                add(t[e], t[(e + 1) % 3]);
                add(t[(e + 1) % 3], t[e]);
            }
        return adj;
    };
    auto m2_of = [&](const std::vector<std::vector<int>>& adj) {
        double sum = 0.0;
        std::size_t cnt = 0;
        for (std::size_t i = 0; i < adj.size(); ++i)
            for (int j : adj[i]) {
                sum += config.distance2(i, static_cast<std::size_t>(j));
                ++cnt;
            }
        return cnt ? sum / static_cast<double>(cnt) : 0.0;
    };

    for (int pass = 0; pass < 32; ++pass) {
        std::map<EdgeKey, std::vector<int>> edge_tris;
        for (int ti = 0; ti < static_cast<int>(tris.size()); ++ti)
            for (int e = 0; e < 3; ++e)
                edge_tris[make_edge(tris[ti][e], tris[ti][(e + 1) % 3])].push_back(ti);

        // apply non-conflicting flips in edge order within one pass
        std::vector<char> dirty(tris.size(), 0);
        bool flipped = false;
        for (const auto& [edge, owners] : edge_tris) {
            if (owners.size() != 2) continue;
            if (dirty[owners[0]] || dirty[owners[1]]) continue;
            auto opposite = [&](int ti) {
                for (int v : tris[ti])
                    if (v != edge.a && v != edge.b) return v;
                return -1;
            };
            int w = opposite(owners[0]), z = opposite(owners[1]);
            if (w < 0 || z < 0 || w == z) continue;
            const double* pa = config.point(edge.a).data();
            const double* pb = config.point(edge.b).data();
            const double* pw = config.point(w).data();
            const double* pz = config.point(z).data();
            double det = incircle(pa, pb, pw, pz);
            if (orient(pa, pb, pw) < 0) det = -det;
            double scale4 = local_scale4(pa, pb, pw, pz);
            if (std::abs(det) > Builder::kTol * scale4) continue;
            // flip must keep a valid triangulation: quad has to be convex
            if (orient(pw, pz, pa) * orient(pw, pz, pb) >= 0) continue;

            double cur_len2 = sq(pa[0] - pb[0]) + sq(pa[1] - pb[1]);
            double alt_len2 = sq(pw[0] - pz[0]) + sq(pw[1] - pz[1]);
            bool take_alt;
            if (std::abs(cur_len2 - alt_len2) <= Builder::kTol * std::sqrt(scale4)) {
                // equal diagonals leave the energy unchanged exactly
                take_alt = make_edge(w, z) < edge;
            } else {
                std::vector<std::array<int, 3>> alt = tris;
                alt[owners[0]] = {w, z, edge.a};
                alt[owners[1]] = {w, z, edge.b};
                auto cur_adj = adjacency_of(tris);
                auto alt_adj = adjacency_of(alt);
                double cur_e = spring_energy_frozen(config, cur_adj, m2_of(cur_adj), pressure);
                double alt_e = spring_energy_frozen(config, alt_adj, m2_of(alt_adj), pressure);
                double eps = 1e-12 * std::max(1.0, std::abs(cur_e));
                if (alt_e > cur_e + eps) take_alt = true;
                else if (alt_e < cur_e - eps) take_alt = false;
                else take_alt = make_edge(w, z) < edge;  // tie: smaller diagonal
            }
            if (take_alt) {
                tris[owners[0]] = {w, z, edge.a};
                tris[owners[1]] = {w, z, edge.b};
                dirty[owners[0]] = dirty[owners[1]] = 1;
                flipped = true;
            }
        }
        if (!flipped) return;
    }
}

}  // namespace delaunay_detail

/// Delaunay triangulation of a planar point set (Bowyer-Watson with a 10x
/// bounding-box super-triangle). Cocircular blocks are normalized by diagonal
/// flips toward the spring-energy maximizer, ties to the lexicographically
/// smaller edge. Throws on collinear input.
inline MeshState delaunay2d(const PointConfig& config, double pressure) {
    if (config.dim() != 2) throw std::invalid_argument("delaunay2d: requires d = 2");
    if (config.size() < 3) throw std::invalid_argument("delaunay2d: requires N >= 3");
    if (!(pressure > 0)) throw std::invalid_argument("delaunay2d: pressure must be > 0");
    const int n = static_cast<int>(config.size());

    delaunay_detail::Builder builder(config.coords(), n);
    builder.insert_all();
    std::vector<std::array<int, 3>> tris = builder.finish();
    if (tris.empty()) throw std::runtime_error("delaunay2d: degenerate (collinear) input");

    delaunay_detail::lawson_repair(config, tris);
    delaunay_detail::normalize_cocircular(config, tris, pressure);

    MeshState mesh;
    mesh.config = config;
    mesh.triangles = std::move(tris);
    mesh.pressure = pressure;
    mesh.adjacency.assign(config.size(), {});
    auto add = [&](int a, int b) {
        auto& v = mesh.adjacency[static_cast<std::size_t>(a)];
        if (std::find(v.begin(), v.end(), b) == v.end()) v.push_back(b);
    };
    for (const auto& t : mesh.triangles)
        for (int e = 0; e < 3; ++e) {
            add(t[e], t[(e + 1) % 3]);
            add(t[(e + 1) % 3], t[e]);
        }
    for (auto& v : mesh.adjacency) std::sort(v.begin(), v.end());

    double sum = 0.0;
    std::size_t cnt = 0;
    for (std::size_t i = 0; i < mesh.adjacency.size(); ++i)
        for (int j : mesh.adjacency[i]) {
            sum += config.distance2(i, static_cast<std::size_t>(j));
            ++cnt;
        }
    mesh.m2 = cnt ? sum / static_cast<double>(cnt) : 0.0;
    return mesh;
}

/// Spring functional over directed Delaunay edges:
///   sum_i sum_{j in T_i} (1/2) ((1+P) m2 - |x_j - x_i|^2)_+ .
/// Maximized (not minimized): its rate N^{1-2/d} is concave, and the zero
/// value is attained by fully collapsed configurations.
inline double spring_energy_frozen(const PointConfig& config,
                                   const std::vector<std::vector<int>>& adjacency, double m2,
                                   double pressure) {
    double rest = (1.0 + pressure) * m2;
    std::vector<double> terms;
    for (std::size_t i = 0; i < adjacency.size(); ++i)
        for (int j : adjacency[i]) {
            double c = rest - config.distance2(i, static_cast<std::size_t>(j));
            if (c > 0) terms.push_back(0.5 * c);
        }
    return pairwise_sum(terms);
}

inline double spring_energy(const MeshState& mesh) {
    return spring_energy_frozen(mesh.config, mesh.adjacency, mesh.m2, mesh.pressure);
}

/// Repulsive force field: the negative gradient of the spring energy with the
/// graph and m2 frozen. Each compressed directed edge (|x_j-x_i|^2 < (1+P)m2)
/// pushes its endpoints apart; uncompressed edges contribute nothing.
inline std::vector<double> spring_forces(const MeshState& mesh) {
    const PointConfig& c = mesh.config;
    std::vector<double> force(c.size() * 2, 0.0);
    double rest = (1.0 + mesh.pressure) * mesh.m2;
    for (std::size_t i = 0; i < mesh.adjacency.size(); ++i) {
        auto pi = c.point(i);
        for (int j : mesh.adjacency[i]) {
            auto pj = c.point(static_cast<std::size_t>(j));
            double dx = pi[0] - pj[0], dy = pi[1] - pj[1];
            if (dx * dx + dy * dy < rest) {
                force[2 * i] += 2.0 * dx;
                force[2 * i + 1] += 2.0 * dy;
            }
        }
    }
    return force;
}

struct RelaxResult {
    PointConfig config;
    std::vector<double> trace;  // spring energy, one entry per iteration + final
};

namespace delaunay_detail {

/// Boundary projection is not injective (a whole quadrant clamps onto a box
/// corner), so the Euler update can stack points exactly. Coincident points
/// carry no mutual force and would stay degenerate forever; separate clones
/// by a deterministic infinitesimal nudge toward the domain center.
inline void separate_duplicates(PointConfig& config, const Region& region) {
    const std::size_t n = config.size();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        auto pa = config.point(a), pb = config.point(b);
        if (pa[0] != pb[0]) return pa[0] < pb[0];
        if (pa[1] != pb[1]) return pa[1] < pb[1];
        return a < b;
    });
    auto bb = region.bounding_box();
    double cx = 0.5 * (bb.lo[0] + bb.hi[0]), cy = 0.5 * (bb.lo[1] + bb.hi[1]);
    double eps = 1e-9 * region.diameter();
    for (std::size_t r = 1; r < n; ++r) {
        auto prev = config.point(order[r - 1]);
        auto cur = config.point(order[r]);
        if (cur[0] == prev[0] && cur[1] == prev[1]) {
            double dx = cx - cur[0], dy = cy - cur[1];
            double len = std::hypot(dx, dy);
            if (len == 0.0) { dx = 1.0; dy = 0.0; len = 1.0; }
            std::vector<double> moved{cur[0] + eps * r * dx / len, cur[1] + eps * r * dy / len};
            auto y = region.project(moved);
            std::copy(y.begin(), y.end(), cur.begin());
        }
    }
}

}  // namespace delaunay_detail

/// Explicit Euler relaxation: re-triangulate, push along the repulsive
/// forces, project escapees back into A. Exactly coincident points are
/// separated by a deterministic infinitesimal nudge so the triangulation
/// stays nondegenerate.
inline RelaxResult relax(const PointConfig& start, const Region& region, double pressure,
                         double dt, int iters) {
    if (!(dt > 0)) throw std::invalid_argument("relax: dt must be > 0");
    if (start.dim() != 2) throw std::invalid_argument("relax: requires d = 2");
    RelaxResult out;
    out.config = start;
    for (std::size_t i = 0; i < out.config.size(); ++i) {
        auto y = region.project(out.config.point(i));
        std::copy(y.begin(), y.end(), out.config.point(i).begin());
    }
    delaunay_detail::separate_duplicates(out.config, region);
    for (int it = 0; it < iters; ++it) {
        MeshState mesh;
        try {
            mesh = delaunay2d(out.config, pressure);
        } catch (const std::runtime_error&) {
            throw std::runtime_error("relax: degenerate collapse");
        }
        out.trace.push_back(spring_energy(mesh));
        std::vector<double> f = spring_forces(mesh);
        for (std::size_t i = 0; i < out.config.size(); ++i) {
            auto p = out.config.point(i);
            p[0] += dt * f[2 * i];
            p[1] += dt * f[2 * i + 1];
            auto y = region.project(p);
            std::copy(y.begin(), y.end(), p.begin());
        }
        delaunay_detail::separate_duplicates(out.config, region);
    }
    MeshState final_mesh = delaunay2d(out.config, pressure);
    out.trace.push_back(spring_energy(final_mesh));
    return out;
}

/// OFF export: vertex count, face count, coordinates (z = 0), index triples.
inline void write_off(std::ostream& os, const MeshState& mesh) {
    os << "OFF\n" << mesh.config.size() << " " << mesh.triangles.size() << " 0\n";
    char buf[80];
    for (std::size_t i = 0; i < mesh.config.size(); ++i) {
        auto p = mesh.config.point(i);
        std::snprintf(buf, sizeof buf, "%.17g %.17g 0\n", p[0], p[1]);
        os << buf;
    }
    for (const auto& t : mesh.triangles) os << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
}

inline void write_off(const std::string& path, const MeshState& mesh) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    write_off(os, mesh);
}

}  // namespace srint
