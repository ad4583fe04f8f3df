#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "srint/point_config.hpp"
#include "srint/region.hpp"

namespace srint {

/// Immutable k-nearest-neighbor index over a snapshot of a PointConfig.
/// Queries return exactly min(k, N-1) indices ordered by nondecreasing
/// distance, never the query index itself; exact distance ties are broken by
/// the smaller point index. Optimizers rebuild the index every iteration
/// rather than mutating it.
///
/// Backends: a sorted ring for the periodic interval (d = 1), plain brute
/// force for N <= 64, and a kd-tree otherwise.
class NeighborIndex {
  public:
    static NeighborIndex build(const PointConfig& config) {
        if (config.size() < 2) throw std::invalid_argument("build_index: N must be >= 2");
        NeighborIndex idx;
        idx.points_ = config;
        if (config.metric() == Metric::circle_periodic && config.dim() == 1) {
            idx.mode_ = Mode::ring;
            idx.build_ring();
        } else if (config.size() <= 64 || config.metric() != Metric::euclidean) {
            idx.mode_ = Mode::brute;
        } else {
            idx.mode_ = Mode::kdtree;
            idx.build_tree();
        }
        return idx;
    }

    const PointConfig& snapshot() const { return points_; }
    int k_max() const { return static_cast<int>(points_.size()) - 1; }

    std::vector<int> knn(int i, int k) const {
        const int n = static_cast<int>(points_.size());
        if (i < 0 || i >= n) throw std::out_of_range("knn: point index");
        if (k < 1 || k >= n) throw std::invalid_argument("knn: require 1 <= k <= N-1");
        switch (mode_) {
            case Mode::ring: return knn_ring(i, k);
            case Mode::brute: return knn_brute(i, k);
            case Mode::kdtree: return knn_tree(i, k);
        }
        return {};
    }

    /// Index of the nearest point to an arbitrary query location (ties to the
    /// smaller index). The query is not excluded; used for site assignment
    /// and covering estimates.
    int nearest(std::span<const double> y) const {
        return nearest_pair(y).second;
    }
    double nearest_distance(std::span<const double> y) const {
        return std::sqrt(nearest_pair(y).first);
    }

  private:
    enum class Mode { brute, ring, kdtree };

    struct Candidate {
        double d2;
        int idx;
        bool operator<(const Candidate& o) const {
            return d2 < o.d2 || (d2 == o.d2 && idx < o.idx);
        }
    };

    PointConfig points_;
    Mode mode_ = Mode::brute;

    // ring backend: positions sorted, rank per original index
    std::vector<int> ring_order_;
    std::vector<int> ring_rank_;

    // kd-tree backend
    struct TreeNode {
        int left = -1, right = -1;
        int axis = 0;
        double split = 0.0;
        int begin = 0, end = 0;  // leaf range into perm_
    };
    std::vector<TreeNode> tree_;
    std::vector<int> perm_;
    static constexpr int kLeafSize = 16;

    void build_ring() {
        const int n = static_cast<int>(points_.size());
        ring_order_.resize(n);
        std::iota(ring_order_.begin(), ring_order_.end(), 0);
        std::sort(ring_order_.begin(), ring_order_.end(), [&](int a, int b) {
            double xa = points_.point(a)[0], xb = points_.point(b)[0];
            return xa < xb || (xa == xb && a < b);
        });
        ring_rank_.resize(n);
        for (int r = 0; r < n; ++r) ring_rank_[ring_order_[r]] = r;
    }

    std::vector<int> knn_ring(int i, int k) const {
        const int n = static_cast<int>(points_.size());
        // Wrap distance to the m-th ring neighbor is nondecreasing in m, so
        // the k nearest live among k ring steps on each side.
        std::vector<Candidate> cands;
        cands.reserve(2 * static_cast<std::size_t>(k));
        int rank = ring_rank_[i];
        for (int step = 1; step <= k; ++step) {
            int a = ring_order_[(rank + step) % n];
            int b = ring_order_[((rank - step) % n + n) % n];
            cands.push_back({points_.distance2(i, a), a});
            if (b != a) cands.push_back({points_.distance2(i, b), b});
        }
        std::sort(cands.begin(), cands.end());
        std::vector<int> out;
        out.reserve(k);
        for (const Candidate& c : cands) {
            if (c.idx == i) continue;  // coincident duplicate of the query
            if (std::find(out.begin(), out.end(), c.idx) == out.end()) out.push_back(c.idx);
            if (static_cast<int>(out.size()) == k) break;
        }
        return out;
    }

    std::vector<int> knn_brute(int i, int k) const {
        const int n = static_cast<int>(points_.size());
        std::vector<Candidate> cands;
        cands.reserve(n - 1);
        for (int j = 0; j < n; ++j)
            if (j != i) cands.push_back({points_.distance2(i, j), j});
        std::partial_sort(cands.begin(), cands.begin() + k, cands.end());
        std::vector<int> out(k);
        for (int m = 0; m < k; ++m) out[m] = cands[m].idx;
        return out;
    }

    void build_tree() {
        const int n = static_cast<int>(points_.size());
        perm_.resize(n);
        std::iota(perm_.begin(), perm_.end(), 0);
        tree_.clear();
        tree_.reserve(2 * static_cast<std::size_t>(n) / kLeafSize + 4);
        build_node(0, n);
    }

    int build_node(int begin, int end) {
        int id = static_cast<int>(tree_.size());
        tree_.push_back({});
        tree_[id].begin = begin;
        tree_[id].end = end;
        if (end - begin <= kLeafSize) return id;

        // split on the widest axis at the median
        const int dim = points_.dim();
        int axis = 0;
        double best_extent = -1.0;
        for (int m = 0; m < dim; ++m) {
            double lo = std::numeric_limits<double>::infinity(), hi = -lo;
            for (int t = begin; t < end; ++t) {
                double v = points_.point(perm_[t])[m];
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            if (hi - lo > best_extent) {
                best_extent = hi - lo;
                axis = m;
            }
        }
        int mid = (begin + end) / 2;
        std::nth_element(perm_.begin() + begin, perm_.begin() + mid, perm_.begin() + end,
                         [&](int a, int b) {
                             double va = points_.point(a)[axis], vb = points_.point(b)[axis];
                             return va < vb || (va == vb && a < b);
                         });
        double split = points_.point(perm_[mid])[axis];
        int left = build_node(begin, mid);
        int right = build_node(mid, end);
        tree_[id].axis = axis;
        tree_[id].split = split;
        tree_[id].left = left;
        tree_[id].right = right;
        return id;
    }

    // bounded max-heap of the k best candidates under (d2, idx) order
    struct KBest {
        int k;
        std::vector<Candidate> heap;
        bool full() const { return static_cast<int>(heap.size()) == k; }
        double bound() const {
            return full() ? heap.front().d2 : std::numeric_limits<double>::infinity();
        }
        void offer(Candidate c) {
            auto worse = [](const Candidate& a, const Candidate& b) { return a < b; };
            if (!full()) {
                heap.push_back(c);
                std::push_heap(heap.begin(), heap.end(), worse);
            } else if (c < heap.front()) {
                std::pop_heap(heap.begin(), heap.end(), worse);
                heap.back() = c;
                std::push_heap(heap.begin(), heap.end(), worse);
            }
        }
    };

    void search_node(int id, std::span<const double> q, int exclude, KBest& best) const {
        const TreeNode& node = tree_[static_cast<std::size_t>(id)];
        if (node.left < 0) {
            for (int t = node.begin; t < node.end; ++t) {
                int j = perm_[t];
                if (j == exclude) continue;
                best.offer({points_.distance2_to(j, q), j});
            }
            return;
        }
        double dx = q[node.axis] - node.split;
        int near = dx < 0 ? node.left : node.right;
        int far = dx < 0 ? node.right : node.left;
        search_node(near, q, exclude, best);
        // prune only on strictly larger separation so equal-distance
        // candidates with smaller indices are still visited
        if (dx * dx <= best.bound()) search_node(far, q, exclude, best);
    }

    std::vector<int> knn_tree(int i, int k) const {
        KBest best{k, {}};
        search_node(0, points_.point(static_cast<std::size_t>(i)), i, best);
        std::sort(best.heap.begin(), best.heap.end());
        std::vector<int> out(best.heap.size());
        for (std::size_t m = 0; m < best.heap.size(); ++m) out[m] = best.heap[m].idx;
        return out;
    }

    std::pair<double, int> nearest_pair(std::span<const double> y) const {
        if (mode_ == Mode::kdtree) {
            KBest best{1, {}};
            search_node(0, y, -1, best);
            return {best.heap.front().d2, best.heap.front().idx};
        }
        Candidate best{std::numeric_limits<double>::infinity(), -1};
        for (std::size_t j = 0; j < points_.size(); ++j) {
            Candidate c{points_.distance2_to(j, y), static_cast<int>(j)};
            if (c < best) best = c;
        }
        return {best.d2, best.idx};
    }
};

inline NeighborIndex build_index(const PointConfig& config) { return NeighborIndex::build(config); }

/// Separation Delta(omega_N): the smallest nearest-neighbor distance.
/// Returns 0 for configurations with coincident points.
inline double separation(const PointConfig& config) {
    if (config.size() < 2) throw std::invalid_argument("separation: N must be >= 2");
    NeighborIndex idx = NeighborIndex::build(config);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < config.size(); ++i) {
        int j = idx.knn(static_cast<int>(i), 1)[0];
        best = std::min(best, config.distance2(i, static_cast<std::size_t>(j)));
    }
    return std::sqrt(best);
}

/// Covering radius estimate: max over sampled y in A of the distance to the
/// nearest configuration point. Exact (via gap midpoints) on the periodic
/// circle and on 1D boxes; elsewhere a probe-sample lower estimate.
inline double covering_radius(const PointConfig& config, const Region& region,
                              std::size_t probes, std::uint64_t seed) {
    if (probes < 1) throw std::invalid_argument("covering_radius: probes must be >= 1");
    if (config.size() == 0) throw std::invalid_argument("covering_radius: empty configuration");

    const bool exact_circle = region.kind() == RegionKind::circle_periodic && config.dim() == 1;
    const bool exact_interval = region.kind() == RegionKind::box && config.dim() == 1;
    if (exact_circle || exact_interval) {
        std::vector<double> xs(config.coords());
        std::sort(xs.begin(), xs.end());
        double worst = 0.0;
        if (exact_circle) {
            for (std::size_t i = 0; i < xs.size(); ++i) {
                double next = i + 1 < xs.size() ? xs[i + 1] : xs[0] + 1.0;
                worst = std::max(worst, (next - xs[i]) / 2.0);
            }
        } else {
            double a = region.corner()[0], b = a + region.sides()[0];
            worst = std::max(xs.front() - a, b - xs.back());
            for (std::size_t i = 0; i + 1 < xs.size(); ++i)
                worst = std::max(worst, (xs[i + 1] - xs[i]) / 2.0);
        }
        return worst;
    }

    PointConfig samples = region.sample_uniform(probes, seed);
    if (config.size() == 1) {
        double worst2 = 0.0;
        for (std::size_t i = 0; i < samples.size(); ++i)
            worst2 = std::max(worst2, config.distance2_to(0, samples.point(i)));
        return std::sqrt(worst2);
    }
    NeighborIndex idx = NeighborIndex::build(config);
    double worst = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i)
        worst = std::max(worst, idx.nearest_distance(samples.point(i)));
    return worst;
}

}  // namespace srint
