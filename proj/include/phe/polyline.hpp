#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>
#include <vector>

#include "phe/errors.hpp"
#include "phe/geometry.hpp"

namespace phe {

/// Sampled curve on the cover: ordered vertices with cumulative arclength.
/// Consecutive vertices are distinct and arclength is strictly increasing.
struct LeafPolyline {
    std::vector<CoverPoint> vertices;
    std::vector<double> arclength;

    void rebuild_arclength() {
        arclength.resize(vertices.size());
        double s = 0.0;
        for (std::size_t i = 0; i < vertices.size(); ++i) {
            if (i > 0) s += (vertices[i] - vertices[i - 1]).norm();
            arclength[i] = s;
        }
    }

    static LeafPolyline from_vertices(std::vector<CoverPoint> v) {
        LeafPolyline l;
        l.vertices = std::move(v);
        l.rebuild_arclength();
        for (std::size_t i = 1; i < l.arclength.size(); ++i) {
            if (!(l.arclength[i] > l.arclength[i - 1])) {
                throw DegenerateLeaf(
                    "LeafPolyline: consecutive vertices not distinct");
            }
        }
        return l;
    }

    std::size_t size() const { return vertices.size(); }
    double length() const { return arclength.empty() ? 0.0 : arclength.back(); }

    /// Piecewise-linear interpolant at arclength s (clamped to the range).
    CoverPoint at(double s) const {
        if (vertices.empty()) return {};
        if (s <= arclength.front()) return vertices.front();
        if (s >= arclength.back()) return vertices.back();
        auto it = std::upper_bound(arclength.begin(), arclength.end(), s);
        std::size_t i = std::size_t(it - arclength.begin());
        const double s0 = arclength[i - 1], s1 = arclength[i];
        const double t = (s - s0) / (s1 - s0);
        const Vec2 d = vertices[i] - vertices[i - 1];
        return vertices[i - 1] + d * t;
    }

    Vec2 segment_tangent(std::size_t i) const {
        return (vertices[i + 1] - vertices[i]).normalized();
    }

    LeafPolyline reversed() const {
        LeafPolyline l;
        l.vertices.assign(vertices.rbegin(), vertices.rend());
        l.rebuild_arclength();
        return l;
    }

    /// Distance from q to the polyline (min over segments).
    double distance_to(CoverPoint q) const {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + 1 < vertices.size(); ++i) {
            best = std::min(best, segment_distance(vertices[i], vertices[i + 1], q));
        }
        return best;
    }

    static double segment_distance(CoverPoint a, CoverPoint b, CoverPoint q) {
        const Vec2 ab = b - a;
        const Vec2 aq = q - a;
        const double len2 = dot(ab, ab);
        double t = (len2 > 0.0) ? dot(aq, ab) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        return (aq - ab * t).norm();
    }
};

/// Sup over sampled points of `a` of the distance to polyline `b`,
/// restricted to points within `window` of `center` when window > 0.
inline double one_sided_sup_distance(const LeafPolyline& a,
                                     const LeafPolyline& b,
                                     CoverPoint center = {},
                                     double window = 0.0) {
    double sup = 0.0;
    for (const CoverPoint& p : a.vertices) {
        if (window > 0.0 && (p - center).norm() > window) continue;
        sup = std::max(sup, b.distance_to(p));
    }
    return sup;
}

namespace detail {

struct SegmentHit {
    double t;  // parameter on the first segment
    double depth;
};

/// Proper crossing of segments [a0,a1] and [b0,b1]. The depth is, for each
/// segment, the larger perpendicular excursion of its endpoints across the
/// other's supporting line, minimised over the two segments: a genuine
/// transverse crossing has healthy depth even when it lands on a vertex,
/// while near-parallel floating-point grazes carry depth ~ 0.
inline bool segment_crossing(CoverPoint a0, CoverPoint a1, CoverPoint b0,
                             CoverPoint b1, SegmentHit& hit) {
    const Vec2 r = a1 - a0;
    const Vec2 s = b1 - b0;
    const double denom = cross(r, s);
    if (denom == 0.0) return false;
    const Vec2 qp = b0 - a0;
    const double t = cross(qp, s) / denom;
    const double u = cross(qp, r) / denom;
    if (t < 0.0 || t >= 1.0 || u < 0.0 || u >= 1.0) return false;
    const double rn = r.norm(), sn = s.norm();
    const double da0 = std::fabs(cross(s, a0 - b0)) / sn;
    const double da1 = std::fabs(cross(s, a1 - b0)) / sn;
    const double db0 = std::fabs(cross(r, b0 - a0)) / rn;
    const double db1 = std::fabs(cross(r, b1 - a0)) / rn;
    hit.t = t;
    hit.depth = std::min(std::max(da0, da1), std::max(db0, db1));
    return true;
}

/// Uniform bbox hash over segments of a polyline, for pair pruning.
class SegmentGrid {
public:
    explicit SegmentGrid(const LeafPolyline& l, double cell = 0.25)
        : leaf_(&l), cell_(cell) {
        for (std::size_t i = 0; i + 1 < l.vertices.size(); ++i) {
            insert(i);
        }
    }

    template <typename F>
    void for_candidates(CoverPoint a, CoverPoint b, F&& f) const {
        int x0, y0, x1, y1;
        cell_range(a, b, x0, y0, x1, y1);
        for (int cx = x0; cx <= x1; ++cx) {
            for (int cy = y0; cy <= y1; ++cy) {
                auto it = cells_.find(key(cx, cy));
                if (it == cells_.end()) continue;
                for (std::size_t idx : it->second) f(idx);
            }
        }
    }

    const LeafPolyline& leaf() const { return *leaf_; }

private:
    void insert(std::size_t i) {
        int x0, y0, x1, y1;
        cell_range(leaf_->vertices[i], leaf_->vertices[i + 1], x0, y0, x1, y1);
        for (int cx = x0; cx <= x1; ++cx) {
            for (int cy = y0; cy <= y1; ++cy) {
                cells_[key(cx, cy)].push_back(i);
            }
        }
    }

    void cell_range(CoverPoint a, CoverPoint b, int& x0, int& y0, int& x1,
                    int& y1) const {
        x0 = int(std::floor(std::min(a.x, b.x) / cell_));
        x1 = int(std::floor(std::max(a.x, b.x) / cell_));
        y0 = int(std::floor(std::min(a.y, b.y) / cell_));
        y1 = int(std::floor(std::max(a.y, b.y) / cell_));
    }

    static long long key(int cx, int cy) {
        return (static_cast<long long>(cx) << 32) ^
               (static_cast<long long>(cy) & 0xffffffffLL);
    }

    const LeafPolyline* leaf_;
    double cell_;
    std::unordered_map<long long, std::vector<std::size_t>> cells_;
};

}  // namespace detail

/// Count transverse intersections between two polylines. Crossings shallower
/// than min_depth are treated as tangential near-misses and not counted.
inline int count_transverse_intersections(const LeafPolyline& a,
                                          const LeafPolyline& b,
                                          double min_depth = 1e-9) {
    const detail::SegmentGrid grid(b);
    int count = 0;
    for (std::size_t i = 0; i + 1 < a.vertices.size(); ++i) {
        std::vector<std::size_t> seen;
        grid.for_candidates(a.vertices[i], a.vertices[i + 1],
                            [&](std::size_t j) {
                                if (std::find(seen.begin(), seen.end(), j) !=
                                    seen.end())
                                    return;
                                seen.push_back(j);
                                detail::SegmentHit hit;
                                if (detail::segment_crossing(
                                        a.vertices[i], a.vertices[i + 1],
                                        b.vertices[j], b.vertices[j + 1],
                                        hit) &&
                                    hit.depth > min_depth) {
                                    ++count;
                                }
                            });
    }
    return count;
}

/// Segment-pair sweep for self-intersections; adjacent segments share an
/// endpoint and are skipped.
inline bool has_self_intersection(const LeafPolyline& l,
                                  double min_depth = 1e-9) {
    const detail::SegmentGrid grid(l);
    for (std::size_t i = 0; i + 1 < l.vertices.size(); ++i) {
        bool found = false;
        std::vector<std::size_t> seen;
        grid.for_candidates(l.vertices[i], l.vertices[i + 1],
                            [&](std::size_t j) {
                                if (found || j <= i + 1) return;
                                if (std::find(seen.begin(), seen.end(), j) !=
                                    seen.end())
                                    return;
                                seen.push_back(j);
                                detail::SegmentHit hit;
                                if (detail::segment_crossing(
                                        l.vertices[i], l.vertices[i + 1],
                                        l.vertices[j], l.vertices[j + 1],
                                        hit) &&
                                    hit.depth > min_depth) {
                                    found = true;
                                }
                            });
        if (found) return true;
    }
    return false;
}

}  // namespace phe
