#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "phe/errors.hpp"
#include "phe/geometry.hpp"
#include "phe/polyline.hpp"
#include "phe/semiconjugacy.hpp"

namespace phe {

/// Arclength parametrisation alpha of a centre leaf, oriented so that pi_s
/// increases (the average over [s, s+T] depends on orientation, so a
/// convention is required for determinism). The piecewise-linear
/// interpolant is 1-Lipschitz with unit speed along segments.
class ArclengthLeaf {
public:
    ArclengthLeaf(LeafPolyline leaf, const ProjectionPair& proj)
        : leaf_(std::move(leaf)) {
        if (leaf_.size() < 2) {
            throw InvalidParameter("ArclengthLeaf: need at least two vertices");
        }
        if (proj.s(leaf_.vertices.back()) < proj.s(leaf_.vertices.front())) {
            leaf_ = leaf_.reversed();
        }
    }

    const LeafPolyline& polyline() const { return leaf_; }
    double length() const { return leaf_.length(); }
    CoverPoint at(double s) const { return leaf_.at(s); }

    /// Arclength of the nearest curve point to p; p must lie on the leaf.
    double locate(CoverPoint p, double tol = 1e-6) const {
        double best_d = std::numeric_limits<double>::infinity();
        double best_s = 0.0;
        for (std::size_t i = 0; i + 1 < leaf_.size(); ++i) {
            const Vec2 ab = leaf_.vertices[i + 1] - leaf_.vertices[i];
            const Vec2 ap = p - leaf_.vertices[i];
            const double len2 = dot(ab, ab);
            double t = len2 > 0.0 ? std::clamp(dot(ap, ab) / len2, 0.0, 1.0)
                                  : 0.0;
            const double d = (ap - ab * t).norm();
            if (d < best_d) {
                best_d = d;
                best_s = leaf_.arclength[i] + t * std::sqrt(len2);
            }
        }
        if (best_d > tol) {
            throw InvalidParameter("ArclengthLeaf::locate: point not on leaf");
        }
        return best_s;
    }

    /// Exact integral of the piecewise-linear function pi_s(alpha(t)) over
    /// [a, b]. The node set is the uniform grid of the requested step
    /// refined with the polyline breakpoints, where each linear piece
    /// integrates exactly; refining the step further cannot change the
    /// value beyond roundoff.
    double integral_pi_s(const ProjectionPair& proj, double a, double b,
                         double step) const {
        std::vector<double> nodes;
        const int n = std::max(2, int(std::ceil((b - a) / step)));
        nodes.reserve(std::size_t(n) + leaf_.size() + 2);
        for (int i = 0; i <= n; ++i) {
            nodes.push_back(a + (b - a) * double(i) / n);
        }
        for (double s : leaf_.arclength) {
            if (s > a && s < b) nodes.push_back(s);
        }
        std::sort(nodes.begin(), nodes.end());
        nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
        double acc = 0.0;
        double prev_t = nodes.front();
        double prev_f = proj.s(at(prev_t));
        for (std::size_t i = 1; i < nodes.size(); ++i) {
            const double t = nodes[i];
            const double f = proj.s(at(t));
            acc += 0.5 * (prev_f + f) * (t - prev_t);
            prev_t = t;
            prev_f = f;
        }
        return acc;
    }

private:
    LeafPolyline leaf_;
};

/// pi_s h(p) = (1/T) int_0^T pi_s alpha(s + t) dt; the image point is the
/// unique point with that pi_s coordinate on the image line H(leaf),
/// labelled by the pi_u value the semiconjugacy assigns to the leaf.
inline CoverPoint average_along_leaf(const SemiconjugacyApprox& approx,
                                     const ArclengthLeaf& leaf, CoverPoint p,
                                     double T) {
    if (!(T > 0.0)) throw InvalidParameter("average_along_leaf: T > 0");
    const double s0 = leaf.locate(p);
    if (s0 + T > leaf.length() + 1e-12) {
        throw ExtensionRequired(
            "average_along_leaf: leaf does not extend T beyond p");
    }
    const ProjectionPair& proj = approx.proj();
    const double mean =
        leaf.integral_pi_s(proj, s0, s0 + T, T / 200.0) / T;
    const double line_label = approx.H_u(p);
    const Vec2 q = proj.reconstruct(mean, line_label, approx.linearisation());
    return {q.x, q.y};
}

struct TEstimate {
    double T = 0.0;      // with the 1.1 safety factor
    double T_raw = 0.0;  // smallest certified window
    double resolution = 0.0;
};

/// Smallest T such that every sampled subsegment [s, s+T] of every leaf has
/// endpoint pi_s-gap > 1 (binary search at the given resolution), returned
/// with a 1.1 safety factor.
inline TEstimate estimate_T(const std::vector<ArclengthLeaf>& leaves,
                            const ProjectionPair& proj,
                            double resolution = 1e-3) {
    if (leaves.empty()) {
        throw InsufficientWindow("estimate_T: no leaves provided");
    }
    double t_hi = std::numeric_limits<double>::infinity();
    for (const ArclengthLeaf& l : leaves) t_hi = std::min(t_hi, l.length());

    auto certified = [&](double T) {
        for (const ArclengthLeaf& l : leaves) {
            const double lo_end = l.length() - T;
            if (lo_end < 0.0) return false;
            const double step = std::max(resolution, T / 64.0);
            for (double s = 0.0;; s += step) {
                if (s > lo_end) s = lo_end;
                const double gap =
                    std::fabs(proj.s(l.at(s + T)) - proj.s(l.at(s)));
                if (gap <= 1.0) return false;
                if (s >= lo_end) break;
            }
        }
        return true;
    };

    if (!certified(t_hi)) {
        throw InsufficientWindow(
            "estimate_T: window too small to certify any T");
    }
    double lo = 0.0, hi = t_hi;
    while (hi - lo > resolution) {
        const double mid = 0.5 * (lo + hi);
        if (certified(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return {1.1 * hi, hi, resolution};
}

struct ConjugacySample {
    int leaf_id = 0;
    double s = 0.0;
    CoverPoint p;
    CoverPoint h_p;
    double T_used = 0.0;
};

/// Evenly spaced h-samples along the usable range of a leaf.
inline std::vector<ConjugacySample> sample_leaf_conjugacy(
    const SemiconjugacyApprox& approx, const ArclengthLeaf& leaf, int leaf_id,
    double T, int count) {
    if (count < 2) throw InvalidParameter("sample_leaf_conjugacy: count >= 2");
    const double usable = leaf.length() - T;
    if (usable <= 0.0) {
        throw ExtensionRequired("sample_leaf_conjugacy: leaf shorter than T");
    }
    std::vector<ConjugacySample> out;
    out.reserve(std::size_t(count));
    for (int i = 0; i < count; ++i) {
        ConjugacySample cs;
        cs.leaf_id = leaf_id;
        cs.s = usable * double(i) / (count - 1);
        cs.p = leaf.at(cs.s);
        cs.h_p = average_along_leaf(approx, leaf, cs.p, T);
        cs.T_used = T;
        out.push_back(cs);
    }
    return out;
}

struct LeafConjugacyReport {
    bool leaf_to_leaf = false;    // h-images of a leaf on one A^s-line
    bool equivariance = false;    // A maps h-lines to image-leaf h-lines
    bool monotone = false;        // d/dt pi_s h alpha >= 1/T - 1e-6
    bool injective = false;       // distinct samples have distinct images
    double worst_line_spread = 0.0;
    double worst_equivariance = 0.0;
    double min_derivative = 0.0;
    double min_pair_distance = 0.0;
    int offending_leaf = -1;
    int offending_sample = -1;

    bool pass() const {
        return leaf_to_leaf && equivariance && monotone && injective;
    }
};

/// The four leaf-conjugacy checks over computed leaves and their h-samples.
/// `image_leaf_of` must return the centre leaf through f(p) for a point p,
/// already arclength-parametrised.
inline LeafConjugacyReport conjugacy_checks(
    const SemiconjugacyApprox& approx, const EndomorphismModel& model,
    const std::vector<ArclengthLeaf>& leaves,
    const std::vector<std::vector<ConjugacySample>>& samples, double T,
    const std::function<ArclengthLeaf(CoverPoint)>& image_leaf_of,
    double line_tol = 1e-5, double equi_tol = 1e-4) {
    LeafConjugacyReport rep;
    const ProjectionPair& proj = approx.proj();
    const double lambda_u = approx.linearisation().lambda_u;

    // (i) all h-images of one leaf lie on a single A^s-line in pi_u.
    rep.leaf_to_leaf = true;
    for (std::size_t li = 0; li < samples.size(); ++li) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const ConjugacySample& cs : samples[li]) {
            const double u = proj.u(cs.h_p);
            lo = std::min(lo, u);
            hi = std::max(hi, u);
        }
        const double spread = hi - lo;
        if (spread > rep.worst_line_spread) rep.worst_line_spread = spread;
        if (spread > line_tol && rep.offending_leaf < 0) {
            rep.leaf_to_leaf = false;
            rep.offending_leaf = int(li);
            double worst = 0.0;
            double mid = 0.5 * (lo + hi);
            for (std::size_t si = 0; si < samples[li].size(); ++si) {
                const double dev =
                    std::fabs(proj.u(samples[li][si].h_p) - mid);
                if (dev > worst) {
                    worst = dev;
                    rep.offending_sample = int(si);
                }
            }
        }
    }

    // (ii) equivariance at leaf level: A maps the h-line of L to the h-line
    // of the leaf through f(L), compared by pi_u label.
    rep.equivariance = true;
    for (std::size_t li = 0; li < leaves.size(); ++li) {
        const CoverPoint p0 = leaves[li].at(leaves[li].length() / 2.0);
        const double label_here = approx.H_u(p0);
        const ArclengthLeaf image = image_leaf_of(model.lift_apply(p0));
        const double label_image =
            approx.H_u(image.at(image.locate(model.lift_apply(p0), 1e-3)));
        const double err = std::fabs(lambda_u * label_here - label_image);
        rep.worst_equivariance = std::max(rep.worst_equivariance, err);
        if (err > equi_tol) rep.equivariance = false;
    }

    // (iii) monotonicity of pi_s h along each leaf.
    rep.min_derivative = std::numeric_limits<double>::infinity();
    for (const auto& leaf_samples : samples) {
        for (std::size_t i = 0; i + 1 < leaf_samples.size(); ++i) {
            const double ds = leaf_samples[i + 1].s - leaf_samples[i].s;
            if (ds <= 0.0) continue;
            const double d =
                (proj.s(leaf_samples[i + 1].h_p) - proj.s(leaf_samples[i].h_p)) /
                ds;
            rep.min_derivative = std::min(rep.min_derivative, d);
        }
    }
    rep.monotone = rep.min_derivative >= 1.0 / T - 1e-6;

    // (iv) injectivity shadow: distinct samples map to distinct points.
    rep.min_pair_distance = std::numeric_limits<double>::infinity();
    rep.injective = true;
    std::vector<const ConjugacySample*> flat;
    for (const auto& ls : samples) {
        for (const auto& cs : ls) flat.push_back(&cs);
    }
    for (std::size_t i = 0; i < flat.size(); ++i) {
        for (std::size_t j = i + 1; j < flat.size(); ++j) {
            const double d = (flat[i]->h_p - flat[j]->h_p).norm();
            rep.min_pair_distance = std::min(rep.min_pair_distance, d);
            if (d < 1e-9) rep.injective = false;
        }
    }
    return rep;
}

}  // namespace phe
