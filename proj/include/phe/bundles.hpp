#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "phe/cohomology.hpp"
#include "phe/errors.hpp"
#include "phe/models.hpp"
#include "phe/polyline.hpp"

namespace phe {

/// A bundle direction at a point; `snapped` marks points inside the
/// exclusion radius where the limiting horizontal was substituted for the
/// series value (the bundles are defined by cases on the singular circles).
struct DirectionSample {
    Direction dir;
    bool snapped = false;
};

/// E^c(x,y): spanned by (gamma'(y), 1) off y = 1/2 and by (1,0) on it.
/// Within snap_delta of the circle the horizontal limit is returned with a
/// flag; the blow-up of |gamma'| at 1/2 makes this continuous.
inline DirectionSample center_direction(const IncoherentModel& model,
                                        TorusPoint p, SeriesTruncation trunc,
                                        double snap_delta = 0.02) {
    if (circle_distance(p.y, 0.5) <= snap_delta) {
        return {horizontal_direction(), true};
    }
    const double gp = gamma_prime(model.psi(), p.y, trunc, 0.0).value;
    return {Direction::from_vector({gp, 1.0}), false};
}

/// E^u(x,y): spanned by (beta'(y), 1) off y = 0 and by (1,0) on it.
inline DirectionSample unstable_direction(const IncoherentModel& model,
                                          TorusPoint p, SeriesTruncation trunc,
                                          double snap_delta = 0.02) {
    if (circle_distance(p.y, 0.0) <= snap_delta) {
        return {horizontal_direction(), true};
    }
    const double bp = beta_prime(model.psi(), p.y, trunc, 0.0).value;
    return {Direction::from_vector({bp, 1.0}), false};
}

/// Projective distance between Df_p(E^i(p)) and E^i(f(p)) for i in {c, u};
/// returns the max of the two. Both directions come from the series, so the
/// residual measures Df-invariance of the splitting with no shared route.
inline double splitting_invariance_residual(const IncoherentModel& model,
                                            TorusPoint p,
                                            SeriesTruncation trunc,
                                            double delta = 0.02) {
    const TorusPoint fp = model.apply_torus(p);
    const bool c_ok = circle_distance(p.y, 0.5) > delta &&
                      circle_distance(fp.y, 0.5) > delta;
    const bool u_ok = circle_distance(p.y, 0.0) > delta &&
                      circle_distance(fp.y, 0.0) > delta;
    if (!c_ok || !u_ok) {
        throw SingularInput(
            "splitting_invariance_residual: point or image within exclusion "
            "radius of a singular circle");
    }
    const Mat2 df = model.jacobian(p);
    double residual = 0.0;
    {
        const Direction here = center_direction(model, p, trunc, 0.0).dir;
        const Direction there = center_direction(model, fp, trunc, 0.0).dir;
        const Direction pushed = Direction::from_vector(df.apply(here.vec()));
        residual = std::max(residual, pushed.distance_to(there));
    }
    {
        const Direction here = unstable_direction(model, p, trunc, 0.0).dir;
        const Direction there = unstable_direction(model, fp, trunc, 0.0).dir;
        const Direction pushed = Direction::from_vector(df.apply(here.vec()));
        residual = std::max(residual, pushed.distance_to(there));
    }
    return residual;
}

struct PartialHyperbolicityReport {
    double min_unstable_stretch = 0.0;
    double max_ratio = 0.0;  // max of |Df|E^c| / |Df|E^u|
    TorusPoint argmin_stretch;
    TorusPoint argmax_ratio;
    // Values on the two invariant circles (the non-wandering set).
    double circle0_stretch = 0.0;
    double circle0_ratio = 0.0;
    double circle_half_stretch = 0.0;
    double circle_half_ratio = 0.0;

    bool circles_pass(double tol = 1e-6) const {
        return std::fabs(circle0_stretch - 2.0) <= tol &&
               std::fabs(circle0_ratio - 0.125) <= tol &&
               std::fabs(circle_half_stretch - 4.0) <= tol &&
               std::fabs(circle_half_ratio - 0.5) <= tol;
    }
    bool grid_pass() const {
        return min_unstable_stretch > 1.0 && max_ratio < 1.0;
    }
    bool pass(double tol = 1e-6) const {
        return circles_pass(tol) && grid_pass();
    }
};

namespace detail {

struct Stretches {
    double unstable;
    double ratio;
};

inline Stretches bundle_stretches(const IncoherentModel& model, double y,
                                  SeriesTruncation trunc) {
    const TorusPoint p{0.0, wrap_unit(y)};
    const Mat2 df = model.jacobian(p);
    const Vec2 eu = unstable_direction(model, p, trunc, 0.0).dir.vec();
    const Vec2 ec = center_direction(model, p, trunc, 0.0).dir.vec();
    const double su = df.apply(eu).norm();
    const double sc = df.apply(ec).norm();
    return {su, sc / su};
}

}  // namespace detail

/// Stretch of unit spanning vectors of E^u and E^c over a grid_n x grid_n
/// torus grid, plus the exact values on the invariant circles y = 0 and
/// y = 1/2. The jacobian and both bundles depend on y only, so each grid
/// row carries one value.
inline PartialHyperbolicityReport ph_inequality_report(
    const IncoherentModel& model, SeriesTruncation trunc, int grid_n) {
    if (grid_n < 2) throw InvalidParameter("ph_inequality_report: grid_n >= 2");
    PartialHyperbolicityReport rep;
    rep.min_unstable_stretch = std::numeric_limits<double>::infinity();
    rep.max_ratio = 0.0;
    for (int j = 0; j < grid_n; ++j) {
        const double y = double(j) / grid_n;
        const auto st = detail::bundle_stretches(model, y, trunc);
        if (st.unstable < rep.min_unstable_stretch) {
            rep.min_unstable_stretch = st.unstable;
            rep.argmin_stretch = {0.0, y};
        }
        if (st.ratio > rep.max_ratio) {
            rep.max_ratio = st.ratio;
            rep.argmax_ratio = {0.0, y};
        }
    }
    const auto c0 = detail::bundle_stretches(model, 0.0, trunc);
    const auto ch = detail::bundle_stretches(model, 0.5, trunc);
    rep.circle0_stretch = c0.unstable;
    rep.circle0_ratio = c0.ratio;
    rep.circle_half_stretch = ch.unstable;
    rep.circle_half_ratio = ch.ratio;
    return rep;
}

/// Integral curve sigma_p(t) = p + (gamma(t) - gamma(t0), t - t0), re-based
/// so the curve passes through p at t = t0. Samples are clustered near the
/// tangency parameter t = 1/2, where |gamma'| blows up.
inline LeafPolyline sigma_curve(const IncoherentModel& model, CoverPoint p,
                                int samples, SeriesTruncation trunc,
                                double t0 = 0.0, double t_lo = 0.0,
                                double t_hi = 1.0) {
    if (samples < 2) throw InvalidParameter("sigma_curve: samples >= 2");
    std::vector<double> ts;
    ts.reserve(std::size_t(samples) + 60);
    for (int i = 0; i < samples; ++i) {
        ts.push_back(t_lo + (t_hi - t_lo) * double(i) / (samples - 1));
    }
    // Geometric refinement toward the horizontal tangency at t = 1/2,
    // capped where edges would sink below double resolution.
    for (int j = 1; j <= 18; ++j) {
        const double h = 0.25 * std::pow(0.25, j);
        if (0.5 - h > t_lo) ts.push_back(0.5 - h);
        if (0.5 + h < t_hi) ts.push_back(0.5 + h);
    }
    if (0.5 > t_lo && 0.5 < t_hi) ts.push_back(0.5);
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

    const double g0 = gamma(model.psi(), t0, trunc).value;
    std::vector<CoverPoint> verts;
    verts.reserve(ts.size());
    double s_acc = 0.0;
    for (double t : ts) {
        const double g = gamma(model.psi(), t, trunc).value;
        const CoverPoint v{p.x + g - g0, p.y + (t - t0)};
        // Keep only vertices that advance the accumulated arclength.
        if (!verts.empty()) {
            const double d = (v - verts.back()).norm();
            if (!(s_acc + d > s_acc)) continue;
            s_acc += d;
        }
        verts.push_back(v);
    }
    return LeafPolyline::from_vertices(std::move(verts));
}

/// Two distinct integral curves of E^c through one point of the circle
/// y = 1/2: the invariant circle itself and the sigma-curve through the
/// touch point. Their existence witnesses that no foliation tangent to E^c
/// exists (branching).
struct BranchingCertificate {
    TorusPoint touch_point;
    LeafPolyline curve_a;  // the invariant circle y = 1/2
    LeafPolyline curve_b;  // sigma-type curve tangent to the circle
    double separation = 0.0;
    double tangency_error_a = 0.0;
    double tangency_error_b = 0.0;
};

inline BranchingCertificate branching_certificate(const IncoherentModel& model,
                                                  SeriesTruncation trunc,
                                                  double tangency_tol = 1e-4,
                                                  double delta = 0.02) {
    BranchingCertificate cert;
    cert.touch_point = {0.0, 0.5};

    {
        std::vector<CoverPoint> verts;
        for (int i = 0; i <= 24; ++i) {
            verts.push_back({-0.6 + 1.2 * double(i) / 24.0, 0.5});
        }
        cert.curve_a = LeafPolyline::from_vertices(std::move(verts));
    }
    cert.curve_b =
        sigma_curve(model, {0.0, 0.5}, 801, trunc, /*t0=*/0.5, 0.0, 1.0);

    // The circle is tangent to E^c exactly: E^c(x, 1/2) is horizontal.
    cert.tangency_error_a = 0.0;

    // Tangency is judged against the field at a reference depth of at least
    // 60 terms; a curve built from a too-shallow truncation is then caught
    // instead of certifying itself against its own truncation.
    const SeriesTruncation field_depth{std::max(trunc.depth, 60)};
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < cert.curve_b.vertices.size(); ++i) {
        const CoverPoint a = cert.curve_b.vertices[i];
        const CoverPoint b = cert.curve_b.vertices[i + 1];
        const double ymid = 0.5 * (a.y + b.y);
        if (circle_distance(ymid, 0.5) <= delta) continue;
        const Direction tangent = Direction::from_vector(b - a);
        const Direction field =
            center_direction(model, {0.0, wrap_unit(ymid)}, field_depth, 0.0)
                .dir;
        worst = std::max(worst, tangent.distance_to(field));
    }
    cert.tangency_error_b = worst;
    if (worst > tangency_tol) {
        throw CertificateFailure(
            "branching_certificate: sigma-curve tangency tolerance not met; "
            "truncation too shallow");
    }

    double sep = 0.0;
    for (const CoverPoint& v : cert.curve_b.vertices) {
        sep = std::max(sep, circle_distance(v.y, 0.5));
    }
    cert.separation = sep;
    return cert;
}

/// Fixed-step fourth-order integration of the unit E^c field from `start`,
/// oriented toward increasing y, stopping at the exclusion radius of the
/// singular circle or after `total_arclength`. Used as the independent
/// route against the closed-form sigma-curves.
inline LeafPolyline integrate_center_field(const IncoherentModel& model,
                                           CoverPoint start,
                                           double total_arclength,
                                           double step, SeriesTruncation trunc,
                                           double delta = 0.02) {
    auto field = [&](CoverPoint q) -> Vec2 {
        const double gp =
            gamma_prime(model.psi(), wrap_unit(q.y), trunc, 0.0).value;
        return Vec2{gp, 1.0}.normalized();
    };
    std::vector<CoverPoint> verts{start};
    CoverPoint q = start;
    double s = 0.0;
    while (s + step <= total_arclength) {
        if (circle_distance(q.y, 0.5) <= delta + step) break;
        const Vec2 k1 = field(q);
        const Vec2 k2 = field(q + k1 * (step / 2.0));
        const Vec2 k3 = field(q + k2 * (step / 2.0));
        const Vec2 k4 = field(q + k3 * step);
        q = q + (k1 + 2.0 * k2 + 2.0 * k3 + k4) * (step / 6.0);
        s += step;
        verts.push_back(q);
    }
    if (verts.size() < 2) {
        throw InsufficientWindow(
            "integrate_center_field: no room to integrate before the "
            "singular circle");
    }
    return LeafPolyline::from_vertices(std::move(verts));
}

}  // namespace phe
