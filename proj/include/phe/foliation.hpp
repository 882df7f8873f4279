#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "phe/errors.hpp"
#include "phe/geometry.hpp"
#include "phe/models.hpp"
#include "phe/polyline.hpp"

namespace phe {

/// Rational-slope line family transverse to the unstable cone; the
/// approximating foliation F^eps on the cover. A leaf descends to a circle
/// on the torus, which is what keeps it a finite distance from a rational
/// line (and the unstable eigenline of a hyperbolic integer matrix has
/// irrational slope, so transversality is possible).
struct SeedLine {
    long long dx = 1;
    long long dy = 0;
    double offset = 0.0;

    Vec2 dir() const { return Vec2{double(dx), double(dy)}.normalized(); }
    Direction direction() const { return Direction::from_vector(dir()); }
};

/// True when the seed direction stays outside the cone with the given
/// angular margin at every grid point and avoids the unstable
/// eigendirection.
inline bool seed_transversal(const EndomorphismModel& model,
                             const ConeFamily& cone, const SeedLine& seed,
                             int grid_n, double margin) {
    const Direction d = seed.direction();
    if (d.distance_to(Direction::from_vector(model.linearisation().v_u)) <=
        1e-9) {
        return false;
    }
    for (int i = 0; i < grid_n; ++i) {
        for (int j = 0; j < grid_n; ++j) {
            const TorusPoint p{double(i) / grid_n, double(j) / grid_n};
            if (cone.axis(p).distance_to(d) < cone.half_angle + margin) {
                return false;
            }
        }
    }
    return true;
}

/// Choose a seed slope: walk candidate directions by complexity |dx|+|dy|;
/// at the first level containing a direction that clears the cone by
/// max(0.1, half_angle/2) at every grid point, take the candidate whose
/// slope is numerically nearest the stable eigendirection (vertical counts
/// as infinitely far). Denominators are capped at 10.
inline SeedLine seed_foliation(const EndomorphismModel& model,
                               const ConeFamily& cone, int grid_n = 12) {
    const Linearisation& lin = model.linearisation();
    if (lin.cls != SpectrumClass::hyperbolic) {
        throw UnsupportedClass("seed_foliation: hyperbolic linearisation required");
    }
    const double slope_s = lin.v_s.y / lin.v_s.x;
    const double required = std::max(0.1, cone.half_angle / 2.0);

    auto clears_cone = [&](const SeedLine& cand) {
        return seed_transversal(model, cone, cand, grid_n, required);
    };

    for (long long level = 2; level <= 20; ++level) {
        bool found = false;
        SeedLine best;
        double best_dist = 0.0;
        for (long long sum = 1; sum <= level; ++sum) {
            for (long long dx = 0; dx <= sum; ++dx) {
                const long long ady = sum - dx;
                if (std::max(dx, ady) > 10) continue;
                for (int sign = 0; sign < (ady == 0 ? 1 : 2); ++sign) {
                    const long long dy = (sign == 0) ? ady : -ady;
                    if (dx == 0 && dy <= 0) continue;
                    if (std::gcd(dx, std::llabs(dy)) != 1) continue;
                    const SeedLine cand{dx, dy, 0.0};
                    if (!clears_cone(cand)) continue;
                    const double dist =
                        (dx == 0) ? std::numeric_limits<double>::infinity()
                                  : std::fabs(double(dy) / double(dx) -
                                              slope_s);
                    if (!found || dist < best_dist ||
                        (dist == best_dist && dy < best.dy)) {
                        found = true;
                        best = cand;
                        best_dist = dist;
                    }
                }
            }
        }
        if (found) return best;
    }
    throw SeedSelectionError(
        "seed_foliation: no rational slope with denominator <= 10 clears the "
        "cone margin");
}

namespace detail {

/// Vertices of a backward-iterated seed segment, keyed by the seed-line
/// parameter. Every vertex is the exact n-fold preimage of a seed point,
/// so refinement never interpolates off the true curve.
class BackwardLeafSampler {
public:
    BackwardLeafSampler(const EndomorphismModel& model, CoverPoint seed_base,
                        Vec2 seed_dir, int depth)
        : model_(&model), base_(seed_base), dir_(seed_dir), depth_(depth) {}

    CoverPoint eval(double t) const {
        return model_->lift_inverse_iterate(base_ + dir_ * t, depth_);
    }

private:
    const EndomorphismModel* model_;
    CoverPoint base_;
    Vec2 dir_;
    int depth_;
};

/// A backward leaf with its exact sampler and parameters retained, so
/// curve points can be re-evaluated exactly between stored vertices.
struct SampledLeaf {
    BackwardLeafSampler sampler;
    std::vector<double> ts;
    std::vector<CoverPoint> vs;

    /// Exact curve point with pi_s-coordinate equal to `target`, found by
    /// bracketed root solving on the seed parameter (pi_s is monotone
    /// along the leaf because the tangent stays outside the cone, whose
    /// axis spans the kernel of pi_s). Returns false when the target falls
    /// outside the sampled range.
    bool point_at_pi_s(const ProjectionPair& proj, double target,
                       CoverPoint& out) const {
        const bool increasing = proj.s(vs.back()) > proj.s(vs.front());
        std::size_t lo = 0, hi = vs.size() - 1;
        auto sval = [&](std::size_t i) {
            return increasing ? proj.s(vs[i]) : -proj.s(vs[i]);
        };
        const double tgt = increasing ? target : -target;
        if (tgt < sval(lo) || tgt > sval(hi)) return false;
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            if (sval(mid) <= tgt) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        double ta = ts[lo], tb = ts[hi];
        double fa = proj.s(vs[lo]) - target;
        double fb = proj.s(vs[hi]) - target;
        if (fa == 0.0) {
            out = vs[lo];
            return true;
        }
        if (fb == 0.0) {
            out = vs[hi];
            return true;
        }
        if ((fa < 0.0) == (fb < 0.0)) {
            // Monotonicity noise at the bracket; the nearer vertex is the
            // best available answer.
            out = (std::fabs(fa) <= std::fabs(fb)) ? vs[lo] : vs[hi];
            return true;
        }
        // Illinois regula falsi: keeps the bracket and converges
        // superlinearly even when one residual goes stale.
        CoverPoint best = vs[lo];
        int stale = 0;
        for (int it = 0; it < 60; ++it) {
            if (std::fabs(tb - ta) <= 1e-16 * (1.0 + std::fabs(ta))) break;
            double tm = ta - fa * (tb - ta) / (fb - fa);
            if (!(tm > std::min(ta, tb) && tm < std::max(ta, tb))) {
                tm = 0.5 * (ta + tb);
            }
            const CoverPoint pm = sampler.eval(tm);
            const double fm = proj.s(pm) - target;
            best = pm;
            if (std::fabs(fm) <= 1e-14) break;
            if ((fm < 0.0) == (fa < 0.0)) {
                ta = tm;
                fa = fm;
                if (++stale >= 2) {
                    fb *= 0.5;
                    stale = 0;
                }
            } else {
                tb = tm;
                fb = fm;
                if (--stale <= -2) {
                    fa *= 0.5;
                    stale = 0;
                }
            }
        }
        out = best;
        return true;
    }
};

}  // namespace detail

namespace detail {

/// F_n(p) = f^{-n}(F^eps(f^n(p))): sample the seed line through f^n(p),
/// pull every sample back n times, and refine until edges are shorter than
/// 1e-2, extending the seed segment until the leaf spans `window` of
/// arclength on both sides of p.
inline SampledLeaf build_backward_leaf(const EndomorphismModel& model,
                                       const SeedLine& seed, CoverPoint p,
                                       int n, double window) {
    if (n < 0) throw InvalidParameter("backward_leaf: n >= 0");
    if (!(window > 0.0)) throw InvalidParameter("backward_leaf: window > 0");
    const double h_max = 1e-2;

    const CoverPoint base = model.lift_iterate(p, n);
    const detail::BackwardLeafSampler sampler(model, base, seed.dir(), n);

    // Seed parameter scale: backward iteration expands the segment by
    // roughly |lambda_s|^{-n}, so start near the target edge length.
    const double lam_s =
        std::max(std::fabs(model.linearisation().lambda_s), 0.05);
    double h0 = std::max(h_max * std::pow(lam_s, n), 1e-14);

    std::vector<double> ts{-h0, 0.0, h0};
    std::vector<CoverPoint> vs{sampler.eval(-h0), p, sampler.eval(h0)};

    auto arc_between = [&](std::size_t i0, std::size_t i1) {
        double s = 0.0;
        for (std::size_t i = i0; i < i1; ++i) {
            s += (vs[i + 1] - vs[i]).norm();
        }
        return s;
    };

    const std::size_t hard_cap = 400000;
    // Extend until both sides cover the window.
    for (int guard = 0; guard < 200; ++guard) {
        const std::size_t mid =
            std::size_t(std::lower_bound(ts.begin(), ts.end(), 0.0) -
                        ts.begin());
        const bool left_ok = arc_between(0, mid) >= window;
        const bool right_ok = arc_between(mid, vs.size() - 1) >= window;
        if (left_ok && right_ok) break;
        if (!right_ok) {
            const double t_new = ts.back() + std::max(h0, ts.back() * 0.5);
            ts.push_back(t_new);
            vs.push_back(sampler.eval(t_new));
        }
        if (!left_ok) {
            const double t_new =
                ts.front() - std::max(h0, -ts.front() * 0.5);
            ts.insert(ts.begin(), t_new);
            vs.insert(vs.begin(), sampler.eval(t_new));
        }
        if (vs.size() > hard_cap) {
            throw DegenerateLeaf("backward_leaf: extension did not terminate");
        }
    }

    // Refine long edges; the preimage stretches the seed unevenly.
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<double> nts;
        std::vector<CoverPoint> nvs;
        nts.reserve(ts.size() * 2);
        nvs.reserve(vs.size() * 2);
        for (std::size_t i = 0; i < ts.size(); ++i) {
            if (i > 0) {
                const double edge = (vs[i] - vs[i - 1]).norm();
                const double dt = ts[i] - ts[i - 1];
                if (edge > h_max && dt > 1e-15) {
                    const double tm = 0.5 * (ts[i] + ts[i - 1]);
                    nts.push_back(tm);
                    nvs.push_back(sampler.eval(tm));
                    changed = true;
                }
            }
            nts.push_back(ts[i]);
            nvs.push_back(vs[i]);
        }
        ts.swap(nts);
        vs.swap(nvs);
        if (vs.size() > hard_cap) {
            throw DegenerateLeaf("backward_leaf: refinement did not terminate");
        }
    }

    // Drop vertices that do not advance (fold-over would show up here) and
    // trim to the window plus one edge of slack, by arclength from p.
    std::vector<double> kept_ts;
    std::vector<CoverPoint> kept;
    kept.reserve(vs.size());
    for (std::size_t i = 0; i < vs.size(); ++i) {
        if (!kept.empty() && (vs[i] - kept.back()).norm() < 1e-11) continue;
        kept.push_back(vs[i]);
        kept_ts.push_back(ts[i]);
    }
    if (kept.size() < 2) {
        throw DegenerateLeaf("backward_leaf: curve collapsed");
    }

    std::vector<double> arcs(kept.size(), 0.0);
    std::size_t ip = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < kept.size(); ++i) {
        if (i > 0) arcs[i] = arcs[i - 1] + (kept[i] - kept[i - 1]).norm();
        const double d = (kept[i] - p).norm();
        if (d < best) {
            best = d;
            ip = i;
        }
    }
    detail::SampledLeaf out{sampler, {}, {}};
    for (std::size_t i = 0; i < kept.size(); ++i) {
        if (arcs[i] >= arcs[ip] - window - h_max &&
            arcs[i] <= arcs[ip] + window + h_max) {
            out.ts.push_back(kept_ts[i]);
            out.vs.push_back(kept[i]);
        }
    }
    if (out.vs.size() < 2) {
        throw DegenerateLeaf("backward_leaf: trimmed curve collapsed");
    }
    return out;
}

}  // namespace detail

inline LeafPolyline backward_leaf(const EndomorphismModel& model,
                                  const SeedLine& seed, CoverPoint p, int n,
                                  double window) {
    return LeafPolyline::from_vertices(
        detail::build_backward_leaf(model, seed, p, n, window).vs);
}

struct CenterLeafResult {
    LeafPolyline leaf;
    int depth = 0;
    double gap = 0.0;
};

/// Iterate F_n through p until successive leaves are Cauchy within tol in
/// sup-distance over the window (the compact-open convergence the limit
/// construction uses). The gap is measured between exact curve points
/// matched by their pi_s coordinate, so the stored polylines' chord error
/// does not floor it.
inline CenterLeafResult center_leaf(const EndomorphismModel& model,
                                    const SeedLine& seed, CoverPoint p,
                                    double window, double tol,
                                    int n_max = 30) {
    if (!(tol > 0.0)) throw InvalidParameter("center_leaf: tol > 0");
    const ProjectionPair proj = projections(model.linearisation());
    detail::SampledLeaf prev =
        detail::build_backward_leaf(model, seed, p, 0, window);
    double gap = std::numeric_limits<double>::infinity();
    for (int n = 1; n <= n_max; ++n) {
        detail::SampledLeaf cur = [&] {
            try {
                return detail::build_backward_leaf(model, seed, p, n, window);
            } catch (const DegenerateLeaf&) {
                // Seed points at |f^n(p)| ~ lambda_u^n have quantised below
                // the required spacing; deeper iterates cannot be computed
                // in double precision.
                throw ConvergenceFailure(
                    "center_leaf: precision floor reached before tol", gap);
            }
        }();
        gap = 0.0;
        for (const CoverPoint& q : cur.vs) {
            if ((q - p).norm() > window) continue;
            CoverPoint match;
            if (prev.point_at_pi_s(proj, proj.s(q), match)) {
                gap = std::max(gap, (match - q).norm());
            }
        }
        if (gap <= tol) {
            return {LeafPolyline::from_vertices(std::move(cur.vs)), n, gap};
        }
        prev = std::move(cur);
    }
    throw ConvergenceFailure("center_leaf: not Cauchy by n_max", gap);
}

enum class IterDirection { center, unstable };

/// Direction fields by iteration. The unstable direction is the
/// backward-orbit pushforward of a cone vector (power iteration along the
/// orbit); since backward orbits are only unique on the cover, it is a
/// field on R^2 and need not descend to the torus. The centre direction is
/// the pullback of a generic direction from the forward orbit endpoint and
/// does descend.
inline Direction direction_by_iteration(const EndomorphismModel& model,
                                        CoverPoint p, IterDirection mode,
                                        int n) {
    if (n < 1) throw InvalidParameter("direction_by_iteration: n >= 1");
    if (mode == IterDirection::unstable) {
        std::vector<CoverPoint> orbit(std::size_t(n) + 1);
        orbit[0] = p;
        for (int k = 1; k <= n; ++k) {
            orbit[std::size_t(k)] = model.lift_inverse(orbit[std::size_t(k - 1)]);
        }
        Vec2 v = model.linearisation().v_u;
        for (int k = n; k >= 1; --k) {
            v = model.jacobian(orbit[std::size_t(k)]).apply(v).normalized();
        }
        return Direction::from_vector(v);
    }
    std::vector<CoverPoint> orbit(static_cast<std::size_t>(n));
    orbit[0] = p;
    for (int k = 1; k < n; ++k) {
        orbit[std::size_t(k)] = model.lift_apply(orbit[std::size_t(k - 1)]);
    }
    Vec2 v = model.linearisation().v_s;
    for (int k = n - 1; k >= 0; --k) {
        v = model.jacobian(orbit[std::size_t(k)]).solve(v).normalized();
    }
    return Direction::from_vector(v);
}

/// Integrate the unstable direction field to the requested arclength on
/// both sides of p (fixed-step fourth-order, orientation kept coherent by
/// sign-matching between evaluations).
inline LeafPolyline unstable_leaf(const EndomorphismModel& model, CoverPoint p,
                                  double length, int dir_depth = 20,
                                  double step = 1e-3) {
    auto field = [&](CoverPoint q, Vec2 like) -> Vec2 {
        Vec2 v = direction_by_iteration(model, q, IterDirection::unstable,
                                        dir_depth)
                     .vec();
        if (dot(v, like) < 0.0) v = -v;
        return v;
    };

    auto integrate = [&](Vec2 orient) {
        std::vector<CoverPoint> out;
        CoverPoint q = p;
        Vec2 heading = orient;
        const int steps = int(std::ceil(length / step));
        for (int i = 0; i < steps; ++i) {
            const Vec2 k1 = field(q, heading);
            const Vec2 k2 = field(q + k1 * (step / 2.0), k1);
            const Vec2 k3 = field(q + k2 * (step / 2.0), k2);
            const Vec2 k4 = field(q + k3 * step, k3);
            const Vec2 move = (k1 + 2.0 * k2 + 2.0 * k3 + k4) * (step / 6.0);
            q = q + move;
            heading = move.normalized();
            out.push_back(q);
        }
        return out;
    };

    const Vec2 up =
        direction_by_iteration(model, p, IterDirection::unstable, dir_depth)
            .vec();
    const auto fwd = integrate(up);
    const auto bwd = integrate(-1.0 * up);

    std::vector<CoverPoint> verts;
    verts.reserve(fwd.size() + bwd.size() + 1);
    for (auto it = bwd.rbegin(); it != bwd.rend(); ++it) verts.push_back(*it);
    verts.push_back(p);
    for (const CoverPoint& v : fwd) verts.push_back(v);
    return LeafPolyline::from_vertices(std::move(verts));
}

struct ProductStructureReport {
    bool pass = false;
    int pairs = 0;
    int min_count = 0;
    int max_count = 0;
    int offending_center = -1;
    int offending_unstable = -1;
};

/// Every pair (centre leaf, unstable leaf) must intersect exactly once
/// within the window for global product structure.
inline ProductStructureReport product_structure_check(
    const std::vector<LeafPolyline>& centers,
    const std::vector<LeafPolyline>& unstables) {
    ProductStructureReport rep;
    rep.min_count = std::numeric_limits<int>::max();
    rep.max_count = std::numeric_limits<int>::min();
    for (std::size_t i = 0; i < centers.size(); ++i) {
        for (std::size_t j = 0; j < unstables.size(); ++j) {
            const int c = count_transverse_intersections(centers[i],
                                                         unstables[j]);
            ++rep.pairs;
            if (c < rep.min_count) rep.min_count = c;
            if (c > rep.max_count) rep.max_count = c;
            if (c != 1 && rep.offending_center < 0) {
                rep.offending_center = int(i);
                rep.offending_unstable = int(j);
            }
        }
    }
    rep.pass = rep.pairs > 0 && rep.min_count == 1 && rep.max_count == 1;
    return rep;
}

struct GrowthReport {
    double C_estimate = 0.0;  // max pi_u-diameter of f^n(centre segments)
    double D_estimate = 0.0;  // max pi_s-diameter of unstable segments
    double K_estimate = 0.0;  // min volume(U_1(J)) / length(J)
    double R_estimate = 0.0;  // max distance of F_n leaves to L_n translates
    double T_estimate = 0.0;  // forwarded from the leaf-conjugacy estimate
    double alpha = 0.0;       // measured neighbourhood contraction of A^{-1}
    double K0 = 0.0;          // measured sup |f - A|
    double R_chosen = 0.0;    // R satisfying R > R*alpha + K0 and R >= R_est
    bool r_feasible = false;
    bool endpoint_gap_monotone = false;
};

/// Quantitative shadows of the growth lemmas: the constants C, D, K, R
/// measured on computed leaves.
inline GrowthReport growth_diagnostics(const EndomorphismModel& model,
                                       const SeedLine& seed,
                                       const std::vector<LeafPolyline>& centers,
                                       const std::vector<LeafPolyline>& unstables,
                                       int n_max, std::mt19937_64& rng,
                                       double T_forward = 0.0) {
    const Linearisation& lin = model.linearisation();
    const ProjectionPair proj = projections(lin);
    GrowthReport rep;
    rep.T_estimate = T_forward;
    rep.K0 = displacement_from_linearisation(model);

    // C: pi_u-diameter of forward images of centre segments.
    for (const LeafPolyline& leaf : centers) {
        std::vector<CoverPoint> pts = leaf.vertices;
        for (int n = 0; n <= n_max; ++n) {
            double lo = std::numeric_limits<double>::infinity();
            double hi = -lo;
            for (const CoverPoint& v : pts) {
                const double u = proj.u(v);
                lo = std::min(lo, u);
                hi = std::max(hi, u);
            }
            rep.C_estimate = std::max(rep.C_estimate, hi - lo);
            if (n < n_max) {
                for (CoverPoint& v : pts) v = model.lift_apply(v);
            }
        }
    }

    // D: pi_s-diameter of unstable segments.
    for (const LeafPolyline& leaf : unstables) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const CoverPoint& v : leaf.vertices) {
            const double s = proj.s(v);
            lo = std::min(lo, s);
            hi = std::max(hi, s);
        }
        rep.D_estimate = std::max(rep.D_estimate, hi - lo);
    }

    // Endpoint pi_u-gap grows with unstable segment length.
    rep.endpoint_gap_monotone = !unstables.empty();
    for (const LeafPolyline& leaf : unstables) {
        const double L = leaf.length();
        double prev_gap = -1.0;
        for (double frac : {0.25, 0.5, 1.0}) {
            const CoverPoint a = leaf.at(0.5 * (L - frac * L));
            const CoverPoint b = leaf.at(0.5 * (L + frac * L));
            const double gap = std::fabs(proj.u(a) - proj.u(b));
            if (gap <= prev_gap) rep.endpoint_gap_monotone = false;
            prev_gap = gap;
        }
    }

    // K: Monte-Carlo volume of unit neighbourhoods against length.
    rep.K_estimate = std::numeric_limits<double>::infinity();
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    auto volume_ratio = [&](const LeafPolyline& leaf) {
        double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
        double ylo = xlo, yhi = -xlo;
        for (const CoverPoint& v : leaf.vertices) {
            xlo = std::min(xlo, v.x);
            xhi = std::max(xhi, v.x);
            ylo = std::min(ylo, v.y);
            yhi = std::max(yhi, v.y);
        }
        xlo -= 1.0;
        xhi += 1.0;
        ylo -= 1.0;
        yhi += 1.0;
        const int samples = 20000;
        int inside = 0;
        for (int i = 0; i < samples; ++i) {
            const CoverPoint q{xlo + (xhi - xlo) * unif(rng),
                               ylo + (yhi - ylo) * unif(rng)};
            if (leaf.distance_to(q) < 1.0) ++inside;
        }
        const double area =
            (xhi - xlo) * (yhi - ylo) * double(inside) / samples;
        return area / std::max(leaf.length(), 1e-9);
    };
    for (const LeafPolyline& leaf : centers) {
        rep.K_estimate = std::min(rep.K_estimate, volume_ratio(leaf));
    }
    for (const LeafPolyline& leaf : unstables) {
        rep.K_estimate = std::min(rep.K_estimate, volume_ratio(leaf));
    }
    if (!std::isfinite(rep.K_estimate)) rep.K_estimate = 0.0;

    // R: distance of F_n leaves to translates of L_n = A^{-n}(L), and the
    // contraction factor alpha of A^{-1} between consecutive L_n.
    const Mat2 a_inv = lin.matrix.real().inverse();
    CoverPoint probe{0.3, 0.4};
    if (!centers.empty()) probe = centers.front().vertices.front();
    Vec2 ldir = seed.dir();
    for (int n = 1; n <= n_max; ++n) {
        const Vec2 ldir_next = a_inv.apply(ldir).normalized();
        const Vec2 normal{-ldir.y, ldir.x};
        const double alpha_n =
            std::fabs(cross(ldir_next, a_inv.apply(normal)));
        rep.alpha = std::max(rep.alpha, alpha_n);

        const LeafPolyline leaf =
            backward_leaf(model, seed, probe, n, 2.0);
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const CoverPoint& v : leaf.vertices) {
            const double off = cross(ldir_next, v.vec());
            lo = std::min(lo, off);
            hi = std::max(hi, off);
        }
        rep.R_estimate = std::max(rep.R_estimate, (hi - lo) / 2.0);
        ldir = ldir_next;
    }
    rep.r_feasible = rep.alpha < 1.0;
    if (rep.r_feasible) {
        rep.R_chosen =
            1.01 * std::max(rep.R_estimate, rep.K0 / (1.0 - rep.alpha));
    }
    return rep;
}

}  // namespace phe
