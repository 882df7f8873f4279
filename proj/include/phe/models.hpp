#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <string>

#include "phe/errors.hpp"
#include "phe/geometry.hpp"
#include "phe/mobius.hpp"

namespace phe {

/// A torus endomorphism together with its lift to the universal cover.
/// The lift commutes with deck translations up to the linearisation:
/// lift_apply(p + v) = lift_apply(p) + A v for every lattice v, and the
/// lift is a diffeomorphism of R^2 even when the torus map is not
/// invertible.
class EndomorphismModel {
public:
    virtual ~EndomorphismModel() = default;

    virtual CoverPoint lift_apply(CoverPoint p) const = 0;
    virtual Mat2 jacobian(TorusPoint p) const = 0;
    virtual const Linearisation& linearisation() const = 0;

    Mat2 jacobian(CoverPoint p) const { return jacobian(cover_to_torus(p)); }

    TorusPoint apply_torus(TorusPoint p) const {
        return cover_to_torus(lift_apply(torus_to_cover(p)));
    }

    /// Invert the lifted diffeomorphism. Default: Newton iteration seeded
    /// at A^{-1} q; the lift is a bounded perturbation of A, so the linear
    /// seed is already close. The 1e-12 tolerance is scaled by |q| once the
    /// target leaves the unit range, since the residual of double
    /// arithmetic cannot fall below ~|q| ulps. Failure is surfaced, never
    /// silent.
    virtual CoverPoint lift_inverse(CoverPoint q) const {
        const double tol = 1e-12 * std::max(1.0, q.vec().norm());
        const Mat2 a_inv = linearisation().matrix.real().inverse();
        Vec2 p = a_inv.apply(q.vec());
        double residual = 0.0;
        for (int it = 0; it < 50; ++it) {
            const CoverPoint cp{p.x, p.y};
            const Vec2 r = lift_apply(cp) - CoverPoint{q.x, q.y};
            residual = r.norm();
            if (residual <= tol) return cp;
            p = p - jacobian(cp).solve(r);
        }
        const CoverPoint cp{p.x, p.y};
        const Vec2 r = lift_apply(cp) - CoverPoint{q.x, q.y};
        residual = r.norm();
        if (residual <= tol) return cp;
        throw InversionFailure("lift_inverse: Newton did not converge",
                               residual);
    }

    CoverPoint lift_iterate(CoverPoint p, int n) const {
        for (int i = 0; i < n; ++i) p = lift_apply(p);
        return p;
    }

    CoverPoint lift_inverse_iterate(CoverPoint q, int n) const {
        for (int i = 0; i < n; ++i) q = lift_inverse(q);
        return q;
    }
};

/// Hyperbolic test bed: lift(p) = M p + eps (sin 2 pi y, sin 2 pi x).
/// The perturbation is Z^2-periodic with zero mean and |phi| <= eps*sqrt(2);
/// whether a cone family survives it is checked, not assumed.
class PerturbedLinearModel : public EndomorphismModel {
public:
    PerturbedLinearModel(Mat2i m, double eps)
        : eps_(eps), lin_(classify_linearisation(m)) {
        if (eps < 0.0) throw InvalidParameter("eps must be >= 0");
    }

    double eps() const { return eps_; }

    CoverPoint lift_apply(CoverPoint p) const override {
        Vec2 v = lin_.matrix.apply(p.vec());
        v.x += eps_ * std::sin(kTwoPi * p.y);
        v.y += eps_ * std::sin(kTwoPi * p.x);
        return {v.x, v.y};
    }

    Mat2 jacobian(TorusPoint p) const override {
        Mat2 j = lin_.matrix.real();
        j.b += eps_ * kTwoPi * std::cos(kTwoPi * p.y);
        j.c += eps_ * kTwoPi * std::cos(kTwoPi * p.x);
        return j;
    }

    const Linearisation& linearisation() const override { return lin_; }

private:
    double eps_;
    Linearisation lin_;
};

inline PerturbedLinearModel make_linear_model(Mat2i m) {
    return PerturbedLinearModel(m, 0.0);
}

/// The incoherent example: f(x,y) = (2x + cos(2 pi y) + 1, Psi(y)) with
/// Psi the Moebius circle map. Validates Psi'(0) < 1/2 and Psi'(1/2) > 2
/// (for the Moebius family both reduce to multiplier < 1/2, i.e. c > 1/3).
/// The lift uses the lift of Psi fixing 0, which pins the additive constant.
class IncoherentModel : public EndomorphismModel {
public:
    explicit IncoherentModel(MobiusCircleMap psi = MobiusCircleMap(0.6))
        : psi_(psi), psi_inv_(psi.inverse()) {
        if (!(psi_.multiplier() < 0.5)) {
            throw InvalidParameter(
                "IncoherentModel: need Psi'(0) < 1/2 and Psi'(1/2) > 2");
        }
        lin_ = classify_linearisation({2, 0, 0, 1});
    }

    const MobiusCircleMap& psi() const { return psi_; }

    CoverPoint lift_apply(CoverPoint p) const override {
        return {2.0 * p.x + std::cos(kTwoPi * p.y) + 1.0, psi_.lift(p.y)};
    }

    Mat2 jacobian(TorusPoint p) const override {
        return {2.0, -kTwoPi * std::sin(kTwoPi * p.y),
                0.0, psi_.derivative(p.y)};
    }

    const Linearisation& linearisation() const override { return lin_; }

    /// Closed form: y inverts through the Moebius family (parameter -c),
    /// x solves linearly.
    CoverPoint lift_inverse(CoverPoint q) const override {
        const double n = std::floor(q.y);
        const double y = n + psi_inv_.apply(q.y - n);
        const double x = (q.x - std::cos(kTwoPi * y) - 1.0) / 2.0;
        return {x, y};
    }

private:
    MobiusCircleMap psi_;
    MobiusCircleMap psi_inv_;
    Linearisation lin_;
};

/// Cone family: at p, the closed convex cone of directions within
/// half_angle of axis(p). The axis may be constant or a sampled field.
struct ConeFamily {
    std::function<Direction(TorusPoint)> axis;
    double half_angle = 0.3;

    static ConeFamily constant(Direction d, double half) {
        return {[d](TorusPoint) { return d; }, half};
    }

    bool contains(TorusPoint p, Direction d) const {
        return axis(p).distance_to(d) <= half_angle;
    }
};

struct ConeReport {
    double worst_margin_angle = 0.0;  // min angular margin of Df(C) in C
    double worst_expansion = 0.0;     // min stretch over cone directions
    TorusPoint worst_margin_point;
    TorusPoint worst_expansion_point;

    bool pass() const { return worst_margin_angle > 0.0 && worst_expansion > 1.0; }
};

/// Check Df-invariance and uniform expansion of a cone family over a
/// grid_n x grid_n torus grid. The image of the cone at p is the angular
/// hull of the images of its two boundary rays; the margin is how far
/// inside the cone at f(p) that hull sits. A failing check is a valid
/// report, not an error.
inline ConeReport cone_invariance_check(const EndomorphismModel& model,
                                        const ConeFamily& cone, int grid_n) {
    if (grid_n < 2) throw InvalidParameter("cone_invariance_check: grid_n >= 2");
    ConeReport rep;
    rep.worst_margin_angle = kPi;
    rep.worst_expansion = std::numeric_limits<double>::infinity();

    const int boundary_samples = 5;  // rays across the aperture
    for (int i = 0; i < grid_n; ++i) {
        for (int j = 0; j < grid_n; ++j) {
            const TorusPoint p{double(i) / grid_n, double(j) / grid_n};
            const Mat2 df = model.jacobian(p);
            const double axis_here = cone.axis(p).angle;
            const Direction axis_image = cone.axis(model.apply_torus(p));
            for (int s = 0; s < boundary_samples; ++s) {
                const double off =
                    -cone.half_angle +
                    (2.0 * cone.half_angle * s) / (boundary_samples - 1);
                const Vec2 ray{std::cos(axis_here + off),
                               std::sin(axis_here + off)};
                const Vec2 img = df.apply(ray);
                const double stretch = img.norm();
                if (stretch < rep.worst_expansion) {
                    rep.worst_expansion = stretch;
                    rep.worst_expansion_point = p;
                }
                if (s == 0 || s == boundary_samples - 1) {
                    const double margin =
                        cone.half_angle -
                        axis_image.distance_to(Direction::from_vector(img));
                    if (margin < rep.worst_margin_angle) {
                        rep.worst_margin_angle = margin;
                        rep.worst_margin_point = p;
                    }
                }
            }
        }
    }
    return rep;
}

/// Sup over a fundamental-domain grid of |lift_apply(p) - A p|; the
/// distance from f to A on the cover (finite by deck equivariance).
inline double displacement_from_linearisation(const EndomorphismModel& model,
                                              int grid_n = 64) {
    const Mat2 a = model.linearisation().matrix.real();
    double sup = 0.0;
    for (int i = 0; i < grid_n; ++i) {
        for (int j = 0; j < grid_n; ++j) {
            const CoverPoint p{double(i) / grid_n, double(j) / grid_n};
            const Vec2 d = model.lift_apply(p).vec() - a.apply(p.vec());
            sup = std::max(sup, d.norm());
        }
    }
    return sup;
}

}  // namespace phe
