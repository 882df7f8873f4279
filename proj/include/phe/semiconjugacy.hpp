#pragma once

#include <cmath>
#include <vector>

#include "phe/errors.hpp"
#include "phe/geometry.hpp"
#include "phe/models.hpp"

namespace phe {

/// Numerical Franks semiconjugacy H for a model with hyperbolic
/// linearisation: the unique continuous surjection with A o H = H o f that
/// commutes with deck transformations and stays a finite distance from the
/// identity. Writing f = A + phi and h = H - id, the defining equation
/// becomes A h(p) - h(f(p)) = phi(p), solved componentwise in the adapted
/// coordinates:
///   h^u(p) =  sum_{k=0}^{N-1} lambda_u^{-(k+1)} phi^u(f^k p)
///   h^s(p) = -sum_{k=1}^{N}   lambda_s^{k-1}   phi^s(f^{-k} p)
/// with geometric tails |lambda_u|^{-N} and |lambda_s|^N times sup|phi|.
class SemiconjugacyApprox {
public:
    SemiconjugacyApprox(const EndomorphismModel& model, int depth = 30)
        : model_(&model),
          depth_(depth),
          lin_(model.linearisation()),
          proj_(projections(lin_)) {
        if (depth < 1) throw InvalidParameter("SemiconjugacyApprox: depth >= 1");
        measure_phi_sup();
    }

    int depth() const { return depth_; }
    const Linearisation& linearisation() const { return lin_; }
    const ProjectionPair& proj() const { return proj_; }
    double phi_sup_s() const { return phi_sup_s_; }
    double phi_sup_u() const { return phi_sup_u_; }

    double tail_s() const {
        const double as = std::fabs(lin_.lambda_s);
        return phi_sup_s_ * std::pow(as, depth_) / (1.0 - as);
    }
    double tail_u() const {
        const double au = std::fabs(lin_.lambda_u);
        return phi_sup_u_ * std::pow(au, -(depth_ + 1)) / (1.0 - 1.0 / au);
    }

    Vec2 phi(CoverPoint p) const {
        return model_->lift_apply(p).vec() - lin_.matrix.apply(p.vec());
    }

    /// h(p) = H(p) - p as the truncated two-sided series.
    Vec2 displacement(CoverPoint p) const {
        double hu = 0.0;
        {
            CoverPoint q = p;
            double coef = 1.0 / lin_.lambda_u;
            for (int k = 0; k < depth_; ++k) {
                hu += coef * proj_.u(phi(q));
                coef /= lin_.lambda_u;
                q = model_->lift_apply(q);
            }
        }
        double hs = 0.0;
        {
            CoverPoint q = p;
            double coef = 1.0;
            for (int k = 1; k <= depth_; ++k) {
                q = model_->lift_inverse(q);
                hs -= coef * proj_.s(phi(q));
                coef *= lin_.lambda_s;
            }
        }
        return lin_.v_s * hs + lin_.v_u * hu;
    }

    CoverPoint map(CoverPoint p) const { return p + displacement(p); }

    double H_s(CoverPoint p) const { return proj_.s(map(p)); }
    double H_u(CoverPoint p) const { return proj_.u(map(p)); }

    /// Residual of the defining equation at p.
    double conjugacy_residual(CoverPoint p) const {
        const Vec2 lhs = lin_.matrix.apply(map(p).vec());
        const Vec2 rhs = map(model_->lift_apply(p)).vec();
        return (lhs - rhs).norm();
    }

    /// max |h| over a fundamental-domain grid plus the series tails (deck
    /// equivariance of h makes the fundamental domain global).
    double displacement_bound(int grid_n) const {
        if (grid_n < 1) throw InvalidParameter("displacement_bound: grid_n >= 1");
        double sup = 0.0;
        for (int i = 0; i < grid_n; ++i) {
            for (int j = 0; j < grid_n; ++j) {
                const CoverPoint p{double(i) / grid_n, double(j) / grid_n};
                sup = std::max(sup, displacement(p).norm());
            }
        }
        return sup + tail_s() * lin_.v_s.norm() + tail_u() * lin_.v_u.norm();
    }

private:
    void measure_phi_sup() {
        const int grid_n = 64;
        double ss = 0.0, su = 0.0;
        for (int i = 0; i < grid_n; ++i) {
            for (int j = 0; j < grid_n; ++j) {
                const Vec2 v = phi({double(i) / grid_n, double(j) / grid_n});
                ss = std::max(ss, std::fabs(proj_.s(v)));
                su = std::max(su, std::fabs(proj_.u(v)));
            }
        }
        // Small headroom for the grid missing the true sup.
        phi_sup_s_ = ss * 1.05;
        phi_sup_u_ = su * 1.05;
    }

    const EndomorphismModel* model_;
    int depth_;
    Linearisation lin_;
    ProjectionPair proj_;
    double phi_sup_s_ = 0.0;
    double phi_sup_u_ = 0.0;
};

}  // namespace phe
