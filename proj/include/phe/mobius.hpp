#pragma once

#include <cmath>
#include <cstdlib>

#include "phe/errors.hpp"
#include "phe/geometry.hpp"

namespace phe {

/// Circle coordinate in one of two tangent charts. Writing T = tan(pi*y)
/// around the fixed point 0 and U = tan(pi*(y - 1/2)) around 1/2 (so
/// T = -1/U), the Moebius circle map below acts exactly as T -> m*T,
/// U -> U/m. Keeping the chart coordinate preserves full relative
/// precision of the distance to either fixed point under iteration.
struct CirclePoint {
    bool near_half = false;  // chart B (around 1/2) if true
    double t = 0.0;          // tan(pi*y) or tan(pi*(y - 1/2))

    static CirclePoint from_unit(double y) {
        y = wrap_unit(y);
        double y0 = (y < 0.5) ? y : y - 1.0;
        if (std::fabs(y0) <= 0.25) return {false, std::tan(kPi * y0)};
        return {true, std::tan(kPi * (y - 0.5))};
    }

    double to_unit() const {
        if (near_half) return wrap_unit(0.5 + std::atan(t) / kPi);
        return wrap_unit(std::atan(t) / kPi);
    }

    /// Apply the map with multiplier m (exact chart arithmetic, switching
    /// charts when the image leaves |coord| <= 1).
    CirclePoint scaled(double m) const {
        if (!near_half) {
            double tp = m * t;
            if (std::fabs(tp) <= 1.0) return {false, tp};
            return {true, -1.0 / tp};
        }
        double up = t / m;
        if (std::fabs(up) <= 1.0) return {true, up};
        return {false, -1.0 / up};
    }

    /// cos(2*pi*y) + 1, computed without cancellation near y = 1/2.
    double cos2pi_plus_1() const {
        if (near_half) return 2.0 * t * t / (1.0 + t * t);
        return 2.0 / (1.0 + t * t);
    }

    /// sin(2*pi*y).
    double sin2pi() const {
        if (near_half) return -2.0 * t / (1.0 + t * t);
        return 2.0 * t / (1.0 + t * t);
    }

    /// Derivative dy'/dy of the map with multiplier m at this point.
    double scaled_derivative(double m) const {
        if (!near_half) {
            double T2 = t * t;
            return m * (1.0 + T2) / (1.0 + m * m * T2);
        }
        double U2 = t * t;
        return m * (1.0 + U2) / (U2 + m * m);
    }
};

/// Orientation-preserving Moebius diffeomorphism of the circle fixing 0 and
/// 1/2: z -> (z + c)/(1 + c z) on the unit circle, z = e^{2 pi i y}. In the
/// half-angle coordinate it is tan(pi*Psi(y)) = lambda * tan(pi*y) with
/// multiplier lambda = (1-c)/(1+c) = Psi'(0), and Psi'(1/2) = 1/lambda.
/// The family is closed under composition (multipliers multiply), so every
/// iterate Psi^k is the member with multiplier lambda^k, equivalently with
/// parameter c_k = (1 - lambda^k)/(1 + lambda^k).
class MobiusCircleMap {
public:
    explicit MobiusCircleMap(double c) : c_(c) {
        if (!(std::fabs(c) < 1.0)) {
            throw InvalidParameter("MobiusCircleMap: |c| must be < 1");
        }
        lambda_ = (1.0 - c) / (1.0 + c);
    }

    double parameter() const { return c_; }
    double multiplier() const { return lambda_; }

    MobiusCircleMap inverse() const { return MobiusCircleMap(-c_); }

    /// Psi^k as a map of the family; k may be negative.
    MobiusCircleMap power(long long k) const {
        double mk = multiplier_pow(k);
        return MobiusCircleMap((1.0 - mk) / (1.0 + mk));
    }

    double multiplier_pow(long long k) const {
        return std::pow(lambda_, double(k));
    }

    /// y in [0,1) -> Psi(y) in [0,1).
    double apply(double y) const { return iterate(y, 1); }

    /// Closed-form k-fold composition (negative k gives inverse iterates).
    double iterate(double y, long long k) const {
        y = wrap_unit(y);
        if (y == 0.0 || y == 0.5 || k == 0) return y;
        return CirclePoint::from_unit(y).scaled(multiplier_pow(k)).to_unit();
    }

    /// Psi'(y) = (1 - c^2) / (1 + 2 c cos(2 pi y) + c^2) > 0.
    double derivative(double y) const { return iterate_derivative(y, 1); }

    /// (Psi^k)'(y), exact via the chart form of the k-th iterate.
    double iterate_derivative(double y, long long k) const {
        y = wrap_unit(y);
        double mk = multiplier_pow(k);
        if (y == 0.0) return mk;
        if (y == 0.5) return 1.0 / mk;
        return CirclePoint::from_unit(y).scaled_derivative(mk);
    }

    /// Lift of Psi to R fixing 0, so lift(y + n) = lift(y) + n.
    double lift(double y) const {
        double n = std::floor(y);
        return n + apply(y - n);
    }

    /// Lift of Psi^k fixing 0.
    double lift_iterate(double y, long long k) const {
        double n = std::floor(y);
        return n + iterate(y - n, k);
    }

private:
    double c_;
    double lambda_;
};

}  // namespace phe
