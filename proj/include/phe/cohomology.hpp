#pragma once

#include <cmath>

#include "phe/errors.hpp"
#include "phe/mobius.hpp"

namespace phe {

/// Truncation depth for the beta/gamma series; tail bounds are computed
/// per evaluation point and returned alongside each value.
struct SeriesTruncation {
    int depth = 40;
};

struct SeriesValue {
    double value = 0.0;
    double tail_bound = 0.0;
};

namespace detail {

/// |tan(pi*y)| and |tan(pi*(y-1/2))| of a chart point, with the companion
/// factor coord*(1+coord^2) used by the derivative tails. Both are exact
/// chart conversions (T = -1/U).
inline double abs_T(const CirclePoint& p) {
    return p.near_half ? 1.0 / std::fabs(p.t) : std::fabs(p.t);
}

inline double abs_U(const CirclePoint& p) {
    return p.near_half ? std::fabs(p.t) : 1.0 / std::fabs(p.t);
}

inline double T_tail_factor(const CirclePoint& p) {
    // |T| * (1 + T^2)
    if (!p.near_half) return std::fabs(p.t) * (1.0 + p.t * p.t);
    double u = std::fabs(p.t);
    return (1.0 + u * u) / (u * u * u);
}

inline double U_tail_factor(const CirclePoint& p) {
    // |U| * (1 + U^2)
    if (p.near_half) return std::fabs(p.t) * (1.0 + p.t * p.t);
    double t = std::fabs(p.t);
    return (1.0 + t * t) / (t * t * t);
}

}  // namespace detail

/// gamma(y) = -(1/2) sum_{k=0}^{K-1} 2^{-k} (cos(2 pi Psi^k(y)) + 1).
/// Well defined and continuous on all of S^1. Tail bound 4 * 2^{-K}
/// (each term is at most 2 before the 1/2 factor).
inline SeriesValue gamma(const MobiusCircleMap& psi, double y,
                         SeriesTruncation trunc = {}) {
    const int K = trunc.depth;
    y = wrap_unit(y);
    SeriesValue out;
    out.tail_bound = std::ldexp(1.0, 2 - K);
    if (y == 0.5) return out;  // every term vanishes at the fixed point
    if (y == 0.0) {
        // Geometric series: -(1/2) * 2 * sum 2^{-k} = -2 + 2^{1-K}.
        out.value = -2.0 + std::ldexp(1.0, 1 - K);
        return out;
    }
    const CirclePoint base = CirclePoint::from_unit(y);
    double sum = 0.0;
    for (int k = 0; k < K; ++k) {
        const double mk = psi.multiplier_pow(k);
        sum += std::ldexp(base.scaled(mk).cos2pi_plus_1(), -k);
    }
    out.value = -0.5 * sum;
    return out;
}

/// beta(y) = (1/2) sum_{k=1}^{K} 2^k (cos(2 pi Psi^{-k}(y)) + 1).
/// Not defined at y = 0; callers supply the exclusion radius delta.
/// In the chart U = tan(pi*(y-1/2)) backward iterates satisfy
/// |U_k| = lambda^k |U_0| exactly, and cos(2 pi u)+1 = 2U^2/(1+U^2), so the
/// k-th term is bounded by (2 lambda^2)^k U_0^2; the tail is the geometric
/// remainder of that bound.
inline SeriesValue beta(const MobiusCircleMap& psi, double y,
                        SeriesTruncation trunc = {}, double delta = 0.02) {
    const int K = trunc.depth;
    const double lambda = psi.multiplier();
    const double rho = 2.0 * lambda * lambda;
    if (rho >= 1.0) {
        throw InsufficientDepth(
            "beta: series tail is not summable (need Psi'(0) < 1/sqrt(2))");
    }
    y = wrap_unit(y);
    if (circle_distance(y, 0.0) < delta) {
        throw SingularInput("beta: input within exclusion radius of y = 0");
    }
    SeriesValue out;
    if (y == 0.5) {
        out.tail_bound = 0.0;  // every iterate stays at the fixed point
        return out;
    }
    const CirclePoint base = CirclePoint::from_unit(y);
    const double U0 = detail::abs_U(base);
    out.tail_bound = U0 * U0 * std::pow(rho, K + 1) / (1.0 - rho);
    double sum = 0.0;
    for (int k = 1; k <= K; ++k) {
        const double mk = psi.multiplier_pow(-k);
        sum += std::ldexp(base.scaled(mk).cos2pi_plus_1(), k);
    }
    out.value = 0.5 * sum;
    return out;
}

/// Termwise derivative of gamma, C^1 away from y = 1/2:
/// gamma'(y) = pi sum_{k=0}^{K-1} 2^{-k} sin(2 pi Psi^k(y)) (Psi^k)'(y).
inline SeriesValue gamma_prime(const MobiusCircleMap& psi, double y,
                               SeriesTruncation trunc = {},
                               double delta = 0.02) {
    const int K = trunc.depth;
    y = wrap_unit(y);
    if (circle_distance(y, 0.5) < delta) {
        throw SingularInput(
            "gamma_prime: input within exclusion radius of y = 1/2");
    }
    const double lambda = psi.multiplier();
    const double r = lambda * lambda / 2.0;
    SeriesValue out;
    if (y == 0.0) {
        out.tail_bound = 0.0;
        return out;  // sin term vanishes along the whole orbit
    }
    const CirclePoint base = CirclePoint::from_unit(y);
    out.tail_bound =
        kTwoPi * detail::T_tail_factor(base) * std::pow(r, K) / (1.0 - r);
    double sum = 0.0;
    for (int k = 0; k < K; ++k) {
        const double mk = psi.multiplier_pow(k);
        sum += std::ldexp(base.scaled(mk).sin2pi(), -k) *
               base.scaled_derivative(mk);
    }
    out.value = kPi * sum;
    return out;
}

/// Termwise derivative of beta, C^1 away from y = 0:
/// beta'(y) = -pi sum_{k=1}^{K} 2^k sin(2 pi Psi^{-k}(y)) (Psi^{-k})'(y).
inline SeriesValue beta_prime(const MobiusCircleMap& psi, double y,
                              SeriesTruncation trunc = {},
                              double delta = 0.02) {
    const int K = trunc.depth;
    const double lambda = psi.multiplier();
    const double rho = 2.0 * lambda * lambda;
    if (rho >= 1.0) {
        throw InsufficientDepth(
            "beta_prime: series tail is not summable");
    }
    y = wrap_unit(y);
    if (circle_distance(y, 0.0) < delta) {
        throw SingularInput(
            "beta_prime: input within exclusion radius of y = 0");
    }
    SeriesValue out;
    if (y == 0.5) {
        out.tail_bound = 0.0;
        return out;
    }
    const CirclePoint base = CirclePoint::from_unit(y);
    out.tail_bound = kTwoPi * detail::U_tail_factor(base) *
                     std::pow(rho, K + 1) / (1.0 - rho);
    double sum = 0.0;
    for (int k = 1; k <= K; ++k) {
        const double mk = psi.multiplier_pow(-k);
        sum += std::ldexp(base.scaled(mk).sin2pi(), k) *
               base.scaled_derivative(mk);
    }
    out.value = -kPi * sum;
    return out;
}

}  // namespace phe
