#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "phe/errors.hpp"

namespace phe {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator-() const { return {-x, -y}; }
    double norm() const { return std::hypot(x, y); }
    Vec2 normalized() const {
        double n = norm();
        return {x / n, y / n};
    }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

/// Point on the universal cover R^2.
struct CoverPoint {
    double x = 0.0;
    double y = 0.0;

    Vec2 vec() const { return {x, y}; }
    CoverPoint operator+(Vec2 v) const { return {x + v.x, y + v.y}; }
    Vec2 operator-(CoverPoint o) const { return {x - o.x, y - o.y}; }
};

/// Point on T^2 = R^2/Z^2, coordinates canonically in [0,1).
struct TorusPoint {
    double x = 0.0;
    double y = 0.0;
};

/// Deck transformations are translations by integer vectors.
struct LatticeVector {
    long long m = 0;
    long long n = 0;

    Vec2 vec() const { return {double(m), double(n)}; }
};

/// Reduce a real coordinate into [0,1). The single place where wrap-around
/// happens; the result is always a valid torus coordinate, even when
/// rounding pushes x - floor(x) to 1.0.
inline double wrap_unit(double t) {
    double r = t - std::floor(t);
    if (r >= 1.0) r -= 1.0;
    if (r < 0.0) r = 0.0;
    return r;
}

inline TorusPoint cover_to_torus(CoverPoint p) {
    return {wrap_unit(p.x), wrap_unit(p.y)};
}

inline CoverPoint torus_to_cover(TorusPoint p) { return {p.x, p.y}; }

inline CoverPoint deck_translate(CoverPoint p, LatticeVector v) {
    return {p.x + double(v.m), p.y + double(v.n)};
}

/// Distance between two angles/coordinates on the unit circle R/Z.
inline double circle_distance(double a, double b) {
    double d = std::fabs(wrap_unit(a) - wrap_unit(b));
    return std::min(d, 1.0 - d);
}

/// Quotient metric on T^2; the per-coordinate wrap realises the minimum
/// over the nine adjacent lattice translates.
inline double torus_distance(TorusPoint a, TorusPoint b) {
    return std::hypot(circle_distance(a.x, b.x), circle_distance(a.y, b.y));
}

/// Projective tangent line, represented by an angle in [0, pi).
struct Direction {
    double angle = 0.0;

    static Direction from_vector(Vec2 v) {
        double a = std::atan2(v.y, v.x);
        if (a < 0.0) a += kPi;
        if (a >= kPi) a -= kPi;
        return {a};
    }

    Vec2 vec() const { return {std::cos(angle), std::sin(angle)}; }

    double distance_to(Direction o) const {
        double d = std::fabs(angle - o.angle);
        return std::min(d, kPi - d);
    }
};

inline Direction horizontal_direction() { return {0.0}; }

/// 2x2 real matrix, row major.
struct Mat2 {
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

    Vec2 apply(Vec2 v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
    double det() const { return a * d - b * c; }
    Mat2 inverse() const {
        double dt = det();
        return {d / dt, -b / dt, -c / dt, a / dt};
    }
    Vec2 solve(Vec2 rhs) const { return inverse().apply(rhs); }
    Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d,
                c * o.a + d * o.c, c * o.b + d * o.d};
    }
};

/// 2x2 integer matrix (the induced map on pi_1).
struct Mat2i {
    long long a = 0, b = 0, c = 0, d = 0;

    long long det() const { return a * d - b * c; }
    long long trace() const { return a + d; }
    Mat2 real() const { return {double(a), double(b), double(c), double(d)}; }
    Vec2 apply(Vec2 v) const { return real().apply(v); }
};

enum class SpectrumClass { hyperbolic, expanding, non_hyperbolic, degenerate };

inline std::string to_string(SpectrumClass c) {
    switch (c) {
        case SpectrumClass::hyperbolic: return "hyperbolic";
        case SpectrumClass::expanding: return "expanding";
        case SpectrumClass::non_hyperbolic: return "non_hyperbolic";
        case SpectrumClass::degenerate: return "degenerate";
    }
    return "degenerate";
}

/// Eigen-structure of an integer 2x2 matrix, ordered |lambda_s| <= |lambda_u|.
struct Linearisation {
    Mat2i matrix;
    bool real_spectrum = false;
    double lambda_s = 0.0;
    double lambda_u = 0.0;
    Vec2 v_s{1.0, 0.0};
    Vec2 v_u{0.0, 1.0};
    SpectrumClass cls = SpectrumClass::degenerate;
};

namespace detail {

/// Unit eigenvector of m for eigenvalue lambda, picking the better
/// conditioned of the two row candidates; scalar matrices fall back to e1.
inline Vec2 eigenvector(const Mat2i& m, double lambda) {
    Vec2 c1{double(m.b), lambda - double(m.a)};
    Vec2 c2{lambda - double(m.d), double(m.c)};
    Vec2 v = (c1.norm() >= c2.norm()) ? c1 : c2;
    if (v.norm() == 0.0) v = {1.0, 0.0};
    v = v.normalized();
    if (v.x < 0.0 || (v.x == 0.0 && v.y < 0.0)) v = -v;
    return v;
}

}  // namespace detail

/// Classify an integer matrix by the trichotomy on its eigenvalues.
/// Eigenvalues come from the closed-form quadratic on trace/determinant;
/// membership of +-1 in the spectrum is decided in exact integer arithmetic,
/// so the class boundaries cannot be lost to rounding.
inline Linearisation classify_linearisation(Mat2i m) {
    if (m.det() == 0) {
        throw InvalidLinearisation(
            "classify_linearisation: zero determinant");
    }
    Linearisation lin;
    lin.matrix = m;

    const long long tr = m.trace();
    const long long det = m.det();
    const long long disc = tr * tr - 4 * det;
    if (disc < 0) {
        // Non-real spectrum: detected and rejected as degenerate.
        lin.real_spectrum = false;
        lin.cls = SpectrumClass::degenerate;
        lin.lambda_s = lin.lambda_u = std::nan("");
        return lin;
    }
    lin.real_spectrum = true;

    const bool root_one = (1 - tr + det) == 0;
    const bool root_minus_one = (1 + tr + det) == 0;

    double l1, l2;
    if (root_one) {
        l1 = 1.0;
        l2 = double(det);
    } else if (root_minus_one) {
        l1 = -1.0;
        l2 = -double(det);
    } else {
        const double sd = std::sqrt(double(disc));
        // Stable quadratic: avoid cancellation in the smaller root.
        const double q =
            (tr >= 0) ? (double(tr) + sd) / 2.0 : (double(tr) - sd) / 2.0;
        l1 = q;
        l2 = double(det) / q;
    }
    if (std::fabs(l1) <= std::fabs(l2)) {
        lin.lambda_s = l1;
        lin.lambda_u = l2;
    } else {
        lin.lambda_s = l2;
        lin.lambda_u = l1;
    }
    lin.v_s = detail::eigenvector(m, lin.lambda_s);
    lin.v_u = detail::eigenvector(m, lin.lambda_u);

    const double as = std::fabs(lin.lambda_s);
    const double au = std::fabs(lin.lambda_u);
    if (au <= 1.0) {
        lin.cls = SpectrumClass::degenerate;
    } else if (as == 1.0) {
        lin.cls = SpectrumClass::non_hyperbolic;
    } else if (as < 1.0) {
        lin.cls = SpectrumClass::hyperbolic;
    } else {
        lin.cls = SpectrumClass::expanding;
    }
    return lin;
}

/// Adapted linear coordinates: pi_s kills the unstable eigenline and is
/// normalised by pi_s(v_s) = 1; symmetrically for pi_u. A vector w then
/// decomposes as w = pi_s(w) v_s + pi_u(w) v_u.
struct ProjectionPair {
    Vec2 pi_s;  // coefficient pair: pi_s(w) = dot(pi_s, w)
    Vec2 pi_u;

    double s(Vec2 w) const { return dot(pi_s, w); }
    double u(Vec2 w) const { return dot(pi_u, w); }
    double s(CoverPoint p) const { return s(p.vec()); }
    double u(CoverPoint p) const { return u(p.vec()); }
    Vec2 reconstruct(double cs, double cu, const Linearisation& lin) const {
        return lin.v_s * cs + lin.v_u * cu;
    }
};

inline ProjectionPair projections(const Linearisation& lin) {
    if (lin.cls != SpectrumClass::hyperbolic) {
        throw UnsupportedClass(
            "projections: linearisation must be hyperbolic, got " +
            to_string(lin.cls));
    }
    const double den_s = cross(lin.v_u, lin.v_s);
    const double den_u = cross(lin.v_s, lin.v_u);
    ProjectionPair pp;
    pp.pi_s = {-lin.v_u.y / den_s, lin.v_u.x / den_s};
    pp.pi_u = {-lin.v_s.y / den_u, lin.v_s.x / den_u};
    return pp;
}

}  // namespace phe
