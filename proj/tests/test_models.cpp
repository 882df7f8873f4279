#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "phe/models.hpp"

using namespace phe;

TEST_CASE("incoherent model basics") {
    const IncoherentModel f;

    SECTION("(0,0) is a fixed point; its lift image is (2,0)") {
        const CoverPoint img = f.lift_apply({0.0, 0.0});
        CHECK(img.x == Catch::Approx(2.0).margin(1e-15));
        CHECK(img.y == 0.0);
        const TorusPoint t = f.apply_torus({0.0, 0.0});
        CHECK(t.x == 0.0);
        CHECK(t.y == 0.0);
        const CoverPoint back = f.lift_inverse({2.0, 0.0});
        CHECK(std::fabs(back.x) <= 1e-14);
        CHECK(std::fabs(back.y) <= 1e-14);
    }

    SECTION("jacobian at y = 1/4 is [[2, -2 pi], [0, Psi'(1/4)]]") {
        const Mat2 j = f.jacobian(TorusPoint{0.3, 0.25});
        CHECK(j.a == 2.0);
        CHECK(j.b == Catch::Approx(-kTwoPi).margin(1e-12));
        CHECK(j.c == 0.0);
        CHECK(j.d == Catch::Approx(f.psi().derivative(0.25)).margin(1e-15));
    }

    SECTION("jacobian determinant is 2 Psi'(y) > 0 everywhere") {
        for (int i = 0; i < 100; ++i) {
            const double y = double(i) / 100.0;
            const Mat2 j = f.jacobian(TorusPoint{0.0, y});
            CHECK(j.det() ==
                  Catch::Approx(2.0 * f.psi().derivative(y)).margin(1e-12));
            CHECK(j.det() > 0.0);
        }
    }

    SECTION("linearisation is diag(2,1), non-hyperbolic") {
        CHECK(f.linearisation().cls == SpectrumClass::non_hyperbolic);
        CHECK(f.linearisation().lambda_u == 2.0);
    }

    SECTION("Psi hypotheses validated") {
        CHECK_THROWS_AS(IncoherentModel(MobiusCircleMap(0.2)),
                        InvalidParameter);
        CHECK_NOTHROW(IncoherentModel(MobiusCircleMap(0.4)));
    }
}

TEST_CASE("perturbed linear model") {
    SECTION("eps = 0 is exactly linear") {
        const PerturbedLinearModel lin = make_linear_model({3, 1, 1, 1});
        std::mt19937_64 rng(43);
        std::uniform_real_distribution<double> dist(-2.0, 2.0);
        const Mat2 m = lin.linearisation().matrix.real();
        const Mat2 minv = m.inverse();
        for (int i = 0; i < 100; ++i) {
            const CoverPoint p{dist(rng), dist(rng)};
            const Vec2 lhs = lin.lift_apply(p).vec();
            const Vec2 rhs = m.apply(p.vec());
            CHECK((lhs - rhs).norm() == 0.0);
            const CoverPoint q{dist(rng), dist(rng)};
            const Vec2 inv = lin.lift_inverse(q).vec();
            CHECK((inv - minv.apply(q.vec())).norm() <= 1e-14);
        }
    }

    SECTION("phi is bounded by eps * sqrt(2)") {
        const PerturbedLinearModel f({3, 1, 1, 1}, 0.05);
        CHECK(displacement_from_linearisation(f) <=
              0.05 * std::sqrt(2.0) + 1e-15);
        CHECK(displacement_from_linearisation(f) > 0.04);
    }
}

TEST_CASE("lift inverse round trip") {
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    const IncoherentModel inc;
    const PerturbedLinearModel pert({3, 1, 1, 1}, 0.05);
    const EndomorphismModel* models[] = {&inc, &pert};
    for (const EndomorphismModel* m : models) {
        for (int i = 0; i < 100; ++i) {
            const CoverPoint p{dist(rng), dist(rng)};
            const CoverPoint q = m->lift_inverse(m->lift_apply(p));
            CHECK((q - p).norm() <= 1e-10);
        }
    }
}

TEST_CASE("deck equivariance of lifts") {
    const IncoherentModel inc;
    const PerturbedLinearModel pert({3, 1, 1, 1}, 0.05);
    const PerturbedLinearModel lin = make_linear_model({2, 0, 0, 3});
    const EndomorphismModel* models[] = {&inc, &pert, &lin};
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (const EndomorphismModel* m : models) {
        const Mat2 a = m->linearisation().matrix.real();
        for (int i = 0; i < 30; ++i) {
            const CoverPoint p{dist(rng), dist(rng)};
            for (long long vm = -2; vm <= 2; ++vm) {
                for (long long vn = -2; vn <= 2; ++vn) {
                    const Vec2 lhs =
                        m->lift_apply(deck_translate(p, {vm, vn})).vec() -
                        m->lift_apply(p).vec();
                    const Vec2 rhs = a.apply({double(vm), double(vn)});
                    CHECK((lhs - rhs).norm() <= 1e-12);
                }
            }
        }
    }
}

TEST_CASE("displacement from linearisation is finite and reported") {
    const IncoherentModel inc;
    const double k0 = displacement_from_linearisation(inc);
    // lift - A p = (cos(2 pi y) + 1, Psi_lift(y) - y)
    CHECK(k0 > 1.9);
    CHECK(k0 <= 2.0 + 0.5);
}

TEST_CASE("cone invariance checks") {
    SECTION("linear hyperbolic model passes around v_u") {
        const PerturbedLinearModel lin = make_linear_model({3, 1, 1, 1});
        const ConeFamily cone = ConeFamily::constant(
            Direction::from_vector(lin.linearisation().v_u), 0.3);
        const ConeReport rep = cone_invariance_check(lin, cone, 16);
        CHECK(rep.pass());
        CHECK(rep.worst_margin_angle > 0.1);
        // v_u itself stretches by lambda_u = 2 + sqrt(2); boundary rays a
        // cos-factor less.
        CHECK(rep.worst_expansion > 1.0);
        CHECK(rep.worst_expansion >=
              lin.linearisation().lambda_u * std::cos(0.3) - 0.2);
    }

    SECTION("small perturbation keeps the cone") {
        const PerturbedLinearModel f({3, 1, 1, 1}, 0.05);
        const ConeFamily cone = ConeFamily::constant(
            Direction::from_vector(f.linearisation().v_u), 0.3);
        const ConeReport rep = cone_invariance_check(f, cone, 16);
        CHECK(rep.pass());
    }

    SECTION("eps = 1.0 destroys invariance and the report says so") {
        const PerturbedLinearModel f({3, 1, 1, 1}, 1.0);
        const ConeFamily cone = ConeFamily::constant(
            Direction::from_vector(f.linearisation().v_u), 0.3);
        const ConeReport rep = cone_invariance_check(f, cone, 16);
        CHECK_FALSE(rep.pass());
        CHECK(rep.worst_margin_angle <= 0.0);
    }

    SECTION("grid precondition") {
        const PerturbedLinearModel lin = make_linear_model({3, 1, 1, 1});
        const ConeFamily cone =
            ConeFamily::constant(horizontal_direction(), 0.3);
        CHECK_THROWS_AS(cone_invariance_check(lin, cone, 1), InvalidParameter);
    }
}

TEST_CASE("newton inversion failure is surfaced") {
    // A huge perturbation makes the lift non-injective; Newton may still
    // converge somewhere, so drive it with an absurd eps to exercise the
    // error path deterministically.
    const PerturbedLinearModel f({3, 1, 1, 1}, 60.0);
    bool threw = false;
    std::mt19937_64 rng(59);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (int i = 0; i < 200 && !threw; ++i) {
        try {
            (void)f.lift_inverse({dist(rng), dist(rng)});
        } catch (const InversionFailure& e) {
            threw = true;
            CHECK(e.residual() > 1e-12);
        }
    }
    CHECK(threw);
}
