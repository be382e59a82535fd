#include <catch_amalgamated.hpp>

#include "levq/error.hpp"
#include "levq/levy_model.hpp"
#include "support.hpp"

using namespace levq;
using Catch::Approx;

// Positive root of x^2 + (1 - a) x - 2a = 0, the inverse exponent of the
// M/M/1 fixture (lambda = 1, exp(2), s = 1).
static double mm1_big_phi(double a) { return 0.5 * ((a - 1.0) + std::sqrt((1.0 - a) * (1.0 - a) + 8.0 * a)); }

TEST_CASE("exponent closed forms") {
    CHECK(fixtures::brownian(1.0).phi(2.0) == Approx(4.0));
    CHECK(fixtures::mm1().phi(1.0) == Approx(2.0 / 3.0));
    for (const auto& m : fixtures::single_queue_models()) CHECK(m.phi(cplx(0.0)) == cplx(0.0));
    CHECK(fixtures::drift(0.7).phi(2.0) == Approx(1.4));
}

TEST_CASE("drift and curvature") {
    auto m = fixtures::mm1();
    CHECK(m.drift() == Approx(0.5));
    CHECK(m.curvature() == Approx(0.5));
    auto b = fixtures::brownian(-1.0);
    CHECK(b.drift() == -1.0);
    CHECK(b.curvature() == 1.0);
    auto det = fixtures::cpp(2.0, JumpLaw(Deterministic{0.25}), 1.0);
    CHECK(det.drift() == Approx(0.5));
    CHECK(det.curvature() == Approx(0.125));
    CHECK(fixtures::drift(1.0).curvature() == 0.0);
    CHECK(m.variation() == Variation::bounded);
    CHECK(b.variation() == Variation::unbounded);
}

TEST_CASE("model validation") {
    CHECK_THROWS_AS(fixtures::drift(0.0), Error);
    CHECK_THROWS_AS(fixtures::brownian(1.0, 0.0), Error);
    CHECK_THROWS_AS(fixtures::cpp(0.0, fixtures::expo(1.0), 1.0), Error);
    CHECK_THROWS_AS(fixtures::cpp(1.0, fixtures::expo(1.0), -1.0), Error);
}

TEST_CASE("inverse exponent oracles") {
    CHECK(fixtures::brownian(1.0).big_phi(4.0) == Approx(2.0));
    CHECK(fixtures::brownian(-1.0).big_phi(0.0) == Approx(2.0));
    CHECK(fixtures::brownian(-1.0).big_phi_zero() == Approx(2.0));
    auto m = fixtures::mm1();
    CHECK(m.big_phi(1.0) == Approx(1.4142135623730951).epsilon(1e-14));
    for (double a : {0.01, 0.3, 2.0, 17.0, 400.0})
        CHECK(m.big_phi(a) == Approx(mm1_big_phi(a)).epsilon(1e-13));
    // Complex arguments against the same quadratic (principal branch).
    for (cplx a : {cplx(0.0, 1.0), cplx(0.5, -3.0), cplx(2.0, 40.0), cplx(0.0, -90.0)}) {
        cplx oracle = 0.5 * ((a - 1.0) + std::sqrt((1.0 - a) * (1.0 - a) + 8.0 * a));
        CHECK(std::abs(m.big_phi(a) - oracle) < 1e-11 * (1.0 + std::abs(a)));
    }
}

TEST_CASE("inverse exponent with negative drift has a positive root at zero") {
    auto m = fixtures::cpp(1.5, fixtures::expo(1.0), 1.0);  // d = -0.5
    // phi(x) = x - 1.5 + 1.5/(1+x) vanishes at x = 0.5.
    CHECK(m.big_phi_zero() == Approx(0.5).epsilon(1e-13));
    CHECK(m.big_phi(0.0) == Approx(0.5));
    CHECK(fixtures::mm1().big_phi_zero() == 0.0);
}

TEST_CASE("inverse exponent identity on real and complex grids", "[property]") {
    fixtures::Gen g(21);
    std::vector<LevyModel> models = fixtures::single_queue_models();
    for (int i = 0; i < 40; ++i) models.push_back(g.any_model());
    // Zero drift exercises the square-root seed of the continuation.
    models.push_back(fixtures::cpp(1.0, fixtures::expo(1.0), 1.0));
    for (const auto& m : models) {
        for (double a : fixtures::log_grid(1e-2, 1e2, 30)) {
            double z = m.big_phi(a);
            CHECK(std::abs(m.phi(z) - a) <= 1e-10 * (1.0 + a));
            CHECK(z > 0.0);
        }
        for (cplx a : fixtures::complex_grid(30, 100.0, 7)) {
            cplx z = m.big_phi(a);
            CHECK(std::abs(m.phi(z) - a) <= 1e-10 * (1.0 + std::abs(a)));
            if (a.real() > 0) CHECK(z.real() > 0.0);
        }
        CHECK((m.big_phi(0.0) == 0.0) == (m.drift() >= 0));
    }
}

TEST_CASE("inverse exponent rejects the left half-plane") {
    CHECK_THROWS_AS(fixtures::mm1().big_phi(cplx(-1.0, 1.0)), Error);
}

TEST_CASE("fundamental subordinator exponent") {
    CHECK(fixtures::brownian(1.0).phi_Y(4.0).real() == Approx(-1.0));
    for (const auto& m : fixtures::single_queue_models()) CHECK(m.phi_Y(0.0) == cplx(0.0));
    // Busy-period representation: -rho (1 - E exp(-Phi(1) R)), R ~ exp(2).
    auto m = fixtures::mm1();
    double phi1 = m.big_phi(1.0);
    double oracle = -0.5 * (1.0 - 2.0 / (2.0 + phi1));
    CHECK(m.phi_Y(1.0).real() == Approx(oracle).epsilon(1e-14));
    CHECK(m.phi_Y(1.0).real() == Approx(-0.20710678118654752).epsilon(1e-14));
    CHECK(fixtures::drift(2.0).phi_Y(3.0) == cplx(0.0));
}

TEST_CASE("subordinator exponent is real, nonpositive, nonincreasing", "[property]") {
    fixtures::Gen g(22);
    for (int i = 0; i < 40; ++i) {
        auto m = g.any_model();
        double prev = 0.0;
        for (double a : fixtures::log_grid(1e-3, 1e3, 40)) {
            cplx v = m.phi_Y(a);
            CHECK(std::abs(v.imag()) < 1e-12);
            CHECK(v.real() <= 1e-12);
            CHECK(v.real() <= prev + 1e-12);
            prev = v.real();
        }
    }
}

TEST_CASE("bounded-variation dichotomy", "[property]") {
    fixtures::Gen g(23);
    for (int i = 0; i < 20; ++i) {
        auto m = g.cpp_model();
        double lim = m.phi_Y_limit();
        CHECK(lim == Approx(m.drift_plus() - m.cpp()->service));
        CHECK(std::abs(m.phi_Y(1e8).real() - lim) < 1e-5 * (1.0 + std::abs(lim)));
    }
    for (double d : {-1.0, 0.5, 2.0}) {
        auto b = fixtures::brownian(d);
        CHECK(std::isinf(b.phi_Y_limit()));
        // Grows like -sqrt(a/2): a thousandfold increase in a gives ~30x.
        CHECK(b.phi_Y(1e6).real() < 20.0 * b.phi_Y(1e3).real());
    }
}

TEST_CASE("busy period view") {
    auto v = busy_period_view(fixtures::mm1());
    CHECK(v.rho == Approx(0.5));
    REQUIRE(v.residual.terms().size() == 1);
    CHECK(v.residual.terms()[0].rate == 2.0);
    auto m = fixtures::mm1();
    double phi1 = m.big_phi(1.0);
    CHECK(v.service - v.rho * v.busy_lst(1.0).real() == Approx(1.0 / phi1).epsilon(1e-13));

    auto e = busy_period_view(fixtures::me2());
    CHECK(e.rho == Approx(0.5));
    CHECK(e.residual.terms().size() == 2);

    CHECK_THROWS_AS(busy_period_view(fixtures::cpp(1.5, fixtures::expo(1.0), 1.0)), Error);
    CHECK_THROWS_AS(busy_period_view(fixtures::brownian(1.0)), Error);
}

TEST_CASE("busy period identity on complex arguments", "[property]") {
    fixtures::Gen g(24);
    for (int i = 0; i < 30; ++i) {
        auto m = g.cpp_model();
        if (m.drift() <= 0.05) continue;
        auto v = busy_period_view(m);
        for (cplx a : fixtures::complex_grid(10, 30.0, 300 + i)) {
            if (std::abs(a) < 1e-6) continue;
            cplx lhs = a / m.big_phi(a);
            cplx rhs = v.service - v.rho * v.busy_lst(a);
            CHECK(std::abs(lhs - rhs) < 1e-9 * (1.0 + std::abs(lhs)));
        }
        CHECK(v.busy_mean() == Approx(v.residual.mean() / m.drift()));
    }
}

TEST_CASE("phi_Y stays accurate for tiny arguments", "[levy_model][numerics]") {
    // Slope at 0: -phi''(0) / (2 d) when d > 0, -1 / Phi(0) when d < 0.
    for (const auto& m : {fixtures::mm1(), fixtures::me2(), fixtures::mh2(), fixtures::brownian(0.5),
                          fixtures::cpp(1.5, fixtures::expo(1.0), 1.0), fixtures::brownian(-1.0)}) {
        double slope = m.drift() > 0 ? -m.curvature() / (2.0 * m.drift()) : -1.0 / m.big_phi_zero();
        for (double t : {1e-13, 1e-10, 1e-7}) {
            for (cplx a : {cplx(0.0, t), cplx(0.0, -t), cplx(t, 0.0)}) {
                cplx got = m.phi_Y(a);
                INFO("d " << m.drift() << " a " << a << " got " << got);
                CHECK(std::abs(got - slope * a) <= 1e-15 + 1e-5 * std::abs(slope * a));
            }
        }
    }
}
