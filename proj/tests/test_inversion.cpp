#include <catch_amalgamated.hpp>

#include <cmath>

#include "levq/error.hpp"
#include "levq/inversion.hpp"
#include "levq/simulator.hpp"
#include "support.hpp"

using namespace levq;
using namespace fixtures;

namespace {

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(a + (b - a) * i / (n - 1));
    return v;
}

double sup_error(const DistributionTable& t, const std::function<double(double)>& exact) {
    double e = 0.0;
    for (std::size_t k = 0; k < t.x.size(); ++k) e = std::max(e, std::abs(t.cdf[k] - exact(t.x[k])));
    return e;
}

}  // namespace

TEST_CASE("unit exponential", "[inversion][oracle]") {
    auto t = invert_lst([](cplx a) { return 1.0 / (1.0 + a); }, {1.0});
    CHECK(t.cdf[0] == Catch::Approx(0.6321206).epsilon(1e-7));
    CHECK(t.atom == Catch::Approx(0.0).margin(1e-6));
}

TEST_CASE("point mass at zero", "[inversion][oracle]") {
    auto t = invert_lst([](cplx) { return cplx(1.0); }, {0.0, 0.5, 3.0});
    // The trapezoid discretization adds about e^{-A} = target.
    for (double v : t.cdf) CHECK(v == Catch::Approx(1.0).margin(2e-8));
    CHECK(t.atom == 1.0);
}

TEST_CASE("round trip on analytic laws", "[inversion][property]") {
    auto xs = linspace(0.05, 8.0, 60);
    struct Law {
        std::function<cplx(cplx)> lst;
        std::function<double(double)> cdf;
    };
    std::vector<Law> laws = {
        {[](cplx a) { return 2.0 / (2.0 + a); }, [](double x) { return 1.0 - std::exp(-2.0 * x); }},
        {[](cplx a) { return std::pow(3.0 / (3.0 + a), 2); },
         [](double x) { return 1.0 - std::exp(-3.0 * x) * (1.0 + 3.0 * x); }},
        {[](cplx a) { return 0.3 / (1.0 + a) + 0.7 * 5.0 / (5.0 + a); },
         [](double x) { return 1.0 - 0.3 * std::exp(-x) - 0.7 * std::exp(-5.0 * x); }},
    };
    for (auto method : {InversionMethod::euler, InversionMethod::talbot}) {
        InversionConfig cfg;
        cfg.method = method;
        for (const auto& law : laws) {
            auto t = invert_lst(law.lst, xs, cfg);
            INFO(to_string(method));
            CHECK(sup_error(t, law.cdf) <= 10.0 * cfg.target);
            for (std::size_t k = 1; k < t.x.size(); ++k) CHECK(t.cdf[k] >= t.cdf[k - 1] - 2.0 * (t.err[k] + t.err[k - 1]));
        }
    }
}

TEST_CASE("M/M/1 workload distribution", "[inversion][oracle]") {
    auto m = mm1();
    auto f = [&m](cplx a) { return a == 0.0 ? cplx(1.0) : m.drift() * a / m.phi(a); };
    auto t = invert_lst(f, {1.0});
    CHECK(t.cdf[0] == Catch::Approx(0.8160603).epsilon(1e-7));
    CHECK(t.atom == Catch::Approx(0.5).margin(1e-4));
}

TEST_CASE("marginal of an isolated queue through the transform pipeline", "[inversion][marginal]") {
    auto ctx = TransformContext::build(CoupledSystem(mm1(), me2(), 0.0, 0.0));
    auto xs = linspace(0.0, 10.0, 41);
    InversionConfig cfg;
    cfg.density = true;
    auto t = marginal_distribution(ctx, 1, xs, cfg);
    CHECK(sup_error(t, [](double x) { return 1.0 - 0.5 * std::exp(-x); }) <= 1e-6);
    CHECK(t.atom == Catch::Approx(0.5).margin(1e-4));
    // Central difference of 1 - 0.5 e^{-x} over [4.75, 5.25].
    CHECK(t.density[20] == Catch::Approx(0.5 * std::exp(-5.0) * std::sinh(0.25) / 0.25).epsilon(1e-5));
    for (double d : t.density) CHECK(d >= 0.0);
}

TEST_CASE("pure-drift queue has a point mass at zero", "[inversion][marginal]") {
    auto ctx = TransformContext::build(CoupledSystem(me2(), drift(0.7), 0.4, 0.9));
    auto t = marginal_distribution(ctx, 2, {0.5, 2.0});
    for (double v : t.cdf) CHECK(v == Catch::Approx(1.0).epsilon(1e-8));
    CHECK(t.atom == Catch::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("coupled marginals are distribution functions", "[inversion][marginal]") {
    for (auto sys : {coupled_mm1(), coupled_negative()}) {
        auto ctx = TransformContext::build(sys);
        auto xs = linspace(0.0, 6.0, 13);
        for (int q : {1, 2}) {
            auto t = marginal_distribution(ctx, q, xs);
            CHECK(t.atom > 0.0);
            CHECK(t.atom < 1.0);
            for (std::size_t k = 1; k < t.x.size(); ++k) {
                CHECK(t.cdf[k] >= t.cdf[k - 1] - 2.0 * (t.err[k] + t.err[k - 1]));
                CHECK(t.cdf[k] <= 1.0 + 1e-6);
            }
        }
    }
}

TEST_CASE("coupled marginal agrees with the simulated CDF", "[inversion][marginal][mc]") {
    auto sys = coupled_mm1();
    auto ctx = TransformContext::build(sys);
    std::vector<double> xs = {0.5, 1.0, 2.0, 4.0};
    auto t = marginal_distribution(ctx, 1, xs);
    SimConfig cfg;
    cfg.horizon = 4e5;
    cfg.seed = 13;
    cfg.cdf_points = xs;
    auto rep = simulate_cpp(sys, cfg);
    for (std::size_t k = 0; k < xs.size(); ++k) {
        INFO("x " << xs[k] << " analytic " << t.cdf[k] << " sim " << rep.cdf1[k].value << " +- " << rep.cdf1[k].se);
        CHECK(std::abs(t.cdf[k] - rep.cdf1[k].value) <= 3.0 * rep.cdf1[k].se);
    }
    CHECK(std::abs(t.atom - rep.idle1.value) <= 3.0 * rep.idle1.se);
}

TEST_CASE("inversion configuration errors", "[inversion][errors]") {
    auto kind = [](auto&& f) {
        try {
            f();
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::singularity;
    };
    InversionConfig few;
    few.terms = 5;
    CHECK(kind([&] { validate(few); }) == ErrorKind::invalid_argument);
    InversionConfig tight;
    tight.target = 1e-14;
    CHECK(kind([&] { validate(tight); }) == ErrorKind::invalid_argument);
    auto ctx = TransformContext::build(coupled_mm1());
    InversionConfig talbot;
    talbot.method = InversionMethod::talbot;
    CHECK(kind([&] { marginal_distribution(ctx, 1, {1.0}, talbot); }) == ErrorKind::unsupported);
    // A transform that is not an LST does not converge.
    auto bad = [](cplx a) { return std::exp(a * a * 1e-3) * cplx(std::cos(50.0 * a.imag()), 0.0); };
    CHECK(kind([&] { invert_lst(bad, {1.0, 2.0}); }) == ErrorKind::numerical_failure);
}
