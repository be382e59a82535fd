#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "levq/coupled_system.hpp"
#include "levq/random.hpp"

namespace fixtures {

using levq::cplx;
using levq::CompoundPoisson;
using levq::CoupledSystem;
using levq::JumpLaw;
using levq::LevyModel;

inline LevyModel brownian(double d, double sigma = 1.0) { return LevyModel(levq::Brownian{d, sigma}); }
inline LevyModel drift(double d) { return LevyModel(levq::PureDrift{d}); }
inline LevyModel cpp(double lambda, JumpLaw jump, double s) {
    return LevyModel(CompoundPoisson{lambda, std::move(jump), s});
}
inline JumpLaw expo(double rate) { return JumpLaw(levq::Exponential{rate}); }
inline JumpLaw erlang(int k, double rate) { return JumpLaw(levq::Erlang{k, rate}); }
inline JumpLaw hyper(std::vector<double> w, std::vector<double> r) {
    return JumpLaw(levq::Hyperexponential{std::move(w), std::move(r)});
}

// lambda = 1, exp(2) jumps, s = 1: rho = 0.5, d = 0.5.
inline LevyModel mm1() { return cpp(1.0, expo(2.0), 1.0); }
inline LevyModel me2() { return cpp(1.0, erlang(2, 4.0), 1.0); }
inline LevyModel mh2() { return cpp(0.5, hyper({0.4, 0.6}, {1.0, 3.0}), 0.8); }

inline std::vector<LevyModel> single_queue_models() {
    return {brownian(-1.0), brownian(0.5), brownian(2.0), mm1(), me2(), mh2()};
}

inline CoupledSystem coupled_mm1() { return CoupledSystem(mm1(), mm1(), 0.5, 0.5); }
inline CoupledSystem coupled_mixed() { return CoupledSystem(me2(), mh2(), 0.3, 0.8); }
inline CoupledSystem coupled_asym() {
    return CoupledSystem(cpp(2.0, expo(4.0), 1.0), cpp(1.0, expo(1.5), 1.2), 1.5, 0.4);
}
// d1 = 1 - 1.5 = -0.5 < 0 compensated by r1 d2.
inline CoupledSystem coupled_negative() {
    return CoupledSystem(cpp(1.5, expo(1.0), 1.0), cpp(0.5, expo(2.0), 2.0), 0.6, 0.2);
}

// Hand-rolled generators for property tests.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(levq::make_stream(seed, 0)) {}

    double uniform(double a, double b) { return a + (b - a) * (1.0 - levq::uniform01(rng_)); }
    int integer(int a, int b) { return a + static_cast<int>(std::floor(uniform(0, 1) * (b - a + 1))) % (b - a + 1); }

    JumpLaw jump(bool allow_deterministic = true) {
        int kind = integer(0, allow_deterministic ? 3 : 2);
        switch (kind) {
        case 0: return expo(uniform(0.5, 5.0));
        case 1: return erlang(integer(1, 4), uniform(1.0, 8.0));
        case 2: {
            double w = uniform(0.1, 0.9);
            return hyper({w, 1.0 - w}, {uniform(0.5, 2.0), uniform(2.0, 6.0)});
        }
        default: return JumpLaw(levq::Deterministic{uniform(0.1, 1.5)});
        }
    }

    // CPP with load lambda E B / s in (0.1, 1.6), so drifts of both signs appear.
    LevyModel cpp_model(bool allow_deterministic = true) {
        auto j = jump(allow_deterministic);
        double s = uniform(0.5, 2.0);
        double load = uniform(0.1, 1.6);
        double lambda = load * s / j.mean();
        return cpp(lambda, j, s);
    }

    LevyModel any_model() {
        int kind = integer(0, 3);
        if (kind == 0) return brownian(uniform(-2.0, 2.0), uniform(0.3, 2.0));
        if (kind == 1) return drift(uniform(0.1, 2.0));
        return cpp_model();
    }

    // Stable coupled CPP system with non-deterministic jumps.
    CoupledSystem stable_cpp_system() {
        for (;;) {
            auto m1 = cpp_model(false);
            auto m2 = cpp_model(false);
            double r1 = uniform(0.0, 1.5);
            double r2 = uniform(0.0, 0.9 / std::max(r1, 0.01));
            r2 = std::min(r2, 1.5);
            if (r1 * r2 >= 0.95) continue;
            CoupledSystem s(m1, m2, r1, r2);
            auto st = levq::check_stability(s);
            if (st.margin1 > 0.05 && st.margin2 > 0.05) return s;
        }
    }

private:
    levq::Rng rng_;
};

inline std::vector<cplx> complex_grid(int n, double radius, std::uint64_t seed) {
    Gen g(seed);
    std::vector<cplx> pts;
    for (int i = 0; i < n; ++i) {
        double r = radius * std::pow(g.uniform(0.0, 1.0), 2.0);
        double th = g.uniform(-M_PI / 2, M_PI / 2);
        pts.emplace_back(r * std::cos(th), r * std::sin(th));
    }
    return pts;
}

inline std::vector<double> log_grid(double a, double b, int n) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(a * std::pow(b / a, i / double(n - 1)));
    return v;
}

}  // namespace fixtures
