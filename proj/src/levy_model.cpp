#include "levq/levy_model.hpp"

#include <cmath>
#include <limits>

#include "levq/error.hpp"

namespace levq {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool finite(double x) { return std::isfinite(x); }

}  // namespace

LevyModel::LevyModel(Variant v) : v_(std::move(v)) {
    std::visit(overloaded{
                   [this](const CompoundPoisson& c) {
                       require(c.lambda > 0 && finite(c.lambda), ErrorKind::invalid_argument,
                               "arrival rate must be positive");
                       require(c.service > 0 && finite(c.service), ErrorKind::invalid_argument,
                               "service rate must be positive");
                       d_ = c.service - c.lambda * c.jump.mean();
                   },
                   [this](const Brownian& b) {
                       require(b.sigma > 0 && finite(b.sigma), ErrorKind::invalid_argument,
                               "volatility must be positive");
                       require(finite(b.drift), ErrorKind::invalid_argument, "drift must be finite");
                       d_ = b.drift;
                   },
                   [this](const PureDrift& p) {
                       require(p.d > 0 && finite(p.d), ErrorKind::invalid_argument,
                               "pure drift rate must be positive");
                       d_ = p.d;
                   },
               },
               v_);
    if (d_ < 0) {
        if (const auto* b = std::get_if<Brownian>(&v_)) {
            phi0_ = -2.0 * d_ / (b->sigma * b->sigma);
        } else {
            phi0_ = solve_real(0.0);
        }
    }
}

cplx LevyModel::phi(cplx a) const {
    return std::visit(overloaded{
                          [a](const CompoundPoisson& c) {
                              // a (s - lambda E B residual_lst(a)) avoids cancelling near 0.
                              return a * (c.service - c.lambda * c.jump.mean() * c.jump.residual_lst(a));
                          },
                          [a](const Brownian& b) { return b.drift * a + 0.5 * b.sigma * b.sigma * a * a; },
                          [a](const PureDrift& p) { return p.d * a; },
                      },
                      v_);
}

cplx LevyModel::phi_prime(cplx a) const {
    return std::visit(overloaded{
                          [a](const CompoundPoisson& c) {
                              return c.service + c.lambda * c.jump.lst_derivative(a);
                          },
                          [a](const Brownian& b) { return b.drift + b.sigma * b.sigma * a; },
                          [](const PureDrift& p) { return cplx(p.d); },
                      },
                      v_);
}

double LevyModel::curvature() const {
    return std::visit(overloaded{
                          [](const CompoundPoisson& c) { return c.lambda * c.jump.second_moment(); },
                          [](const Brownian& b) { return b.sigma * b.sigma; },
                          [](const PureDrift&) { return 0.0; },
                      },
                      v_);
}

double LevyModel::service_rate() const {
    if (const auto* c = std::get_if<CompoundPoisson>(&v_)) return c->service;
    if (const auto* p = std::get_if<PureDrift>(&v_)) return p->d;
    fail(ErrorKind::unsupported, "service rate undefined for unbounded-variation input");
}

double LevyModel::phi_Y_limit() const {
    if (is_brownian()) return -std::numeric_limits<double>::infinity();
    return drift_plus() - service_rate();
}

// Rightmost root of phi(x) = a for a >= 0. phi is convex, so Newton started
// to the right of the root decreases monotonically onto it.
double LevyModel::solve_real(double a) const {
    if (const auto* p = std::get_if<PureDrift>(&v_)) return a / p->d;
    if (const auto* b = std::get_if<Brownian>(&v_)) {
        double s2 = b->sigma * b->sigma;
        double disc = std::sqrt(b->drift * b->drift + 2.0 * s2 * a);
        if (b->drift > 0) return 2.0 * a / (b->drift + disc);
        return (disc - b->drift) / s2;
    }
    const auto& c = std::get<CompoundPoisson>(v_);
    if (a == 0.0 && d_ >= 0) return 0.0;

    double lo = phi0_;
    double hi = std::max(lo, (a + c.lambda) / c.service);
    double x = hi;
    const double tol = 1e-14 * (1.0 + a);
    for (int it = 0; it < 200; ++it) {
        double f = phi(x) - a;
        if (std::abs(f) <= tol) return x;
        if (f > 0) hi = x; else lo = x;
        double fp = phi_prime(cplx(x)).real();
        double next = fp > 0 ? x - f / fp : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= 1e-16 * std::max(1.0, std::abs(x))) {
            x = next;
            break;
        }
        x = next;
    }
    require(std::abs(phi(x) - a) <= 1e-12 * (1.0 + a), ErrorKind::numerical_failure,
            "inverse exponent did not converge for real argument");
    return x;
}

double LevyModel::big_phi(double a) const {
    require(a >= 0, ErrorKind::domain, "inverse exponent needs a nonnegative argument");
    if (a == 0.0) return phi0_;
    return solve_real(a);
}

cplx LevyModel::big_phi(cplx a) const {
    require(a.real() >= -1e-14 * (1.0 + std::abs(a)), ErrorKind::domain,
            "inverse exponent needs Re(a) >= 0");
    a.real(std::max(a.real(), 0.0));
    if (a.imag() == 0.0) return big_phi(a.real());
    if (const auto* p = std::get_if<PureDrift>(&v_)) return a / p->d;
    if (const auto* b = std::get_if<Brownian>(&v_)) {
        double s2 = b->sigma * b->sigma;
        cplx disc = std::sqrt(b->drift * b->drift + 2.0 * s2 * a);
        if (b->drift > 0) return 2.0 * a / (b->drift + disc);
        return (disc - b->drift) / s2;
    }

    // Continuation along the vertical segment Re(a) + i t Im(a), t in [0, 1].
    const double a0 = a.real();
    const double b = a.imag();
    cplx z = big_phi(a0);
    double t = 0.0;
    double dt = 1.0 / 8.0;
    int attempts = 0;
    while (t < 1.0) {
        require(++attempts <= 4096 && dt > 1e-12, ErrorKind::numerical_failure,
                "inverse exponent continuation failed");
        double t_next = std::min(1.0, t + dt);
        cplx target(a0, b * t_next);
        cplx seed;
        if (std::abs(z) == 0.0 && d_ == 0.0) {
            seed = std::sqrt(2.0 * target / curvature());
        } else {
            cplx step = target - cplx(a0, b * t);
            seed = z + step / phi_prime(z);
        }
        cplx w = seed;
        bool ok = false;
        for (int it = 0; it < 12; ++it) {
            cplx fp = phi_prime(w);
            if (fp == 0.0) break;
            cplx delta = (phi(w) - target) / fp;
            w -= delta;
            if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) break;
            if (std::abs(delta) <= 1e-15 * (1.0 + std::abs(w))) {
                ok = true;
                break;
            }
        }
        ok = ok || std::abs(phi(w) - target) <= 1e-12 * (1.0 + std::abs(target));
        // Reject corrector jumps that could land on another root.
        bool stayed = std::abs(w - seed) <= 0.25 * std::abs(seed - z) + 1e-6 * (1.0 + std::abs(z));
        if (ok && stayed && w.real() >= -1e-12) {
            z = w;
            t = t_next;
            dt = std::min(2.0 * dt, 1.0 / 8.0);
        } else {
            dt *= 0.5;
        }
    }
    // Polish at the target.
    for (int it = 0; it < 3; ++it) {
        cplx fp = phi_prime(z);
        if (fp == 0.0) break;
        z -= (phi(z) - a) / fp;
    }
    require(std::abs(phi(z) - a) <= 1e-10 * (1.0 + std::abs(a)), ErrorKind::numerical_failure,
            "inverse exponent residual above tolerance");
    return z;
}

cplx LevyModel::phi_Y(cplx a) const {
    if (a == 0.0) return 0.0;
    if (is_pure_drift()) return 0.0;
    // For d >= 0, a / Phi(a) = phi(z) / z at z = Phi(a) is expanded so that
    // small a does not lose the leading digits.
    const cplx z = big_phi(a);
    if (d_ < 0) return -a / z;
    if (const auto* c = cpp())
        return drift_plus() - c->service + c->lambda * c->jump.mean() * c->jump.residual_lst(z);
    return drift_plus() - drift() - 0.5 * curvature() * z;
}

BusyPeriodView busy_period_view(const LevyModel& model) {
    const auto* c = model.cpp();
    require(c != nullptr, ErrorKind::unsupported, "busy periods need a compound Poisson input");
    require(model.drift() > 0, ErrorKind::unsupported, "busy period is improper unless d > 0");
    return BusyPeriodView{c->lambda * c->jump.mean(), c->service, ResidualLaw(c->jump), model};
}

}  // namespace levq
