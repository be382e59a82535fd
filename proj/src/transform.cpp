#include "levq/transform.hpp"

#include <algorithm>
#include <cmath>

#include "levq/error.hpp"

namespace levq {

namespace {

FactorPair make_factors(const FactorSide& side, const FactorOptions& opt) {
    switch (opt.choice) {
    case FactorChoice::automatic:
        if (!(side.has_up() && side.has_down())) return factor_closed_form(side);
        return factor_grid(side, opt.grid);
    case FactorChoice::closed_form: return factor_closed_form(side);
    case FactorChoice::grid: return factor_grid(side, opt.grid);
    case FactorChoice::monte_carlo: {
        McOptions mc = opt.mc;
        mc.seed += side.tag == Side::R ? 1 : 0;
        return factor_mc(side, mc);
    }
    }
    fail(ErrorKind::invalid_argument, "unknown factor method");
}

}  // namespace

TransformContext TransformContext::build(const CoupledSystem& system, const FactorOptions& options) {
    auto aux = auxiliary_system(system);
    auto left = make_factors(make_side(aux, Side::L), options);
    auto right = make_factors(make_side(aux, Side::R), options);
    // Spot check of the factorization identity; the full check is verify_identity.
    for (const FactorPair* pair : {&left, &right}) {
        if (pair->method() == FactorMethod::monte_carlo) continue;
        auto rep = verify_identity(*pair, default_check_grid(pair->side().p, 8));
        require(rep.max_residual <= pair->tolerance(), ErrorKind::numerical_failure,
                "Wiener-Hopf factors fail the factorization identity");
    }
    return TransformContext(std::move(aux), std::move(left), std::move(right));
}

double TransformContext::tolerance() const { return std::max(left_.tolerance(), right_.tolerance()); }

std::string TransformContext::method_label() const {
    if (left_.method() == right_.method()) return to_string(left_.method());
    return std::string("L:") + to_string(left_.method()) + ";R:" + to_string(right_.method());
}

bool TransformContext::admissible(cplx a1, cplx a2) const {
    auto ok = [](const LevyModel& m, cplx a) {
        double z = m.big_phi_zero();
        return z == 0.0 ? a.real() >= 0 : a.real() > z;
    };
    return ok(system().x1, a1) && ok(system().x2, a2);
}

cplx TransformContext::plus_at(Side tag, cplx a) const {
    const auto& pair = factors(tag);
    const auto& side = pair.side();
    const auto& x1 = system().x1;
    const cplx w = x1.phi(a);
    const bool off_branch = a == 0.0 && x1.drift() < 0;
    if (w == 0.0 && !off_branch) return 1.0;
    if (w.real() >= 0 && !off_branch) return pair.plus(w);
    // phi1^Y(phi1(a)) = d1+ - phi1(a) / a analytically in a.
    cplx y1 = x1.drift_plus() - (a == 0.0 ? cplx(x1.drift()) : w / a);
    cplx y2 = system().x2.phi_Y(-w);
    cplx e = side.exponent_from(y1, y2);
    return side.p / ((side.p - e) * pair.minus(w));
}

cplx TransformContext::minus_at(Side tag, cplx a) const {
    const auto& pair = factors(tag);
    const auto& side = pair.side();
    const auto& x2 = system().x2;
    const cplx phi2 = x2.phi(a);
    const cplx z = -phi2;
    const bool off_branch = a == 0.0 && x2.drift() < 0;
    if (z == 0.0 && !off_branch) return 1.0;
    if (z.real() <= 0 && !off_branch) return pair.minus(z);
    cplx y2 = x2.drift_plus() - (a == 0.0 ? cplx(x2.drift()) : phi2 / a);
    cplx y1 = system().x1.phi_Y(z);
    cplx e = side.exponent_from(y1, y2);
    return side.p / ((side.p - e) * pair.plus(z));
}

cplx BoundaryFunctions::F1(cplx a) const {
    const auto& aux = ctx->aux();
    double c = aux.p_R0 / (1.0 - aux.system.r1 * aux.system.r2);
    return c * ctx->minus_at(Side::L, a) / ctx->minus_at(Side::R, a);
}

cplx BoundaryFunctions::F2(cplx a) const {
    const auto& aux = ctx->aux();
    double c = aux.p_L0 / (1.0 - aux.system.r1 * aux.system.r2);
    return c * ctx->plus_at(Side::R, a) / ctx->plus_at(Side::L, a);
}

BoundaryFunctions boundary_functions(const TransformContext& ctx) { return BoundaryFunctions{&ctx}; }

cplx joint_transform_continued(const TransformContext& ctx, cplx a1, cplx a2) {
    require(a1.real() >= 0 && a2.real() >= 0, ErrorKind::domain, "transform arguments need Re >= 0");
    if (a1 == 0.0 && a2 == 0.0) return 1.0;
    const auto& s = ctx.system();
    cplx kernel = s.x1.phi(a1) + s.x2.phi(a2);
    // Newton estimate of the distance to the kernel zero set.
    double slope = std::abs(s.x1.phi_prime(a1)) + std::abs(s.x2.phi_prime(a2));
    require(std::abs(kernel) >= 1e-6 * slope, ErrorKind::singularity,
            "argument too close to a zero of phi1(a1) + phi2(a2)");
    auto F = boundary_functions(ctx);
    cplx num = (a1 - s.r2 * a2) * F.F1(a2) + (a2 - s.r1 * a1) * F.F2(a1);
    return num / kernel;
}

cplx joint_transform(const TransformContext& ctx, cplx a1, cplx a2) {
    require(ctx.admissible(a1, a2), ErrorKind::domain, "transform arguments outside the admissible domain");
    return joint_transform_continued(ctx, a1, a2);
}

double functional_eq_residual(const TransformContext& ctx, cplx a1, cplx a2) {
    const auto& s = ctx.system();
    auto F = boundary_functions(ctx);
    cplx J = joint_transform_continued(ctx, a1, a2);
    cplx lhs = (s.x1.phi(a1) + s.x2.phi(a2)) * J;
    cplx rhs = (a1 - s.r2 * a2) * F.F1(a2) + (a2 - s.r1 * a1) * F.F2(a1);
    return std::abs(lhs - rhs);
}

double kernel_residual(const TransformContext& ctx, double t) {
    const auto& aux = ctx.aux();
    const auto& s = aux.system;
    const cplx w(0.0, t);
    const cplx a1 = s.x1.big_phi(w);
    const cplx a2 = s.x2.big_phi(-w);
    const double det = 1.0 - s.r1 * s.r2;
    const auto& L = ctx.factors(Side::L);
    const auto& R = ctx.factors(Side::R);
    cplx f1 = aux.p_R0 / det * L.minus(w) / R.minus(w);
    cplx f2 = aux.p_L0 / det * R.plus(w) / L.plus(w);
    cplx t1 = (a1 - s.r2 * a2) * f1;
    cplx t2 = (a2 - s.r1 * a1) * f2;
    double scale = std::abs(t1) + std::abs(t2);
    return scale > 0 ? std::abs(t1 + t2) / scale : 0.0;
}

double MomentReport::means_relative() const {
    double scale = std::max(std::abs(means_lhs), std::abs(means_rhs));
    return scale > 0 ? std::abs(means_residual()) / scale : 0.0;
}

MomentReport moments(const TransformContext& ctx, double h) {
    require(h > 0 && h <= 1.0, ErrorKind::invalid_argument, "moment step must lie in (0, 1]");
    const auto& s = ctx.system();
    auto mean = [&](int queue) {
        const auto& m = s.model(queue);
        // Keep the steps well away from the kernel zero at Phi(0).
        double step = m.big_phi_zero() > 0 ? std::min(h, 0.25 * m.big_phi_zero()) : h;
        auto D = [&](double x) {
            cplx J = queue == 1 ? joint_transform_continued(ctx, x, 0.0) : joint_transform_continued(ctx, 0.0, x);
            return (1.0 - J.real()) / x;
        };
        return std::make_pair((8.0 * D(step / 4) - 6.0 * D(step / 2) + D(step)) / 3.0, step);
    };
    MomentReport rep;
    auto [m1, h1] = mean(1);
    auto [m2, h2] = mean(2);
    rep.mean1 = m1;
    rep.mean2 = m2;
    rep.step = std::min(h1, h2);
    double d1 = s.x1.drift(), d2 = s.x2.drift();
    rep.means_lhs = s.r2 * (d1 + s.r1 * d2) * m1 + s.r1 * (d2 + s.r2 * d1) * m2;
    rep.means_rhs = 0.5 * (s.r2 * s.x1.curvature() + s.r1 * s.x2.curvature());
    return rep;
}

const char* to_string(SpecialCase c) noexcept {
    return c == SpecialCase::independent ? "independent" : "deterministic_drift";
}

std::optional<SpecialCase> detect_special_case(const CoupledSystem& s) {
    if (s.r1 == 0.0 && s.r2 == 0.0) return SpecialCase::independent;
    if (s.x2.is_pure_drift()) return SpecialCase::deterministic_drift;
    return std::nullopt;
}

std::function<cplx(cplx, cplx)> special_case_transform(const CoupledSystem& s, SpecialCase which) {
    require(check_stability(s).stable, ErrorKind::unstable, "stability condition violated");
    if (which == SpecialCase::independent) {
        require(s.r1 == 0.0 && s.r2 == 0.0, ErrorKind::invalid_argument, "independent case needs r1 = r2 = 0");
        return [s](cplx a1, cplx a2) {
            auto pk = [](const LevyModel& m, cplx a) { return a == 0.0 ? cplx(1.0) : m.drift() * a / m.phi(a); };
            return pk(s.x1, a1) * pk(s.x2, a2);
        };
    }
    require(s.x2.is_pure_drift(), ErrorKind::invalid_argument, "deterministic-drift case needs a pure-drift X2");
    return [s](cplx a1, cplx) {
        if (a1 == 0.0) return cplx(1.0);
        double d2 = s.x2.drift();
        return (s.x1.drift() + s.r1 * d2) * a1 / (s.x1.phi(a1) + s.r1 * d2 * a1);
    };
}

}  // namespace levq
