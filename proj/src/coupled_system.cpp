#include "levq/coupled_system.hpp"

#include <cmath>

#include "levq/error.hpp"

namespace levq {

CoupledSystem::CoupledSystem(LevyModel m1, LevyModel m2, double c1, double c2)
    : x1(std::move(m1)), x2(std::move(m2)), r1(c1), r2(c2) {
    require(std::isfinite(r1) && std::isfinite(r2) && r1 >= 0 && r2 >= 0,
            ErrorKind::invalid_argument, "coupling constants must be nonnegative");
    require(r1 * r2 < 1.0, ErrorKind::invalid_argument, "coupling constants need r1 r2 < 1");
}

StabilityReport check_stability(const CoupledSystem& s) {
    double d1 = s.x1.drift();
    double d2 = s.x2.drift();
    double m1 = d1 + s.r1 * d2;
    double m2 = d2 + s.r2 * d1;
    return {m1 > 0 && m2 > 0, m1, m2};
}

namespace {

// d- / r with 0/0 read as 0. Stability forces r > 0 whenever d- > 0.
double ratio_or_zero(double num, double den) { return num == 0.0 ? 0.0 : num / den; }

}  // namespace

AuxiliarySystem auxiliary_system(const CoupledSystem& s) {
    auto st = check_stability(s);
    require(st.stable, ErrorKind::unstable, "stability condition violated");
    const auto& x1 = s.x1;
    const auto& x2 = s.x2;
    double p_L = x2.drift_plus() + s.r2 * x1.drift_plus();
    double p_R = x1.drift_plus() + s.r1 * x2.drift_plus();
    // Both constants equal (1 - r1 r2) C / p, C being the common value of the
    // two sides of the factorized kernel equation at w = 0; hence the minus
    // sign on the d- terms.
    double p_L0 = x2.drift() + x1.drift_plus() * s.r2 - ratio_or_zero(x1.drift_minus(), s.r1);
    double p_R0 = x1.drift() + x2.drift_plus() * s.r1 - ratio_or_zero(x2.drift_minus(), s.r2);
    return AuxiliarySystem{s, p_L, p_R, p_L0, p_R0};
}

cplx AuxiliarySystem::phi_L(cplx w) const {
    cplx v = phi_Y2(-w);
    if (system.r2 != 0.0) v += system.r2 * phi_Y1(w);
    return v;
}

cplx AuxiliarySystem::phi_R(cplx w) const {
    cplx v = phi_Y1(w);
    if (system.r1 != 0.0) v += system.r1 * phi_Y2(-w);
    return v;
}

namespace {

LevyModel input_model(const NetworkInput& in, double service) {
    if (const auto* c = std::get_if<CompoundPoissonInput>(&in)) {
        require(service > 0, ErrorKind::unsupported,
                "net service rate is not positive; the input would be a subordinator");
        return LevyModel(CompoundPoisson{c->lambda, c->jump, service});
    }
    double rate = std::get<ConstantInput>(in).rate;
    require(rate >= 0, ErrorKind::invalid_argument, "constant input rate must be nonnegative");
    require(service - rate > 0, ErrorKind::unsupported,
            "net drift is not positive; the input would be a subordinator");
    return LevyModel(PureDrift{service - rate});
}

}  // namespace

CoupledSystem network_to_coupled(const FluidNetwork& net) {
    const auto& P = net.routing;
    for (int i = 0; i < 2; ++i) {
        double row = 0.0;
        for (int j = 0; j < 2; ++j) {
            require(P[i][j] >= 0 && std::isfinite(P[i][j]), ErrorKind::invalid_argument,
                    "routing entries must be nonnegative");
            row += P[i][j];
        }
        require(row <= 1.0 + 1e-12, ErrorKind::invalid_argument, "routing rows must sum to at most 1");
        require(net.capacity[i] > 0 && std::isfinite(net.capacity[i]), ErrorKind::invalid_argument,
                "capacities must be positive");
    }
    require(P[0][0] < 1.0 && P[1][1] < 1.0, ErrorKind::invalid_argument,
            "a node routing all output to itself never drains");
    double tr = P[0][0] + P[1][1];
    double det = P[0][0] * P[1][1] - P[0][1] * P[1][0];
    double radius = 0.5 * (tr + std::sqrt(std::max(0.0, tr * tr - 4.0 * det)));
    require(radius < 1.0, ErrorKind::invalid_argument, "routing matrix must have spectral radius < 1");

    const auto& c = net.capacity;
    double s1 = c[0] * (1.0 - P[0][0]) - P[1][0] * c[1];
    double s2 = c[1] * (1.0 - P[1][1]) - P[0][1] * c[0];
    double r1 = P[1][0] / (1.0 - P[1][1]);
    double r2 = P[0][1] / (1.0 - P[0][0]);
    return CoupledSystem(input_model(net.inputs[0], s1), input_model(net.inputs[1], s2), r1, r2);
}

}  // namespace levq
