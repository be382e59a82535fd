#pragma once

#include <array>
#include <variant>

#include "levq/levy_model.hpp"

namespace levq {

/// Two reflected queues where each idle server lends the fraction r_i of its
/// capacity to the other one:
///   W1 = W1(0) + X1 + L1 - r1 L2,   W2 = W2(0) + X2 + L2 - r2 L1.
struct CoupledSystem {
    LevyModel x1;
    LevyModel x2;
    double r1 = 0.0;
    double r2 = 0.0;

    CoupledSystem(LevyModel x1, LevyModel x2, double r1, double r2);

    const LevyModel& model(int i) const { return i == 1 ? x1 : x2; }
    /// The same system with queue labels interchanged.
    CoupledSystem reversed() const { return CoupledSystem(x2, x1, r2, r1); }
};

struct StabilityReport {
    bool stable;
    double margin1;  // d1 + r1 d2
    double margin2;  // d2 + r2 d1
};

StabilityReport check_stability(const CoupledSystem& system);

/// Derived objects of the auxiliary processes
///   X_L(t) = Y1(r2 t) - Y2(t),   X_R(t) = Y1(t) - Y2(r1 t),
/// where Y_i is the fundamental subordinator of X_i.
struct AuxiliarySystem {
    CoupledSystem system;
    double p_L;
    double p_R;
    double p_L0;
    double p_R0;

    cplx big_phi1(cplx a) const { return system.x1.big_phi(a); }
    cplx big_phi2(cplx a) const { return system.x2.big_phi(a); }
    cplx phi_Y1(cplx a) const { return system.x1.phi_Y(a); }
    cplx phi_Y2(cplx a) const { return system.x2.phi_Y(a); }

    /// Exponents of X_L and X_R for Re(w) = 0.
    cplx phi_L(cplx w) const;
    cplx phi_R(cplx w) const;
};

/// Throws Error(unstable) if the stability condition fails.
AuxiliarySystem auxiliary_system(const CoupledSystem& system);

struct CompoundPoissonInput {
    double lambda;
    JumpLaw jump;
};

struct ConstantInput {
    double rate;
};

using NetworkInput = std::variant<CompoundPoissonInput, ConstantInput>;

/// Two-node fluid network with substochastic routing matrix P (P[i][j] is
/// the fraction of node i output sent to node j), capacities c and
/// nondecreasing external inputs.
struct FluidNetwork {
    std::array<std::array<double, 2>, 2> routing{};
    std::array<double, 2> capacity{1.0, 1.0};
    std::array<NetworkInput, 2> inputs{ConstantInput{0.0}, ConstantInput{0.0}};
};

/// r_i = p_ji / (1 - p_jj) and net service rate c_i (1 - p_ii) - p_ji c_j.
CoupledSystem network_to_coupled(const FluidNetwork& net);

}  // namespace levq
