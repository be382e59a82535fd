#pragma once

#include <functional>
#include <optional>
#include <string>

#include "levq/wiener_hopf.hpp"

namespace levq {

enum class FactorChoice { automatic, closed_form, grid, monte_carlo };

struct FactorOptions {
    FactorChoice choice = FactorChoice::automatic;
    GridOptions grid;
    McOptions mc;
};

/// Stationary joint transform E exp(-a1 W1 - a2 W2) assembled from the
/// Wiener-Hopf factors of the two auxiliary processes.
class TransformContext {
public:
    /// automatic: closed form for one-sided auxiliary processes, grid otherwise.
    static TransformContext build(const CoupledSystem& system, const FactorOptions& options = {});

    const CoupledSystem& system() const noexcept { return aux_.system; }
    const AuxiliarySystem& aux() const noexcept { return aux_; }
    const FactorPair& factors(Side side) const { return side == Side::L ? left_ : right_; }
    /// Largest factor-method tolerance; +inf when a side is a Monte-Carlo estimate.
    double tolerance() const;
    std::string method_label() const;

    /// Re(a_i) > Phi_i(0), or Re(a_i) >= 0 when Phi_i(0) = 0.
    bool admissible(cplx a1, cplx a2) const;

    /// Psi+(phi1(a)) of a side, continued through the factorization identity
    /// when Re phi1(a) <= 0.
    cplx plus_at(Side side, cplx a) const;
    /// Psi-(-phi2(a)) of a side, continued likewise when Re phi2(a) <= 0.
    cplx minus_at(Side side, cplx a) const;

private:
    TransformContext(AuxiliarySystem aux, FactorPair left, FactorPair right)
        : aux_(std::move(aux)), left_(std::move(left)), right_(std::move(right)) {}

    AuxiliarySystem aux_;
    FactorPair left_;
    FactorPair right_;
};

/// F1(a) = E*[exp(-a W2) dL1], F2(a) = E*[exp(-a W1) dL2] per unit time.
struct BoundaryFunctions {
    const TransformContext* ctx;
    cplx F1(cplx a) const;
    cplx F2(cplx a) const;
};

BoundaryFunctions boundary_functions(const TransformContext& ctx);

/// Throws Error(domain) outside the admissible domain and Error(singularity)
/// within 1e-6 of a zero of phi1(a1) + phi2(a2) other than the origin.
cplx joint_transform(const TransformContext& ctx, cplx a1, cplx a2);
/// Same value continued analytically to Re(a_i) >= 0.
cplx joint_transform_continued(const TransformContext& ctx, cplx a1, cplx a2);

/// |(phi1(a1) + phi2(a2)) J - (a1 - r2 a2) F1(a2) - (a2 - r1 a1) F2(a1)|.
double functional_eq_residual(const TransformContext& ctx, cplx a1, cplx a2);

/// The same equation on the zero set of the kernel, a1 = Phi1(i t),
/// a2 = Phi2(-i t), relative to the size of its two terms. This is where
/// the equation constrains the factors.
double kernel_residual(const TransformContext& ctx, double t);

struct MomentReport {
    double mean1 = 0.0;
    double mean2 = 0.0;
    double step = 0.0;
    double means_lhs = 0.0;  // r2 (d1 + r1 d2) E W1 + r1 (d2 + r2 d1) E W2
    double means_rhs = 0.0;  // (r2 phi1''(0) + r1 phi2''(0)) / 2
    double means_residual() const { return means_lhs - means_rhs; }
    double means_relative() const;
};

/// E W_i from (1 - J) / h at h, h/2, h/4 with Richardson extrapolation.
MomentReport moments(const TransformContext& ctx, double h = 0.02);

enum class SpecialCase { independent, deterministic_drift };

const char* to_string(SpecialCase c) noexcept;
std::optional<SpecialCase> detect_special_case(const CoupledSystem& system);

/// Closed forms for uncoupled queues and for a pure-drift second queue.
/// Throws Error(invalid_argument) if the system does not match the case.
std::function<cplx(cplx, cplx)> special_case_transform(const CoupledSystem& system, SpecialCase which);

}  // namespace levq
