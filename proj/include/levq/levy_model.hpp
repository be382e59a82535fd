#pragma once

#include <complex>
#include <variant>

#include "levq/jump_law.hpp"

namespace levq {

/// Compound Poisson input of rate `lambda` with jumps `jump`, drained at `service`.
struct CompoundPoisson {
    double lambda;
    JumpLaw jump;
    double service;
};

/// Brownian motion with E X(1) = -drift and variance sigma^2 per unit time.
struct Brownian {
    double drift;
    double sigma;
};

/// Deterministic decrease X(t) = -d t.
struct PureDrift {
    double d;
};

enum class Variation { bounded, unbounded };

/// Spectrally positive Levy process given by one of three closed-form
/// exponents. phi(a) = log E exp(-a X(1)).
class LevyModel {
public:
    using Variant = std::variant<CompoundPoisson, Brownian, PureDrift>;

    LevyModel(Variant v);  // validates; throws Error(invalid_argument)

    const Variant& variant() const noexcept { return v_; }
    bool is_cpp() const noexcept { return std::holds_alternative<CompoundPoisson>(v_); }
    bool is_brownian() const noexcept { return std::holds_alternative<Brownian>(v_); }
    bool is_pure_drift() const noexcept { return std::holds_alternative<PureDrift>(v_); }
    const CompoundPoisson* cpp() const noexcept { return std::get_if<CompoundPoisson>(&v_); }

    cplx phi(cplx a) const;
    cplx phi_prime(cplx a) const;
    double phi(double a) const { return phi(cplx(a)).real(); }

    /// d = phi'(0) = -E X(1).
    double drift() const noexcept { return d_; }
    double drift_plus() const noexcept { return d_ > 0 ? d_ : 0.0; }
    double drift_minus() const noexcept { return d_ < 0 ? -d_ : 0.0; }
    /// phi''(0): lambda E B^2, sigma^2 or 0.
    double curvature() const;
    Variation variation() const noexcept {
        return is_brownian() ? Variation::unbounded : Variation::bounded;
    }
    /// Rate at which the process decreases between jumps (bounded variation only).
    double service_rate() const;

    /// Right inverse of phi on [0, inf).
    double big_phi(double a) const;
    /// Right inverse of phi on Re(a) >= 0.
    cplx big_phi(cplx a) const;
    double big_phi_zero() const noexcept { return phi0_; }

    /// Exponent d+ - a / Phi(a) of the fundamental subordinator; 0 at a = 0.
    cplx phi_Y(cplx a) const;
    /// Limit of phi_Y along the positive reals; -inf for unbounded variation.
    double phi_Y_limit() const;

private:
    double solve_real(double a) const;

    Variant v_;
    double d_ = 0.0;
    double phi0_ = 0.0;
};

/// Busy-period description of a CPP model with positive drift:
/// a / Phi(a) = s - rho E exp(-Phi(a) R).
struct BusyPeriodView {
    double rho;
    double service;
    ResidualLaw residual;
    LevyModel model;

    /// E exp(-a U) with U the busy period started from R.
    cplx busy_lst(cplx a) const { return residual.lst(model.big_phi(a)); }
    /// E U = E R / d.
    double busy_mean() const { return residual.mean() / model.drift(); }
};

BusyPeriodView busy_period_view(const LevyModel& model);

}  // namespace levq
