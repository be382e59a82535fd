#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "levq/coupled_system.hpp"
#include "levq/grid_factorization.hpp"

namespace levq {

enum class Side { L, R };
enum class FactorMethod { closed_form, grid, monte_carlo };

const char* to_string(Side side) noexcept;
const char* to_string(FactorMethod method) noexcept;

/// One auxiliary process X(t) = Y_up(a t) - Y_down(b t) with killing rate p.
/// For side L: a = r2, b = 1; for side R: a = 1, b = r1.
struct FactorSide {
    Side tag;
    double p;
    LevyModel up;
    double up_scale;
    LevyModel down;
    double down_scale;

    /// A component is absent when its scale is 0 or its subordinator vanishes.
    bool has_up() const { return up_scale > 0 && !up.is_pure_drift(); }
    bool has_down() const { return down_scale > 0 && !down.is_pure_drift(); }

    /// phi_X(w) on the imaginary axis.
    cplx exponent(cplx w) const;
    /// phi_X(w) from the values of the two subordinator exponents; used where
    /// the caller already knows them by analytic continuation.
    cplx exponent_from(cplx up_value, cplx down_value) const;
    /// Limit of phi_X on the imaginary axis; -inf with a Brownian component.
    double limit() const;
};

FactorSide make_side(const AuxiliarySystem& aux, Side tag);

/// Evaluator behind a FactorPair.
class FactorEngine {
public:
    virtual ~FactorEngine() = default;
    virtual cplx plus(cplx w) const = 0;   // Re(w) >= 0
    virtual cplx minus(cplx w) const = 0;  // Re(w) <= 0
    virtual double plus_se(cplx) const { return 0.0; }
    virtual double minus_se(cplx) const { return 0.0; }
    virtual FactorMethod method() const = 0;
    virtual double tolerance() const = 0;
};

/// Wiener-Hopf factors Psi+(w) = E exp(-w sup X(e_p)) and
/// Psi-(w) = E exp(-w inf X(e_p)), with p/(p - phi_X) = Psi+ Psi-.
class FactorPair {
public:
    FactorPair(FactorSide side, std::shared_ptr<const FactorEngine> engine);

    const FactorSide& side() const noexcept { return side_; }
    FactorMethod method() const { return engine_->method(); }
    double tolerance() const { return engine_->tolerance(); }
    const FactorEngine& engine() const { return *engine_; }

    cplx plus(cplx w) const;   // throws Error(domain) for Re(w) < 0
    cplx minus(cplx w) const;  // throws Error(domain) for Re(w) > 0
    double plus_se(cplx w) const { return engine_->plus_se(w); }
    double minus_se(cplx w) const { return engine_->minus_se(w); }

private:
    FactorSide side_;
    std::shared_ptr<const FactorEngine> engine_;
};

/// One-sided processes only; throws Error(unsupported) otherwise.
FactorPair factor_closed_form(const FactorSide& side);

/// Bounded-variation inputs with non-deterministic jumps.
FactorPair factor_grid(const FactorSide& side, const GridOptions& options = {});

/// Underlying grid engine of a grid pair, for diagnostics.
const GridFactorization* grid_engine(const FactorPair& pair);

struct McOptions {
    std::size_t paths = 200000;
    std::uint64_t seed = 1;
    unsigned threads = 0;  // 0: hardware concurrency
};

/// Sample-mean estimates over simulated (sup, inf) pairs. Needs CPP inputs
/// with positive drift and at least 1000 paths.
FactorPair factor_mc(const FactorSide& side, const McOptions& options = {});

struct IdentityReport {
    double max_residual = 0.0;
    double worst_theta = 0.0;
    /// Largest residual in units of its standard error (Monte-Carlo only).
    double max_z = 0.0;
};

/// max over theta of |Psi+(i theta) Psi-(i theta) (p - phi_X(i theta)) / p - 1|.
IdentityReport verify_identity(const FactorPair& pair, const std::vector<double>& thetas);

/// 200 points on [-Theta/10, Theta/10] with Theta = 200 p.
std::vector<double> default_check_grid(double p, int count = 200);

}  // namespace levq
