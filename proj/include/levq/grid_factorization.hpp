#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace levq {

using cplx = std::complex<double>;

struct GridOptions {
    double theta_factor = 200.0;  // truncation Theta = theta_factor * p
    int nodes = 16384;            // quadrature nodes on [0, Theta]
    double tail_tolerance = 1e-2;
    /// factor_grid widens Theta by factors of 4 up to this total before
    /// reporting that the grid is too small.
    double max_growth = 64.0;
};

/// Exponent of a two-sided compound Poisson process on the imaginary axis,
/// killed at rate p.
struct AxisSymbol {
    double p;
    std::function<cplx(double)> exponent;  // theta -> phi_X(i theta)
    double limit;                          // phi_X(i theta) as |theta| -> inf
};

/// Wiener-Hopf split of g(theta) = log(p / (p - phi_X(i theta))) by Cauchy
/// integrals: log Psi+(w) = C(w) for Re w > 0, log Psi-(w) = -C(w) for Re w < 0,
/// with C(w) = (1/2pi) int g(theta) (1/(i theta) + 1/(w - i theta)) d theta.
/// Both factors equal 1 at w = 0 by construction.
class GridFactorization {
public:
    GridFactorization(AxisSymbol symbol, GridOptions options = {});

    /// Re(w) >= 0; boundary values on the axis are one-sided limits.
    cplx plus(cplx w) const;
    /// Re(w) <= 0.
    cplx minus(cplx w) const;

    double theta_max() const noexcept { return theta_max_; }
    int node_count() const noexcept { return static_cast<int>(theta_.size()); }
    double g_limit() const noexcept { return g_inf_; }
    /// |g(Theta) - g_inf|, compared against the tail tolerance.
    double tail_gap() const noexcept { return tail_gap_; }
    /// P(sup = 0) and P(inf = 0).
    double atom_plus() const;
    double atom_minus() const;

    const std::vector<double>& nodes() const noexcept { return theta_; }
    const std::vector<cplx>& symbol_values() const noexcept { return g_; }

private:
    struct Panel {
        double a, b;
        int first;  // index of its first node in theta_
    };

    cplx g(double theta) const;
    cplx cauchy(cplx w) const;
    cplx boundary(double y, int sign) const;
    cplx panel_sum(const Panel& panel, cplx w) const;
    cplx refined_sum(double a, double b, cplx w, int depth) const;
    cplx tail(cplx w) const;

    AxisSymbol symbol_;
    GridOptions options_;
    double theta_max_ = 0.0;
    double g_inf_ = 0.0;
    double tail_gap_ = 0.0;
    std::vector<Panel> panels_;
    std::vector<double> theta_;
    std::vector<double> weight_;
    std::vector<cplx> g_;
    std::vector<double> tail_coeff_;  // g - g_inf ~ sum_n c_n (i theta)^-n beyond Theta
};

}  // namespace levq
