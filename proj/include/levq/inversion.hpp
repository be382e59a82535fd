#pragma once

#include <functional>
#include <vector>

#include "levq/transform.hpp"

namespace levq {

enum class InversionMethod {
    euler,   // Bromwich trapezoid rule with Euler summation
    talbot,  // fixed deformed contour; needs f analytic left of the imaginary axis
};

const char* to_string(InversionMethod m) noexcept;

struct InversionConfig {
    InversionMethod method = InversionMethod::euler;
    int terms = 50;
    double target = 1e-8;  // absolute CDF error
    bool density = false;
    /// Points whose error estimate exceeds this raise Error(numerical_failure).
    double failure_threshold = 1e-4;
};

void validate(const InversionConfig& config);

struct DistributionTable {
    std::vector<double> x;
    std::vector<double> cdf;
    std::vector<double> err;
    std::vector<double> density;  // empty unless requested
    double atom = 0.0;            // P(W = 0)
    double atom_err = 0.0;
};

/// CDF of the law on [0, inf) with Laplace-Stieltjes transform f.
DistributionTable invert_lst(const std::function<cplx(cplx)>& f, const std::vector<double>& xs,
                             const InversionConfig& config = {});

/// lim f(a) as a -> inf, by extrapolation in 1/a from a = 1e3, 2e3, 4e3.
std::pair<double, double> lst_atom(const std::function<cplx(cplx)>& f);

/// Marginal distribution of W_queue, read off the joint transform with the
/// other argument at 0.
DistributionTable marginal_distribution(const TransformContext& ctx, int queue, const std::vector<double>& xs,
                                        const InversionConfig& config = {});

}  // namespace levq
