#include "levq/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "levq/error.hpp"

namespace levq {

namespace {

constexpr int kEulerAverage = 11;

// Euler-summed Bromwich trapezoid for F(x) from f(s) / s. Returns the value
// with n and n + 1 terms before averaging, whose gap estimates the truncation error.
std::pair<double, double> euler_cdf(const std::function<cplx(cplx)>& f, double x, int n, double A) {
    const int total = n + kEulerAverage + 1;
    std::vector<double> partial(total + 1);
    double sum = 0.0;
    for (int k = 0; k <= total; ++k) {
        const cplx s(A / (2.0 * x), M_PI * k / x);
        double term = (f(s) / s).real();
        if (k == 0) term *= 0.5;
        if (k % 2 == 1) term = -term;
        sum += term;
        partial[k] = sum;
    }
    auto averaged = [&](int start) {
        double v = 0.0, binom = 1.0;
        for (int j = 0; j <= kEulerAverage; ++j) {
            v += binom * partial[start + j];
            binom = binom * (kEulerAverage - j) / (j + 1.0);
        }
        return v * std::ldexp(1.0, -kEulerAverage);
    };
    const double scale = std::exp(0.5 * A) / x;
    return {scale * averaged(n), scale * averaged(n + 1)};
}

// Fixed Talbot contour s(t) = r t (cot t + i), r = 2M / (5 x).
double talbot_cdf(const std::function<cplx(cplx)>& f, double x, int M) {
    const double r = 2.0 * M / (5.0 * x);
    double sum = 0.5 * (std::exp(r * x) * f(r) / r).real();
    for (int k = 1; k < M; ++k) {
        double th = k * M_PI / M;
        double cot = std::cos(th) / std::sin(th);
        cplx s(r * th * cot, r * th);
        cplx ds(1.0, th + (th * cot - 1.0) * cot);
        sum += (std::exp(s * x) * f(s) / s * ds).real();
    }
    return r / M * sum;
}

}  // namespace

const char* to_string(InversionMethod m) noexcept { return m == InversionMethod::euler ? "euler" : "talbot"; }

void validate(const InversionConfig& c) {
    require(c.terms >= 10, ErrorKind::invalid_argument, "inversion needs at least 10 terms");
    require(c.target >= 1e-12 && c.target < 1.0, ErrorKind::invalid_argument,
            "inversion error target must lie in [1e-12, 1)");
}

std::pair<double, double> lst_atom(const std::function<cplx(cplx)>& f) {
    const double h = 1e3;
    double f1 = f(h).real(), f2 = f(2 * h).real(), f4 = f(4 * h).real();
    double atom = (8.0 * f4 - 6.0 * f2 + f1) / 3.0;
    double lower = 2.0 * f4 - f2;  // first-order extrapolation
    return {atom, std::abs(atom - lower) + 1e-15};
}

DistributionTable invert_lst(const std::function<cplx(cplx)>& f, const std::vector<double>& xs,
                             const InversionConfig& cfg) {
    validate(cfg);
    DistributionTable t;
    std::tie(t.atom, t.atom_err) = lst_atom(f);
    const double A = std::log(1.0 / cfg.target);
    double worst = 0.0, worst_x = 0.0;
    for (double x : xs) {
        require(x >= 0 && std::isfinite(x), ErrorKind::invalid_argument, "inversion points must be finite and >= 0");
        double v, e;
        if (x == 0.0) {
            v = t.atom;
            e = t.atom_err;
        } else if (cfg.method == InversionMethod::euler) {
            auto [a, b] = euler_cdf(f, x, cfg.terms, A);
            v = a;
            e = std::abs(a - b) + cfg.target;
        } else {
            v = talbot_cdf(f, x, cfg.terms);
            e = std::abs(v - talbot_cdf(f, x, cfg.terms * 4 / 5)) + cfg.target;
        }
        require(std::isfinite(v), ErrorKind::numerical_failure, "inversion produced a non-finite value");
        t.x.push_back(x);
        t.cdf.push_back(v);
        t.err.push_back(e);
        if (e > worst) {
            worst = e;
            worst_x = x;
        }
    }
    if (worst > cfg.failure_threshold) {
        std::ostringstream msg;
        msg << "inversion did not converge: error estimate " << worst << " at x = " << worst_x;
        fail(ErrorKind::numerical_failure, msg.str());
    }
    if (cfg.density) {
        // Differences of the CDF, clamped at 0 so noise cannot make them negative.
        const std::size_t n = t.x.size();
        t.density.assign(n, 0.0);
        for (std::size_t k = 0; k < n && n > 1; ++k) {
            std::size_t lo = k == 0 ? 0 : k - 1;
            std::size_t hi = k + 1 < n ? k + 1 : k;
            if (t.x[hi] > t.x[lo]) t.density[k] = std::max(0.0, (t.cdf[hi] - t.cdf[lo]) / (t.x[hi] - t.x[lo]));
        }
    }
    return t;
}

DistributionTable marginal_distribution(const TransformContext& ctx, int queue, const std::vector<double>& xs,
                                        const InversionConfig& cfg) {
    require(queue == 1 || queue == 2, ErrorKind::invalid_argument, "queue must be 1 or 2");
    require(cfg.method == InversionMethod::euler, ErrorKind::unsupported,
            "marginal transforms are only available on Re(a) >= 0; use the Euler method");
    std::function<cplx(cplx)> f = [&ctx, queue](cplx a) {
        return queue == 1 ? joint_transform_continued(ctx, a, 0.0) : joint_transform_continued(ctx, 0.0, a);
    };
    return invert_lst(f, xs, cfg);
}

}  // namespace levq
