#include "levq/grid_factorization.hpp"

#include <cmath>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>

#include "levq/error.hpp"

namespace levq {

namespace {

constexpr int kGauss = 16;
constexpr int kGradedLevels = 40;
constexpr int kTailTerms = 4;
constexpr int kTailSamples = 64;
constexpr int kMaxDepth = 60;
const cplx I(0.0, 1.0);

struct GaussRule {
    double x[kGauss];
    double w[kGauss];
    GaussRule() {
        using rule = boost::math::quadrature::gauss<double, kGauss>;
        const auto& ax = rule::abscissa();
        const auto& wt = rule::weights();
        for (int i = 0; i < kGauss / 2; ++i) {
            x[2 * i] = -ax[i];
            x[2 * i + 1] = ax[i];
            w[2 * i] = wt[i];
            w[2 * i + 1] = wt[i];
        }
    }
};

const GaussRule& gauss_rule() {
    static const GaussRule rule;
    return rule;
}

// Integrand of the conjugate-folded Cauchy integral at theta > 0.
inline cplx integrand(double theta, cplx g, cplx w) {
    cplx gc = std::conj(g);
    return (g - gc) / (I * theta) + g / (w - I * theta) + gc / (w + I * theta);
}

// Distance from the segment [a, b] of the real line to the point z.
inline double segment_distance(double a, double b, cplx z) {
    double dx = z.real() < a ? a - z.real() : (z.real() > b ? z.real() - b : 0.0);
    return std::hypot(dx, z.imag());
}

// int_{|theta| > Theta} (i theta)^-m d theta.
double tail_power(int m, double theta_max) {
    if (m % 2 != 0) return 0.0;
    double sign = (m / 2) % 2 == 0 ? 1.0 : -1.0;
    return 2.0 * sign * std::pow(theta_max, 1.0 - m) / (m - 1.0);
}

}  // namespace

GridFactorization::GridFactorization(AxisSymbol symbol, GridOptions options)
    : symbol_(std::move(symbol)), options_(options) {
    const double p = symbol_.p;
    require(p > 0 && std::isfinite(p), ErrorKind::invalid_argument, "factorization rate must be positive");
    require(std::isfinite(symbol_.limit), ErrorKind::unsupported,
            "grid factorization needs a finite exponent limit (bounded variation)");
    require(options_.theta_factor >= 10.0, ErrorKind::invalid_argument, "grid truncation too small");
    const int panels_total = options_.nodes / kGauss;
    require(panels_total >= kGradedLevels + 16, ErrorKind::invalid_argument, "grid has too few nodes");

    theta_max_ = options_.theta_factor * p;
    g_inf_ = std::log(p / (p - symbol_.limit));

    // Geometrically graded panels on [0, p], uniform panels on [p, Theta].
    std::vector<std::pair<double, double>> bounds;
    bounds.emplace_back(0.0, p * std::ldexp(1.0, -kGradedLevels));
    for (int k = kGradedLevels - 1; k >= 0; --k)
        bounds.emplace_back(p * std::ldexp(1.0, -k - 1), p * std::ldexp(1.0, -k));
    const int uniform = panels_total - static_cast<int>(bounds.size());
    const double width = (theta_max_ - p) / uniform;
    for (int j = 0; j < uniform; ++j) bounds.emplace_back(p + j * width, j + 1 == uniform ? theta_max_ : p + (j + 1) * width);

    const auto& rule = gauss_rule();
    for (const auto& [a, b] : bounds) {
        panels_.push_back({a, b, static_cast<int>(theta_.size())});
        double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (int i = 0; i < kGauss; ++i) {
            double th = mid + half * rule.x[i];
            theta_.push_back(th);
            weight_.push_back(half * rule.w[i]);
            g_.push_back(g(th));
        }
    }

    tail_gap_ = std::abs(g(theta_max_) - g_inf_);
    require(tail_gap_ <= options_.tail_tolerance, ErrorKind::numerical_failure,
            "grid too small: symbol has not reached its limit at the truncation point");

    // Least-squares fit of g - g_inf by real multiples of (Theta / (i theta))^n.
    Eigen::MatrixXd A(2 * kTailSamples, kTailTerms);
    Eigen::VectorXd y(2 * kTailSamples);
    for (int j = 0; j < kTailSamples; ++j) {
        double th = theta_max_ * (0.5 + 0.5 * j / (kTailSamples - 1.0));
        cplx r = g(th) - g_inf_;
        for (int n = 1; n <= kTailTerms; ++n) {
            cplx basis = std::pow(theta_max_ / (I * th), n);
            A(2 * j, n - 1) = basis.real();
            A(2 * j + 1, n - 1) = basis.imag();
        }
        y(2 * j) = r.real();
        y(2 * j + 1) = r.imag();
    }
    Eigen::VectorXd x = A.colPivHouseholderQr().solve(y);
    for (int n = 1; n <= kTailTerms; ++n) tail_coeff_.push_back(x(n - 1) * std::pow(theta_max_, n));
}

cplx GridFactorization::g(double theta) const {
    const double p = symbol_.p;
    return std::log(cplx(p) / (p - symbol_.exponent(theta)));
}

cplx GridFactorization::panel_sum(const Panel& panel, cplx w) const {
    cplx s = 0.0;
    for (int i = panel.first; i < panel.first + kGauss; ++i) s += weight_[i] * integrand(theta_[i], g_[i], w);
    return s;
}

cplx GridFactorization::refined_sum(double a, double b, cplx w, int depth) const {
    const cplx pole1(w.imag(), -w.real());
    const cplx pole2(-w.imag(), w.real());
    double d = std::min(segment_distance(a, b, pole1), segment_distance(a, b, pole2));
    if (d < b - a && depth < kMaxDepth) {
        double m = 0.5 * (a + b);
        return refined_sum(a, m, w, depth + 1) + refined_sum(m, b, w, depth + 1);
    }
    const auto& rule = gauss_rule();
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    cplx s = 0.0;
    for (int i = 0; i < kGauss; ++i) {
        double th = mid + half * rule.x[i];
        s += half * rule.w[i] * integrand(th, g(th), w);
    }
    return s;
}

cplx GridFactorization::tail(cplx w) const {
    const double T = theta_max_;
    cplx total = 0.0;
    cplx prev;  // I_{n-1}
    const bool small = std::abs(w) < 0.5 * T;
    if (!small) {
        prev = w.real() > 0 ? M_PI - 2.0 * std::atan(T / w) : -(M_PI - 2.0 * std::atan(T / -w));
        total += g_inf_ * prev;
    } else {
        cplx t0 = 0.0, wk = 1.0;
        for (int k = 0; k < 80; ++k, wk *= w) t0 -= wk * tail_power(k + 1, T);
        total += g_inf_ * t0;
    }
    for (int n = 1; n <= kTailTerms; ++n) {
        cplx In;
        if (small) {
            In = 0.0;
            cplx wk = 1.0;
            for (int k = 0; k < 80; ++k, wk *= w) In -= wk * tail_power(n + k + 1, T);
        } else {
            In = (tail_power(n, T) + prev) / w;
            prev = In;
        }
        total += tail_coeff_[n - 1] * (tail_power(n + 1, T) + In);
    }
    return total;
}

cplx GridFactorization::cauchy(cplx w) const {
    const cplx pole1(w.imag(), -w.real());
    const cplx pole2(-w.imag(), w.real());
    cplx s = 0.0;
    for (const auto& panel : panels_) {
        double d = std::min(segment_distance(panel.a, panel.b, pole1), segment_distance(panel.a, panel.b, pole2));
        s += d < panel.b - panel.a ? refined_sum(panel.a, panel.b, w, 0) : panel_sum(panel, w);
    }
    return (s + tail(w)) / (2.0 * M_PI);
}

cplx GridFactorization::boundary(double y, int sign) const {
    if (y < 0) return std::conj(boundary(-y, sign));
    const double T = theta_max_;
    if (y >= 0.5 * T) {
        // Richardson extrapolation from just off the axis.
        const double eps = 1e-3 * symbol_.p;
        cplx f1 = cauchy(cplx(sign * eps, y));
        cplx f2 = cauchy(cplx(sign * 2.0 * eps, y));
        cplx f4 = cauchy(cplx(sign * 4.0 * eps, y));
        return (8.0 / 3.0) * f1 - 2.0 * f2 + (1.0 / 3.0) * f4;
    }
    // Sokhotski-Plemelj: g / (w - i theta) -> -i PV g / (y - theta) + sign pi g(y) delta.
    const cplx gy = g(y);
    cplx s = 0.0;
    for (std::size_t k = 0; k < theta_.size(); ++k) {
        const double th = theta_[k];
        const cplx gk = g_[k];
        const cplx gc = std::conj(gk);
        cplx f = (gk - gc) / (I * th) + gc / (I * (y + th));
        if (th != y) f += -I * (gk - gy) / (y - th);
        s += weight_[k] * f;
    }
    if (y > 0) s += -I * gy * std::log(y / (T - y));
    s += sign * M_PI * gy;
    s += tail(cplx(sign * 1e-9 * symbol_.p, y));
    return s / (2.0 * M_PI);
}

cplx GridFactorization::plus(cplx w) const {
    require(w.real() >= 0, ErrorKind::domain, "ascending factor needs Re(w) >= 0");
    if (w == 0.0) return 1.0;
    if (w.real() < 1e-8 * symbol_.p) return std::exp(boundary(w.imag(), +1));
    return std::exp(cauchy(w));
}

cplx GridFactorization::minus(cplx w) const {
    require(w.real() <= 0, ErrorKind::domain, "descending factor needs Re(w) <= 0");
    if (w == 0.0) return 1.0;
    if (w.real() > -1e-8 * symbol_.p) return std::exp(-boundary(w.imag(), -1));
    return std::exp(-cauchy(w));
}

double GridFactorization::atom_plus() const { return std::exp(cauchy(cplx(1e12 * symbol_.p)).real()); }

double GridFactorization::atom_minus() const { return std::exp(-cauchy(cplx(-1e12 * symbol_.p)).real()); }

}  // namespace levq
