#include "levq/jump_law.hpp"

#include <cmath>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

#include "levq/error.hpp"

namespace levq {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// (1 - exp(-z)) / z, accurate near 0.
cplx one_minus_exp_over(cplx z) {
    if (std::abs(z) < 1e-4) return 1.0 - z / 2.0 + z * z / 6.0 - z * z * z / 24.0;
    return (1.0 - std::exp(-z)) / z;
}

double erlang_sample(Rng& rng, int k, double rate) {
    double s = 0.0;
    for (int i = 0; i < k; ++i) s += exponential(rng, rate);
    return s;
}

}  // namespace

JumpLaw::JumpLaw(Variant v) : v_(std::move(v)) {
    std::visit(overloaded{
                   [](const Exponential& e) {
                       require(e.rate > 0 && std::isfinite(e.rate), ErrorKind::invalid_argument,
                               "exponential rate must be positive");
                   },
                   [](const Erlang& e) {
                       require(e.shape >= 1, ErrorKind::invalid_argument, "erlang shape must be >= 1");
                       require(e.rate > 0 && std::isfinite(e.rate), ErrorKind::invalid_argument,
                               "erlang rate must be positive");
                   },
                   [](const Hyperexponential& h) {
                       require(!h.weights.empty() && h.weights.size() == h.rates.size(),
                               ErrorKind::invalid_argument,
                               "hyperexponential needs matching weights and rates");
                       double total = 0.0;
                       for (std::size_t i = 0; i < h.weights.size(); ++i) {
                           require(h.weights[i] >= 0, ErrorKind::invalid_argument,
                                   "hyperexponential weights must be nonnegative");
                           require(h.rates[i] > 0 && std::isfinite(h.rates[i]),
                                   ErrorKind::invalid_argument, "hyperexponential rates must be positive");
                           total += h.weights[i];
                       }
                       require(std::abs(total - 1.0) < 1e-9, ErrorKind::invalid_argument,
                               "hyperexponential weights must sum to 1");
                   },
                   [](const Deterministic& d) {
                       require(d.size > 0 && std::isfinite(d.size), ErrorKind::invalid_argument,
                               "deterministic size must be positive");
                   },
               },
               v_);
}

double JumpLaw::mean() const {
    return std::visit(overloaded{
                          [](const Exponential& e) { return 1.0 / e.rate; },
                          [](const Erlang& e) { return e.shape / e.rate; },
                          [](const Hyperexponential& h) {
                              double m = 0.0;
                              for (std::size_t i = 0; i < h.rates.size(); ++i) m += h.weights[i] / h.rates[i];
                              return m;
                          },
                          [](const Deterministic& d) { return d.size; },
                      },
                      v_);
}

double JumpLaw::second_moment() const {
    return std::visit(overloaded{
                          [](const Exponential& e) { return 2.0 / (e.rate * e.rate); },
                          [](const Erlang& e) { return e.shape * (e.shape + 1.0) / (e.rate * e.rate); },
                          [](const Hyperexponential& h) {
                              double m = 0.0;
                              for (std::size_t i = 0; i < h.rates.size(); ++i)
                                  m += 2.0 * h.weights[i] / (h.rates[i] * h.rates[i]);
                              return m;
                          },
                          [](const Deterministic& d) { return d.size * d.size; },
                      },
                      v_);
}

cplx JumpLaw::lst(cplx a) const {
    return std::visit(overloaded{
                          [a](const Exponential& e) { return e.rate / (e.rate + a); },
                          [a](const Erlang& e) { return std::pow(e.rate / (e.rate + a), e.shape); },
                          [a](const Hyperexponential& h) {
                              cplx v = 0.0;
                              for (std::size_t i = 0; i < h.rates.size(); ++i)
                                  v += h.weights[i] * h.rates[i] / (h.rates[i] + a);
                              return v;
                          },
                          [a](const Deterministic& d) { return std::exp(-a * d.size); },
                      },
                      v_);
}

cplx JumpLaw::lst_derivative(cplx a) const {
    return std::visit(overloaded{
                          [a](const Exponential& e) {
                              cplx q = e.rate + a;
                              return -e.rate / (q * q);
                          },
                          [a](const Erlang& e) {
                              cplx q = e.rate / (e.rate + a);
                              return -static_cast<double>(e.shape) * std::pow(q, e.shape) / (e.rate + a);
                          },
                          [a](const Hyperexponential& h) {
                              cplx v = 0.0;
                              for (std::size_t i = 0; i < h.rates.size(); ++i) {
                                  cplx q = h.rates[i] + a;
                                  v -= h.weights[i] * h.rates[i] / (q * q);
                              }
                              return v;
                          },
                          [a](const Deterministic& d) { return -d.size * std::exp(-a * d.size); },
                      },
                      v_);
}

cplx JumpLaw::residual_lst(cplx a) const {
    // (1 - lst(a)) / (a E B) with the cancellation removed analytically.
    return std::visit(overloaded{
                          [a](const Exponential& e) { return e.rate / (e.rate + a); },
                          [a](const Erlang& e) {
                              cplx q = e.rate / (e.rate + a);
                              cplx sum = 0.0, qj = 1.0;
                              for (int j = 0; j < e.shape; ++j, qj *= q) sum += qj;
                              return q * sum / static_cast<double>(e.shape);
                          },
                          [a, this](const Hyperexponential& h) {
                              cplx v = 0.0;
                              for (std::size_t i = 0; i < h.rates.size(); ++i) v += h.weights[i] / (h.rates[i] + a);
                              return v / mean();
                          },
                          [a](const Deterministic& d) { return one_minus_exp_over(a * d.size); },
                      },
                      v_);
}

double JumpLaw::sample(Rng& rng) const {
    return std::visit(overloaded{
                          [&rng](const Exponential& e) { return exponential(rng, e.rate); },
                          [&rng](const Erlang& e) { return erlang_sample(rng, e.shape, e.rate); },
                          [&rng](const Hyperexponential& h) {
                              double u = uniform01(rng);
                              std::size_t i = 0;
                              double acc = h.weights[0];
                              while (u > acc && i + 1 < h.rates.size()) acc += h.weights[++i];
                              return exponential(rng, h.rates[i]);
                          },
                          [](const Deterministic& d) { return d.size; },
                      },
                      v_);
}

ResidualLaw::ResidualLaw(const JumpLaw& jump) {
    std::visit(overloaded{
                   [this](const Exponential& e) { terms_.push_back({1.0, 1, e.rate}); },
                   [this](const Erlang& e) {
                       for (int j = 1; j <= e.shape; ++j)
                           terms_.push_back({1.0 / e.shape, j, e.rate});
                   },
                   [this](const Hyperexponential& h) {
                       double m = 0.0;
                       for (std::size_t i = 0; i < h.rates.size(); ++i) m += h.weights[i] / h.rates[i];
                       for (std::size_t i = 0; i < h.rates.size(); ++i)
                           terms_.push_back({h.weights[i] / (h.rates[i] * m), 1, h.rates[i]});
                   },
                   [this](const Deterministic& d) { uniform_upper_ = d.size; },
               },
               jump.variant());
}

double ResidualLaw::mean() const {
    if (is_uniform()) return uniform_upper_ / 2.0;
    double m = 0.0;
    for (const auto& t : terms_) m += t.weight * t.shape / t.rate;
    return m;
}

double ResidualLaw::density(double x) const {
    if (x < 0) return 0.0;
    if (is_uniform()) return x < uniform_upper_ ? 1.0 / uniform_upper_ : 0.0;
    double f = 0.0;
    for (const auto& t : terms_) {
        double log_f = t.shape * std::log(t.rate) + (t.shape - 1) * std::log(std::max(x, 1e-300)) -
                       t.rate * x - std::lgamma(static_cast<double>(t.shape));
        f += t.weight * std::exp(log_f);
    }
    return f;
}

double ResidualLaw::cdf(double x) const {
    if (x <= 0) return 0.0;
    if (is_uniform()) return std::min(1.0, x / uniform_upper_);
    double c = 0.0;
    for (const auto& t : terms_) c += t.weight * boost::math::gamma_p(static_cast<double>(t.shape), t.rate * x);
    return c;
}

cplx ResidualLaw::lst(cplx a) const {
    if (is_uniform()) return one_minus_exp_over(a * uniform_upper_);
    cplx v = 0.0;
    for (const auto& t : terms_) v += t.weight * std::pow(t.rate / (t.rate + a), t.shape);
    return v;
}

double ResidualLaw::sample(Rng& rng) const {
    if (is_uniform()) return uniform_upper_ * uniform01(rng);
    double u = uniform01(rng);
    std::size_t i = 0;
    double acc = terms_[0].weight;
    while (u > acc && i + 1 < terms_.size()) acc += terms_[++i].weight;
    return erlang_sample(rng, terms_[i].shape, terms_[i].rate);
}

}  // namespace levq
