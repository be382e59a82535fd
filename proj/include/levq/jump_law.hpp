#pragma once

#include <complex>
#include <variant>
#include <vector>

#include "levq/random.hpp"

namespace levq {

using cplx = std::complex<double>;

struct Exponential {
    double rate;
};

struct Erlang {
    int shape;
    double rate;
};

struct Hyperexponential {
    std::vector<double> weights;
    std::vector<double> rates;
};

struct Deterministic {
    double size;
};

/// Law of a single positive jump (amount of work brought by one arrival).
class JumpLaw {
public:
    using Variant = std::variant<Exponential, Erlang, Hyperexponential, Deterministic>;

    JumpLaw(Variant v);  // validates; throws Error(invalid_argument)

    const Variant& variant() const noexcept { return v_; }
    bool is_deterministic() const noexcept {
        return std::holds_alternative<Deterministic>(v_);
    }

    double mean() const;
    double second_moment() const;

    /// E exp(-a B), valid for Re(a) >= 0.
    cplx lst(cplx a) const;
    /// d/da E exp(-a B) = -E[B exp(-a B)].
    cplx lst_derivative(cplx a) const;
    /// (1 - lst(a)) / (a E B), the LST of the stationary residual life.
    cplx residual_lst(cplx a) const;

    double sample(Rng& rng) const;

private:
    Variant v_;
};

/// Stationary residual life of a jump law. Exponential, Erlang and
/// hyperexponential residuals are mixtures of Erlang terms; a deterministic
/// residual is uniform on (0, b).
class ResidualLaw {
public:
    struct ErlangTerm {
        double weight;
        int shape;
        double rate;
    };

    explicit ResidualLaw(const JumpLaw& jump);

    bool is_uniform() const noexcept { return uniform_upper_ > 0.0; }
    double uniform_upper() const noexcept { return uniform_upper_; }
    const std::vector<ErlangTerm>& terms() const noexcept { return terms_; }

    double mean() const;
    double density(double x) const;
    double cdf(double x) const;
    cplx lst(cplx a) const;
    double sample(Rng& rng) const;

private:
    std::vector<ErlangTerm> terms_;
    double uniform_upper_ = 0.0;
};

}  // namespace levq
