#include "levq/wiener_hopf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "levq/error.hpp"
#include "levq/simulator.hpp"

namespace levq {

const char* to_string(Side side) noexcept { return side == Side::L ? "L" : "R"; }

const char* to_string(FactorMethod method) noexcept {
    switch (method) {
    case FactorMethod::closed_form: return "closed_form";
    case FactorMethod::grid: return "grid_factorization";
    case FactorMethod::monte_carlo: return "monte_carlo";
    }
    return "unknown";
}

cplx FactorSide::exponent(cplx w) const {
    cplx v = 0.0;
    if (has_up()) v += up_scale * up.phi_Y(w);
    if (has_down()) v += down_scale * down.phi_Y(-w);
    return v;
}

cplx FactorSide::exponent_from(cplx up_value, cplx down_value) const {
    cplx v = 0.0;
    if (has_up()) v += up_scale * up_value;
    if (has_down()) v += down_scale * down_value;
    return v;
}

double FactorSide::limit() const {
    double v = 0.0;
    if (has_up()) v += up_scale * up.phi_Y_limit();
    if (has_down()) v += down_scale * down.phi_Y_limit();
    return v;
}

FactorSide make_side(const AuxiliarySystem& aux, Side tag) {
    const auto& s = aux.system;
    if (tag == Side::L) return FactorSide{tag, aux.p_L, s.x1, s.r2, s.x2, 1.0};
    return FactorSide{tag, aux.p_R, s.x1, 1.0, s.x2, s.r1};
}

FactorPair::FactorPair(FactorSide side, std::shared_ptr<const FactorEngine> engine)
    : side_(std::move(side)), engine_(std::move(engine)) {}

cplx FactorPair::plus(cplx w) const {
    require(w.real() >= -1e-14 * (1.0 + std::abs(w)), ErrorKind::domain, "ascending factor needs Re(w) >= 0");
    if (w == 0.0) return 1.0;
    return engine_->plus(cplx(std::max(w.real(), 0.0), w.imag()));
}

cplx FactorPair::minus(cplx w) const {
    require(w.real() <= 1e-14 * (1.0 + std::abs(w)), ErrorKind::domain, "descending factor needs Re(w) <= 0");
    if (w == 0.0) return 1.0;
    return engine_->minus(cplx(std::min(w.real(), 0.0), w.imag()));
}

namespace {

class ClosedFormEngine final : public FactorEngine {
public:
    explicit ClosedFormEngine(FactorSide side) : side_(std::move(side)) {}

    cplx plus(cplx w) const override {
        if (!side_.has_up()) return 1.0;
        return side_.p / (side_.p - side_.up_scale * side_.up.phi_Y(w));
    }
    cplx minus(cplx w) const override {
        if (!side_.has_down()) return 1.0;
        return side_.p / (side_.p - side_.down_scale * side_.down.phi_Y(-w));
    }
    FactorMethod method() const override { return FactorMethod::closed_form; }
    double tolerance() const override { return 1e-10; }

private:
    FactorSide side_;
};

class GridEngine final : public FactorEngine {
public:
    explicit GridEngine(GridFactorization grid) : grid_(std::move(grid)) {}

    cplx plus(cplx w) const override { return grid_.plus(w); }
    cplx minus(cplx w) const override { return grid_.minus(w); }
    FactorMethod method() const override { return FactorMethod::grid; }
    double tolerance() const override { return 1e-6; }
    const GridFactorization& grid() const { return grid_; }

private:
    GridFactorization grid_;
};

class MonteCarloEngine final : public FactorEngine {
public:
    MonteCarloEngine(std::vector<double> sup, std::vector<double> inf) : sup_(std::move(sup)), inf_(std::move(inf)) {}

    cplx plus(cplx w) const override { return mean(sup_, w); }
    cplx minus(cplx w) const override { return mean(inf_, w); }
    double plus_se(cplx w) const override { return se(sup_, w); }
    double minus_se(cplx w) const override { return se(inf_, w); }
    FactorMethod method() const override { return FactorMethod::monte_carlo; }
    // Statistical method: agreement is judged in standard errors instead.
    double tolerance() const override { return std::numeric_limits<double>::infinity(); }

private:
    static cplx mean(const std::vector<double>& xs, cplx w) {
        cplx s = 0.0;
        for (double x : xs) s += std::exp(-w * x);
        return s / static_cast<double>(xs.size());
    }
    static double se(const std::vector<double>& xs, cplx w) {
        cplx m = mean(xs, w);
        double ss = 0.0;
        for (double x : xs) ss += std::norm(std::exp(-w * x) - m);
        double n = static_cast<double>(xs.size());
        return std::sqrt(ss / (n - 1.0) / n);
    }

    std::vector<double> sup_;
    std::vector<double> inf_;
};

void require_grid_input(const LevyModel& m) {
    require(m.variation() == Variation::bounded, ErrorKind::unsupported,
            "grid factorization needs bounded-variation inputs");
    if (const auto* c = m.cpp())
        require(!c->jump.is_deterministic(), ErrorKind::unsupported,
                "grid factorization needs jump laws with a density");
}

}  // namespace

FactorPair factor_closed_form(const FactorSide& side) {
    require(!(side.has_up() && side.has_down()), ErrorKind::unsupported,
            "closed-form factors need a one-sided auxiliary process");
    return FactorPair(side, std::make_shared<ClosedFormEngine>(side));
}

FactorPair factor_grid(const FactorSide& side, const GridOptions& options) {
    if (side.has_up()) require_grid_input(side.up);
    if (side.has_down()) require_grid_input(side.down);
    AxisSymbol symbol{side.p, [side](double th) { return side.exponent(cplx(0.0, th)); }, side.limit()};
    GridOptions opt = options;
    for (double grown = 1.0;; grown *= 4.0) {
        try {
            return FactorPair(side, std::make_shared<GridEngine>(GridFactorization(symbol, opt)));
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::numerical_failure || 4.0 * grown > options.max_growth) throw;
        }
        opt.theta_factor *= 4.0;
    }
}

const GridFactorization* grid_engine(const FactorPair& pair) {
    const auto* e = dynamic_cast<const GridEngine*>(&pair.engine());
    return e ? &e->grid() : nullptr;
}

FactorPair factor_mc(const FactorSide& side, const McOptions& options) {
    require(options.paths >= 1000, ErrorKind::invalid_argument,
            "Monte-Carlo factors need at least 1000 paths");
    for (const LevyModel* m : {&side.up, &side.down}) {
        bool present = m == &side.up ? side.has_up() : side.has_down();
        if (!present) continue;
        require(m->is_cpp() && m->drift() > 0, ErrorKind::unsupported,
                "Monte-Carlo factors need compound Poisson inputs with positive drift");
    }
    // Fixed chunking keeps results independent of the thread count.
    constexpr std::size_t chunks = 16;
    std::vector<std::vector<std::pair<double, double>>> parts(chunks);
    const SupInfSampler sampler(side);
    auto work = [&](std::size_t c) {
        Rng rng = make_stream(options.seed, 1000 + c);
        std::size_t n = options.paths / chunks + (c < options.paths % chunks ? 1 : 0);
        parts[c].reserve(n);
        for (std::size_t i = 0; i < n; ++i) parts[c].push_back(sampler(rng));
    };
    unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, chunks);
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            for (std::size_t c = t; c < chunks; c += threads) work(c);
        });
    for (auto& th : pool) th.join();

    std::vector<double> sup, inf;
    sup.reserve(options.paths);
    inf.reserve(options.paths);
    for (const auto& part : parts)
        for (const auto& [s, i] : part) {
            sup.push_back(s);
            inf.push_back(i);
        }
    return FactorPair(side, std::make_shared<MonteCarloEngine>(std::move(sup), std::move(inf)));
}

IdentityReport verify_identity(const FactorPair& pair, const std::vector<double>& thetas) {
    IdentityReport rep;
    const auto& side = pair.side();
    for (double th : thetas) {
        cplx w(0.0, th);
        cplx kernel = (side.p - side.exponent(w)) / side.p;
        cplx pp = pair.plus(w), pm = pair.minus(w);
        double r = std::abs(pp * pm * kernel - 1.0);
        if (r > rep.max_residual) {
            rep.max_residual = r;
            rep.worst_theta = th;
        }
        if (pair.method() == FactorMethod::monte_carlo) {
            double se = std::abs(kernel) * (std::abs(pm) * pair.plus_se(w) + std::abs(pp) * pair.minus_se(w));
            if (se > 0) rep.max_z = std::max(rep.max_z, r / se);
        }
    }
    return rep;
}

std::vector<double> default_check_grid(double p, int count) {
    double half = 20.0 * p;
    std::vector<double> v;
    for (int i = 0; i < count; ++i) v.push_back(-half + 2.0 * half * (i + 0.5) / count);
    return v;
}

}  // namespace levq
