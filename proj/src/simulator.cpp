#include "levq/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include "levq/error.hpp"

namespace levq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// expm1(x) / x, continuous at 0.
double expm1_ratio(double x) { return std::abs(x) < 1e-10 ? 1.0 + 0.5 * x : std::expm1(x) / x; }

// Time within a segment of length tau during which w - v t <= x.
double time_below(double w, double v, double tau, double x) {
    if (v <= 0) return w <= x ? tau : 0.0;
    double t_cross = (w - x) / v;
    return tau - std::clamp(t_cross, 0.0, tau);
}

struct BatchAcc {
    double time = 0.0;
    double m1 = 0.0, m2 = 0.0, m12 = 0.0;
    double idle1 = 0.0, idle2 = 0.0, idle_both = 0.0;
    double dl1 = 0.0, dl2 = 0.0;
    std::vector<double> transform, cdf1, cdf2;
};

class Collector {
public:
    explicit Collector(const SimConfig& cfg) : cfg_(cfg), batches_(cfg.batches) {
        for (auto& b : batches_) {
            b.transform.assign(cfg.alpha_grid.size(), 0.0);
            b.cdf1.assign(cfg.cdf_points.size(), 0.0);
            b.cdf2.assign(cfg.cdf_points.size(), 0.0);
        }
    }

    void set_batch(int k) { current_ = k; }
    bool active() const { return current_ >= 0 && current_ < cfg_.batches; }
    std::vector<BatchAcc>& batches() { return batches_; }

    // Workloads decrease linearly at rates v over a segment of length tau.
    void segment(double tau, double w1, double w2, double v1, double v2, double dl1, double dl2) {
        if (!active() || tau <= 0) return;
        auto& b = batches_[current_];
        double t2 = tau * tau;
        b.time += tau;
        b.m1 += w1 * tau - 0.5 * v1 * t2;
        b.m2 += w2 * tau - 0.5 * v2 * t2;
        b.m12 += w1 * w2 * tau - 0.5 * (w1 * v2 + w2 * v1) * t2 + v1 * v2 * t2 * tau / 3.0;
        if (w1 == 0.0) b.idle1 += tau;
        if (w2 == 0.0) b.idle2 += tau;
        if (w1 == 0.0 && w2 == 0.0) b.idle_both += tau;
        b.dl1 += dl1;
        b.dl2 += dl2;
        for (std::size_t k = 0; k < cfg_.alpha_grid.size(); ++k) {
            auto [a1, a2] = cfg_.alpha_grid[k];
            double c = a1 * v1 + a2 * v2;
            b.transform[k] += std::exp(-(a1 * w1 + a2 * w2)) * tau * expm1_ratio(c * tau);
        }
        for (std::size_t k = 0; k < cfg_.cdf_points.size(); ++k) {
            b.cdf1[k] += time_below(w1, v1, tau, cfg_.cdf_points[k]);
            b.cdf2[k] += time_below(w2, v2, tau, cfg_.cdf_points[k]);
        }
    }

private:
    const SimConfig& cfg_;
    std::vector<BatchAcc> batches_;
    int current_ = -1;
};

// Exact piecewise-linear dynamics of the reflected pair between arrivals.
struct CppDynamics {
    double s1, s2, r1, r2, ell1, ell2;
    PathState st;
    long double arrived1 = 0.0L, arrived2 = 0.0L;
    std::uint64_t violations = 0;

    explicit CppDynamics(const CoupledSystem& sys)
        : s1(sys.x1.service_rate()), s2(sys.x2.service_rate()), r1(sys.r1), r2(sys.r2) {
        double det = 1.0 - r1 * r2;
        ell1 = (s1 + r1 * s2) / det;
        ell2 = (s2 + r2 * s1) / det;
    }

    void advance(double dt, Collector* col) {
        while (dt > 0) {
            const bool b1 = st.w1 > 0, b2 = st.w2 > 0;
            double v1 = 0, v2 = 0, g1 = 0, g2 = 0;
            if (b1 && b2) {
                v1 = s1;
                v2 = s2;
            } else if (!b1 && b2) {
                v2 = s2 + r2 * s1;
                g1 = s1;
            } else if (b1 && !b2) {
                v1 = s1 + r1 * s2;
                g2 = s2;
            } else {
                g1 = ell1;
                g2 = ell2;
            }
            double t1 = b1 ? st.w1 / v1 : kInf;
            double t2 = b2 ? st.w2 / v2 : kInf;
            double tau = std::min({dt, t1, t2});
            if (col) col->segment(tau, st.w1, st.w2, v1, v2, g1 * tau, g2 * tau);
            st.w1 = t1 <= tau ? 0.0 : st.w1 - v1 * tau;
            st.w2 = t2 <= tau ? 0.0 : st.w2 - v2 * tau;
            if (st.w1 < 0 || st.w2 < 0) {
                if (std::min(st.w1, st.w2) < -1e-9) ++violations;
                st.w1 = std::max(st.w1, 0.0);
                st.w2 = std::max(st.w2, 0.0);
            }
            // Regulators only grow on the idle set.
            if ((g1 > 0 && st.w1 != 0.0) || (g2 > 0 && st.w2 != 0.0)) ++violations;
            st.l1 += g1 * tau;
            st.l2 += g2 * tau;
            st.t += tau;
            dt -= tau;
        }
    }

    void arrive(int queue, double size) {
        if (queue == 1) {
            st.w1 += size;
            arrived1 += size;
        } else {
            st.w2 += size;
            arrived2 += size;
        }
    }

    double conservation_error(double horizon) const {
        double err = 0.0;
        for (int i = 1; i <= 2; ++i) {
            double w = i == 1 ? st.w1 : st.w2;
            double a = static_cast<double>(i == 1 ? arrived1 : arrived2);
            double s = i == 1 ? s1 : s2;
            double li = i == 1 ? st.l1 : st.l2;
            double lj = i == 1 ? st.l2 : st.l1;
            double r = i == 1 ? r1 : r2;
            double rhs = a - s * horizon + li - r * lj;
            double scale = std::max(1.0, a + s * horizon + li + r * lj);
            err = std::max(err, std::abs(w - rhs) / scale);
        }
        return err;
    }
};

struct ReplicationResult {
    std::vector<BatchAcc> batches;
    std::uint64_t events = 0;
    std::uint64_t violations = 0;
    double conservation = 0.0;
    std::vector<PathState> trace;
};

std::vector<double> batch_bounds(const SimConfig& cfg) {
    double warm = cfg.warmup * cfg.horizon;
    double len = (cfg.horizon - warm) / cfg.batches;
    std::vector<double> b;
    for (int k = 0; k < cfg.batches; ++k) b.push_back(warm + k * len);
    b.push_back(cfg.horizon);
    return b;
}

double first_arrival(const LevyModel& m, Rng& rng) {
    const auto* c = m.cpp();
    return c ? exponential(rng, c->lambda) : kInf;
}

ReplicationResult run_cpp(const CoupledSystem& sys, const SimConfig& cfg, int rep) {
    Rng rng = make_stream(cfg.seed, static_cast<std::uint64_t>(rep));
    Collector col(cfg);
    CppDynamics dyn(sys);
    ReplicationResult res;
    const auto bounds = batch_bounds(cfg);
    std::size_t bi = 0;
    double next[2] = {first_arrival(sys.x1, rng), first_arrival(sys.x2, rng)};
    double next_trace = 0.0;
    const bool tracing = rep == 0 && cfg.trace_limit > 0;

    while (dyn.st.t < cfg.horizon) {
        double tn = std::min({next[0], next[1], bounds[bi]});
        dyn.advance(tn - dyn.st.t, &col);
        dyn.st.t = tn;
        if (tn == bounds[bi]) {
            col.set_batch(static_cast<int>(bi));
            if (bi + 1 < bounds.size()) ++bi;
            if (tn >= cfg.horizon) break;
        }
        for (int q = 0; q < 2; ++q) {
            if (tn != next[q]) continue;
            const auto* c = sys.model(q + 1).cpp();
            dyn.arrive(q + 1, c->jump.sample(rng));
            next[q] = tn + exponential(rng, c->lambda);
            ++res.events;
        }
        if (tracing && tn >= next_trace && res.trace.size() < cfg.trace_limit) {
            res.trace.push_back(dyn.st);
            next_trace = tn + cfg.trace_interval;
        }
    }
    res.batches = std::move(col.batches());
    res.violations = dyn.violations;
    res.conservation = dyn.conservation_error(cfg.horizon);
    return res;
}

// Minimum of a Brownian bridge from 0 to y over time dt with variance rate
// sig2, drawn by inversion with the uniform u.
double bridge_min(double y, double sig2, double dt, double u) {
    if (sig2 == 0.0) return std::min(0.0, y);
    return 0.5 * (y - std::sqrt(y * y - 2.0 * sig2 * dt * std::log(u)));
}

struct EulerInput {
    double drift;  // continuous decrease rate
    double sig2 = 0.0;
    const CompoundPoisson* cpp = nullptr;
};

EulerInput euler_input(const LevyModel& m) {
    if (const auto* c = m.cpp()) return {c->service, 0.0, c};
    if (const auto* b = std::get_if<Brownian>(&m.variant())) return {b->drift, b->sigma * b->sigma, nullptr};
    return {m.drift(), 0.0, nullptr};
}

ReplicationResult run_euler(const CoupledSystem& sys, const SimConfig& cfg, int rep) {
    Rng rng = make_stream(cfg.seed, static_cast<std::uint64_t>(rep));
    std::normal_distribution<double> normal;
    Collector col(cfg);
    ReplicationResult res;
    const EulerInput in[2] = {euler_input(sys.x1), euler_input(sys.x2)};
    const double r[2] = {sys.r1, sys.r2};
    const long steps = std::max(1L, static_cast<long>(std::ceil(cfg.horizon / cfg.step)));
    const double dt = cfg.horizon / steps;
    const double warm = cfg.warmup * cfg.horizon;
    const double len = (cfg.horizon - warm) / cfg.batches;
    const bool tracing = rep == 0 && cfg.trace_limit > 0;
    double next_trace = 0.0;

    PathState st;
    double next[2] = {in[0].cpp ? exponential(rng, in[0].cpp->lambda) : kInf,
                      in[1].cpp ? exponential(rng, in[1].cpp->lambda) : kInf};
    double w[2] = {0.0, 0.0};
    double dl_batch[2] = {0.0, 0.0};

    auto substep = [&](double delta) {
        double y[2], u[2];
        for (int i = 0; i < 2; ++i) {
            y[i] = -in[i].drift * delta;
            if (in[i].sig2 > 0) y[i] += std::sqrt(in[i].sig2 * delta) * normal(rng);
            u[i] = uniform01(rng);
        }
        double dl[2] = {0.0, 0.0};
        bool converged = false;
        for (int it = 0; it < 20000; ++it) {
            double n0 = std::max(0.0, -(w[0] + bridge_min(y[0] - r[0] * dl[1], in[0].sig2, delta, u[0])));
            double n1 = std::max(0.0, -(w[1] + bridge_min(y[1] - r[1] * dl[0], in[1].sig2, delta, u[1])));
            double change = std::max(std::abs(n0 - dl[0]), std::abs(n1 - dl[1]));
            dl[0] = n0;
            dl[1] = n1;
            if (change < 1e-12 * delta) {
                converged = true;
                break;
            }
        }
        require(converged, ErrorKind::numerical_failure, "reflection fixed point did not converge");
        for (int i = 0; i < 2; ++i) w[i] = std::max(0.0, w[i] + y[i] - r[i] * dl[1 - i] + dl[i]);
        st.l1 += dl[0];
        st.l2 += dl[1];
        dl_batch[0] += dl[0];
        dl_batch[1] += dl[1];
    };

    for (long k = 0; k < steps; ++k) {
        const double t0 = k * dt, t1 = (k + 1) * dt;
        double t = t0;
        dl_batch[0] = dl_batch[1] = 0.0;
        for (;;) {
            double tn = std::min({next[0], next[1], t1});
            if (tn > t) substep(tn - t);
            t = tn;
            if (tn >= t1) break;
            for (int q = 0; q < 2; ++q) {
                if (tn != next[q]) continue;
                w[q] += in[q].cpp->jump.sample(rng);
                next[q] = tn + exponential(rng, in[q].cpp->lambda);
                ++res.events;
            }
        }
        if (t0 >= warm) {
            int b = std::min(cfg.batches - 1, static_cast<int>((t0 - warm) / len));
            col.set_batch(b);
            // Point sample held over the step: zero velocities.
            col.segment(dt, w[0], w[1], 0.0, 0.0, dl_batch[0], dl_batch[1]);
        }
        st.t = t1;
        st.w1 = w[0];
        st.w2 = w[1];
        if (tracing && st.t >= next_trace && res.trace.size() < cfg.trace_limit) {
            res.trace.push_back(st);
            next_trace = st.t + cfg.trace_interval;
        }
    }
    res.batches = std::move(col.batches());
    return res;
}

Estimate batch_estimate(const std::vector<double>& xs) {
    double n = static_cast<double>(xs.size());
    double m = 0.0;
    for (double x : xs) m += x;
    m /= n;
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return {m, std::sqrt(ss / (n - 1.0) / n)};
}

template <class Runner>
EstimateReport run_all(const CoupledSystem& sys, const SimConfig& cfg, Runner runner, bool euler) {
    validate(cfg);
    require(check_stability(sys).stable, ErrorKind::unstable, "stability condition violated");
    std::vector<ReplicationResult> results(cfg.replications);
    unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, cfg.replications);
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            try {
                for (int rep = static_cast<int>(t); rep < cfg.replications; rep += threads)
                    results[rep] = runner(sys, cfg, rep);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    EstimateReport rep;
    rep.euler = euler;
    rep.alpha_grid = cfg.alpha_grid;
    rep.cdf_points = cfg.cdf_points;
    std::vector<const BatchAcc*> all;
    for (const auto& r : results) {
        for (const auto& b : r.batches) all.push_back(&b);
        rep.events += r.events;
        rep.skorokhod_violations += r.violations;
        rep.max_conservation_error = std::max(rep.max_conservation_error, r.conservation);
        rep.measured_time += cfg.horizon * (1.0 - cfg.warmup);
    }
    rep.trace = std::move(results[0].trace);

    auto collect = [&](auto f) {
        std::vector<double> xs;
        for (const auto* b : all) xs.push_back(f(*b) / b->time);
        return xs;
    };
    rep.batch_mean1 = collect([](const BatchAcc& b) { return b.m1; });
    rep.batch_mean2 = collect([](const BatchAcc& b) { return b.m2; });
    rep.mean1 = batch_estimate(rep.batch_mean1);
    rep.mean2 = batch_estimate(rep.batch_mean2);
    rep.mixed = batch_estimate(collect([](const BatchAcc& b) { return b.m12; }));
    rep.idle1 = batch_estimate(collect([](const BatchAcc& b) { return b.idle1; }));
    rep.idle2 = batch_estimate(collect([](const BatchAcc& b) { return b.idle2; }));
    rep.idle_both = batch_estimate(collect([](const BatchAcc& b) { return b.idle_both; }));
    rep.l_rate1 = batch_estimate(collect([](const BatchAcc& b) { return b.dl1; }));
    rep.l_rate2 = batch_estimate(collect([](const BatchAcc& b) { return b.dl2; }));
    for (std::size_t k = 0; k < cfg.alpha_grid.size(); ++k)
        rep.transform.push_back(batch_estimate(collect([k](const BatchAcc& b) { return b.transform[k]; })));
    for (std::size_t k = 0; k < cfg.cdf_points.size(); ++k) {
        rep.cdf1.push_back(batch_estimate(collect([k](const BatchAcc& b) { return b.cdf1[k]; })));
        rep.cdf2.push_back(batch_estimate(collect([k](const BatchAcc& b) { return b.cdf2[k]; })));
    }
    return rep;
}

}  // namespace

void validate(const SimConfig& c) {
    require(c.horizon > 0 && std::isfinite(c.horizon), ErrorKind::invalid_argument, "horizon must be positive");
    require(c.warmup >= 0 && c.warmup <= 0.5, ErrorKind::invalid_argument, "warmup fraction must lie in [0, 0.5]");
    require(c.batches >= 10, ErrorKind::invalid_argument, "at least 10 batches are needed");
    require(c.step > 0 && std::isfinite(c.step), ErrorKind::invalid_argument, "step must be positive");
    require(c.replications >= 1, ErrorKind::invalid_argument, "at least one replication is needed");
    require(c.trace_interval > 0, ErrorKind::invalid_argument, "trace interval must be positive");
}

EstimateReport simulate_cpp(const CoupledSystem& system, const SimConfig& config) {
    require(!system.x1.is_brownian() && !system.x2.is_brownian(), ErrorKind::unsupported,
            "exact simulation needs bounded-variation inputs");
    return run_all(system, config, run_cpp, false);
}

EstimateReport simulate_euler(const CoupledSystem& system, const SimConfig& config) {
    return run_all(system, config, run_euler, true);
}

EstimateReport simulate(const CoupledSystem& system, const SimConfig& config) {
    if (system.x1.is_brownian() || system.x2.is_brownian()) return simulate_euler(system, config);
    return simulate_cpp(system, config);
}

double sample_busy_period(const BusyPeriodView& view, Rng& rng) {
    const auto* c = view.model.cpp();
    double w = view.residual.sample(rng);
    double t = 0.0;
    for (;;) {
        double a = exponential(rng, c->lambda);
        if (w <= view.service * a) return t + w / view.service;
        t += a;
        w += c->jump.sample(rng) - view.service * a;
    }
}

double sample_busy_period(const LevyModel& model, Rng& rng) {
    return sample_busy_period(busy_period_view(model), rng);
}

SupInfSampler::SupInfSampler(const FactorSide& side) : p_(side.p) {
    if (side.has_up()) {
        up_ = busy_period_view(side.up);
        up_rate_ = side.up_scale * up_->rho;
    }
    if (side.has_down()) {
        down_ = busy_period_view(side.down);
        down_rate_ = side.down_scale * down_->rho;
    }
}

std::pair<double, double> SupInfSampler::operator()(Rng& rng) const {
    const double total = p_ + up_rate_ + down_rate_;
    double x = 0.0, sup = 0.0, inf = 0.0;
    for (;;) {
        double u = uniform01(rng) * total;
        if (u <= p_) return {sup, inf};
        if (u <= p_ + up_rate_) {
            x += sample_busy_period(*up_, rng);
            sup = std::max(sup, x);
        } else {
            x -= sample_busy_period(*down_, rng);
            inf = std::min(inf, x);
        }
    }
}

std::pair<double, double> sample_sup_inf(const FactorSide& side, Rng& rng) { return SupInfSampler(side)(rng); }

ReplayResult replay_cpp(const CoupledSystem& system, std::vector<Arrival> arrivals, double horizon, double w1,
                        double w2) {
    require(!system.x1.is_brownian() && !system.x2.is_brownian(), ErrorKind::unsupported,
            "replay needs bounded-variation inputs");
    std::stable_sort(arrivals.begin(), arrivals.end(),
                     [](const Arrival& a, const Arrival& b) { return a.time < b.time; });
    CppDynamics dyn(system);
    dyn.st.w1 = w1;
    dyn.st.w2 = w2;
    ReplayResult res;
    for (const auto& a : arrivals) {
        if (a.time > horizon) break;
        require(a.size >= 0 && (a.queue == 1 || a.queue == 2), ErrorKind::invalid_argument, "bad arrival");
        dyn.advance(a.time - dyn.st.t, nullptr);
        dyn.st.t = a.time;
        dyn.arrive(a.queue, a.size);
        res.states.push_back(dyn.st);
    }
    dyn.advance(horizon - dyn.st.t, nullptr);
    dyn.st.t = horizon;
    res.final = dyn.st;
    res.input1 = static_cast<double>(dyn.arrived1) - dyn.s1 * horizon;
    res.input2 = static_cast<double>(dyn.arrived2) - dyn.s2 * horizon;
    res.skorokhod_violations = dyn.violations;
    return res;
}

}  // namespace levq
