#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "levq/coupled_system.hpp"
#include "levq/random.hpp"
#include "levq/wiener_hopf.hpp"

namespace levq {

struct SimConfig {
    double horizon = 1e5;  // simulated time per replication
    double warmup = 0.2;   // fraction of the horizon discarded
    double step = 0.01;    // Euler step
    int replications = 1;
    int batches = 32;  // batch means per replication
    std::uint64_t seed = 1;
    unsigned threads = 0;  // 0: hardware concurrency
    std::vector<std::pair<double, double>> alpha_grid;
    std::vector<double> cdf_points;
    std::size_t trace_limit = 0;  // path records kept from replication 0
    double trace_interval = 1.0;
};

/// Throws Error(invalid_argument) on out-of-range settings.
void validate(const SimConfig& config);

struct Estimate {
    double value = 0.0;
    double se = 0.0;
};

struct PathState {
    double t = 0.0;
    double w1 = 0.0;
    double w2 = 0.0;
    double l1 = 0.0;
    double l2 = 0.0;
};

/// Time-average estimates with batch-means standard errors.
struct EstimateReport {
    bool euler = false;
    std::vector<std::pair<double, double>> alpha_grid;
    std::vector<Estimate> transform;  // E exp(-a1 W1 - a2 W2)
    Estimate mean1, mean2, mixed;     // E W1, E W2, E W1 W2
    Estimate idle1, idle2, idle_both;  // P(W1 = 0), P(W2 = 0), P(W1 = W2 = 0)
    Estimate l_rate1, l_rate2;         // L_i(T) / T
    std::vector<double> cdf_points;
    std::vector<Estimate> cdf1, cdf2;  // P(W_i <= x)
    std::vector<double> batch_mean1, batch_mean2;
    double measured_time = 0.0;
    std::uint64_t events = 0;
    std::uint64_t skorokhod_violations = 0;
    double max_conservation_error = 0.0;
    std::vector<PathState> trace;
};

/// Exact event-driven simulation; inputs must be compound Poisson or pure drift.
EstimateReport simulate_cpp(const CoupledSystem& system, const SimConfig& config);
/// Time-stepped simulation for systems with a Brownian input.
EstimateReport simulate_euler(const CoupledSystem& system, const SimConfig& config);
/// Exact mode when possible, Euler mode otherwise.
EstimateReport simulate(const CoupledSystem& system, const SimConfig& config);

/// Busy period of a CPP queue with positive drift started from a residual jump.
double sample_busy_period(const BusyPeriodView& view, Rng& rng);
double sample_busy_period(const LevyModel& model, Rng& rng);

/// Running supremum and infimum of an auxiliary process up to an
/// independent exponential time of rate side.p.
class SupInfSampler {
public:
    explicit SupInfSampler(const FactorSide& side);
    std::pair<double, double> operator()(Rng& rng) const;

private:
    double p_;
    double up_rate_ = 0.0;
    double down_rate_ = 0.0;
    std::optional<BusyPeriodView> up_;
    std::optional<BusyPeriodView> down_;
};

std::pair<double, double> sample_sup_inf(const FactorSide& side, Rng& rng);

struct Arrival {
    double time;
    int queue;  // 1 or 2
    double size;
};

struct ReplayResult {
    PathState final;
    double input1 = 0.0;  // X_i(T): arrived work minus service capacity
    double input2 = 0.0;
    std::uint64_t skorokhod_violations = 0;
    std::vector<PathState> states;  // state after every arrival
};

/// Deterministic replay of the exact dynamics with given arrivals.
ReplayResult replay_cpp(const CoupledSystem& system, std::vector<Arrival> arrivals, double horizon,
                        double w1 = 0.0, double w2 = 0.0);

}  // namespace levq
