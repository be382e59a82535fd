#include "levq/commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "levq/error.hpp"
#include "levq/simulator.hpp"
#include "levq/transform.hpp"

namespace levq {

namespace {

struct Outcome {
    std::string text;
    std::vector<std::pair<std::string, Table>> tables;
    int exit_code = exit_ok;
};

const char* kind_name(const LevyModel& m) {
    if (m.is_cpp()) return "compound_poisson";
    if (m.is_brownian()) return "brownian";
    return "pure_drift";
}

Table& tag(Table& t, const std::string& method, double tolerance) {
    t.meta("method", method).meta("tolerance", tolerance);
    return t;
}

std::vector<std::pair<double, double>> alpha_pairs(const RunOptions& run) {
    std::vector<std::pair<double, double>> out;
    for (double a1 : run.alpha1.values())
        for (double a2 : run.alpha2.values()) out.emplace_back(a1, a2);
    return out;
}

SimConfig sim_config(const RunOptions& run) {
    SimConfig c;
    c.horizon = run.horizon;
    c.warmup = run.warmup;
    c.step = run.step;
    c.replications = run.replications;
    c.batches = run.batches;
    c.seed = run.seed;
    c.threads = run.threads;
    c.alpha_grid = alpha_pairs(run);
    c.cdf_points = run.x.values();
    c.trace_limit = run.trace_limit;
    c.trace_interval = run.trace_interval;
    return c;
}

std::string sim_method(const EstimateReport& r) { return r.euler ? "simulation_euler" : "simulation_exact"; }

Outcome analyze(const ModelConfig& cfg) {
    const CoupledSystem sys = cfg.system();
    std::ostringstream os;
    Table t({"quantity", "value"});
    tag(t, "closed_form", 1e-12);
    for (int i = 1; i <= 2; ++i) {
        const LevyModel& m = sys.model(i);
        std::string q = "queue" + std::to_string(i);
        t.add({q + "_type", std::string(kind_name(m))});
        t.add({q + "_d", m.drift()});
        t.add({q + "_curvature", m.curvature()});
        t.add({q + "_variation", std::string(m.variation() == Variation::bounded ? "bounded" : "unbounded")});
        t.add({q + "_Phi0", m.big_phi_zero()});
        os << q << ": " << kind_name(m) << ", d = " << format_double(m.drift())
           << ", phi''(0) = " << format_double(m.curvature()) << "\n";
        if (m.is_cpp() && m.drift() > 0) {
            auto view = busy_period_view(m);
            t.add({q + "_busy_mean", view.busy_mean()});
            t.add({q + "_busy_rate", view.rho});
            os << "  busy periods: rate " << format_double(view.rho) << ", mean " << format_double(view.busy_mean())
               << "\n";
        }
    }
    t.add({"r1", sys.r1});
    t.add({"r2", sys.r2});
    const auto st = check_stability(sys);
    t.add({"margin1", st.margin1});
    t.add({"margin2", st.margin2});
    t.add({"stable", std::string(st.stable ? "yes" : "no")});
    os << "margins: d1 + r1 d2 = " << format_double(st.margin1) << ", d2 + r2 d1 = " << format_double(st.margin2)
       << "\n";
    if (!st.stable) {
        os << "unstable: both margins must be positive\n";
        return {os.str(), {{"summary", std::move(t)}}, exit_unstable};
    }
    const auto aux = auxiliary_system(sys);
    t.add({"p_L", aux.p_L});
    t.add({"p_R", aux.p_R});
    t.add({"p_L0", aux.p_L0});
    t.add({"p_R0", aux.p_R0});
    t.add({"L1_rate", st.margin1 / (1.0 - sys.r1 * sys.r2)});
    t.add({"L2_rate", st.margin2 / (1.0 - sys.r1 * sys.r2)});
    os << "p_L = " << format_double(aux.p_L) << ", p_R = " << format_double(aux.p_R)
       << ", p_L0 = " << format_double(aux.p_L0) << ", p_R0 = " << format_double(aux.p_R0) << "\n";
    auto special = detect_special_case(sys);
    t.add({"special_case", std::string(special ? to_string(*special) : "none")});
    if (special) os << "special case: " << to_string(*special) << "\n";
    return {os.str(), {{"summary", std::move(t)}}};
}

Outcome transform(const ModelConfig& cfg) {
    const CoupledSystem sys = cfg.system();
    const auto ctx = TransformContext::build(sys, cfg.run.factor_options());
    auto special = detect_special_case(sys);
    std::function<cplx(cplx, cplx)> closed;
    if (special) closed = special_case_transform(sys, *special);

    std::vector<std::string> cols = {"alpha1", "alpha2", "transform", "functional_residual"};
    if (closed) cols.push_back("closed_form");
    Table t(cols);
    tag(t, ctx.method_label(), ctx.tolerance());
    double worst_fe = 0.0;
    for (auto [a1, a2] : alpha_pairs(cfg.run)) {
        double v = joint_transform_continued(ctx, a1, a2).real();
        double fe = functional_eq_residual(ctx, a1, a2);
        worst_fe = std::max(worst_fe, fe);
        std::vector<Table::Cell> row = {a1, a2, v, fe};
        if (closed) row.emplace_back(closed(a1, a2).real());
        t.add(std::move(row));
    }
    double worst_kernel = 0.0;
    if (std::isfinite(ctx.tolerance())) {
        const double scale = std::min(ctx.aux().p_L, ctx.aux().p_R);
        for (int k = -20; k <= 20; ++k) {
            if (k == 0) continue;
            double tt = (k > 0 ? 1.0 : -1.0) * scale * std::pow(10.0, -2.0 + 3.0 * (std::abs(k) - 1) / 19.0);
            worst_kernel = std::max(worst_kernel, kernel_residual(ctx, tt));
        }
    }
    std::ostringstream os;
    os << "factors: " << ctx.method_label() << ", tolerance " << format_double(ctx.tolerance()) << "\n"
       << "max functional-equation residual: " << format_double(worst_fe) << "\n";
    if (std::isfinite(ctx.tolerance()))
        os << "max kernel residual (40 points): " << format_double(worst_kernel) << "\n";
    if (special) os << "closed form column: " << to_string(*special) << "\n";
    return {os.str(), {{"values", std::move(t)}}};
}

Outcome moments_cmd(const ModelConfig& cfg) {
    const auto ctx = TransformContext::build(cfg.system(), cfg.run.factor_options());
    const auto m = moments(ctx, cfg.run.moment_step);
    Table t({"quantity", "value"});
    tag(t, ctx.method_label() + "+richardson", std::max(ctx.tolerance(), 1e-6));
    t.add({"mean1", m.mean1});
    t.add({"mean2", m.mean2});
    t.add({"step", m.step});
    t.add({"means_lhs", m.means_lhs});
    t.add({"means_rhs", m.means_rhs});
    t.add({"means_residual", m.means_residual()});
    t.add({"means_relative", m.means_relative()});
    std::ostringstream os;
    os << "E W1 = " << format_double(m.mean1) << ", E W2 = " << format_double(m.mean2) << " (step "
       << format_double(m.step) << ")\n"
       << "means identity: lhs " << format_double(m.means_lhs) << ", rhs " << format_double(m.means_rhs)
       << ", residual " << format_double(m.means_residual()) << " (relative " << format_double(m.means_relative())
       << ")\n";
    return {os.str(), {{"moments", std::move(t)}}};
}

Outcome marginal(const ModelConfig& cfg) {
    const auto ctx = TransformContext::build(cfg.system(), cfg.run.factor_options());
    InversionConfig ic = cfg.run.inversion_config();
    ic.density = true;
    const auto d = marginal_distribution(ctx, cfg.run.queue, cfg.run.x.values(), ic);
    Table t({"kind", "x", "cdf", "cdf_err", "density"});
    double worst = d.atom_err;
    for (double e : d.err) worst = std::max(worst, e);
    tag(t, std::string(to_string(ic.method)) + "+" + ctx.method_label(), worst);
    t.meta("queue", std::to_string(cfg.run.queue));
    t.add({std::string("atom"), 0.0, d.atom, d.atom_err, std::string("")});
    for (std::size_t i = 0; i < d.x.size(); ++i) t.add({std::string("cdf"), d.x[i], d.cdf[i], d.err[i], d.density[i]});
    std::ostringstream os;
    os << "queue " << cfg.run.queue << ": P(W = 0) = " << format_double(d.atom) << " +- " << format_double(d.atom_err)
       << ", " << d.x.size() << " CDF points, worst error estimate " << format_double(worst) << "\n";
    return {os.str(), {{"cdf", std::move(t)}}};
}

Outcome simulate_cmd(const ModelConfig& cfg) {
    const CoupledSystem sys = cfg.system();
    const auto r = simulate(sys, sim_config(cfg.run));
    const std::string method = sim_method(r);
    std::vector<std::pair<std::string, Table>> tables;

    Table est({"quantity", "value", "se"});
    tag(est, method, 1.96 * r.mean1.se);
    auto row = [&est](const char* name, const Estimate& e) { est.add({std::string(name), e.value, e.se}); };
    row("mean1", r.mean1);
    row("mean2", r.mean2);
    row("mixed", r.mixed);
    row("idle1", r.idle1);
    row("idle2", r.idle2);
    row("idle_both", r.idle_both);
    row("l_rate1", r.l_rate1);
    row("l_rate2", r.l_rate2);
    est.meta("measured_time", r.measured_time).meta("events", std::to_string(r.events));
    tables.emplace_back("estimates", std::move(est));

    Table tr({"alpha1", "alpha2", "value", "se"});
    double worst = 0.0;
    for (std::size_t i = 0; i < r.transform.size(); ++i) {
        tr.add({r.alpha_grid[i].first, r.alpha_grid[i].second, r.transform[i].value, r.transform[i].se});
        worst = std::max(worst, r.transform[i].se);
    }
    tag(tr, method, 1.96 * worst);
    tables.emplace_back("transform", std::move(tr));

    Table cdf({"x", "cdf1", "se1", "cdf2", "se2"});
    worst = 0.0;
    for (std::size_t i = 0; i < r.cdf_points.size(); ++i) {
        cdf.add({r.cdf_points[i], r.cdf1[i].value, r.cdf1[i].se, r.cdf2[i].value, r.cdf2[i].se});
        worst = std::max({worst, r.cdf1[i].se, r.cdf2[i].se});
    }
    tag(cdf, method, 1.96 * worst);
    tables.emplace_back("cdf", std::move(cdf));

    if (!r.trace.empty()) {
        Table trace({"t", "w1", "w2", "l1", "l2"});
        tag(trace, method, 0.0);
        for (const auto& s : r.trace) trace.add({s.t, s.w1, s.w2, s.l1, s.l2});
        tables.emplace_back("trace", std::move(trace));
    }
    std::ostringstream os;
    os << method << ": " << format_double(r.measured_time) << " time units measured, " << r.events << " events\n"
       << "E W1 = " << format_double(r.mean1.value) << " +- " << format_double(r.mean1.se)
       << ", E W2 = " << format_double(r.mean2.value) << " +- " << format_double(r.mean2.se) << "\n";
    if (r.skorokhod_violations) os << "reflection violations: " << r.skorokhod_violations << "\n";
    return {os.str(), std::move(tables)};
}

Outcome compare(const ModelConfig& cfg) {
    const CoupledSystem sys = cfg.system();
    const auto ctx = TransformContext::build(sys, cfg.run.factor_options());
    const auto mom = moments(ctx, cfg.run.moment_step);
    const auto r = simulate(sys, sim_config(cfg.run));

    Table t({"quantity", "alpha1", "alpha2", "analytic", "simulated", "se", "z", "pass"});
    tag(t, ctx.method_label() + " vs " + sim_method(r), 3.0).meta("tolerance_unit", "batch_means_se");
    int failed = 0;
    auto add = [&](const std::string& q, double a1, double a2, double analytic, const Estimate& e) {
        double z = e.se > 0 ? std::abs(analytic - e.value) / e.se : (analytic == e.value ? 0.0 : INFINITY);
        bool pass = z <= 3.0;
        failed += !pass;
        t.add({q, a1, a2, analytic, e.value, e.se, z, std::string(pass ? "pass" : "fail")});
    };
    for (std::size_t i = 0; i < r.alpha_grid.size(); ++i) {
        auto [a1, a2] = r.alpha_grid[i];
        add("transform", a1, a2, joint_transform_continued(ctx, a1, a2).real(), r.transform[i]);
    }
    add("mean1", 0.0, 0.0, mom.mean1, r.mean1);
    add("mean2", 0.0, 0.0, mom.mean2, r.mean2);
    std::ostringstream os;
    os << t.rows().size() << " comparisons over " << format_double(r.measured_time) << " simulated time units: "
       << (failed ? std::to_string(failed) + " outside 3 SE" : std::string("all within 3 SE")) << "\n";
    return {os.str(), {{"comparison", std::move(t)}}};
}

Outcome factors(const ModelConfig& cfg) {
    const auto ctx = TransformContext::build(cfg.system(), cfg.run.factor_options());
    Table summary({"side", "method", "p", "tolerance", "identity_residual", "worst_theta", "max_z", "theta_max",
                   "nodes", "tail_gap"});
    tag(summary, ctx.method_label(), ctx.tolerance());
    Table values({"side", "theta", "plus_re", "plus_im", "minus_re", "minus_im", "residual"});
    tag(values, ctx.method_label(), ctx.tolerance());
    std::ostringstream os;
    for (Side s : {Side::L, Side::R}) {
        const FactorPair& pair = ctx.factors(s);
        const double p = pair.side().p;
        const auto grid = default_check_grid(p);
        const auto rep = verify_identity(pair, grid);
        const GridFactorization* g = grid_engine(pair);
        summary.add({std::string(to_string(s)), std::string(to_string(pair.method())), p, pair.tolerance(),
                     rep.max_residual, rep.worst_theta, rep.max_z, g ? g->theta_max() : 0.0,
                     g ? double(g->node_count()) : 0.0, g ? g->tail_gap() : 0.0});
        for (double th : grid) {
            cplx w(0.0, th);
            cplx a = pair.plus(w), b = pair.minus(w);
            double res = std::abs(a * b * (p - pair.side().exponent(w)) / p - 1.0);
            values.add({std::string(to_string(s)), th, a.real(), a.imag(), b.real(), b.imag(), res});
        }
        os << "side " << to_string(s) << ": " << to_string(pair.method()) << ", p = " << format_double(p)
           << ", identity residual " << format_double(rep.max_residual) << "\n";
    }
    return {os.str(), {{"summary", std::move(summary)}, {"values", std::move(values)}}};
}

using Handler = Outcome (*)(const ModelConfig&);

const std::map<std::string, Handler, std::less<>>& handlers() {
    static const std::map<std::string, Handler, std::less<>> h = {
        {"analyze", analyze},   {"transform", transform}, {"moments", moments_cmd}, {"marginal", marginal},
        {"simulate", simulate_cmd}, {"compare", compare}, {"factors", factors},
    };
    return h;
}

}  // namespace

int exit_code_for(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::unstable: return exit_unstable;
    case ErrorKind::invalid_argument:
    case ErrorKind::unsupported:
    case ErrorKind::domain: return exit_unsupported;
    case ErrorKind::singularity:
    case ErrorKind::numerical_failure: return exit_numerical;
    }
    return exit_numerical;
}

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [k, h] : handlers()) v.push_back(k);
        return v;
    }();
    return names;
}

RunReport run_command(std::string_view command, const ModelConfig& config,
                      const std::optional<std::filesystem::path>& out) {
    auto it = handlers().find(command);
    require(it != handlers().end(), ErrorKind::invalid_argument, "unknown command '" + std::string(command) + "'");
    RunReport report;
    report.command = std::string(command);
    report.digest = config_digest(config);

    const auto start = std::chrono::steady_clock::now();
    Outcome o = it->second(config);
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::ostringstream head;
    head << "levq " << report.version << " " << report.command << "\nconfig sha256 " << report.digest << "\n"
         << o.text << "elapsed " << format_double(report.seconds) << " s\n";
    report.text = head.str();
    report.exit_code = o.exit_code;
    for (auto& [name, table] : o.tables) {
        table.meta("command", report.command).meta("config_sha256", report.digest).meta("version", report.version);
        report.tables.emplace_back(name, std::move(table));
    }

    if (out) {
        std::filesystem::create_directories(*out);
        auto write = [&report](const std::filesystem::path& path, const std::string& body) {
            std::ofstream f(path);
            require(f.good(), ErrorKind::invalid_argument, "cannot write " + path.string());
            f << body;
            report.outputs.push_back(path);
        };
        for (const auto& [name, table] : report.tables)
            write(*out / (report.command + "_" + name + ".csv"), table.str());
        std::string listing;
        for (const auto& p : report.outputs) listing += "wrote " + p.string() + "\n";
        write(*out / (report.command + "_report.txt"), report.text + listing);
        report.text += listing;
    }
    return report;
}

std::string render(const RunReport& report) {
    std::string s = report.text;
    if (report.outputs.empty()) {
        for (const auto& [name, table] : report.tables) s += "\n[" + name + "]\n" + table.str();
    }
    return s;
}

}  // namespace levq
