#include "levq/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <openssl/evp.h>

#include "levq/error.hpp"

namespace levq {

namespace pt = boost::property_tree;

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& text, const std::string& where) {
    std::string s = trim(text);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    require(ec == std::errc() && ptr == s.data() + s.size() && !s.empty() && std::isfinite(v),
            ErrorKind::invalid_argument, where + ": expected a number, got '" + text + "'");
    return v;
}

long long parse_int(const std::string& text, const std::string& where) {
    std::string s = trim(text);
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    require(ec == std::errc() && ptr == s.data() + s.size() && !s.empty(), ErrorKind::invalid_argument,
            where + ": expected an integer, got '" + text + "'");
    return v;
}

std::vector<double> parse_list(const std::string& text, const std::string& where) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(item, where));
    require(!out.empty(), ErrorKind::invalid_argument, where + ": empty list");
    return out;
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + num(v[i]);
    return s;
}

// Key lookup that remembers which keys were consumed, so leftovers can be reported.
class Section {
public:
    Section(const pt::ptree* tree, std::string name) : tree_(tree), name_(std::move(name)) {}

    bool present() const { return tree_ != nullptr; }
    bool has(const std::string& key) const { return tree_ && tree_->find(key) != tree_->not_found(); }

    std::string text(const std::string& key) {
        require(has(key), ErrorKind::invalid_argument, "missing key '" + key + "' in [" + name_ + "]");
        used_.insert(key);
        return tree_->find(key)->second.data();
    }
    double number(const std::string& key) { return parse_double(text(key), where(key)); }
    double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }
    long long integer(const std::string& key, long long fallback) {
        return has(key) ? parse_int(text(key), where(key)) : fallback;
    }
    std::string word(const std::string& key, const std::string& fallback) { return has(key) ? trim(text(key)) : fallback; }
    std::vector<double> list(const std::string& key) { return parse_list(text(key), where(key)); }
    std::string where(const std::string& key) const { return "[" + name_ + "] " + key; }

    void finish() const {
        if (!tree_) return;
        for (const auto& [key, child] : *tree_) {
            require(used_.count(key) == 1, ErrorKind::invalid_argument,
                    "unknown key '" + key + "' in [" + name_ + "]");
        }
    }

private:
    const pt::ptree* tree_;
    std::string name_;
    std::set<std::string> used_;
};

JumpLaw parse_jump(Section& s) {
    std::string kind = s.word("jump", "");
    if (kind == "exponential") return JumpLaw(Exponential{s.number("rate")});
    if (kind == "erlang") {
        long long k = s.integer("shape", 0);
        require(k >= 1 && k <= 1000, ErrorKind::invalid_argument, s.where("shape") + ": must lie in [1, 1000]");
        return JumpLaw(Erlang{static_cast<int>(k), s.number("rate")});
    }
    if (kind == "hyperexponential") return JumpLaw(Hyperexponential{s.list("weights"), s.list("rates")});
    if (kind == "deterministic") return JumpLaw(Deterministic{s.number("size")});
    fail(ErrorKind::invalid_argument, s.where("jump") + ": unknown jump law '" + kind + "'");
}

void write_jump(std::ostream& os, const JumpLaw& j) {
    std::visit(
        [&os](const auto& law) {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, Exponential>) {
                os << "jump = exponential\nrate = " << num(law.rate) << "\n";
            } else if constexpr (std::is_same_v<T, Erlang>) {
                os << "jump = erlang\nshape = " << law.shape << "\nrate = " << num(law.rate) << "\n";
            } else if constexpr (std::is_same_v<T, Hyperexponential>) {
                os << "jump = hyperexponential\nweights = " << join(law.weights) << "\nrates = " << join(law.rates)
                   << "\n";
            } else {
                os << "jump = deterministic\nsize = " << num(law.size) << "\n";
            }
        },
        j.variant());
}

LevyModel parse_queue(Section& s) {
    std::string type = s.word("type", "");
    if (type == "cpp") {
        double lambda = s.number("lambda");
        double service = s.number("service");
        return LevyModel(CompoundPoisson{lambda, parse_jump(s), service});
    }
    if (type == "brownian") return LevyModel(Brownian{s.number("drift"), s.number("sigma")});
    if (type == "drift") return LevyModel(PureDrift{s.number("rate")});
    fail(ErrorKind::invalid_argument, s.where("type") + ": expected cpp, brownian or drift, got '" + type + "'");
}

void write_queue(std::ostream& os, const LevyModel& m) {
    std::visit(
        [&os](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, CompoundPoisson>) {
                os << "type = cpp\nlambda = " << num(v.lambda) << "\nservice = " << num(v.service) << "\n";
                write_jump(os, v.jump);
            } else if constexpr (std::is_same_v<T, Brownian>) {
                os << "type = brownian\ndrift = " << num(v.drift) << "\nsigma = " << num(v.sigma) << "\n";
            } else {
                os << "type = drift\nrate = " << num(v.d) << "\n";
            }
        },
        m.variant());
}

NetworkInput parse_input(Section& s) {
    std::string type = s.word("type", "");
    if (type == "cpp") {
        double lambda = s.number("lambda");
        return CompoundPoissonInput{lambda, parse_jump(s)};
    }
    if (type == "constant") return ConstantInput{s.number("rate")};
    fail(ErrorKind::invalid_argument, s.where("type") + ": expected cpp or constant, got '" + type + "'");
}

void write_input(std::ostream& os, const NetworkInput& in) {
    if (const auto* c = std::get_if<CompoundPoissonInput>(&in)) {
        os << "type = cpp\nlambda = " << num(c->lambda) << "\n";
        write_jump(os, c->jump);
    } else {
        os << "type = constant\nrate = " << num(std::get<ConstantInput>(in).rate) << "\n";
    }
}

const std::map<std::string, FactorChoice> kFactorNames = {
    {"auto", FactorChoice::automatic},
    {"closed_form", FactorChoice::closed_form},
    {"grid", FactorChoice::grid},
    {"monte_carlo", FactorChoice::monte_carlo},
};

RunOptions parse_run(Section& s) {
    RunOptions r;
    long long seed = s.integer("seed", 1);
    require(seed >= 0, ErrorKind::invalid_argument, s.where("seed") + ": must be nonnegative");
    r.seed = static_cast<std::uint64_t>(seed);
    r.horizon = s.number("horizon", r.horizon);
    r.warmup = s.number("warmup", r.warmup);
    r.step = s.number("step", r.step);
    r.batches = static_cast<int>(s.integer("batches", r.batches));
    r.replications = static_cast<int>(s.integer("replications", r.replications));
    long long threads = s.integer("threads", 0);
    require(threads >= 0, ErrorKind::invalid_argument, s.where("threads") + ": must be nonnegative");
    r.threads = static_cast<unsigned>(threads);
    long long trace = s.integer("trace_limit", 0);
    require(trace >= 0, ErrorKind::invalid_argument, s.where("trace_limit") + ": must be nonnegative");
    r.trace_limit = static_cast<std::size_t>(trace);
    r.trace_interval = s.number("trace_interval", r.trace_interval);

    r.factors = parse_factor_choice(s.word("factors", "auto"));
    r.grid_theta = s.number("grid_theta", r.grid_theta);
    r.grid_nodes = static_cast<int>(s.integer("grid_nodes", r.grid_nodes));
    r.grid_tail_tolerance = s.number("grid_tail_tolerance", r.grid_tail_tolerance);
    long long paths = s.integer("mc_paths", static_cast<long long>(r.mc_paths));
    require(paths >= 0, ErrorKind::invalid_argument, s.where("mc_paths") + ": must be nonnegative");
    r.mc_paths = static_cast<std::size_t>(paths);

    if (s.has("alpha1")) r.alpha1 = parse_grid(s.text("alpha1"));
    if (s.has("alpha2")) r.alpha2 = parse_grid(s.text("alpha2"));
    if (s.has("x")) r.x = parse_grid(s.text("x"));
    r.queue = static_cast<int>(s.integer("queue", 1));
    require(r.queue == 1 || r.queue == 2, ErrorKind::invalid_argument, s.where("queue") + ": must be 1 or 2");
    r.moment_step = s.number("moment_step", r.moment_step);

    std::string inv = s.word("inversion", "euler");
    require(inv == "euler" || inv == "talbot", ErrorKind::invalid_argument,
            s.where("inversion") + ": expected euler or talbot");
    r.inversion = inv == "euler" ? InversionMethod::euler : InversionMethod::talbot;
    r.inversion_terms = static_cast<int>(s.integer("inversion_terms", r.inversion_terms));
    r.inversion_target = s.number("inversion_target", r.inversion_target);
    validate(r.inversion_config());
    return r;
}

void write_run(std::ostream& os, const RunOptions& r) {
    os << "seed = " << r.seed << "\nhorizon = " << num(r.horizon) << "\nwarmup = " << num(r.warmup)
       << "\nstep = " << num(r.step) << "\nbatches = " << r.batches << "\nreplications = " << r.replications
       << "\nthreads = " << r.threads << "\ntrace_limit = " << r.trace_limit
       << "\ntrace_interval = " << num(r.trace_interval) << "\nfactors = " << to_string(r.factors)
       << "\ngrid_theta = " << num(r.grid_theta) << "\ngrid_nodes = " << r.grid_nodes
       << "\ngrid_tail_tolerance = " << num(r.grid_tail_tolerance) << "\nmc_paths = " << r.mc_paths
       << "\nalpha1 = " << r.alpha1.str() << "\nalpha2 = " << r.alpha2.str() << "\nx = " << r.x.str()
       << "\nqueue = " << r.queue << "\nmoment_step = " << num(r.moment_step)
       << "\ninversion = " << to_string(r.inversion) << "\ninversion_terms = " << r.inversion_terms
       << "\ninversion_target = " << num(r.inversion_target) << "\n";
}

}  // namespace

std::vector<double> Grid1D::values() const {
    if (n == 1) return {lo};
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = i + 1 == n ? hi : lo + (hi - lo) * i / (n - 1);
    return v;
}

std::string Grid1D::str() const { return num(lo) + ":" + num(hi) + ":" + std::to_string(n); }

Grid1D parse_grid(std::string_view text) {
    std::string s(text);
    auto c1 = s.find(':');
    auto c2 = c1 == std::string::npos ? c1 : s.find(':', c1 + 1);
    require(c2 != std::string::npos && s.find(':', c2 + 1) == std::string::npos, ErrorKind::invalid_argument,
            "grid '" + s + "' must have the form a:b:n");
    Grid1D g;
    g.lo = parse_double(s.substr(0, c1), "grid");
    g.hi = parse_double(s.substr(c1 + 1, c2 - c1 - 1), "grid");
    long long n = parse_int(s.substr(c2 + 1), "grid");
    require(n >= 1 && n <= 100000, ErrorKind::invalid_argument, "grid point count must lie in [1, 100000]");
    require(g.lo <= g.hi, ErrorKind::invalid_argument, "grid needs a <= b");
    g.n = static_cast<int>(n);
    return g;
}

FactorOptions RunOptions::factor_options() const {
    FactorOptions o;
    o.choice = factors;
    o.grid.theta_factor = grid_theta;
    o.grid.nodes = grid_nodes;
    o.grid.tail_tolerance = grid_tail_tolerance;
    o.mc.paths = mc_paths;
    o.mc.seed = seed;
    o.mc.threads = threads;
    return o;
}

InversionConfig RunOptions::inversion_config() const {
    InversionConfig c;
    c.method = inversion;
    c.terms = inversion_terms;
    c.target = inversion_target;
    return c;
}

CoupledSystem ModelConfig::system() const {
    if (const auto* c = std::get_if<Coupling>(&model)) return CoupledSystem(c->x1, c->x2, c->r1, c->r2);
    return network_to_coupled(std::get<FluidNetwork>(model));
}

ModelConfig parse_config(std::string_view text) {
    pt::ptree tree;
    try {
        std::istringstream in{std::string(text)};
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        fail(ErrorKind::invalid_argument, std::string("config: ") + e.message() + " (line " +
                                              std::to_string(e.line()) + ")");
    }
    static const std::set<std::string> known = {"queue1", "queue2", "coupling", "network", "input1", "input2", "run"};
    for (const auto& [name, child] : tree) {
        require(known.count(name) == 1 && !child.empty(), ErrorKind::invalid_argument,
                child.empty() ? "config: key '" + name + "' outside a section" : "config: unknown section [" + name + "]");
    }
    auto section = [&tree](const std::string& name) {
        auto it = tree.find(name);
        return Section(it == tree.not_found() ? nullptr : &it->second, name);
    };
    Section q1 = section("queue1"), q2 = section("queue2"), coupling = section("coupling");
    Section network = section("network"), in1 = section("input1"), in2 = section("input2"), run = section("run");

    require(coupling.present() != network.present(), ErrorKind::invalid_argument,
            "config needs exactly one of [coupling] and [network]");
    ModelConfig cfg{Coupling{LevyModel(PureDrift{1.0}), LevyModel(PureDrift{1.0}), 0.0, 0.0}, {}};
    if (coupling.present()) {
        require(q1.present() && q2.present(), ErrorKind::invalid_argument, "[coupling] needs [queue1] and [queue2]");
        require(!in1.present() && !in2.present(), ErrorKind::invalid_argument,
                "[input1]/[input2] belong to a [network] config");
        Coupling c{parse_queue(q1), parse_queue(q2), coupling.number("r1"), coupling.number("r2")};
        cfg.model = std::move(c);
    } else {
        require(in1.present() && in2.present(), ErrorKind::invalid_argument, "[network] needs [input1] and [input2]");
        require(!q1.present() && !q2.present(), ErrorKind::invalid_argument,
                "[queue1]/[queue2] belong to a [coupling] config");
        FluidNetwork net;
        net.routing = {{{network.number("p11", 0.0), network.number("p12", 0.0)},
                        {network.number("p21", 0.0), network.number("p22", 0.0)}}};
        net.capacity = {network.number("c1"), network.number("c2")};
        net.inputs = {parse_input(in1), parse_input(in2)};
        cfg.model = std::move(net);
    }
    if (run.present()) cfg.run = parse_run(run);
    for (const Section* s : {&q1, &q2, &coupling, &network, &in1, &in2, &run}) s->finish();
    // Surface model errors (r1 r2 >= 1, bad routing) at parse time.
    (void)cfg.system();
    return cfg;
}

ModelConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    require(in.good(), ErrorKind::invalid_argument, "cannot read config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize(const ModelConfig& cfg) {
    std::ostringstream os;
    if (const auto* c = std::get_if<Coupling>(&cfg.model)) {
        os << "[queue1]\n";
        write_queue(os, c->x1);
        os << "\n[queue2]\n";
        write_queue(os, c->x2);
        os << "\n[coupling]\nr1 = " << num(c->r1) << "\nr2 = " << num(c->r2) << "\n";
    } else {
        const auto& n = std::get<FluidNetwork>(cfg.model);
        os << "[network]\np11 = " << num(n.routing[0][0]) << "\np12 = " << num(n.routing[0][1])
           << "\np21 = " << num(n.routing[1][0]) << "\np22 = " << num(n.routing[1][1]) << "\nc1 = " << num(n.capacity[0])
           << "\nc2 = " << num(n.capacity[1]) << "\n\n[input1]\n";
        write_input(os, n.inputs[0]);
        os << "\n[input2]\n";
        write_input(os, n.inputs[1]);
    }
    os << "\n[run]\n";
    write_run(os, cfg.run);
    return os.str();
}

std::string config_digest(const ModelConfig& cfg) {
    const std::string text = serialize(cfg);
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    require(EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr) == 1, ErrorKind::numerical_failure,
            "SHA-256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

FactorChoice parse_factor_choice(std::string_view name) {
    auto it = kFactorNames.find(std::string(name));
    require(it != kFactorNames.end(), ErrorKind::invalid_argument, "unknown factor method '" + std::string(name) + "'");
    return it->second;
}

const char* to_string(FactorChoice c) noexcept {
    switch (c) {
    case FactorChoice::automatic: return "auto";
    case FactorChoice::closed_form: return "closed_form";
    case FactorChoice::grid: return "grid";
    case FactorChoice::monte_carlo: return "monte_carlo";
    }
    return "?";
}

}  // namespace levq
