#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "levq/commands.hpp"
#include "levq/error.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Joint workload analysis of two coupled Levy-driven queues"};
    app.set_version_flag("--version", levq::kVersion);

    std::string command;
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> grids;
    std::optional<int> queue;
    std::string factors;

    std::string names;
    for (const auto& n : levq::command_names()) names += (names.empty() ? "" : ", ") + n;
    app.add_option("command", command, "One of: " + names)->required()->check(CLI::IsMember(levq::command_names()));
    app.add_option("--config", config_path, "Model configuration (INI)")->required();
    app.add_option("--out", out_dir, "Write CSV tables and the report to this directory");
    app.add_option("--seed", seed, "Override [run] seed");
    app.add_option("--grid", grids,
                   "a:b:n; for transform/simulate/compare the first sets alpha1 and the second alpha2, "
                   "for marginal the first sets x")
        ->expected(1, 2);
    app.add_option("--queue", queue, "Queue for marginal (1 or 2)")->check(CLI::Range(1, 2));
    app.add_option("--factors", factors, "Override [run] factors")
        ->check(CLI::IsMember({"auto", "closed_form", "grid", "monte_carlo"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : levq::exit_unsupported;
    }

    try {
        levq::ModelConfig cfg = levq::load_config(config_path);
        if (seed) cfg.run.seed = *seed;
        if (queue) cfg.run.queue = *queue;
        if (!factors.empty()) cfg.run.factors = levq::parse_factor_choice(factors);
        if (!grids.empty()) {
            if (command == "marginal") {
                levq::require(grids.size() == 1, levq::ErrorKind::invalid_argument, "marginal takes one --grid");
                cfg.run.x = levq::parse_grid(grids[0]);
            } else {
                cfg.run.alpha1 = levq::parse_grid(grids[0]);
                cfg.run.alpha2 = levq::parse_grid(grids.size() > 1 ? grids[1] : grids[0]);
            }
        }
        std::optional<std::filesystem::path> out;
        if (!out_dir.empty()) out = out_dir;
        const auto report = levq::run_command(command, cfg, out);
        std::cout << levq::render(report);
        return report.exit_code;
    } catch (const levq::Error& e) {
        std::cerr << "error (" << levq::to_string(e.kind()) << "): " << e.what() << "\n";
        return levq::exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return levq::exit_unsupported;
    }
}
