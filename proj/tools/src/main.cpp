#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>

#include "fracsemi/cli/commands.hpp"
#include "fracsemi/cli/config.hpp"
#include "fracsemi/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{
        "fracsemi: 1-D integral fractional Laplacian laboratory for semipositone problems "
        "(barriers, monotone iteration, lambda0 brackets, cut-off variational solvers)"};

    std::string command, config_path, out_dir;
    int workers = 1;
    bool force = false;

    app.add_option("command", command,
                   "one of: validate-operator | eigen | barriers | solve-p0 | lambda0 | solve | "
                   "thresholds | sweep")
        ->required();
    app.add_option("--config", config_path, "JSON configuration file")->required();
    app.add_option("--out", out_dir, "output directory for report.json and CSV profiles")
        ->required();
    app.add_option("--workers", workers, "worker pool size for sweep points")->default_val(1);
    app.add_flag("--force", force, "overwrite existing outputs");

    CLI11_PARSE(app, argc, argv);

    const auto cmd = fracsemi::cli::parse_command(command);
    if (!cmd) {
        std::fprintf(stderr, "fracsemi: unknown command \"%s\"\n", command.c_str());
        return 2;
    }
    if (workers < 1) {
        std::fprintf(stderr, "fracsemi: --workers must be >= 1\n");
        return 2;
    }

    try {
        const fracsemi::cli::RunConfig cfg = fracsemi::cli::load_config(config_path, *cmd);
        return fracsemi::cli::run_command(cfg, *cmd, out_dir, workers, force);
    } catch (const fracsemi::ConfigError& e) {
        std::fprintf(stderr, "fracsemi: configuration error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "fracsemi: %s\n", e.what());
        return 1;
    }
}
