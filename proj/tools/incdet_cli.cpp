// Command-line driver: runs one experiment command against a configuration
// file and writes CSV / structured-grid outputs plus run metadata.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "incdet/io.hpp"
#include "incdet/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"incdet - numerical lab for inclusion detection from boundary data"};
    app.require_subcommand(0, 1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir;
    int threads = 0;
    int resolution = 0;

    app.add_option("--config", config_path, "configuration file (key = value sections)");
    app.add_option("--out", out_dir, "output directory (overrides [output] dir)");
    app.add_option("--threads", threads, "worker threads (overrides [output] threads)");
    app.add_option("--resolution", resolution, "grid resolution override");

    const std::vector<std::string> commands{"forward",  "green", "fundsol-check", "misfit",
                                            "aperture", "probe", "sweep",         "verify-all"};
    for (const auto& name : commands) app.add_subcommand(name, "");
    auto* example = app.add_subcommand("example-config", "print a reference configuration");

    CLI11_PARSE(app, argc, argv);

    if (example->parsed()) {
        std::cout << incdet::example_config_text();
        return 0;
    }
    if (app.get_subcommands().empty()) {
        std::cerr << app.help();
        return 2;
    }

    try {
        incdet::RunConfig cfg;
        if (!config_path.empty()) {
            cfg = incdet::load_config(config_path);
        } else {
            cfg = incdet::parse_config(incdet::example_config_text());
        }
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (const char* env_root = std::getenv("INCDET_OUT_ROOT");
            env_root && out_dir.empty() && cfg.out_dir.find('/') == std::string::npos) {
            cfg.out_dir = std::string(env_root) + "/" + cfg.out_dir;
        }
        if (threads > 0) cfg.threads = threads;
        if (resolution > 0) cfg.resolution = resolution;

        return incdet::run_command(app.get_subcommands().front()->get_name(), cfg);
    } catch (const incdet::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const incdet::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    }
}
