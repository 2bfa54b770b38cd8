// nlse-transport: transport spectra, eigenmodes and photon correlations of a
// driven one-dimensional nonlinear Schrodinger medium with open boundaries.
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "nlse/runner.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw nlse::ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"nlse-transport: 1D driven nonlinear Schrodinger transport simulator"};
    app.set_version_flag("--version", nlse::cli::kVersion);

    std::string mode_arg;
    std::string config_path;
    std::string out_dir = ".";
    int workers = 0;
    app.add_option("mode", mode_arg, "linear | bandgap | semiclassical | modes | quantum | sweep")
        ->required();
    app.add_option("--config", config_path, "JSON config file")->required();
    app.add_option("--out", out_dir, "output directory (default: current)");
    app.add_option("--workers", workers, "sweep worker count (overrides config/env)");

    CLI11_PARSE(app, argc, argv);

    try {
        nlse::cli::ExperimentConfig cfg = nlse::cli::parse_config(read_file(config_path));
        const nlse::cli::Mode mode = nlse::cli::mode_from_string(mode_arg);
        if (mode != cfg.mode)
            throw nlse::ConfigError("mode argument '" + mode_arg + "' does not match config mode '" +
                                    nlse::cli::to_string(cfg.mode) + "'");
        if (workers > 0) cfg.workers = workers;
        const nlse::cli::RunManifest manifest = nlse::cli::run(cfg, out_dir);
        std::cout << "wrote " << manifest.outputs.size() << " files to " << out_dir << " ("
                  << manifest.wall_seconds << " s)\n";
        for (const auto& f : manifest.outputs)
            std::cout << "  " << f.name << "  " << f.bytes << " bytes  fnv1a64=" << f.fnv1a64
                      << "\n";
        return 0;
    } catch (const nlse::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const nlse::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
