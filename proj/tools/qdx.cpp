#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "qdx/config.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitComputation = 3;

int do_validate(const std::string& path) {
    qdx::load_config(path);
    std::printf("config ok: %s\n", path.c_str());
    return 0;
}

int do_run(const std::string& path) {
    qdx::ExperimentConfig cfg = qdx::load_config(path);
    auto files = qdx::run(cfg);
    for (const auto& f : files) std::printf("wrote %s\n", f.c_str());
    return 0;
}

int do_plotdata(const std::string& manifest) {
    auto files = qdx::emit_plotdata(manifest);
    for (const auto& f : files) std::printf("wrote %s\n", f.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qdx: quasicrystal quantum-dynamics experiments"};
    app.require_subcommand(1);

    std::string config_path, manifest_path, validate_path;
    auto* run_cmd = app.add_subcommand("run", "execute an experiment config");
    run_cmd->add_option("config", config_path, "JSON config file")->required();
    auto* val_cmd = app.add_subcommand("validate", "validate a config without running");
    val_cmd->add_option("config", validate_path, "JSON config file")->required();
    auto* plot_cmd = app.add_subcommand("plotdata", "emit plot-ready data from a manifest");
    plot_cmd->add_option("manifest", manifest_path, "manifest.json from a previous run")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) return do_run(config_path);
        if (val_cmd->parsed()) return do_validate(validate_path);
        if (plot_cmd->parsed()) return do_plotdata(manifest_path);
    } catch (const qdx::ConfigError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitValidation;
    } catch (const qdx::Error& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitComputation;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitComputation;
    }
    return 0;
}
