#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "qdx/lattice.hpp"

namespace qdx {

enum class TaskKind { Evolve, Tracemap, Bounds, Dimension, Exponents, Sandwich };

// One experiment = one potential + one task + the task's numeric parameters.
// parse_config validates every field against the preconditions of the operations
// it feeds and throws ConfigError naming the offending field.
struct ExperimentConfig {
    TaskKind task = TaskKind::Evolve;
    PotentialSpec potential;
    std::string output_dir = "out";
    int workers = 0;

    // evolve
    std::vector<double> time_grid;
    double evolve_tol = 1e-8;

    // tracemap / dimension
    int k = 2;
    double delta = 0.0;
    std::vector<double> lambdas;  // dimension sweep

    // bounds
    std::vector<double> t_grid;
    std::vector<double> n_exponents = {0.5, 0.7, 0.9};
    double quad_tol = 1e-4;

    // exponents
    double t_max = 1000.0;
    std::vector<double> p_list = {1.0, 2.0};
    std::vector<double> alpha_grid;
    int samples_per_decade = 16;

    // sandwich
    std::vector<double> big_t_grid;

    nlohmann::ordered_json resolved() const;  // the exact config echoed to the manifest
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

// Executes the task graph and writes CSV/JSON outputs plus manifest.json listing
// every file with its schema. Returns the written paths (manifest last).
std::vector<std::string> run(const ExperimentConfig& config);

// Reads a manifest and emits two-column plot-ready files for every recognized
// schema; SchemaError if a declared column is missing.
std::vector<std::string> emit_plotdata(const std::string& manifest_path);

}  // namespace qdx
