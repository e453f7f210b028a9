#pragma once

#include "io.hpp"
#include "trajectory.hpp"
#include "types.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace relukink {

// Experiment orchestration: flat-section key/value configs, dispatch to the
// owning module, and deterministic CSV/JSON emission. Two runs with the same
// config produce byte-identical outputs.

enum class ExperimentKind { LipschitzSweep, SurrogateSweep, RhoCertificate, TrajectoryPerturb };

const char* experiment_kind_name(ExperimentKind kind);

enum class OutputFormat { Csv, Json, Both };

/// Parses "csv" | "json" | "both"; throws ArgumentError otherwise.
OutputFormat parse_output_format(const std::string& text);

/// Validated configuration with defaults filled. Fields are meaningful per
/// kind; the parser rejects keys that do not belong to the declared kind.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::LipschitzSweep;

    double x = 0.0;
    double y = 0.0;

    // lipschitz_sweep
    double anchor_t = 0.0;
    std::vector<double> epsilons;

    // surrogate_sweep
    std::vector<double> betas;

    // rho_certificate / trajectory_perturb
    double eta = 0.0;
    Layout layout = Layout::OneNeuron;
    bool region_positive = true;
    double delta = 0.1;
    double span = 4.0;
    int samples = 1000;
    std::uint64_t seed = 0;

    // trajectory_perturb
    int steps = 40;
    std::vector<double> theta0;
    std::vector<double> theta0_prime;
    std::optional<double> rho;  // default: closed form for the region
    BoundaryPolicy policy = BoundaryPolicy::Halt;
    std::optional<double> tau;  // default: 1e-12 * (1 + ||theta0||)
};

/// Parses and validates a config document:
///
///   [lipschitz_sweep]
///   x = 1
///   y = 1
///   epsilons = 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6
///
/// Exactly one section; '#' or ';' start a comment line. Throws ConfigError
/// carrying every validation failure, not just the first.
ExperimentConfig parse_config(const std::string& text);

/// All validation failures for a config document; empty means valid.
std::vector<std::string> validate_config(const std::string& text);

ExperimentConfig load_config_file(const std::filesystem::path& path);

struct RunResult {
    bool pass = false;
    ordered_json summary;
    std::vector<std::string> files_written;
};

/// Runs the experiment, writing the owning module's artifacts (format-gated)
/// plus summary.json into out_dir. All writes are atomic. Module errors are
/// serialized into summary.json and rethrown after it is written.
RunResult run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                         OutputFormat format);

}  // namespace relukink
