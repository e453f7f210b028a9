// Experiment CLI. Talks to the library exclusively through the C API.
//
//   relukink run --config <path> [--out <dir>] [--format csv|json|both]
//   relukink validate --config <path>

#include <relukink.h>

#include <CLI11.hpp>

#include <cstdio>
#include <string>

namespace {

int exit_code_for(rk_status status) {
    switch (status) {
        case RK_OK: return 0;
        case RK_ERR_CHECKS_FAILED: return 1;
        case RK_ERR_CONFIG:
        case RK_ERR_ARGUMENT: return 2;
        case RK_ERR_IO: return 3;
        default: return 4;
    }
}

int run_command(const std::string& config_path, const std::string& out_dir,
                const std::string& format) {
    rk_experiment* exp = nullptr;
    rk_status status = rk_experiment_from_file(config_path.c_str(), &exp);
    if (status != RK_OK) {
        std::fprintf(stderr, "relukink: %s\n%s\n", rk_status_name(status), rk_last_error());
        return exit_code_for(status);
    }

    status = rk_experiment_run(exp, out_dir.c_str(), format.c_str());
    if (status == RK_OK || status == RK_ERR_CHECKS_FAILED) {
        std::printf("%s", rk_experiment_summary_json(exp));
        if (status != RK_OK)
            std::fprintf(stderr, "relukink: %s\n", rk_experiment_error(exp));
    } else {
        std::fprintf(stderr, "relukink: %s: %s\n", rk_status_name(status),
                     rk_experiment_error(exp));
    }
    rk_experiment_free(exp);
    return exit_code_for(status);
}

int validate_command(const std::string& config_path) {
    rk_experiment* exp = nullptr;
    const rk_status status = rk_experiment_from_file(config_path.c_str(), &exp);
    if (status == RK_OK) {
        std::printf("ok: %s\n", rk_experiment_kind(exp));
        rk_experiment_free(exp);
        return 0;
    }
    std::fprintf(stderr, "invalid configuration (%s):\n%s\n", rk_status_name(status),
                 rk_last_error());
    return exit_code_for(status);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"relukink: desk-scale experiments on nonsmooth ReLU training dynamics"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(rk_version()));

    std::string config_path;
    std::string out_dir = "out";
    std::string format = "both";

    CLI::App* run = app.add_subcommand("run", "run an experiment and write its artifacts");
    run->add_option("--config", config_path, "configuration file")->required();
    run->add_option("--out", out_dir, "output directory (default: out)");
    run->add_option("--format", format, "artifact format: csv, json, or both")
        ->check(CLI::IsMember({"csv", "json", "both"}));

    CLI::App* validate = app.add_subcommand("validate", "validate a configuration file");
    validate->add_option("--config", config_path, "configuration file")->required();

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return run_command(config_path, out_dir, format);
    return validate_command(config_path);
}
