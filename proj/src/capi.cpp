#include "relukink.h"

#include "clarke.hpp"
#include "experiment.hpp"
#include "probe.hpp"
#include "surrogate.hpp"

#include <memory>
#include <string>

namespace {

thread_local std::string g_last_error;

rk_status status_from(relukink::Error::Code code) {
    using Code = relukink::Error::Code;
    switch (code) {
        case Code::Argument: return RK_ERR_ARGUMENT;
        case Code::Layout: return RK_ERR_LAYOUT;
        case Code::Boundary: return RK_ERR_BOUNDARY;
        case Code::Region: return RK_ERR_REGION;
        case Code::Numeric: return RK_ERR_NUMERIC;
        case Code::Config: return RK_ERR_CONFIG;
        case Code::Io: return RK_ERR_IO;
        case Code::Internal: return RK_ERR_INTERNAL;
    }
    return RK_ERR_INTERNAL;
}

/// Runs fn, routing exceptions into the given message slot.
template <typename Fn>
rk_status guarded(std::string& error_slot, Fn&& fn) {
    try {
        error_slot.clear();
        return fn();
    } catch (const relukink::Error& e) {
        error_slot = e.what();
        return status_from(e.code());
    } catch (const std::exception& e) {
        error_slot = e.what();
        return RK_ERR_INTERNAL;
    } catch (...) {
        error_slot = "unknown error";
        return RK_ERR_INTERNAL;
    }
}

}  // namespace

struct rk_experiment {
    relukink::ExperimentConfig config;
    std::string summary_json;
    std::string error;
};

extern "C" {

const char* rk_version(void) { return "0.1.0"; }

const char* rk_status_name(rk_status status) {
    switch (status) {
        case RK_OK: return "ok";
        case RK_ERR_ARGUMENT: return "argument_error";
        case RK_ERR_LAYOUT: return "layout_error";
        case RK_ERR_BOUNDARY: return "boundary_error";
        case RK_ERR_REGION: return "region_error";
        case RK_ERR_NUMERIC: return "numeric_error";
        case RK_ERR_CONFIG: return "config_error";
        case RK_ERR_IO: return "io_error";
        case RK_ERR_CHECKS_FAILED: return "checks_failed";
        case RK_ERR_INTERNAL: return "internal_error";
    }
    return "unknown";
}

const char* rk_last_error(void) { return g_last_error.c_str(); }

rk_status rk_experiment_from_string(const char* text, rk_experiment** out) {
    if (!text || !out) {
        g_last_error = "null argument";
        return RK_ERR_ARGUMENT;
    }
    *out = nullptr;
    return guarded(g_last_error, [&] {
        auto exp = std::make_unique<rk_experiment>();
        exp->config = relukink::parse_config(text);
        *out = exp.release();
        return RK_OK;
    });
}

rk_status rk_experiment_from_file(const char* path, rk_experiment** out) {
    if (!path || !out) {
        g_last_error = "null argument";
        return RK_ERR_ARGUMENT;
    }
    *out = nullptr;
    return guarded(g_last_error, [&] {
        auto exp = std::make_unique<rk_experiment>();
        exp->config = relukink::load_config_file(path);
        *out = exp.release();
        return RK_OK;
    });
}

void rk_experiment_free(rk_experiment* exp) { delete exp; }

const char* rk_experiment_kind(const rk_experiment* exp) {
    return exp ? relukink::experiment_kind_name(exp->config.kind) : "";
}

rk_status rk_experiment_run(rk_experiment* exp, const char* out_dir, const char* format) {
    if (!exp) {
        g_last_error = "null experiment handle";
        return RK_ERR_ARGUMENT;
    }
    if (!out_dir) {
        exp->error = "null output directory";
        return RK_ERR_ARGUMENT;
    }
    return guarded(exp->error, [&]() -> rk_status {
        const relukink::OutputFormat fmt =
            relukink::parse_output_format(format ? format : "both");
        const relukink::RunResult result =
            relukink::run_experiment(exp->config, out_dir, fmt);
        exp->summary_json = result.summary.dump(2) + "\n";
        if (!result.pass) {
            exp->error = "one or more checks failed; see summary.json";
            return RK_ERR_CHECKS_FAILED;
        }
        return RK_OK;
    });
}

const char* rk_experiment_summary_json(const rk_experiment* exp) {
    return exp ? exp->summary_json.c_str() : "";
}

const char* rk_experiment_error(const rk_experiment* exp) {
    return exp ? exp->error.c_str() : "";
}

rk_status rk_grad_jump_ratio(double x, double y, double anchor_t, double epsilon,
                             double* numeric_ratio, double* analytic_ratio) {
    return guarded(g_last_error, [&] {
        const auto p = relukink::DataPoint::scalar(x, y);
        const auto theta0 = relukink::boundary_point(p, anchor_t);
        const auto pair = relukink::make_probe_pair(theta0, p, epsilon);
        const auto sample =
            relukink::grad_jump_ratio(pair, p, relukink::default_tau(theta0));
        if (numeric_ratio) *numeric_ratio = sample.numeric_ratio;
        if (analytic_ratio) *analytic_ratio = sample.analytic_ratio;
        return RK_OK;
    });
}

rk_status rk_softplus(double beta, double u, double* value, double* first, double* second) {
    return guarded(g_last_error, [&] {
        const auto sp = relukink::softplus_eval(beta, u);
        if (value) *value = sp.value;
        if (first) *first = sp.first;
        if (second) *second = sp.second;
        return RK_OK;
    });
}

rk_status rk_hessian_lower_bound(double beta, double x, double y, double w, double b,
                                 double* out) {
    if (!out) {
        g_last_error = "null output pointer";
        return RK_ERR_ARGUMENT;
    }
    return guarded(g_last_error, [&] {
        const auto p = relukink::DataPoint::scalar(x, y);
        const auto theta = relukink::ParamVector::one_neuron(w, b);
        const auto act = relukink::SurrogateActivation::softplus(beta);
        *out = relukink::hessian_lower_bound(theta, p, act);
        return RK_OK;
    });
}

rk_status rk_operator_norm(const double* m, int rows, int cols, double* out) {
    if (!m || !out) {
        g_last_error = "null argument";
        return RK_ERR_ARGUMENT;
    }
    if (rows < 1 || cols < 1) {
        g_last_error = "matrix dimensions must be positive";
        return RK_ERR_ARGUMENT;
    }
    return guarded(g_last_error, [&] {
        Eigen::MatrixXd mat(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) mat(i, j) = m[std::size_t(i) * cols + j];
        *out = relukink::operator_norm(mat);
        return RK_OK;
    });
}

rk_status rk_rho_half_space(double x, double eta, int positive_side, double* rho) {
    if (!rho) {
        g_last_error = "null output pointer";
        return RK_ERR_ARGUMENT;
    }
    return guarded(g_last_error, [&] {
        const auto p = relukink::DataPoint::scalar(x, 0.0);
        const auto map = relukink::UpdateMap::make(eta, p, relukink::Layout::OneNeuron);
        const auto region = relukink::RegionSpec::half_space(relukink::Layout::OneNeuron,
                                                             positive_side != 0, 0.1);
        *rho = relukink::rho_closed_form(map, region);
        return RK_OK;
    });
}

}  // extern "C"
