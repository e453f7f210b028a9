/* relukink: numerical verification of nonsmooth ReLU training dynamics.
 *
 * C API over the C++ core. Handles are opaque; functions return rk_status.
 * Strings returned by the library point into storage owned by the handle (or
 * thread-local storage for handle-less calls) and stay valid until the next
 * call on the same handle/thread.
 *
 * Experiments are configured by a flat-section key/value document, e.g.
 *
 *     [lipschitz_sweep]
 *     x = 1
 *     y = 1
 *     epsilons = 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6
 *
 * Kinds: lipschitz_sweep, surrogate_sweep, rho_certificate,
 * trajectory_perturb. Running an experiment writes its CSV/JSON artifacts
 * plus summary.json into the output directory; identical configs produce
 * byte-identical outputs.
 */

#ifndef RELUKINK_H
#define RELUKINK_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rk_status {
    RK_OK = 0,
    RK_ERR_ARGUMENT = 1,      /* bad value passed by the caller */
    RK_ERR_LAYOUT = 2,        /* parameter shape does not match the operation */
    RK_ERR_BOUNDARY = 3,      /* evaluation requested on an activation boundary */
    RK_ERR_REGION = 4,        /* empty or infeasible region */
    RK_ERR_NUMERIC = 5,       /* numerical failure */
    RK_ERR_CONFIG = 6,        /* configuration rejected (see rk_last_error) */
    RK_ERR_IO = 7,            /* filesystem failure */
    RK_ERR_CHECKS_FAILED = 8, /* experiment ran but at least one check failed */
    RK_ERR_INTERNAL = 9
} rk_status;

const char* rk_version(void);
const char* rk_status_name(rk_status status);

/* Message for the most recent failure on this thread from a handle-less
 * call (creation, numeric helpers). Empty string if none. */
const char* rk_last_error(void);

/* ---------------------------------------------------------------------------
 * Experiments
 * ------------------------------------------------------------------------- */

typedef struct rk_experiment rk_experiment;

/* Parse and validate a configuration. On RK_ERR_CONFIG no handle is created
 * and rk_last_error() lists every validation failure, newline-separated. */
rk_status rk_experiment_from_string(const char* text, rk_experiment** out);
rk_status rk_experiment_from_file(const char* path, rk_experiment** out);
void rk_experiment_free(rk_experiment* exp);

const char* rk_experiment_kind(const rk_experiment* exp);

/* Run and write artifacts into out_dir. format is "csv", "json", or "both"
 * (NULL means "both"). Returns RK_OK only if every check passed;
 * RK_ERR_CHECKS_FAILED if the run completed with a failing check. */
rk_status rk_experiment_run(rk_experiment* exp, const char* out_dir, const char* format);

/* summary.json contents of the last run on this handle; empty before a run. */
const char* rk_experiment_summary_json(const rk_experiment* exp);

/* Message for the most recent failure on this handle. */
const char* rk_experiment_error(const rk_experiment* exp);

/* ---------------------------------------------------------------------------
 * Numeric entry points
 * ------------------------------------------------------------------------- */

/* Gradient-jump ratio across the activation boundary of the one-neuron
 * model: anchor (t, -t*x), probe offset epsilon along the normal (x, 1).
 * Writes the measured ratio and the closed form |eps*(x^2+1) - y|/(2 eps). */
rk_status rk_grad_jump_ratio(double x, double y, double anchor_t, double epsilon,
                             double* numeric_ratio, double* analytic_ratio);

/* softplus_beta(u) = log(1 + exp(beta*u))/beta with first and second
 * derivatives; any output pointer may be NULL. Requires beta >= 1. */
rk_status rk_softplus(double beta, double u, double* value, double* first, double* second);

/* Curvature term |(softplus_beta(w*x+b) - y) * softplus_beta''(w*x+b)| * (x^2+1):
 * a lower bound for the surrogate-loss Hessian norm at (w, b). */
rk_status rk_hessian_lower_bound(double beta, double x, double y, double w, double b,
                                 double* out);

/* Largest singular value of a rows x cols row-major matrix (dims <= 100). */
rk_status rk_operator_norm(const double* m, int rows, int cols, double* out);

/* Closed-form certificate for one-neuron half-space regions:
 * positive side max(1, |1 - eta*(x^2+1)|), negative side 1. */
rk_status rk_rho_half_space(double x, double eta, int positive_side, double* rho);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* RELUKINK_H */
