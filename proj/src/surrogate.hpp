#pragma once

#include "model.hpp"
#include "types.hpp"

#include <span>
#include <vector>

namespace relukink {

// Smooth surrogate activations for the one-neuron model, and the sweep that
// shows their global smoothness constants blow up as the surrogate sharpens:
// curvature concentrates at the kink, and the loss Hessian norm at a point
// with preactivation at the curvature peak grows linearly in beta.

struct SoftplusValue {
    double value = 0.0;
    double first = 0.0;
    double second = 0.0;
};

/// softplus_beta(u) = log(1 + exp(beta*u)) / beta, evaluated overflow-safely,
/// with first derivative logistic(beta*u) and second derivative
/// beta * logistic * (1 - logistic). Requires beta >= 1.
SoftplusValue softplus_eval(double beta, double u);

/// A member of a C^2 smoothing family, indexed by sharpness beta.
/// Only softplus ships; the tag is the extension point.
struct SurrogateActivation {
    enum class Family { Softplus };
    Family family = Family::Softplus;
    double beta = 1.0;

    static SurrogateActivation softplus(double beta);
    SoftplusValue operator()(double u) const { return softplus_eval(beta, u); }
};

/// Gradient of the surrogate loss 0.5*(sigma_beta(s) - y)^2 at a one-neuron
/// point: (sigma_beta(s) - y) * sigma_beta'(s) * (x, 1). Smooth everywhere.
Eigen::Vector2d surrogate_grad(const ParamVector& theta, const DataPoint& p,
                               const SurrogateActivation& act);

/// Hessian of the surrogate loss: the rank-one matrix
/// ((sigma'(s))^2 + (sigma(s) - y) * sigma''(s)) * (x,1)(x,1)^T.
Eigen::Matrix2d surrogate_hessian(const ParamVector& theta, const DataPoint& p,
                                  const SurrogateActivation& act);

/// Scalar multiplier of the rank-one Hessian; the operator norm equals
/// |scalar| * ||(x,1)||^2.
double surrogate_hessian_scalar(const ParamVector& theta, const DataPoint& p,
                                const SurrogateActivation& act);

/// Curvature term of the Hessian norm: |(sigma(s) - y) * sigma''(s)| * ||(x,1)||^2.
/// Any global smoothness constant of the surrogate loss must dominate the
/// Hessian norm, which this term drives to infinity as beta grows.
double hessian_lower_bound(const ParamVector& theta, const DataPoint& p,
                           const SurrogateActivation& act);

/// Argmax of |sigma''| over [lo, hi] by golden-section search refined to
/// |u| tolerance 1e-10. Raises NumericError when the interval does not
/// contain the peak (the curve is larger at an endpoint than inside).
double curvature_peak(const SurrogateActivation& act, double lo, double hi);

/// One entry of the divergence sweep: a witness point whose Hessian norm
/// lower bound realizes the blow-up at this beta.
struct SmoothnessEstimate {
    double beta = 0.0;
    double l_lower = 0.0;        // curvature lower bound at the witness
    double u_peak = 0.0;         // argmax of |sigma''|
    double sigma2_at_peak = 0.0; // sigma''(u_peak)
    double residual = 0.0;       // sigma(u_peak) - y
    ParamVector theta_witness;
};

/// For each beta (increasing), places a witness with preactivation at the
/// curvature peak (w = 0, b = u_peak) and records the Hessian lower bound
/// there. Requires x != 0 and y != 0.
std::vector<SmoothnessEstimate> smoothness_divergence_sweep(const DataPoint& p,
                                                            std::span<const double> betas);

/// Default sharpness grid {10, 100, 1000}.
std::vector<double> default_beta_grid();

}  // namespace relukink
