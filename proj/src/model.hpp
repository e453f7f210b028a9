#pragma once

#include "types.hpp"

namespace relukink {

// One-datum ReLU models: forward pass, squared loss, exact piecewise
// gradients, activation patterns, and parameter-space boundary geometry.

/// Which side of the activation boundary a scalar-layout point lies on.
enum class Side { Positive, Negative };

struct OneNeuronGrad {
    Eigen::Vector2d grad;
    Side side;
};

/// Preactivation s = w*x + b (OneNeuron) or s = w*x (FrozenBias).
/// Scalar layouts only; TwoLayer raises LayoutError.
double preactivation(const ParamVector& theta, const DataPoint& p);

/// Per-unit preactivations. Scalar layouts yield a 1-vector.
Eigen::VectorXd preactivations(const ParamVector& theta, const DataPoint& p);

/// Input extended by a trailing constant 1 so biases live inside W1.
Eigen::VectorXd augmented_input(const DataPoint& p);

/// Model output.
double forward(const ParamVector& theta, const DataPoint& p);

/// Squared loss 0.5 * (forward - y)^2.
double loss(const ParamVector& theta, const DataPoint& p);

/// Exact gradient of the loss for the one-neuron model, defined strictly off
/// the boundary: |s| > tau. On the boundary the gradient does not exist and
/// BoundaryError is raised; callers wanting one-sided limits should use the
/// limiting Jacobians in clarke.hpp.
OneNeuronGrad grad_one_neuron(const ParamVector& theta, const DataPoint& p, double tau);

/// Exact gradient of the loss for the two-layer model by reverse accumulation
/// with relu'(z) = 1 for z > 0 and 0 for z < 0. Every unit must satisfy
/// |preactivation| > tau; otherwise BoundaryError lists the offending units.
Eigen::VectorXd grad_net(const ParamVector& theta, const DataPoint& p, double tau);

/// Gradient for any layout, dispatching on theta.layout.
Eigen::VectorXd gradient(const ParamVector& theta, const DataPoint& p, double tau);

/// Gradient with hidden-unit gates forced on units whose |preactivation| <= tau
/// (gate 1 = active-side limit, 0 = inactive side). Off-boundary units keep
/// their true gate. Used by trajectory boundary policies.
Eigen::VectorXd gradient_with_boundary_gate(const ParamVector& theta, const DataPoint& p,
                                            double tau, bool active_gate);

ActivationPattern activation_pattern(const ParamVector& theta, const DataPoint& p, double tau);

/// Euclidean distance from theta to the activation boundary {w*x + b = 0}
/// in parameter space (normal (x, 1)). OneNeuron only.
double boundary_distance(const ParamVector& theta, const DataPoint& p);

/// Boundary normal in parameter space: (x, 1) for OneNeuron, (x) for FrozenBias.
Eigen::VectorXd boundary_normal(const ParamVector& theta, const DataPoint& p);

}  // namespace relukink
