#pragma once

#include "model.hpp"
#include "types.hpp"

#include <optional>
#include <span>
#include <vector>

namespace relukink {

// Probes the one-neuron gradient map across the activation boundary: a pair
// of points straddling the boundary at distance epsilon along the normal
// (x, 1) exhibits a gradient jump whose ratio to the parameter separation
// grows like |y| / (2 epsilon), so no global gradient Lipschitz constant
// exists. Everything here has a closed form to check the measurements
// against.

/// Symmetric pair theta0 +/- epsilon * (x, 1) around a boundary anchor.
struct ProbePair {
    ParamVector theta_minus;
    ParamVector theta_plus;
    ParamVector theta0;
    double epsilon = 0.0;
    Eigen::Vector2d normal;  // (x, 1)
};

/// One measurement of the gradient-jump ratio at a given epsilon.
struct RatioSample {
    double epsilon = 0.0;
    double numeric_ratio = 0.0;   // ||grad+ - grad-|| / ||theta+ - theta-||
    double analytic_ratio = 0.0;  // |epsilon*||(x,1)||^2 - y| / (2 epsilon)
};

struct SweepResult {
    std::vector<RatioSample> samples;          // ordered by decreasing epsilon
    std::vector<double> eps_times_ratio;       // epsilon * numeric_ratio per sample
    std::optional<double> loglog_slope;        // OLS slope of log(ratio) vs log(eps)
                                               // over the tail eps <= min(eps)*100
};

/// A point (t, -t*x) on the boundary {w*x + b = 0}; exact for any anchor t.
ParamVector boundary_point(const DataPoint& p, double t);

/// Builds the probe pair and verifies its construction: exact componentwise
/// offsets, preactivations +/- epsilon*||(x,1)||^2, and strict sign
/// conditions s(theta-) < 0 < s(theta+).
ProbePair make_probe_pair(const ParamVector& theta0, const DataPoint& p, double epsilon);

/// Measures the gradient-jump ratio across the pair and evaluates the closed
/// form; the two must agree to 1e-9 relative.
RatioSample grad_jump_ratio(const ProbePair& pair, const DataPoint& p, double tau);

/// Runs grad_jump_ratio over a strictly decreasing epsilon grid (all entries
/// > 1e-14). Also reports the log-log slope over the tail of the grid and the
/// sequence epsilon * ratio, which converges to |y| / 2.
SweepResult epsilon_sweep(const DataPoint& p, const ParamVector& theta0,
                          std::span<const double> eps_list, double tau);

/// Default probe grid 1e-1 .. 1e-6.
std::vector<double> default_epsilon_grid();

}  // namespace relukink
