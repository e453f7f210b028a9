#pragma once

#include "model.hpp"
#include "types.hpp"

#include <optional>
#include <vector>

namespace relukink {

// Generalized derivatives of the gradient-descent update map
// T(theta) = theta - eta * grad(theta). Off activation boundaries T is
// classically differentiable with one Jacobian per activation region; on a
// boundary we enumerate the limiting Jacobians from every adjacent region
// (the extreme points of the generalized Jacobian set). A region certificate
// bounds the operator norms over a stated region; a bound below 1 makes the
// iteration a contraction there.

/// One-step gradient-descent transformation for a fixed datum.
struct UpdateMap {
    double eta = 0.0;
    DataPoint datum;
    Layout layout = Layout::OneNeuron;

    static UpdateMap make(double eta, const DataPoint& datum, Layout layout);
};

/// theta - eta * grad(theta). BoundaryError if theta is within tau of a boundary.
ParamVector apply_update(const UpdateMap& map, const ParamVector& theta, double tau);

/// Limiting Jacobians of T at a point: one per activation pattern adjacent to
/// the point (exactly one off-boundary). max_norm is the largest operator
/// norm over the set, which equals the supremum over its convex hull.
struct GeneralizedJacobianSet {
    ParamVector point;
    double tau = 0.0;
    std::vector<Eigen::MatrixXd> jacobians;
    double max_norm = 0.0;
};

GeneralizedJacobianSet limiting_jacobians(const UpdateMap& map, const ParamVector& theta,
                                          double tau);

/// Largest singular value by power iteration on M^T M, run from a
/// deterministic set of start vectors (normalized all-ones, then each
/// canonical basis vector) and maximized; at least one start overlaps the
/// dominant eigenspace, so the maximum is the dominant value. Relative
/// convergence 1e-12, at most 10000 iterations per start.
double operator_norm(const Eigen::MatrixXd& m);

/// A region of parameter space on which all preactivations keep a prescribed
/// sign with margin at least delta.
struct RegionSpec {
    enum class Kind { HalfSpacePositive, HalfSpaceNegative, PatternFixed };

    Kind kind = Kind::HalfSpacePositive;
    Layout layout = Layout::OneNeuron;
    double delta = 0.1;  // margin, > 0
    double span = 4.0;   // extent of the sampling box

    // PatternFixed (two-layer) only: prescribed signs (no zeros), with the
    // output layer frozen at the anchor and W1 sampled in a box around it.
    // Freezing W2 keeps the region convex for segment arguments.
    ActivationPattern pattern;
    std::optional<ParamVector> anchor;

    static RegionSpec half_space(Layout layout, bool positive, double delta, double span = 4.0);
    static RegionSpec pattern_fixed(const ParamVector& anchor, const ActivationPattern& pattern,
                                    double delta, double span);
};

/// Membership test (margins, and for PatternFixed the box and frozen W2).
bool region_contains(const RegionSpec& region, const ParamVector& theta, const DataPoint& p);

struct SamplerSpec {
    int count = 1000;
    std::uint64_t offset = 0;  // start offset into the low-discrepancy sequence
};

/// Empirical certificate: rho is the max limiting-Jacobian norm over the
/// sample set. Where the Jacobian is provably constant on the region (scalar
/// layouts with a fixed sign), rho is the closed form and sampling is a
/// crosscheck; this is recorded in closed_form_used.
struct RhoCertificate {
    RegionSpec region;
    double eta = 0.0;
    double rho = 0.0;
    double sampled_max = 0.0;  // max limiting-Jacobian norm seen over the samples
    int sample_count = 0;
    ParamVector worst_point;
    bool closed_form_used = false;
};

RhoCertificate rho_over_region(const UpdateMap& map, const RegionSpec& region,
                               const SamplerSpec& sampler);

/// Closed-form rho on half-space regions: OneNeuron positive side has
/// Jacobian I - eta*vv^T with v = (x,1), norm max(1, |1 - eta*||v||^2|);
/// the inactive side is the identity map; FrozenBias active side is the
/// scalar |1 - eta*x^2|.
double rho_closed_form(const UpdateMap& map, const RegionSpec& region);

/// Measured one-step expansion between two points, compared against a
/// certificate rho, with a flag for activation-boundary crossings along the
/// segment (per-unit endpoint sign change; preactivations are affine along
/// the segment, so at most one crossing per unit).
struct LipschitzCheckReport {
    double ratio = 0.0;
    double rho = 0.0;
    bool pass = false;
    bool crossed_boundary = false;
};

LipschitzCheckReport check_update_lipschitz(const UpdateMap& map, const ParamVector& theta,
                                            const ParamVector& theta_prime, double rho);

/// Radical-inverse (Halton) value in base `base` at the given index.
double halton(std::uint64_t index, std::uint32_t base);

}  // namespace relukink
