#pragma once

#include "clarke.hpp"
#include "model.hpp"
#include "types.hpp"

#include <optional>
#include <vector>

namespace relukink {

// Gradient-descent trajectories with per-step activation patterns, boundary
// crossing logs, and paired-perturbation experiments against the rho^t
// contraction bound.

/// What to do when an iterate lands within tau of an activation boundary,
/// where the gradient is undefined.
enum class BoundaryPolicy {
    Halt,          // stop and record (default)
    PickActive,    // use the active-side limiting gradient
    PickInactive,  // use the inactive-side (zero) limiting gradient
};

const char* boundary_policy_name(BoundaryPolicy policy);

struct Crossing {
    int step = 0;  // pattern changed between iterates step and step+1
    int unit = 0;
};

struct TrajectoryRecord {
    std::vector<ParamVector> iterates;        // step_count + 1 entries
    std::vector<ActivationPattern> patterns;  // one per iterate
    std::vector<Crossing> crossings;
    double eta = 0.0;
    int step_count = 0;
    BoundaryPolicy policy = BoundaryPolicy::Halt;
    bool halted_at_boundary = false;
};

/// Raised when an iterate overflows to a non-finite value; carries the last
/// finite state.
class TrajectoryDivergence : public NumericError {
public:
    TrajectoryDivergence(std::string msg, ParamVector last, int step)
        : NumericError(std::move(msg)), last_finite_(std::move(last)), step_(step) {}
    const ParamVector& last_finite() const noexcept { return last_finite_; }
    int step() const noexcept { return step_; }

private:
    ParamVector last_finite_;
    int step_;
};

/// Runs theta_{t+1} = theta_t - eta * grad(theta_t) for `steps` steps.
TrajectoryRecord run_gd(const ParamVector& theta0, const DataPoint& p, double eta, int steps,
                        double tau, BoundaryPolicy policy = BoundaryPolicy::Halt);

/// Separation of two trajectories against the geometric bound rho^t * sep_0.
/// The bound only binds while both iterates remain in the region; a
/// violation is only flagged at steps where it binds.
struct DivergenceReport {
    std::vector<double> separations;
    std::vector<double> bound;
    std::vector<bool> both_in_region;
    std::optional<int> first_violation;
    double rho = 0.0;
};

DivergenceReport paired_divergence(const ParamVector& theta0, const ParamVector& theta0_prime,
                                   const DataPoint& p, double eta, int steps,
                                   const RegionSpec& region, double rho, double tau,
                                   BoundaryPolicy policy = BoundaryPolicy::Halt);

struct CrossingCensus {
    int total = 0;
    std::vector<int> per_unit;
    std::optional<int> first_step;
};

CrossingCensus crossing_census(const TrajectoryRecord& record);

/// Suggests a region that contains every recorded iterate with a positive
/// margin: a half-space with delta equal to the smallest observed
/// |preactivation| (scalar layouts). Returns nullopt when the pattern varies,
/// touches a boundary, or the trajectory is two-layer with a moving output
/// layer (pattern regions freeze W2).
std::optional<RegionSpec> suggest_region(const TrajectoryRecord& record, const DataPoint& p);

}  // namespace relukink
