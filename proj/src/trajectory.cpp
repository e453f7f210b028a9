#include "trajectory.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace relukink {

const char* boundary_policy_name(BoundaryPolicy policy) {
    switch (policy) {
        case BoundaryPolicy::Halt: return "halt";
        case BoundaryPolicy::PickActive: return "pick_active";
        case BoundaryPolicy::PickInactive: return "pick_inactive";
    }
    return "unknown";
}

TrajectoryRecord run_gd(const ParamVector& theta0, const DataPoint& p, double eta, int steps,
                        double tau, BoundaryPolicy policy) {
    if (steps < 0) throw ArgumentError("run_gd: steps must be >= 0");
    if (!(eta > 0.0) || !std::isfinite(eta))
        throw ArgumentError("run_gd: eta must be positive and finite");
    if (tau < 0) throw ArgumentError("run_gd: tau must be nonnegative");
    validate(theta0);

    TrajectoryRecord record;
    record.eta = eta;
    record.policy = policy;
    record.iterates.push_back(theta0);
    record.patterns.push_back(activation_pattern(theta0, p, tau));

    for (int t = 0; t < steps; ++t) {
        const ParamVector& theta = record.iterates.back();
        const ActivationPattern& pattern = record.patterns.back();

        Eigen::VectorXd g;
        if (pattern.on_boundary()) {
            if (policy == BoundaryPolicy::Halt) {
                record.halted_at_boundary = true;
                break;
            }
            g = gradient_with_boundary_gate(theta, p, tau,
                                            policy == BoundaryPolicy::PickActive);
        } else {
            g = gradient(theta, p, tau);
        }

        ParamVector next = theta;
        next.values = theta.values - eta * g;
        if (!next.values.allFinite())
            throw TrajectoryDivergence("run_gd: non-finite iterate at step " + std::to_string(t),
                                       theta, t);
        record.iterates.push_back(std::move(next));
        record.patterns.push_back(activation_pattern(record.iterates.back(), p, tau));
    }

    record.step_count = static_cast<int>(record.iterates.size()) - 1;
    for (int t = 0; t < record.step_count; ++t) {
        const auto& a = record.patterns[t].signs;
        const auto& b = record.patterns[t + 1].signs;
        for (Eigen::Index u = 0; u < a.size(); ++u)
            if (a(u) != b(u)) record.crossings.push_back({t, static_cast<int>(u)});
    }
    return record;
}

DivergenceReport paired_divergence(const ParamVector& theta0, const ParamVector& theta0_prime,
                                   const DataPoint& p, double eta, int steps,
                                   const RegionSpec& region, double rho, double tau,
                                   BoundaryPolicy policy) {
    if (theta0.layout != theta0_prime.layout || theta0.size() != theta0_prime.size())
        throw LayoutError("paired_divergence: mismatched parameter layouts");
    if ((theta0.values.array() == theta0_prime.values.array()).all())
        throw ArgumentError("paired_divergence: degenerate pair (identical initial points)");
    if (!(rho >= 0.0) || !std::isfinite(rho))
        throw ArgumentError("paired_divergence: rho must be finite and nonnegative");

    const TrajectoryRecord a = run_gd(theta0, p, eta, steps, tau, policy);
    const TrajectoryRecord b = run_gd(theta0_prime, p, eta, steps, tau, policy);
    const std::size_t len = std::min(a.iterates.size(), b.iterates.size());

    DivergenceReport report;
    report.rho = rho;
    report.separations.reserve(len);
    const double sep0 = (theta0.values - theta0_prime.values).norm();
    double bound = sep0;
    for (std::size_t t = 0; t < len; ++t) {
        const double sep = (a.iterates[t].values - b.iterates[t].values).norm();
        report.separations.push_back(sep);
        report.bound.push_back(bound);
        const bool inside = region_contains(region, a.iterates[t], p) &&
                            region_contains(region, b.iterates[t], p);
        report.both_in_region.push_back(inside);
        if (inside && !report.first_violation && sep > bound + 1e-12)
            report.first_violation = static_cast<int>(t);
        bound *= rho;
    }
    return report;
}

std::optional<RegionSpec> suggest_region(const TrajectoryRecord& record, const DataPoint& p) {
    if (record.iterates.empty()) return std::nullopt;
    const ActivationPattern& base = record.patterns.front();
    if (base.on_boundary()) return std::nullopt;
    for (const ActivationPattern& pat : record.patterns)
        if (!pat.same_signs(base)) return std::nullopt;

    const Layout layout = record.iterates.front().layout;
    if (layout == Layout::TwoLayer) {
        const ParamVector& anchor = record.iterates.front();
        const int h = anchor.hidden;
        const Eigen::Index nw1 = Eigen::Index(h) * (anchor.inputs + 1);
        double min_margin = std::numeric_limits<double>::infinity();
        double max_dev = 0.0;
        for (const ParamVector& it : record.iterates) {
            if (!(it.values.tail(h).array() == anchor.values.tail(h).array()).all())
                return std::nullopt;  // output layer moved; no frozen-W2 region fits
            const Eigen::VectorXd a = preactivations(it, p);
            for (int i = 0; i < h; ++i)
                min_margin = std::min(min_margin, double(base.signs(i)) * a(i));
            max_dev = std::max(
                max_dev, (it.values.head(nw1) - anchor.values.head(nw1)).cwiseAbs().maxCoeff());
        }
        if (!(min_margin > 0.0)) return std::nullopt;
        return RegionSpec::pattern_fixed(anchor, base, min_margin, std::max(max_dev, 1e-6));
    }

    double min_abs = std::numeric_limits<double>::infinity();
    for (const ParamVector& it : record.iterates)
        min_abs = std::min(min_abs, std::abs(preactivation(it, p)));
    if (!(min_abs > 0.0)) return std::nullopt;
    return RegionSpec::half_space(layout, base.signs(0) > 0, min_abs);
}

CrossingCensus crossing_census(const TrajectoryRecord& record) {
    CrossingCensus census;
    census.total = static_cast<int>(record.crossings.size());
    const int units =
        record.patterns.empty() ? 0 : static_cast<int>(record.patterns.front().signs.size());
    census.per_unit.assign(units, 0);
    for (const Crossing& c : record.crossings) {
        census.per_unit[c.unit] += 1;
        if (!census.first_step || c.step < *census.first_step) census.first_step = c.step;
    }
    return census;
}

}  // namespace relukink
