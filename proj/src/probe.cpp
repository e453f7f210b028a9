#include "probe.hpp"

#include <cmath>
#include <limits>

namespace relukink {

ParamVector boundary_point(const DataPoint& p, double t) {
    if (!std::isfinite(t)) throw ArgumentError("boundary_point: anchor t must be finite");
    // b = -(t*x) with the same rounding as the w*x term, so s = 0 exactly.
    return ParamVector::one_neuron(t, -(t * p.x0()));
}

ProbePair make_probe_pair(const ParamVector& theta0, const DataPoint& p, double epsilon) {
    if (theta0.layout != Layout::OneNeuron)
        throw LayoutError("make_probe_pair: one_neuron layout required");
    if (!(epsilon > 0.0) || !std::isfinite(epsilon))
        throw ArgumentError("make_probe_pair: epsilon must be positive and finite");

    const double x = p.x0();
    const Eigen::Vector2d v(x, 1.0);
    const double v2 = v.squaredNorm();

    const double s0 = preactivation(theta0, p);
    if (std::abs(s0) > 1e-12 * v.norm())
        throw ArgumentError("make_probe_pair: anchor is not on the activation boundary (s = " +
                            std::to_string(s0) + ")");

    ProbePair pair;
    pair.theta0 = theta0;
    pair.epsilon = epsilon;
    pair.normal = v;
    pair.theta_plus = ParamVector::one_neuron(theta0.w() + epsilon * x, theta0.b() + epsilon);
    pair.theta_minus = ParamVector::one_neuron(theta0.w() - epsilon * x, theta0.b() - epsilon);

    const double s_plus = preactivation(pair.theta_plus, p);
    const double s_minus = preactivation(pair.theta_minus, p);
    if (!(s_plus > 0.0) || !(s_minus < 0.0))
        throw NumericError(
            "make_probe_pair: epsilon too small at this anchor scale; the probe collapsed onto "
            "the boundary (s+ = " +
            std::to_string(s_plus) + ", s- = " + std::to_string(s_minus) + ")");

    // s(theta +/- eps*v) = +/- eps*||v||^2 up to the rounding of the w*x vs b
    // cancellation at the anchor; the floor term covers that cancellation for
    // anchors away from the origin.
    const double cancel_scale = std::abs(theta0.w() * x) + std::abs(theta0.b());
    const double want = epsilon * v2;
    const double tol = 1e-12 * want +
                       16.0 * std::numeric_limits<double>::epsilon() * (cancel_scale + want);
    if (std::abs(s_plus - want) > tol || std::abs(s_minus + want) > tol)
        throw NumericError("make_probe_pair: probe preactivations deviate from +/- eps*||(x,1)||^2");

    return pair;
}

RatioSample grad_jump_ratio(const ProbePair& pair, const DataPoint& p, double tau) {
    const Eigen::Vector2d g_plus = grad_one_neuron(pair.theta_plus, p, tau).grad;
    const Eigen::Vector2d g_minus = grad_one_neuron(pair.theta_minus, p, tau).grad;
    const double sep = (pair.theta_plus.values - pair.theta_minus.values).norm();

    RatioSample sample;
    sample.epsilon = pair.epsilon;
    sample.numeric_ratio = (g_plus - g_minus).norm() / sep;
    sample.analytic_ratio =
        std::abs(pair.epsilon * pair.normal.squaredNorm() - p.y) / (2.0 * pair.epsilon);
    if (std::abs(sample.numeric_ratio - sample.analytic_ratio) >
        1e-9 * std::max(1.0, sample.analytic_ratio))
        throw NumericError("grad_jump_ratio: measured ratio disagrees with the closed form at " +
                           std::to_string(pair.epsilon));
    return sample;
}

SweepResult epsilon_sweep(const DataPoint& p, const ParamVector& theta0,
                          std::span<const double> eps_list, double tau) {
    if (eps_list.empty()) throw ArgumentError("epsilon_sweep: empty epsilon list");
    for (size_t i = 0; i < eps_list.size(); ++i) {
        if (!(eps_list[i] > 1e-14))
            throw ArgumentError("epsilon_sweep: all epsilons must exceed 1e-14");
        if (i > 0 && !(eps_list[i] < eps_list[i - 1]))
            throw ArgumentError("epsilon_sweep: epsilon list must be strictly decreasing");
    }

    SweepResult result;
    result.samples.reserve(eps_list.size());
    for (double eps : eps_list) {
        const ProbePair pair = make_probe_pair(theta0, p, eps);
        result.samples.push_back(grad_jump_ratio(pair, p, tau));
        result.eps_times_ratio.push_back(eps * result.samples.back().numeric_ratio);
    }

    // OLS slope of log(ratio) against log(eps) over the tail of the grid,
    // skipping any sample where the probe crosses the zero-residual point
    // (analytic ratio 0, log undefined).
    const double cutoff = eps_list.back() * 100.0 * (1.0 + 1e-9);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const RatioSample& s : result.samples) {
        if (s.epsilon > cutoff || s.analytic_ratio == 0.0 || s.numeric_ratio <= 0.0) continue;
        const double lx = std::log(s.epsilon);
        const double ly = std::log(s.numeric_ratio);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    if (n >= 2) {
        const double denom = n * sxx - sx * sx;
        if (denom != 0.0) result.loglog_slope = (n * sxy - sx * sy) / denom;
    }
    return result;
}

std::vector<double> default_epsilon_grid() {
    return {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
}

}  // namespace relukink
