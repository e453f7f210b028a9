#include "surrogate.hpp"

#include <cmath>

namespace relukink {

SoftplusValue softplus_eval(double beta, double u) {
    if (!(beta >= 1.0) || !std::isfinite(beta))
        throw ArgumentError("softplus_eval: beta must be finite and >= 1");
    if (!std::isfinite(u)) throw ArgumentError("softplus_eval: u must be finite");

    const double z = beta * u;
    SoftplusValue out;
    if (z >= 0.0) {
        // log(1+e^z) = z + log1p(e^-z); e^-z underflows harmlessly for large z.
        const double e = std::exp(-z);
        out.value = u + std::log1p(e) / beta;
        out.first = 1.0 / (1.0 + e);
    } else {
        const double e = std::exp(z);
        out.value = std::log1p(e) / beta;
        out.first = e / (1.0 + e);
    }
    out.second = beta * out.first * (1.0 - out.first);
    return out;
}

SurrogateActivation SurrogateActivation::softplus(double beta) {
    if (!(beta >= 1.0) || !std::isfinite(beta))
        throw ArgumentError("SurrogateActivation: beta must be finite and >= 1");
    SurrogateActivation act;
    act.family = Family::Softplus;
    act.beta = beta;
    return act;
}

static void require_one_neuron(const ParamVector& theta, const char* op) {
    if (theta.layout != Layout::OneNeuron)
        throw LayoutError(std::string(op) + ": one_neuron layout required");
}

Eigen::Vector2d surrogate_grad(const ParamVector& theta, const DataPoint& p,
                               const SurrogateActivation& act) {
    require_one_neuron(theta, "surrogate_grad");
    const double s = preactivation(theta, p);
    const SoftplusValue sp = act(s);
    const double c = (sp.value - p.y) * sp.first;
    return c * Eigen::Vector2d(p.x0(), 1.0);
}

double surrogate_hessian_scalar(const ParamVector& theta, const DataPoint& p,
                                const SurrogateActivation& act) {
    require_one_neuron(theta, "surrogate_hessian");
    const double s = preactivation(theta, p);
    const SoftplusValue sp = act(s);
    return sp.first * sp.first + (sp.value - p.y) * sp.second;
}

Eigen::Matrix2d surrogate_hessian(const ParamVector& theta, const DataPoint& p,
                                  const SurrogateActivation& act) {
    const double c = surrogate_hessian_scalar(theta, p, act);
    const Eigen::Vector2d v(p.x0(), 1.0);
    return c * (v * v.transpose());
}

double hessian_lower_bound(const ParamVector& theta, const DataPoint& p,
                           const SurrogateActivation& act) {
    require_one_neuron(theta, "hessian_lower_bound");
    const double s = preactivation(theta, p);
    const SoftplusValue sp = act(s);
    const double v2 = p.x0() * p.x0() + 1.0;
    return std::abs((sp.value - p.y) * sp.second) * v2;
}

double curvature_peak(const SurrogateActivation& act, double lo, double hi) {
    if (!(lo < hi)) throw ArgumentError("curvature_peak: need lo < hi");
    auto f = [&](double u) { return std::abs(act(u).second); };

    // Golden-section search; |sigma''| is unimodal for softplus.
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > 1e-10) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    const double u_peak = 0.5 * (a + b);
    const double f_peak = f(u_peak);
    if (f(lo) > f_peak || f(hi) > f_peak)
        throw NumericError("curvature_peak: search interval does not contain the curvature peak");
    return u_peak;
}

std::vector<SmoothnessEstimate> smoothness_divergence_sweep(const DataPoint& p,
                                                            std::span<const double> betas) {
    if (p.x0() == 0.0 || p.y == 0.0)
        throw ArgumentError("smoothness_divergence_sweep: requires x != 0 and y != 0");
    if (betas.empty()) throw ArgumentError("smoothness_divergence_sweep: empty beta list");
    for (size_t i = 0; i < betas.size(); ++i) {
        if (!(betas[i] >= 1.0))
            throw ArgumentError("smoothness_divergence_sweep: betas must be >= 1");
        if (i > 0 && !(betas[i] > betas[i - 1]))
            throw ArgumentError("smoothness_divergence_sweep: beta list must be increasing");
    }

    std::vector<SmoothnessEstimate> out;
    out.reserve(betas.size());
    for (double beta : betas) {
        const SurrogateActivation act = SurrogateActivation::softplus(beta);
        SmoothnessEstimate est;
        est.beta = beta;
        est.u_peak = curvature_peak(act, -1.0, 1.0);
        // Any theta with preactivation u_peak works; w = 0, b = u_peak is exact.
        est.theta_witness = ParamVector::one_neuron(0.0, est.u_peak);
        const SoftplusValue sp = act(est.u_peak);
        est.sigma2_at_peak = sp.second;
        est.residual = sp.value - p.y;
        est.l_lower = hessian_lower_bound(est.theta_witness, p, act);
        out.push_back(est);
    }
    return out;
}

std::vector<double> default_beta_grid() {
    return {10.0, 100.0, 1000.0};
}

}  // namespace relukink
