#include "model.hpp"

#include <cmath>
#include <string>

namespace relukink {

const char* layout_name(Layout layout) {
    switch (layout) {
        case Layout::OneNeuron: return "one_neuron";
        case Layout::FrozenBias: return "frozen_bias";
        case Layout::TwoLayer: return "two_layer";
    }
    return "unknown";
}

ParamVector ParamVector::one_neuron(double w, double b) {
    ParamVector theta;
    theta.layout = Layout::OneNeuron;
    theta.values = Eigen::Vector2d(w, b);
    validate(theta);
    return theta;
}

ParamVector ParamVector::frozen_bias(double w) {
    ParamVector theta;
    theta.layout = Layout::FrozenBias;
    theta.values = Eigen::VectorXd::Constant(1, w);
    validate(theta);
    return theta;
}

ParamVector ParamVector::two_layer(const Eigen::MatrixXd& w1, const Eigen::VectorXd& w2) {
    ParamVector theta;
    theta.layout = Layout::TwoLayer;
    theta.hidden = static_cast<int>(w1.rows());
    theta.inputs = static_cast<int>(w1.cols()) - 1;
    theta.values.resize(w1.size() + w2.size());
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < w1.rows(); ++i)
        for (Eigen::Index j = 0; j < w1.cols(); ++j) theta.values(k++) = w1(i, j);
    for (Eigen::Index i = 0; i < w2.size(); ++i) theta.values(k++) = w2(i);
    if (w2.size() != w1.rows())
        throw LayoutError("two_layer: W2 must have one entry per hidden unit");
    validate(theta);
    return theta;
}

Eigen::MatrixXd ParamVector::w1() const {
    Eigen::MatrixXd m(hidden, inputs + 1);
    Eigen::Index k = 0;
    for (int i = 0; i < hidden; ++i)
        for (int j = 0; j <= inputs; ++j) m(i, j) = values(k++);
    return m;
}

Eigen::VectorXd ParamVector::w2() const {
    return values.tail(hidden);
}

void validate(const ParamVector& theta) {
    switch (theta.layout) {
        case Layout::OneNeuron:
            if (theta.values.size() != 2)
                throw LayoutError("one_neuron parameter vector must have exactly 2 entries, got " +
                                  std::to_string(theta.values.size()));
            break;
        case Layout::FrozenBias:
            if (theta.values.size() != 1)
                throw LayoutError("frozen_bias parameter vector must have exactly 1 entry, got " +
                                  std::to_string(theta.values.size()));
            break;
        case Layout::TwoLayer: {
            if (theta.inputs < 1 || theta.inputs > kMaxInputs)
                throw LayoutError("two_layer input dimension must be in [1, " +
                                  std::to_string(kMaxInputs) + "], got " +
                                  std::to_string(theta.inputs));
            if (theta.hidden < 1 || theta.hidden > kMaxHidden)
                throw LayoutError("two_layer hidden width must be in [1, " +
                                  std::to_string(kMaxHidden) + "], got " +
                                  std::to_string(theta.hidden));
            const Eigen::Index want =
                Eigen::Index(theta.hidden) * (theta.inputs + 1) + theta.hidden;
            if (theta.values.size() != want)
                throw LayoutError("two_layer parameter vector must have " + std::to_string(want) +
                                  " entries, got " + std::to_string(theta.values.size()));
            break;
        }
    }
    if (!theta.values.allFinite())
        throw LayoutError("parameter vector entries must all be finite");
}

DataPoint DataPoint::scalar(double x, double y) {
    DataPoint p;
    p.x = Eigen::VectorXd::Constant(1, x);
    p.y = y;
    return p;
}

static void require_scalar_input(const ParamVector& theta, const DataPoint& p,
                                 const char* op) {
    if (p.x.size() != (theta.layout == Layout::TwoLayer ? theta.inputs : 1))
        throw LayoutError(std::string(op) + ": input dimension " + std::to_string(p.x.size()) +
                          " does not match the parameter layout");
}

double preactivation(const ParamVector& theta, const DataPoint& p) {
    require_scalar_input(theta, p, "preactivation");
    switch (theta.layout) {
        case Layout::OneNeuron: return theta.w() * p.x0() + theta.b();
        case Layout::FrozenBias: return theta.w() * p.x0();
        case Layout::TwoLayer:
            throw LayoutError("preactivation: scalar layouts only; use preactivations()");
    }
    throw LayoutError("preactivation: unknown layout");
}

Eigen::VectorXd augmented_input(const DataPoint& p) {
    Eigen::VectorXd xa(p.x.size() + 1);
    xa.head(p.x.size()) = p.x;
    xa(p.x.size()) = 1.0;
    return xa;
}

Eigen::VectorXd preactivations(const ParamVector& theta, const DataPoint& p) {
    if (theta.layout != Layout::TwoLayer)
        return Eigen::VectorXd::Constant(1, preactivation(theta, p));
    require_scalar_input(theta, p, "preactivations");
    return theta.w1() * augmented_input(p);
}

double forward(const ParamVector& theta, const DataPoint& p) {
    if (theta.layout != Layout::TwoLayer) return std::max(0.0, preactivation(theta, p));
    const Eigen::VectorXd a = preactivations(theta, p);
    return theta.w2().dot(a.cwiseMax(0.0));
}

double loss(const ParamVector& theta, const DataPoint& p) {
    const double r = forward(theta, p) - p.y;
    return 0.5 * r * r;
}

OneNeuronGrad grad_one_neuron(const ParamVector& theta, const DataPoint& p, double tau) {
    if (theta.layout != Layout::OneNeuron)
        throw LayoutError("grad_one_neuron: one_neuron layout required");
    if (tau < 0) throw ArgumentError("grad_one_neuron: tau must be nonnegative");
    const double s = preactivation(theta, p);
    if (s > tau) {
        const double r = s - p.y;
        return {Eigen::Vector2d(r * p.x0(), r), Side::Positive};
    }
    if (s < -tau) return {Eigen::Vector2d::Zero(), Side::Negative};
    throw BoundaryError("gradient undefined within tolerance of the activation boundary (s = " +
                            std::to_string(s) + ")",
                        {0});
}

/// Two-layer loss gradient under explicit unit gates (1 = pass-through, 0 = off).
static Eigen::VectorXd gated_grad_net(const ParamVector& theta, const DataPoint& p,
                                      const Eigen::VectorXd& a,
                                      const std::vector<int>& gates) {
    const Eigen::VectorXd xa = augmented_input(p);
    const Eigen::VectorXd w2 = theta.w2();
    const int h = theta.hidden;
    const int cols = theta.inputs + 1;

    double f = 0.0;
    for (int i = 0; i < h; ++i)
        if (gates[i]) f += w2(i) * a(i);
    const double r = f - p.y;

    Eigen::VectorXd g = Eigen::VectorXd::Zero(theta.size());
    for (int i = 0; i < h; ++i) {
        if (!gates[i]) continue;
        g.segment(Eigen::Index(i) * cols, cols) = (r * w2(i)) * xa;
        g(Eigen::Index(h) * cols + i) = r * a(i);
    }
    return g;
}

Eigen::VectorXd grad_net(const ParamVector& theta, const DataPoint& p, double tau) {
    if (theta.layout != Layout::TwoLayer)
        throw LayoutError("grad_net: two_layer layout required");
    if (tau < 0) throw ArgumentError("grad_net: tau must be nonnegative");
    const Eigen::VectorXd a = preactivations(theta, p);

    std::vector<int> offenders;
    for (int i = 0; i < theta.hidden; ++i)
        if (std::abs(a(i)) <= tau) offenders.push_back(i);
    if (!offenders.empty()) {
        std::string msg = "gradient undefined: units within tolerance of their boundary:";
        for (int i : offenders) msg += ' ' + std::to_string(i);
        throw BoundaryError(msg, offenders);
    }

    std::vector<int> gates(theta.hidden);
    for (int i = 0; i < theta.hidden; ++i) gates[i] = a(i) > tau ? 1 : 0;
    return gated_grad_net(theta, p, a, gates);
}

Eigen::VectorXd gradient(const ParamVector& theta, const DataPoint& p, double tau) {
    switch (theta.layout) {
        case Layout::OneNeuron: return grad_one_neuron(theta, p, tau).grad;
        case Layout::FrozenBias: {
            const double s = preactivation(theta, p);
            if (s > tau) return Eigen::VectorXd::Constant(1, (s - p.y) * p.x0());
            if (s < -tau) return Eigen::VectorXd::Zero(1);
            throw BoundaryError("gradient undefined within tolerance of the activation boundary",
                                {0});
        }
        case Layout::TwoLayer: return grad_net(theta, p, tau);
    }
    throw LayoutError("gradient: unknown layout");
}

Eigen::VectorXd gradient_with_boundary_gate(const ParamVector& theta, const DataPoint& p,
                                            double tau, bool active_gate) {
    const Eigen::VectorXd a = preactivations(theta, p);
    if (theta.layout == Layout::TwoLayer) {
        std::vector<int> gates(theta.hidden);
        for (int i = 0; i < theta.hidden; ++i) {
            if (std::abs(a(i)) <= tau) gates[i] = active_gate ? 1 : 0;
            else gates[i] = a(i) > 0 ? 1 : 0;
        }
        return gated_grad_net(theta, p, a, gates);
    }
    const double s = a(0);
    const bool active = std::abs(s) <= tau ? active_gate : s > 0;
    if (!active) return Eigen::VectorXd::Zero(theta.size());
    const double r = s - p.y;
    if (theta.layout == Layout::FrozenBias) return Eigen::VectorXd::Constant(1, r * p.x0());
    Eigen::VectorXd g(2);
    g << r * p.x0(), r;
    return g;
}

ActivationPattern activation_pattern(const ParamVector& theta, const DataPoint& p, double tau) {
    if (tau < 0) throw ArgumentError("activation_pattern: tau must be nonnegative");
    const Eigen::VectorXd a = preactivations(theta, p);
    ActivationPattern pat;
    pat.tolerance = tau;
    pat.signs.resize(a.size());
    for (Eigen::Index i = 0; i < a.size(); ++i)
        pat.signs(i) = std::abs(a(i)) <= tau ? 0 : (a(i) > 0 ? 1 : -1);
    return pat;
}

double boundary_distance(const ParamVector& theta, const DataPoint& p) {
    if (theta.layout != Layout::OneNeuron)
        throw LayoutError("boundary_distance: one_neuron layout required");
    if (!std::isfinite(p.x0())) throw ArgumentError("boundary_distance: x must be finite");
    const double s = preactivation(theta, p);
    return std::abs(s) / std::hypot(p.x0(), 1.0);
}

Eigen::VectorXd boundary_normal(const ParamVector& theta, const DataPoint& p) {
    switch (theta.layout) {
        case Layout::OneNeuron: {
            Eigen::VectorXd v(2);
            v << p.x0(), 1.0;
            return v;
        }
        case Layout::FrozenBias: return Eigen::VectorXd::Constant(1, p.x0());
        case Layout::TwoLayer:
            throw LayoutError("boundary_normal: scalar layouts only");
    }
    throw LayoutError("boundary_normal: unknown layout");
}

}  // namespace relukink
