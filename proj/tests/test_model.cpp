#include "model.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace relukink;

namespace {

DataPoint datum(double x, double y) { return DataPoint::scalar(x, y); }

double loss_at(const DataPoint& p, Layout layout, const Eigen::VectorXd& values, int hidden = 1,
               int inputs = 1) {
    ParamVector theta;
    theta.layout = layout;
    theta.hidden = hidden;
    theta.inputs = inputs;
    theta.values = values;
    return loss(theta, p);
}

}  // namespace

TEST_CASE("preactivation: closed values") {
    CHECK(preactivation(ParamVector::one_neuron(0, 0), datum(1, 0)) == 0.0);
    CHECK(preactivation(ParamVector::one_neuron(2, -1), datum(1, 0)) == 1.0);
    CHECK(preactivation(ParamVector::one_neuron(1, 1), datum(-1, 0)) == 0.0);
    CHECK(preactivation(ParamVector::frozen_bias(3), datum(2, 0)) == 6.0);
}

TEST_CASE("preactivation: two_layer layout refused") {
    const ParamVector theta =
        ParamVector::two_layer(Eigen::MatrixXd::Ones(1, 2), Eigen::VectorXd::Ones(1));
    CHECK_THROWS_AS(preactivation(theta, datum(1, 0)), LayoutError);
}

TEST_CASE("forward: clamps the inactive side, passes the active side") {
    CHECK(forward(ParamVector::one_neuron(1, 0), datum(-3, 0)) == 0.0);
    CHECK(forward(ParamVector::one_neuron(2, -1), datum(1, 0)) == 1.0);

    // Single active unit, identity pass-through: W1 = [[1, 0]], W2 = [1], x = 2.
    Eigen::MatrixXd w1(1, 2);
    w1 << 1, 0;
    const ParamVector net = ParamVector::two_layer(w1, Eigen::VectorXd::Ones(1));
    CHECK(forward(net, datum(2, 0)) == 2.0);
}

TEST_CASE("loss: squared error halved") {
    CHECK(loss(ParamVector::one_neuron(2, -1), datum(1, 1)) == 0.0);  // perfect fit
    CHECK(loss(ParamVector::one_neuron(0, 0), datum(1, 1)) == 0.5);
    CHECK(loss(ParamVector::one_neuron(2, -1), datum(1, 3)) == 2.0);
}

TEST_CASE("grad_one_neuron: region cases and the boundary refusal") {
    const auto dead = grad_one_neuron(ParamVector::one_neuron(-1, -1), datum(1, 5), 0.0);
    CHECK(dead.side == Side::Negative);
    CHECK(dead.grad(0) == 0.0);
    CHECK(dead.grad(1) == 0.0);

    const auto live = grad_one_neuron(ParamVector::one_neuron(2, -1), datum(1, 0), 0.0);
    CHECK(live.side == Side::Positive);
    CHECK(live.grad(0) == 1.0);
    CHECK(live.grad(1) == 1.0);

    CHECK_THROWS_AS(grad_one_neuron(ParamVector::one_neuron(0, 0), datum(1, 1), 0.0),
                    BoundaryError);
    // tau widens the refusal band
    CHECK_THROWS_AS(grad_one_neuron(ParamVector::one_neuron(0, 1e-8), datum(1, 1), 1e-6),
                    BoundaryError);
}

TEST_CASE("grad_one_neuron: matches central finite differences off the boundary") {
    const DataPoint p = datum(1.7, -0.6);
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> dist(-3.0, 3.0);
    const double margin = 1e-4 * std::hypot(p.x0(), 1.0);

    int checked = 0;
    while (checked < 500) {
        const ParamVector theta = ParamVector::one_neuron(dist(rng), dist(rng));
        const double s = preactivation(theta, p);
        if (std::abs(s) <= margin) continue;
        // keep the relative comparison well posed
        if (std::abs(s - p.y) < 1e-2 && s > 0) continue;
        ++checked;

        const Eigen::Vector2d g = grad_one_neuron(theta, p, 0.0).grad;
        const Eigen::VectorXd g_fd = oracles::fd_gradient(
            [&](const Eigen::VectorXd& v) {
                return loss_at(p, Layout::OneNeuron, v);
            },
            theta.values, 1e-6 * (1.0 + theta.norm()));
        const double scale = std::max(1e-12, g.norm());
        CHECK((g_fd - Eigen::VectorXd(g)).norm() / scale <= 1e-7);
    }
}

TEST_CASE("flat region: loss is exactly y^2/2 and the gradient is exactly zero") {
    const DataPoint p = datum(2.0, -1.3);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(-5.0, 5.0);
    int checked = 0;
    while (checked < 2000) {
        const ParamVector theta = ParamVector::one_neuron(dist(rng), dist(rng));
        if (!(preactivation(theta, p) < 0)) continue;
        ++checked;
        CHECK(loss(theta, p) == 0.5 * p.y * p.y);
        const auto g = grad_one_neuron(theta, p, 0.0);
        CHECK(g.grad(0) == 0.0);
        CHECK(g.grad(1) == 0.0);
    }
}

TEST_CASE("grad_net: hand-checked single unit") {
    // W1 = [[1, 0]], W2 = [1], x = 1, y = 0: f = 1, residual 1.
    Eigen::MatrixXd w1(1, 2);
    w1 << 1, 0;
    const ParamVector theta = ParamVector::two_layer(w1, Eigen::VectorXd::Ones(1));
    const Eigen::VectorXd g = grad_net(theta, datum(1, 0), 0.0);
    CHECK(g(0) == doctest::Approx(1.0));  // dW1[0,0] = r * W2 * x
    CHECK(g(1) == doctest::Approx(1.0));  // dW1[0,1] = r * W2 * 1
    CHECK(g(2) == doctest::Approx(1.0));  // dW2[0]   = r * a
}

TEST_CASE("grad_net: all units inactive gives a zero gradient") {
    Eigen::MatrixXd w1(2, 2);
    w1 << -1, -1, -2, -0.5;
    Eigen::VectorXd w2(2);
    w2 << 3, -4;
    const ParamVector theta = ParamVector::two_layer(w1, w2);
    const Eigen::VectorXd g = grad_net(theta, datum(1, 7.0), 0.0);
    CHECK(g.norm() == 0.0);
}

TEST_CASE("grad_net: boundary error lists the offending units") {
    Eigen::MatrixXd w1(3, 2);
    w1 << 1, -1,   // a = 0
          2, 1,    // a = 3
          0.5, -0.5;  // a = 0
    const ParamVector theta = ParamVector::two_layer(w1, Eigen::VectorXd::Ones(3));
    try {
        grad_net(theta, datum(1, 0), 1e-12);
        FAIL("expected BoundaryError");
    } catch (const BoundaryError& e) {
        REQUIRE(e.units().size() == 2);
        CHECK(e.units()[0] == 0);
        CHECK(e.units()[1] == 2);
    }
}

TEST_CASE("grad_net: matches central finite differences at random off-boundary points") {
    std::mt19937 rng(99);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int h = 3, d = 2;
    DataPoint p;
    p.x = Eigen::VectorXd(d);
    p.x << 0.8, -1.1;
    p.y = 0.7;

    int checked = 0;
    while (checked < 300) {
        Eigen::MatrixXd w1(h, d + 1);
        Eigen::VectorXd w2(h);
        for (int i = 0; i < h; ++i) {
            for (int j = 0; j <= d; ++j) w1(i, j) = gauss(rng);
            w2(i) = gauss(rng);
        }
        const ParamVector theta = ParamVector::two_layer(w1, w2);
        const Eigen::VectorXd a = preactivations(theta, p);
        if (a.cwiseAbs().minCoeff() < 1e-2) continue;
        if (std::abs(forward(theta, p) - p.y) < 1e-2) continue;
        ++checked;

        const Eigen::VectorXd g = grad_net(theta, p, 0.0);
        const Eigen::VectorXd g_fd = oracles::fd_gradient(
            [&](const Eigen::VectorXd& v) { return loss_at(p, Layout::TwoLayer, v, h, d); },
            theta.values, 1e-6 * (1.0 + theta.norm()));
        CHECK((g_fd - g).norm() / std::max(1e-12, g.norm()) <= 1e-6);
    }
}

TEST_CASE("activation_pattern: tolerance maps near-zero preactivations to 0") {
    CHECK(activation_pattern(ParamVector::one_neuron(0, 0), datum(1, 0), 0.0).signs(0) == 0);
    CHECK(activation_pattern(ParamVector::one_neuron(-1, -1), datum(1, 0), 0.1).signs(0) == -1);

    Eigen::MatrixXd w1(2, 2);
    w1 << 0.05, 0,   // a = 0.05
          -3, 0;     // a = -3
    const ParamVector net = ParamVector::two_layer(w1, Eigen::VectorXd::Ones(2));
    const ActivationPattern pat = activation_pattern(net, datum(1, 0), 0.1);
    CHECK(pat.signs(0) == 0);
    CHECK(pat.signs(1) == -1);
}

TEST_CASE("boundary_distance: point-to-hyperplane values") {
    CHECK(boundary_distance(ParamVector::one_neuron(0, 0), datum(1, 0)) == 0.0);
    CHECK(boundary_distance(ParamVector::one_neuron(0, 1), datum(0, 0)) == 1.0);
    CHECK(boundary_distance(ParamVector::one_neuron(1, 1), datum(1, 0)) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("pattern stability: constant within the boundary-distance ball") {
    const DataPoint p = datum(-1.4, 0.0);
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    int checked = 0;
    while (checked < 200) {
        const ParamVector theta = ParamVector::one_neuron(dist(rng), dist(rng));
        const double r = boundary_distance(theta, p);
        if (r < 1e-6) continue;
        ++checked;
        const ActivationPattern base = activation_pattern(theta, p, 0.0);
        for (int k = 0; k < 8; ++k) {
            const double a = angle(rng);
            const double rad = 0.99 * r;
            const ParamVector moved = ParamVector::one_neuron(theta.w() + rad * std::cos(a),
                                                              theta.b() + rad * std::sin(a));
            CHECK(activation_pattern(moved, p, 0.0).same_signs(base));
        }
    }
}

TEST_CASE("piecewise affinity: forward is affine in any single weight within a pattern") {
    DataPoint p;
    p.x = Eigen::VectorXd(2);
    p.x << 1.2, -0.4;
    p.y = 0.0;
    Eigen::MatrixXd w1(3, 3);
    w1 << 1.0, 0.5, 0.3,
          -0.7, 0.2, -0.9,
          0.4, -0.6, 1.1;
    Eigen::VectorXd w2(3);
    w2 << 1.5, -2.0, 0.5;
    const ParamVector theta = ParamVector::two_layer(w1, w2);
    const ActivationPattern base = activation_pattern(theta, p, 0.0);
    REQUIRE(!base.on_boundary());

    const double step = 1e-3;
    for (Eigen::Index idx = 0; idx < theta.size(); ++idx) {
        ParamVector t0 = theta, t1 = theta, t2 = theta;
        t1.values(idx) += step;
        t2.values(idx) += 2 * step;
        if (!activation_pattern(t2, p, 0.0).same_signs(base)) continue;
        const double f0 = forward(t0, p), f1 = forward(t1, p), f2 = forward(t2, p);
        // equal successive differences <=> affine in this coordinate
        CHECK(std::abs((f2 - f1) - (f1 - f0)) <= 1e-10 * (1.0 + std::abs(f0)));
    }
}

TEST_CASE("multi-neuron boundary: O(eps) parameter pairs produce an O(1) gradient jump") {
    // A two-layer point with one unit exactly on its boundary: stepping the
    // unit's bias by +/- eps flips its region while the parameter move is
    // O(eps); the gradient jump stays O(1).
    Eigen::MatrixXd w1(2, 2);
    w1 << 1.0, 0.0,   // a = 1 (active, stays active)
          1.0, -1.0;  // a = 0 (on the boundary)
    Eigen::VectorXd w2(2);
    w2 << 1.0, 2.0;
    const DataPoint p = datum(1.0, 3.0);

    for (double eps : {1e-3, 1e-5, 1e-7}) {
        Eigen::MatrixXd w1p = w1, w1m = w1;
        w1p(1, 1) += eps;
        w1m(1, 1) -= eps;
        const ParamVector plus = ParamVector::two_layer(w1p, w2);
        const ParamVector minus = ParamVector::two_layer(w1m, w2);
        const double sep = (plus.values - minus.values).norm();
        CHECK(sep == doctest::Approx(2 * eps));
        const double jump =
            (grad_net(plus, p, 0.0) - grad_net(minus, p, 0.0)).norm();
        CHECK(jump > 1.0);  // O(1) regardless of eps
    }
}

TEST_CASE("input dimension mismatches are layout errors") {
    const ParamVector net =
        ParamVector::two_layer(Eigen::MatrixXd::Ones(2, 3), Eigen::VectorXd::Ones(2));
    CHECK_THROWS_AS(forward(net, datum(1, 0)), LayoutError);  // needs 2 inputs, got 1
    DataPoint wide;
    wide.x = Eigen::VectorXd::Ones(3);
    wide.y = 0;
    CHECK_THROWS_AS(forward(ParamVector::one_neuron(1, 0), wide), LayoutError);
}

TEST_CASE("validate: layout and ceiling errors") {
    ParamVector bad;
    bad.layout = Layout::OneNeuron;
    bad.values = Eigen::VectorXd::Ones(3);
    CHECK_THROWS_AS(validate(bad), LayoutError);

    ParamVector nan;
    nan.layout = Layout::FrozenBias;
    nan.values = Eigen::VectorXd::Constant(1, std::nan(""));
    CHECK_THROWS_AS(validate(nan), LayoutError);

    CHECK_THROWS_AS(
        ParamVector::two_layer(Eigen::MatrixXd::Ones(9, 2), Eigen::VectorXd::Ones(9)),
        LayoutError);
    CHECK_THROWS_AS(
        ParamVector::two_layer(Eigen::MatrixXd::Ones(1, 10), Eigen::VectorXd::Ones(1)),
        LayoutError);
}
