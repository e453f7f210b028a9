#include "clarke.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace relukink {

UpdateMap UpdateMap::make(double eta, const DataPoint& datum, Layout layout) {
    if (!(eta > 0.0) || !std::isfinite(eta))
        throw ArgumentError("UpdateMap: step size eta must be positive and finite");
    UpdateMap map;
    map.eta = eta;
    map.datum = datum;
    map.layout = layout;
    return map;
}

ParamVector apply_update(const UpdateMap& map, const ParamVector& theta, double tau) {
    if (theta.layout != map.layout)
        throw LayoutError("apply_update: parameter layout does not match the update map");
    ParamVector next = theta;
    next.values = theta.values - map.eta * gradient(theta, map.datum, tau);
    return next;
}

// -----------------------------------------------------------------------------
// Limiting Jacobians
// -----------------------------------------------------------------------------

/// Jacobian of T = theta - eta*grad within a fixed activation pattern.
/// Within the pattern the model is linear in each layer, so the loss Hessian
/// is grad_f grad_f^T + residual * cross_terms(f) in closed form.
static Eigen::MatrixXd fixed_pattern_jacobian(const UpdateMap& map, const ParamVector& theta,
                                              const Eigen::VectorXd& a,
                                              const std::vector<int>& gates) {
    const Eigen::Index n = theta.size();
    switch (theta.layout) {
        case Layout::OneNeuron: {
            if (!gates[0]) return Eigen::MatrixXd::Identity(2, 2);
            const Eigen::Vector2d v(map.datum.x0(), 1.0);
            return Eigen::MatrixXd(Eigen::Matrix2d::Identity() - map.eta * (v * v.transpose()));
        }
        case Layout::FrozenBias: {
            const double x = map.datum.x0();
            const double j = gates[0] ? 1.0 - map.eta * x * x : 1.0;
            return Eigen::MatrixXd::Constant(1, 1, j);
        }
        case Layout::TwoLayer: {
            const Eigen::VectorXd xa = augmented_input(map.datum);
            const Eigen::VectorXd w2 = theta.w2();
            const int h = theta.hidden;
            const int cols = theta.inputs + 1;

            Eigen::VectorXd gf = Eigen::VectorXd::Zero(n);
            double f = 0.0;
            for (int i = 0; i < h; ++i) {
                if (!gates[i]) continue;
                f += w2(i) * a(i);
                gf.segment(Eigen::Index(i) * cols, cols) = w2(i) * xa;
                gf(Eigen::Index(h) * cols + i) = a(i);
            }
            const double r = f - map.datum.y;

            Eigen::MatrixXd hess = gf * gf.transpose();
            for (int i = 0; i < h; ++i) {
                if (!gates[i]) continue;
                const Eigen::Index row2 = Eigen::Index(h) * cols + i;
                for (int j = 0; j < cols; ++j) {
                    const Eigen::Index row1 = Eigen::Index(i) * cols + j;
                    hess(row1, row2) += r * xa(j);
                    hess(row2, row1) += r * xa(j);
                }
            }
            return Eigen::MatrixXd::Identity(n, n) - map.eta * hess;
        }
    }
    throw LayoutError("fixed_pattern_jacobian: unknown layout");
}

GeneralizedJacobianSet limiting_jacobians(const UpdateMap& map, const ParamVector& theta,
                                          double tau) {
    if (theta.layout != map.layout)
        throw LayoutError("limiting_jacobians: parameter layout does not match the update map");
    if (tau < 0) throw ArgumentError("limiting_jacobians: tau must be nonnegative");

    const Eigen::VectorXd a = preactivations(theta, map.datum);
    const int units = theta.units();

    std::vector<int> boundary_units;
    std::vector<int> base_gates(units, 0);
    for (int i = 0; i < units; ++i) {
        if (std::abs(a(i)) <= tau) boundary_units.push_back(i);
        else base_gates[i] = a(i) > 0 ? 1 : 0;
    }
    if (boundary_units.size() > 20)
        throw NumericError("limiting_jacobians: more than 20 near-boundary units; pattern "
                           "enumeration refused");

    GeneralizedJacobianSet set;
    set.point = theta;
    set.tau = tau;
    const std::size_t combos = std::size_t(1) << boundary_units.size();
    set.jacobians.reserve(combos);
    for (std::size_t mask = 0; mask < combos; ++mask) {
        std::vector<int> gates = base_gates;
        for (std::size_t bit = 0; bit < boundary_units.size(); ++bit)
            gates[boundary_units[bit]] = (mask >> bit) & 1;
        set.jacobians.push_back(fixed_pattern_jacobian(map, theta, a, gates));
    }

    set.max_norm = 0.0;
    for (const auto& j : set.jacobians) set.max_norm = std::max(set.max_norm, operator_norm(j));
    return set;
}

// -----------------------------------------------------------------------------
// Operator norm
// -----------------------------------------------------------------------------

double operator_norm(const Eigen::MatrixXd& m) {
    if (m.size() == 0) throw ArgumentError("operator_norm: empty matrix");
    if (!m.allFinite()) throw ArgumentError("operator_norm: entries must be finite");
    if (std::max(m.rows(), m.cols()) > 100)
        throw ArgumentError("operator_norm: dimension must be <= 100");

    const Eigen::MatrixXd a = m.transpose() * m;  // PSD
    const Eigen::Index n = a.rows();

    double best = 0.0;
    // All-ones first, then each basis vector: the dominant eigenvector cannot
    // be orthogonal to every start, so the max over starts is the dominant
    // eigenvalue even when one start happens to sit in a minor eigenspace.
    for (Eigen::Index start = -1; start < n; ++start) {
        Eigen::VectorXd v = start < 0 ? Eigen::VectorXd::Ones(n).normalized()
                                      : Eigen::VectorXd(Eigen::VectorXd::Unit(n, start));
        double lambda = 0.0;
        double prev = -1.0;
        bool converged = false;
        for (int it = 0; it < 10000; ++it) {
            const Eigen::VectorXd w = a * v;
            lambda = v.dot(w);  // Rayleigh quotient, ||v|| = 1
            const double wn = w.norm();
            if (wn == 0.0) {
                lambda = 0.0;
                converged = true;
                break;
            }
            if (it > 0 && std::abs(lambda - prev) <=
                              1e-12 * std::max(lambda, std::numeric_limits<double>::min())) {
                converged = true;
                break;
            }
            prev = lambda;
            v = w / wn;
        }
        if (!converged)
            throw NumericError("operator_norm: power iteration did not converge in 10000 "
                               "iterations (last gap " +
                               std::to_string(std::abs(lambda - prev)) + ")");
        best = std::max(best, lambda);
    }
    return std::sqrt(std::max(0.0, best));
}

// -----------------------------------------------------------------------------
// Regions and certificates
// -----------------------------------------------------------------------------

RegionSpec RegionSpec::half_space(Layout layout, bool positive, double delta, double span) {
    if (layout == Layout::TwoLayer)
        throw ArgumentError("RegionSpec: half-space regions are for scalar layouts; "
                            "use pattern_fixed for two_layer");
    if (!(delta > 0.0)) throw ArgumentError("RegionSpec: margin delta must be positive");
    if (!(span > 0.0)) throw ArgumentError("RegionSpec: sampling span must be positive");
    RegionSpec r;
    r.kind = positive ? Kind::HalfSpacePositive : Kind::HalfSpaceNegative;
    r.layout = layout;
    r.delta = delta;
    r.span = span;
    return r;
}

RegionSpec RegionSpec::pattern_fixed(const ParamVector& anchor, const ActivationPattern& pattern,
                                     double delta, double span) {
    if (anchor.layout != Layout::TwoLayer)
        throw ArgumentError("RegionSpec: pattern_fixed requires a two_layer anchor");
    if (!(delta > 0.0)) throw ArgumentError("RegionSpec: margin delta must be positive");
    if (!(span > 0.0)) throw ArgumentError("RegionSpec: sampling span must be positive");
    if (pattern.signs.size() != anchor.hidden)
        throw ArgumentError("RegionSpec: pattern length must equal the hidden width");
    if ((pattern.signs.array() == 0).any())
        throw ArgumentError("RegionSpec: pattern_fixed requires a pattern without zeros");
    RegionSpec r;
    r.kind = Kind::PatternFixed;
    r.layout = Layout::TwoLayer;
    r.delta = delta;
    r.span = span;
    r.pattern = pattern;
    r.anchor = anchor;
    return r;
}

bool region_contains(const RegionSpec& region, const ParamVector& theta, const DataPoint& p) {
    if (theta.layout != region.layout) return false;
    switch (region.kind) {
        case RegionSpec::Kind::HalfSpacePositive:
            return preactivation(theta, p) >= region.delta;
        case RegionSpec::Kind::HalfSpaceNegative:
            return preactivation(theta, p) <= -region.delta;
        case RegionSpec::Kind::PatternFixed: {
            const ParamVector& anchor = *region.anchor;
            if (theta.hidden != anchor.hidden || theta.inputs != anchor.inputs) return false;
            const Eigen::VectorXd a = preactivations(theta, p);
            for (int i = 0; i < theta.hidden; ++i)
                if (!(region.pattern.signs(i) * a(i) >= region.delta)) return false;
            const Eigen::Index nw1 = Eigen::Index(theta.hidden) * (theta.inputs + 1);
            if (((theta.values.head(nw1) - anchor.values.head(nw1)).cwiseAbs().array() >
                 region.span)
                    .any())
                return false;
            return (theta.values.tail(theta.hidden).array() ==
                    anchor.values.tail(theta.hidden).array())
                .all();
        }
    }
    return false;
}

double halton(std::uint64_t index, std::uint32_t base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * double(index % base);
        index /= base;
    }
    return r;
}

static std::uint32_t nth_prime(std::size_t n) {
    static std::vector<std::uint32_t> primes = {2, 3};
    while (primes.size() <= n) {
        std::uint32_t c = primes.back() + 2;
        for (;; c += 2) {
            bool ok = true;
            for (std::uint32_t q : primes) {
                if (q * q > c) break;
                if (c % q == 0) {
                    ok = false;
                    break;
                }
            }
            if (ok) break;
        }
        primes.push_back(c);
    }
    return primes[n];
}

/// Candidate sample for the given sequence index. Half-space candidates are
/// region members by construction; pattern candidates may miss and get
/// filtered by the caller.
static ParamVector region_candidate(const RegionSpec& region, const DataPoint& p,
                                    std::uint64_t index) {
    const double sgn = region.kind == RegionSpec::Kind::HalfSpaceNegative ? -1.0 : 1.0;
    switch (region.layout) {
        case Layout::OneNeuron: {
            const double u1 = halton(index + 1, 2);
            const double u2 = halton(index + 1, 3);
            const double s_target = sgn * (region.delta + u1 * region.span);
            const double x = p.x0();
            const Eigen::Vector2d v(x, 1.0);
            const Eigen::Vector2d tangent(1.0, -x);
            const Eigen::Vector2d theta = (s_target / v.squaredNorm()) * v +
                                          ((2.0 * u2 - 1.0) * region.span / tangent.norm()) *
                                              tangent;
            return ParamVector::one_neuron(theta(0), theta(1));
        }
        case Layout::FrozenBias: {
            const double u1 = halton(index + 1, 2);
            const double s_target = sgn * (region.delta + u1 * region.span);
            return ParamVector::frozen_bias(s_target / p.x0());
        }
        case Layout::TwoLayer: {
            const ParamVector& anchor = *region.anchor;
            ParamVector theta = anchor;
            const Eigen::Index nw1 = Eigen::Index(anchor.hidden) * (anchor.inputs + 1);
            for (Eigen::Index j = 0; j < nw1; ++j)
                theta.values(j) =
                    anchor.values(j) +
                    (2.0 * halton(index + 1, nth_prime(std::size_t(j))) - 1.0) * region.span;
            return theta;
        }
    }
    throw LayoutError("region_candidate: unknown layout");
}

double rho_closed_form(const UpdateMap& map, const RegionSpec& region) {
    if (region.kind == RegionSpec::Kind::HalfSpaceNegative) return 1.0;
    if (region.kind == RegionSpec::Kind::HalfSpacePositive) {
        const double x = map.datum.x0();
        if (region.layout == Layout::OneNeuron)
            return std::max(1.0, std::abs(1.0 - map.eta * (x * x + 1.0)));
        if (region.layout == Layout::FrozenBias) return std::abs(1.0 - map.eta * x * x);
    }
    throw ArgumentError("rho_closed_form: no closed form for this region");
}

RhoCertificate rho_over_region(const UpdateMap& map, const RegionSpec& region,
                               const SamplerSpec& sampler) {
    if (sampler.count < 1) throw ArgumentError("rho_over_region: sample count must be >= 1");
    if (region.layout != map.layout)
        throw LayoutError("rho_over_region: region layout does not match the update map");

    RhoCertificate cert;
    cert.region = region;
    cert.eta = map.eta;

    double max_norm = -1.0;
    int accepted = 0;
    const std::uint64_t budget =
        region.kind == RegionSpec::Kind::PatternFixed ? 100ull * sampler.count + 100 : sampler.count;
    for (std::uint64_t i = 0; i < budget && accepted < sampler.count; ++i) {
        const ParamVector theta = region_candidate(region, map.datum, sampler.offset + i);
        if (region.kind == RegionSpec::Kind::PatternFixed &&
            !region_contains(region, theta, map.datum))
            continue;
        const GeneralizedJacobianSet set = limiting_jacobians(map, theta, 0.0);
        ++accepted;
        if (set.max_norm > max_norm) {
            max_norm = set.max_norm;
            cert.worst_point = theta;
        }
    }
    if (accepted == 0)
        throw RegionError("rho_over_region: no region point found within the sampling box; "
                          "the region appears empty");
    cert.sample_count = accepted;
    cert.sampled_max = max_norm;

    if (region.kind == RegionSpec::Kind::PatternFixed) {
        cert.rho = max_norm;
        cert.closed_form_used = false;
        return cert;
    }

    // Scalar-layout half-spaces have a constant Jacobian on the region, so the
    // closed form is exact and the samples are a crosscheck.
    cert.rho = rho_closed_form(map, region);
    cert.closed_form_used = true;
    if (std::abs(max_norm - cert.rho) > 1e-12 * std::max(1.0, cert.rho))
        throw NumericError("rho_over_region: sampled norms deviate from the closed form");
    return cert;
}

LipschitzCheckReport check_update_lipschitz(const UpdateMap& map, const ParamVector& theta,
                                            const ParamVector& theta_prime, double rho) {
    if (theta.layout != theta_prime.layout || theta.size() != theta_prime.size())
        throw LayoutError("check_update_lipschitz: mismatched parameter layouts");
    if ((theta.values.array() == theta_prime.values.array()).all())
        throw ArgumentError("check_update_lipschitz: degenerate pair (theta == theta')");

    const ParamVector ta = apply_update(map, theta, default_tau(theta));
    const ParamVector tb = apply_update(map, theta_prime, default_tau(theta_prime));

    LipschitzCheckReport report;
    report.rho = rho;
    report.ratio = (ta.values - tb.values).norm() / (theta.values - theta_prime.values).norm();
    report.pass = report.ratio <= rho + 1e-12;

    const ActivationPattern pa = activation_pattern(theta, map.datum, 0.0);
    const ActivationPattern pb = activation_pattern(theta_prime, map.datum, 0.0);
    report.crossed_boundary = !pa.same_signs(pb);
    return report;
}

}  // namespace relukink
