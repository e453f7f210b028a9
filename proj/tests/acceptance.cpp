// Acceptance suite: one pass/fail line per criterion, exit status = number of
// failed criteria. Every tolerance is pinned in code.

#include "experiment.hpp"
#include "probe.hpp"
#include "surrogate.hpp"

#include "oracles.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

using namespace relukink;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void criterion(const std::string& name, bool pass, const std::string& detail = "") {
    std::printf("[%s] %s%s%s\n", pass ? "PASS" : "FAIL", name.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!pass) ++g_failures;
}

fs::path fresh_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("relukink_acceptance_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// --- 1: gradient-jump ratio divergence ---------------------------------------

void criterion_1_gradient_jump() {
    const DataPoint p = DataPoint::scalar(1.0, 1.0);
    const ParamVector theta0 = boundary_point(p, 0.0);
    const std::vector<double> grid = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
    const SweepResult sweep = epsilon_sweep(p, theta0, grid, 0.0);

    double max_rel = 0.0;
    for (const RatioSample& s : sweep.samples) {
        const double expect = std::abs(s.epsilon * 2.0 - 1.0) / (2.0 * s.epsilon);
        max_rel = std::max(max_rel, std::abs(s.numeric_ratio - expect) / expect);
    }
    criterion("1a gradient-jump ratio matches the closed form at 1e-9 relative",
              max_rel <= 1e-9, "max relative error " + format_full(max_rel));

    const double slope = sweep.loglog_slope.value_or(0.0);
    criterion("1b log-log slope of ratio vs epsilon is -1.00 +/- 0.01",
              sweep.loglog_slope && std::abs(slope + 1.0) <= 0.01,
              "slope " + format_full(slope));

    const double etr = sweep.eps_times_ratio.back();
    criterion("1c eps * ratio at eps = 1e-6 equals 0.5 +/- 1e-5", std::abs(etr - 0.5) <= 1e-5,
              "eps * ratio " + format_full(etr));
}

// --- 2: flat-region exactness -------------------------------------------------

void criterion_2_flat_region() {
    const DataPoint p = DataPoint::scalar(1.0, 0.7);
    const double expected_loss = 0.5 * p.y * p.y;
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> dist(-5.0, 5.0);
    int checked = 0;
    bool ok = true;
    while (checked < 10000) {
        const ParamVector theta = ParamVector::one_neuron(dist(rng), dist(rng));
        if (!(preactivation(theta, p) < 0)) continue;
        ++checked;
        const OneNeuronGrad g = grad_one_neuron(theta, p, 0.0);
        if (g.grad(0) != 0.0 || g.grad(1) != 0.0) ok = false;
        if (loss(theta, p) != expected_loss) ok = false;
    }
    criterion("2  flat region: 10000 points give exactly zero gradient and loss y^2/2", ok);
}

// --- 3: surrogate smoothness constants diverge --------------------------------

void criterion_3_surrogate_divergence() {
    const DataPoint p = DataPoint::scalar(1.0, 1.0);
    const std::vector<double> betas = {10.0, 100.0, 1000.0};
    const auto sweep = smoothness_divergence_sweep(p, betas);

    bool values_ok = true;
    std::string detail;
    for (const auto& est : sweep) {
        const double expect = std::abs(std::log(2.0) / est.beta - 1.0) * (est.beta / 4.0) * 2.0;
        if (std::abs(est.l_lower - expect) > 1e-3 * expect) values_ok = false;
        detail += format_full(est.l_lower) + " ";
    }
    criterion("3a L_lower matches |ln2/beta - 1|(beta/4)||(x,1)||^2 at 1e-3 relative", values_ok,
              detail);
    criterion("3b L_lower strictly increasing",
              sweep[0].l_lower < sweep[1].l_lower && sweep[1].l_lower < sweep[2].l_lower);
    const double decade = sweep[2].l_lower / sweep[1].l_lower;
    criterion("3c decade ratio within [9.5, 10.5]", decade >= 9.5 && decade <= 10.5,
              "L_lower(1000)/L_lower(100) = " + format_full(decade));
}

// --- 4: rank-one Hessian identity and finite differences ----------------------

void criterion_4_hessian_identity() {
    const DataPoint p = DataPoint::scalar(1.0, 1.0);
    const double v2 = 2.0;
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> wdist(-1.5, 1.5);
    std::uniform_real_distribution<double> logbeta(0.0, std::log(8.0));

    int checked = 0;
    bool identity_ok = true, fd_ok = true;
    double worst_identity = 0.0, worst_fd = 0.0;
    while (checked < 1000) {
        const SurrogateActivation act = SurrogateActivation::softplus(std::exp(logbeta(rng)));
        const ParamVector theta = ParamVector::one_neuron(wdist(rng), wdist(rng));
        const Eigen::Matrix2d hess = surrogate_hessian(theta, p, act);
        if (hess.norm() < 0.5) continue;  // keep the finite-difference check well posed
        ++checked;

        const double norm = operator_norm(hess);
        const double scalar = surrogate_hessian_scalar(theta, p, act);
        const double rel_id = std::abs(norm - std::abs(scalar) * v2) /
                              std::max(std::abs(scalar) * v2, 1e-300);
        worst_identity = std::max(worst_identity, rel_id);
        if (rel_id > 1e-12) identity_ok = false;

        const Eigen::MatrixXd h_fd = oracles::fd_hessian(
            [&](const Eigen::VectorXd& v) {
                const double s = v(0) * p.x0() + v(1);
                const double r = act(s).value - p.y;
                return 0.5 * r * r;
            },
            theta.values, 1e-4);
        const double rel_fd = (h_fd - Eigen::MatrixXd(hess)).norm() / hess.norm();
        worst_fd = std::max(worst_fd, rel_fd);
        if (rel_fd > 1e-5) fd_ok = false;
    }
    criterion("4a operator norm equals |scalar| * ||(x,1)||^2 at 1e-12 relative (1000 points)",
              identity_ok, "worst " + format_full(worst_identity));
    criterion("4b analytic Hessian matches finite differences at 1e-5 relative", fd_ok,
              "worst " + format_full(worst_fd));
}

// --- 5: region certificates and contraction -----------------------------------

void criterion_5_clarke() {
    const DataPoint p = DataPoint::scalar(1.0, 1.0);
    const UpdateMap map = UpdateMap::make(0.4, p, Layout::OneNeuron);
    const RegionSpec region = RegionSpec::half_space(Layout::OneNeuron, true, 0.1);
    const RhoCertificate cert = rho_over_region(map, region, SamplerSpec{1000, 0});
    const double closed = std::max(1.0, std::abs(1.0 - 0.4 * 2.0));
    criterion("5a one-neuron positive region: rho = 1.0 exactly (closed form)",
              cert.rho == 1.0 && cert.rho == closed && cert.closed_form_used,
              "rho " + format_full(cert.rho));

    const DataPoint p0 = DataPoint::scalar(1.0, 0.0);
    const RegionSpec wregion = RegionSpec::half_space(Layout::FrozenBias, true, 0.1);
    const DivergenceReport report =
        paired_divergence(ParamVector::frozen_bias(2.0), ParamVector::frozen_bias(3.0), p0, 0.5,
                          40, wregion, 0.5, 0.0);
    bool geometric = report.separations.size() == 41 && !report.first_violation;
    double power = 1.0;
    for (std::size_t t = 0; t < report.separations.size(); ++t) {
        if (std::abs(report.separations[t] - power) > 1e-12) geometric = false;
        power *= 0.5;
    }
    criterion("5b frozen-bias pair separates exactly like 0.5^t for 40 steps", geometric);

    std::mt19937 rng(99);
    std::uniform_real_distribution<double> dist(-4.0, 4.0);
    int checked = 0, violations = 0;
    while (checked < 1000) {
        const ParamVector a = ParamVector::one_neuron(dist(rng), dist(rng));
        const ParamVector b = ParamVector::one_neuron(dist(rng), dist(rng));
        if (!region_contains(region, a, p) || !region_contains(region, b, p)) continue;
        if ((a.values.array() == b.values.array()).all()) continue;
        ++checked;
        if (!check_update_lipschitz(map, a, b, cert.rho).pass) ++violations;
    }
    criterion("5c 1000 same-region pairs satisfy the certified one-step bound", violations == 0,
              std::to_string(violations) + " violations");
}

// --- 6: crossing obstruction, reported as inapplicable ------------------------

void criterion_6_crossing_fixture() {
    const fs::path dir = fresh_dir("crossing");
    const ExperimentConfig cfg =
        load_config_file(fs::path(RELUKINK_CONFIG_DIR) / "perturb_crossing.ini");
    const RunResult result = run_experiment(cfg, dir, OutputFormat::Both);

    const double step1 =
        result.summary["headline"]["step1_separation_ratio"].get<double>();
    const std::string status = result.summary["headline"]["bound_status"].get<std::string>();
    criterion("6a crossing fixture: step-1 separation ratio exceeds 1", step1 > 1.0,
              "ratio " + format_full(step1));
    criterion("6b crossing fixture: bound marked inapplicable, never violated",
              result.pass && status == "inapplicable" &&
                  result.summary["headline"]["first_violation"].is_null(),
              "status " + status);

    // same-region pairs at rho = 1 stay within the bound (the obstruction is
    // only ever across the boundary)
    const DataPoint p = DataPoint::scalar(cfg.x, cfg.y);
    const UpdateMap map = UpdateMap::make(cfg.eta, p, Layout::OneNeuron);
    const RegionSpec region = RegionSpec::half_space(Layout::OneNeuron, true, cfg.delta);
    std::mt19937 rng(123);
    std::uniform_real_distribution<double> dist(-3.0, 3.0);
    int checked = 0, violations = 0;
    while (checked < 1000) {
        const ParamVector a = ParamVector::one_neuron(dist(rng), dist(rng));
        const ParamVector b = ParamVector::one_neuron(dist(rng), dist(rng));
        if (!region_contains(region, a, p) || !region_contains(region, b, p)) continue;
        if ((a.values.array() == b.values.array()).all()) continue;
        ++checked;
        if (!check_update_lipschitz(map, a, b, 1.0).pass) ++violations;
    }
    criterion("6c every same-region pair respects rho = 1", violations == 0);
}

// --- 7: analytic gradients against finite differences -------------------------

void criterion_7_gradient_oracles() {
    // one-neuron
    {
        const DataPoint p = DataPoint::scalar(1.0, 1.0);
        std::mt19937 rng(1001);
        std::uniform_real_distribution<double> dist(-3.0, 3.0);
        int checked = 0;
        bool ok = true;
        while (checked < 1000) {
            const ParamVector theta = ParamVector::one_neuron(dist(rng), dist(rng));
            const double s = preactivation(theta, p);
            if (std::abs(s) < 1e-2) continue;
            if (s > 0 && std::abs(s - p.y) < 1e-2) continue;
            ++checked;
            const Eigen::Vector2d g = grad_one_neuron(theta, p, 0.0).grad;
            const Eigen::VectorXd g_fd = oracles::fd_gradient(
                [&](const Eigen::VectorXd& v) {
                    ParamVector t = theta;
                    t.values = v;
                    return loss(t, p);
                },
                theta.values, 1e-6 * (1.0 + theta.norm()));
            if (g.norm() == 0.0) {
                if (g_fd.norm() != 0.0) ok = false;
            } else if ((g_fd - Eigen::VectorXd(g)).norm() / g.norm() > 1e-6) {
                ok = false;
            }
        }
        criterion("7a one-neuron gradient matches finite differences (1000 points, 1e-6)", ok);
    }

    // two-layer
    {
        DataPoint p;
        p.x = Eigen::VectorXd(2);
        p.x << 0.8, -1.1;
        p.y = 0.7;
        std::mt19937 rng(1002);
        std::normal_distribution<double> gauss(0.0, 1.0);
        int checked = 0;
        bool ok = true;
        while (checked < 1000) {
            Eigen::MatrixXd w1(3, 3);
            Eigen::VectorXd w2(3);
            for (int i = 0; i < 3; ++i) {
                for (int j = 0; j < 3; ++j) w1(i, j) = gauss(rng);
                w2(i) = gauss(rng);
            }
            const ParamVector theta = ParamVector::two_layer(w1, w2);
            if (preactivations(theta, p).cwiseAbs().minCoeff() < 1e-2) continue;
            if (std::abs(forward(theta, p) - p.y) < 1e-2) continue;
            ++checked;
            const Eigen::VectorXd g = grad_net(theta, p, 0.0);
            const Eigen::VectorXd g_fd = oracles::fd_gradient(
                [&](const Eigen::VectorXd& v) {
                    ParamVector t = theta;
                    t.values = v;
                    return loss(t, p);
                },
                theta.values, 1e-6 * (1.0 + theta.norm()));
            if ((g_fd - g).norm() / std::max(g.norm(), 1e-12) > 1e-6) ok = false;
        }
        criterion("7b two-layer gradient matches finite differences (1000 points, 1e-6)", ok);
    }

    // surrogate
    {
        const DataPoint p = DataPoint::scalar(1.3, 0.8);
        std::mt19937 rng(1003);
        std::uniform_real_distribution<double> dist(-2.0, 2.0);
        std::uniform_real_distribution<double> betadist(1.0, 16.0);
        int checked = 0;
        bool ok = true;
        while (checked < 1000) {
            const SurrogateActivation act = SurrogateActivation::softplus(betadist(rng));
            const ParamVector theta = ParamVector::one_neuron(dist(rng), dist(rng));
            const Eigen::Vector2d g = surrogate_grad(theta, p, act);
            if (g.norm() < 1e-2) continue;
            ++checked;
            const Eigen::VectorXd g_fd = oracles::fd_gradient(
                [&](const Eigen::VectorXd& v) {
                    const double s = v(0) * p.x0() + v(1);
                    const double r = act(s).value - p.y;
                    return 0.5 * r * r;
                },
                theta.values, 1e-6);
            if ((g_fd - Eigen::VectorXd(g)).norm() / g.norm() > 1e-6) ok = false;
        }
        criterion("7c surrogate gradient matches finite differences (1000 points, 1e-6)", ok);
    }
}

// --- 8: byte-identical reruns of every shipped config -------------------------

void criterion_8_determinism() {
    const char* names[] = {"lipschitz_default.ini", "surrogate_default.ini",
                           "rho_one_neuron.ini",    "rho_frozen_bias.ini",
                           "perturb_contraction.ini", "perturb_crossing.ini"};
    bool ok = true;
    std::string detail;
    int idx = 0;
    for (const char* name : names) {
        const ExperimentConfig cfg =
            load_config_file(fs::path(RELUKINK_CONFIG_DIR) / name);
        const fs::path a = fresh_dir("repro_a_" + std::to_string(idx));
        const fs::path b = fresh_dir("repro_b_" + std::to_string(idx));
        ++idx;
        const RunResult ra = run_experiment(cfg, a, OutputFormat::Both);
        const RunResult rb = run_experiment(cfg, b, OutputFormat::Both);
        if (ra.files_written != rb.files_written) {
            ok = false;
            detail += std::string(name) + " (file lists differ) ";
            continue;
        }
        for (const std::string& f : ra.files_written) {
            if (read_text_file(a / f) != read_text_file(b / f)) {
                ok = false;
                detail += std::string(name) + "/" + f + " ";
            }
        }
    }
    criterion("8  re-running every shipped config yields byte-identical outputs", ok, detail);
}

}  // namespace

int main() {
    criterion_1_gradient_jump();
    criterion_2_flat_region();
    criterion_3_surrogate_divergence();
    criterion_4_hessian_identity();
    criterion_5_clarke();
    criterion_6_crossing_fixture();
    criterion_7_gradient_oracles();
    criterion_8_determinism();

    std::printf("%s: %d criterion failure%s\n", g_failures ? "FAIL" : "OK", g_failures,
                g_failures == 1 ? "" : "s");
    return g_failures;
}
