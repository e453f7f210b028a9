#include "experiment.hpp"

#include "probe.hpp"
#include "surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>

namespace relukink {

namespace fs = std::filesystem;

const char* experiment_kind_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::LipschitzSweep: return "lipschitz_sweep";
        case ExperimentKind::SurrogateSweep: return "surrogate_sweep";
        case ExperimentKind::RhoCertificate: return "rho_certificate";
        case ExperimentKind::TrajectoryPerturb: return "trajectory_perturb";
    }
    return "unknown";
}

OutputFormat parse_output_format(const std::string& text) {
    if (text == "csv") return OutputFormat::Csv;
    if (text == "json") return OutputFormat::Json;
    if (text == "both") return OutputFormat::Both;
    throw ArgumentError("unknown output format '" + text + "' (expected csv, json, or both)");
}

// -----------------------------------------------------------------------------
// Config parsing
// -----------------------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::optional<double> parse_double_text(const std::string& s) {
    if (s.empty()) return std::nullopt;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) return std::nullopt;
    if (!std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<long long> parse_int_text(const std::string& s) {
    if (s.empty()) return std::nullopt;
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (end != s.c_str() + s.size()) return std::nullopt;
    return v;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, ',')) out.push_back(trim(cur));
    return out;
}

struct KeySpec {
    const char* name;
    bool required;
};

const std::vector<KeySpec>& schema_for(ExperimentKind kind) {
    static const std::vector<KeySpec> lipschitz = {
        {"x", true}, {"y", true}, {"anchor_t", false}, {"epsilons", false}, {"tau", false}};
    static const std::vector<KeySpec> surrogate = {{"x", true}, {"y", true}, {"betas", false}};
    static const std::vector<KeySpec> rho = {{"x", true},     {"y", true},    {"eta", true},
                                             {"layout", false}, {"region", false}, {"delta", false},
                                             {"span", false},   {"samples", false}, {"seed", false}};
    static const std::vector<KeySpec> perturb = {
        {"x", true},          {"y", true},           {"eta", true},    {"steps", false},
        {"layout", false},    {"theta0", true},      {"theta0_prime", true},
        {"region", false},    {"delta", false},      {"rho", false},
        {"policy", false},    {"tau", false}};
    switch (kind) {
        case ExperimentKind::LipschitzSweep: return lipschitz;
        case ExperimentKind::SurrogateSweep: return surrogate;
        case ExperimentKind::RhoCertificate: return rho;
        case ExperimentKind::TrajectoryPerturb: return perturb;
    }
    return lipschitz;
}

std::optional<ExperimentKind> kind_from_name(const std::string& name) {
    if (name == "lipschitz_sweep") return ExperimentKind::LipschitzSweep;
    if (name == "surrogate_sweep") return ExperimentKind::SurrogateSweep;
    if (name == "rho_certificate") return ExperimentKind::RhoCertificate;
    if (name == "trajectory_perturb") return ExperimentKind::TrajectoryPerturb;
    return std::nullopt;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    std::vector<std::string> issues;
    std::optional<std::string> section;
    std::vector<std::pair<std::string, std::string>> entries;
    std::set<std::string> seen;

    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                issues.push_back("line " + std::to_string(line_no) + ": unterminated section header");
                continue;
            }
            const std::string name = trim(line.substr(1, line.size() - 2));
            if (section)
                issues.push_back("line " + std::to_string(line_no) +
                                 ": multiple sections; one experiment per config");
            else
                section = name;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            issues.push_back("line " + std::to_string(line_no) + ": expected 'key = value'");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            issues.push_back("line " + std::to_string(line_no) + ": empty key");
            continue;
        }
        if (!section) {
            issues.push_back("line " + std::to_string(line_no) + ": key '" + key +
                             "' appears before the experiment section header");
            continue;
        }
        if (!seen.insert(key).second) {
            issues.push_back("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
            continue;
        }
        entries.emplace_back(key, value);
    }

    std::optional<ExperimentKind> kind;
    if (!section) {
        issues.push_back("missing experiment section header, e.g. [lipschitz_sweep]");
    } else {
        kind = kind_from_name(*section);
        if (!kind)
            issues.push_back("unknown experiment kind '" + *section +
                             "' (expected lipschitz_sweep, surrogate_sweep, rho_certificate, or "
                             "trajectory_perturb)");
    }
    if (!kind) throw ConfigError(issues);

    ExperimentConfig cfg;
    cfg.kind = *kind;
    cfg.epsilons = default_epsilon_grid();
    cfg.betas = default_beta_grid();
    const std::string kind_name = experiment_kind_name(cfg.kind);

    const auto& schema = schema_for(cfg.kind);
    auto known = [&](const std::string& key) {
        return std::any_of(schema.begin(), schema.end(),
                           [&](const KeySpec& k) { return key == k.name; });
    };

    auto bad_value = [&](const std::string& key, const std::string& value,
                         const std::string& want) {
        issues.push_back("key '" + key + "': cannot parse '" + value + "' as " + want);
    };
    auto get_double = [&](const std::string& key, const std::string& value, double& out) {
        if (auto v = parse_double_text(value)) out = *v;
        else bad_value(key, value, "a number");
    };
    auto get_list = [&](const std::string& key, const std::string& value,
                        std::vector<double>& out) {
        std::vector<double> vals;
        for (const std::string& item : split_list(value)) {
            if (auto v = parse_double_text(item)) vals.push_back(*v);
            else {
                bad_value(key, value, "a comma-separated number list");
                return;
            }
        }
        if (vals.empty()) bad_value(key, value, "a nonempty number list");
        else out = std::move(vals);
    };

    for (const auto& [key, value] : entries) {
        if (!known(key)) {
            issues.push_back("unknown key '" + key + "' for experiment kind '" + kind_name + "'");
            continue;
        }
        if (key == "x") get_double(key, value, cfg.x);
        else if (key == "y") get_double(key, value, cfg.y);
        else if (key == "anchor_t") get_double(key, value, cfg.anchor_t);
        else if (key == "epsilons") get_list(key, value, cfg.epsilons);
        else if (key == "betas") get_list(key, value, cfg.betas);
        else if (key == "eta") get_double(key, value, cfg.eta);
        else if (key == "delta") get_double(key, value, cfg.delta);
        else if (key == "span") get_double(key, value, cfg.span);
        else if (key == "theta0") get_list(key, value, cfg.theta0);
        else if (key == "theta0_prime") get_list(key, value, cfg.theta0_prime);
        else if (key == "tau") {
            double v = 0;
            get_double(key, value, v);
            cfg.tau = v;
        } else if (key == "rho") {
            double v = 0;
            get_double(key, value, v);
            cfg.rho = v;
        } else if (key == "samples") {
            if (auto v = parse_int_text(value); v && *v >= 1) cfg.samples = int(*v);
            else bad_value(key, value, "a positive integer");
        } else if (key == "steps") {
            if (auto v = parse_int_text(value); v && *v >= 0) cfg.steps = int(*v);
            else bad_value(key, value, "a nonnegative integer");
        } else if (key == "seed") {
            if (auto v = parse_int_text(value); v && *v >= 0) cfg.seed = std::uint64_t(*v);
            else bad_value(key, value, "a nonnegative integer");
        } else if (key == "layout") {
            if (value == "one_neuron") cfg.layout = Layout::OneNeuron;
            else if (value == "frozen_bias") cfg.layout = Layout::FrozenBias;
            else
                issues.push_back("key 'layout': expected one_neuron or frozen_bias, got '" +
                                 value + "'");
        } else if (key == "region") {
            if (value == "positive") cfg.region_positive = true;
            else if (value == "negative") cfg.region_positive = false;
            else issues.push_back("key 'region': expected positive or negative, got '" + value + "'");
        } else if (key == "policy") {
            if (value == "halt") cfg.policy = BoundaryPolicy::Halt;
            else if (value == "pick_active") cfg.policy = BoundaryPolicy::PickActive;
            else if (value == "pick_inactive") cfg.policy = BoundaryPolicy::PickInactive;
            else
                issues.push_back("key 'policy': expected halt, pick_active, or pick_inactive, "
                                 "got '" + value + "'");
        }
    }

    for (const KeySpec& k : schema)
        if (k.required && !seen.count(k.name))
            issues.push_back("missing required key '" + std::string(k.name) + "' for " + kind_name);

    // Semantic checks, only meaningful once the shape is right.
    const bool nonzero_datum_required =
        cfg.kind == ExperimentKind::LipschitzSweep || cfg.kind == ExperimentKind::SurrogateSweep;
    if (nonzero_datum_required && seen.count("x") && cfg.x == 0.0)
        issues.push_back(kind_name + " requires a nonzero input: x != 0");
    if (nonzero_datum_required && seen.count("y") && cfg.y == 0.0)
        issues.push_back(kind_name + " requires a nonzero target: y != 0");

    if (cfg.kind == ExperimentKind::LipschitzSweep) {
        for (std::size_t i = 0; i < cfg.epsilons.size(); ++i) {
            if (!(cfg.epsilons[i] > 1e-14)) {
                issues.push_back("epsilons must all exceed 1e-14");
                break;
            }
            if (i > 0 && !(cfg.epsilons[i] < cfg.epsilons[i - 1])) {
                issues.push_back("epsilons must be strictly decreasing");
                break;
            }
        }
    }
    if (cfg.kind == ExperimentKind::SurrogateSweep) {
        for (std::size_t i = 0; i < cfg.betas.size(); ++i) {
            if (!(cfg.betas[i] >= 1.0)) {
                issues.push_back("betas must all be >= 1");
                break;
            }
            if (i > 0 && !(cfg.betas[i] > cfg.betas[i - 1])) {
                issues.push_back("betas must be strictly increasing");
                break;
            }
        }
    }
    if (cfg.kind == ExperimentKind::RhoCertificate ||
        cfg.kind == ExperimentKind::TrajectoryPerturb) {
        if (seen.count("eta") && !(cfg.eta > 0.0))
            issues.push_back("eta must be positive");
        if (!(cfg.delta > 0.0)) issues.push_back("delta must be positive");
        if (!(cfg.span > 0.0)) issues.push_back("span must be positive");
        if (cfg.layout == Layout::FrozenBias && seen.count("x") && cfg.x == 0.0)
            issues.push_back("frozen_bias experiments require x != 0 (the boundary degenerates)");
    }
    if (cfg.kind == ExperimentKind::TrajectoryPerturb) {
        const std::size_t want = cfg.layout == Layout::OneNeuron ? 2 : 1;
        if (seen.count("theta0") && cfg.theta0.size() != want)
            issues.push_back("theta0 must have " + std::to_string(want) + " entries for layout " +
                             layout_name(cfg.layout));
        if (seen.count("theta0_prime") && cfg.theta0_prime.size() != want)
            issues.push_back("theta0_prime must have " + std::to_string(want) +
                             " entries for layout " + layout_name(cfg.layout));
        if (cfg.theta0.size() == cfg.theta0_prime.size() && !cfg.theta0.empty() &&
            cfg.theta0 == cfg.theta0_prime)
            issues.push_back("theta0 and theta0_prime must differ (degenerate pair)");
        if (cfg.rho && !(*cfg.rho >= 0.0)) issues.push_back("rho must be nonnegative");
        if (cfg.tau && !(*cfg.tau >= 0.0)) issues.push_back("tau must be nonnegative");
    }
    if (cfg.kind == ExperimentKind::LipschitzSweep && cfg.tau && !(*cfg.tau >= 0.0))
        issues.push_back("tau must be nonnegative");

    if (!issues.empty()) throw ConfigError(issues);
    return cfg;
}

std::vector<std::string> validate_config(const std::string& text) {
    try {
        parse_config(text);
        return {};
    } catch (const ConfigError& e) {
        return e.issues();
    }
}

ExperimentConfig load_config_file(const fs::path& path) {
    return parse_config(read_text_file(path));
}

// -----------------------------------------------------------------------------
// Experiment runners
// -----------------------------------------------------------------------------

namespace {

struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct KindOutput {
    std::vector<std::pair<std::string, std::string>> csv_files;   // name -> content
    std::vector<std::pair<std::string, std::string>> json_files;  // name -> content
    std::vector<Check> checks;
    ordered_json headline;
};

std::string dump_json(const ordered_json& j) { return j.dump(2) + "\n"; }

ordered_json config_echo(const ExperimentConfig& cfg) {
    ordered_json j;
    j["kind"] = experiment_kind_name(cfg.kind);
    j["x"] = cfg.x;
    j["y"] = cfg.y;
    switch (cfg.kind) {
        case ExperimentKind::LipschitzSweep:
            j["anchor_t"] = cfg.anchor_t;
            j["epsilons"] = cfg.epsilons;
            j["tau"] = cfg.tau ? ordered_json(*cfg.tau) : ordered_json(nullptr);
            break;
        case ExperimentKind::SurrogateSweep:
            j["betas"] = cfg.betas;
            break;
        case ExperimentKind::RhoCertificate:
            j["eta"] = cfg.eta;
            j["layout"] = layout_name(cfg.layout);
            j["region"] = cfg.region_positive ? "positive" : "negative";
            j["delta"] = cfg.delta;
            j["span"] = cfg.span;
            j["samples"] = cfg.samples;
            j["seed"] = cfg.seed;
            break;
        case ExperimentKind::TrajectoryPerturb:
            j["eta"] = cfg.eta;
            j["steps"] = cfg.steps;
            j["layout"] = layout_name(cfg.layout);
            j["theta0"] = cfg.theta0;
            j["theta0_prime"] = cfg.theta0_prime;
            j["region"] = cfg.region_positive ? "positive" : "negative";
            j["delta"] = cfg.delta;
            j["rho"] = cfg.rho ? ordered_json(*cfg.rho) : ordered_json(nullptr);
            j["policy"] = boundary_policy_name(cfg.policy);
            j["tau"] = cfg.tau ? ordered_json(*cfg.tau) : ordered_json(nullptr);
            break;
    }
    return j;
}

KindOutput run_lipschitz(const ExperimentConfig& cfg) {
    const DataPoint p = DataPoint::scalar(cfg.x, cfg.y);
    const ParamVector theta0 = boundary_point(p, cfg.anchor_t);
    const double tau = cfg.tau.value_or(default_tau(theta0));
    const SweepResult sweep = epsilon_sweep(p, theta0, cfg.epsilons, tau);
    const double v2 = cfg.x * cfg.x + 1.0;

    std::string csv = "epsilon,numeric_ratio,analytic_ratio,eps_times_ratio\n";
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < sweep.samples.size(); ++i) {
        const RatioSample& s = sweep.samples[i];
        csv += format_full(s.epsilon) + "," + format_full(s.numeric_ratio) + "," +
               format_full(s.analytic_ratio) + "," + format_full(sweep.eps_times_ratio[i]) + "\n";
        ordered_json row;
        row["epsilon"] = s.epsilon;
        row["numeric_ratio"] = s.numeric_ratio;
        row["analytic_ratio"] = s.analytic_ratio;
        row["eps_times_ratio"] = sweep.eps_times_ratio[i];
        rows.push_back(row);
    }

    KindOutput out;
    out.csv_files.emplace_back("sweep.csv", csv);
    ordered_json sweep_json;
    sweep_json["samples"] = rows;
    out.json_files.emplace_back("sweep.json", dump_json(sweep_json));

    double max_rel = 0.0;
    for (const RatioSample& s : sweep.samples)
        max_rel = std::max(max_rel, std::abs(s.numeric_ratio - s.analytic_ratio) /
                                        std::max(1.0, s.analytic_ratio));
    out.checks.push_back({"numeric_matches_analytic", max_rel <= 1e-9,
                          "max relative discrepancy " + format_full(max_rel)});

    if (sweep.loglog_slope)
        out.checks.push_back({"loglog_slope_minus_one",
                              std::abs(*sweep.loglog_slope + 1.0) <= 0.01,
                              "slope " + format_full(*sweep.loglog_slope)});

    const double eps_min = cfg.epsilons.back();
    const double etr_last = sweep.eps_times_ratio.back();
    const double limit = std::abs(cfg.y) / 2.0;
    const double etr_tol = eps_min * v2 / 2.0 * (1.0 + 1e-9) + 1e-15;
    out.checks.push_back({"eps_times_ratio_limit", std::abs(etr_last - limit) <= etr_tol,
                          format_full(etr_last) + " vs |y|/2 = " + format_full(limit)});

    const double threshold = std::abs(cfg.y) / (2.0 * v2);
    bool monotone = true;
    int pairs = 0;
    for (std::size_t i = 0; i + 1 < sweep.samples.size(); ++i) {
        if (sweep.samples[i].epsilon >= threshold) continue;
        ++pairs;
        if (!(sweep.samples[i + 1].numeric_ratio > sweep.samples[i].numeric_ratio))
            monotone = false;
    }
    out.checks.push_back({"ratio_monotone_below_threshold", monotone,
                          std::to_string(pairs) + " consecutive pairs below eps = " +
                              format_full(threshold)});

    if (eps_min <= std::abs(cfg.y) / (4.0 * v2)) {
        const double max_ratio = sweep.samples.back().numeric_ratio;
        out.checks.push_back({"ratio_diverges_at_one_over_eps",
                              max_ratio >= std::abs(cfg.y) / (4.0 * eps_min),
                              "ratio " + format_full(max_ratio) + " at eps " +
                                  format_full(eps_min)});
    }

    out.headline["loglog_slope"] =
        sweep.loglog_slope ? ordered_json(*sweep.loglog_slope) : ordered_json(nullptr);
    out.headline["max_numeric_ratio"] = sweep.samples.back().numeric_ratio;
    out.headline["eps_times_ratio_last"] = etr_last;
    out.headline["tau_effective"] = tau;
    out.headline["sample_count"] = sweep.samples.size();
    return out;
}

KindOutput run_surrogate(const ExperimentConfig& cfg) {
    const DataPoint p = DataPoint::scalar(cfg.x, cfg.y);
    const std::vector<SmoothnessEstimate> sweep = smoothness_divergence_sweep(p, cfg.betas);
    const double v2 = cfg.x * cfg.x + 1.0;

    std::string csv = "beta,u_peak,sigma2_at_peak,residual,L_lower\n";
    ordered_json rows = ordered_json::array();
    for (const SmoothnessEstimate& e : sweep) {
        csv += format_full(e.beta) + "," + format_full(e.u_peak) + "," +
               format_full(e.sigma2_at_peak) + "," + format_full(e.residual) + "," +
               format_full(e.l_lower) + "\n";
        ordered_json row;
        row["beta"] = e.beta;
        row["u_peak"] = e.u_peak;
        row["sigma2_at_peak"] = e.sigma2_at_peak;
        row["residual"] = e.residual;
        row["L_lower"] = e.l_lower;
        row["theta_witness"] = to_json_array(e.theta_witness.values);
        rows.push_back(row);
    }

    KindOutput out;
    out.csv_files.emplace_back("sweep.csv", csv);
    ordered_json sweep_json;
    sweep_json["samples"] = rows;
    out.json_files.emplace_back("sweep.json", dump_json(sweep_json));

    bool peaks_ok = true, curvature_ok = true;
    for (const SmoothnessEstimate& e : sweep) {
        if (std::abs(e.u_peak) > 1e-7) peaks_ok = false;
        if (std::abs(e.sigma2_at_peak - e.beta / 4.0) > 1e-9 * (e.beta / 4.0))
            curvature_ok = false;
    }
    out.checks.push_back({"curvature_peak_at_kink", peaks_ok, "max |u_peak| over the sweep"});
    out.checks.push_back(
        {"peak_curvature_beta_over_four", curvature_ok, "sigma'' at the peak vs beta/4"});

    if (sweep.size() > 1) {
        bool increasing = true;
        for (std::size_t i = 0; i + 1 < sweep.size(); ++i)
            if (!(sweep[i + 1].l_lower > sweep[i].l_lower)) increasing = false;
        out.checks.push_back({"l_lower_strictly_increasing", increasing, ""});
    }

    std::optional<double> decade_ratio;
    for (std::size_t i = 0; i + 1 < sweep.size(); ++i) {
        if (std::abs(sweep[i + 1].beta / sweep[i].beta - 10.0) <= 1e-9)
            decade_ratio = sweep[i + 1].l_lower / sweep[i].l_lower;  // keeps the last pair
    }
    if (decade_ratio)
        out.checks.push_back({"decade_ratio_near_ten",
                              *decade_ratio >= 9.5 && *decade_ratio <= 10.5,
                              "L_lower(10 beta) / L_lower(beta) = " + format_full(*decade_ratio)});

    const double beta_min_dominant = 2.0 * std::log(2.0) / std::abs(cfg.y);
    bool residual_ok = true, growth_ok = true;
    int guarded = 0;
    for (const SmoothnessEstimate& e : sweep) {
        if (e.beta < beta_min_dominant) continue;
        ++guarded;
        if (!(std::abs(e.residual) >= std::abs(cfg.y) / 2.0 - 1e-12)) residual_ok = false;
        if (!(e.l_lower >= (std::abs(cfg.y) / 2.0) * (e.beta / 4.0) * v2 * (1.0 - 1e-12)))
            growth_ok = false;
    }
    out.checks.push_back({"residual_stays_bounded_away", residual_ok,
                          std::to_string(guarded) + " betas above 2 ln2 / |y|"});
    out.checks.push_back({"l_lower_linear_in_beta", growth_ok,
                          "lower bound (|y|/2)(beta/4)||(x,1)||^2"});

    ordered_json l_lower = ordered_json::array();
    for (const SmoothnessEstimate& e : sweep) l_lower.push_back(e.l_lower);
    out.headline["l_lower"] = l_lower;
    out.headline["decade_ratio_last"] =
        decade_ratio ? ordered_json(*decade_ratio) : ordered_json(nullptr);
    return out;
}

KindOutput run_rho(const ExperimentConfig& cfg) {
    const DataPoint p = DataPoint::scalar(cfg.x, cfg.y);
    const UpdateMap map = UpdateMap::make(cfg.eta, p, cfg.layout);
    const RegionSpec region =
        RegionSpec::half_space(cfg.layout, cfg.region_positive, cfg.delta, cfg.span);
    const SamplerSpec sampler{cfg.samples, cfg.seed};
    const RhoCertificate cert = rho_over_region(map, region, sampler);

    ordered_json j;
    j["region"] = ordered_json{{"kind", cfg.region_positive ? "half_space_positive"
                                                            : "half_space_negative"},
                               {"layout", layout_name(cfg.layout)},
                               {"delta", cfg.delta},
                               {"span", cfg.span}};
    j["eta"] = cert.eta;
    j["rho"] = cert.rho;
    j["worst_point"] = to_json_array(cert.worst_point.values);
    j["sample_count"] = cert.sample_count;
    j["closed_form_used"] = cert.closed_form_used;

    KindOutput out;
    out.json_files.emplace_back("certificate.json", dump_json(j));
    out.checks.push_back({"sampled_max_matches_closed_form",
                          std::abs(cert.sampled_max - cert.rho) <= 1e-12 * std::max(1.0, cert.rho),
                          "sampled max " + format_full(cert.sampled_max) + " vs rho " +
                              format_full(cert.rho)});
    out.checks.push_back({"sample_count_fulfilled", cert.sample_count == cfg.samples,
                          std::to_string(cert.sample_count) + " of " +
                              std::to_string(cfg.samples)});
    out.headline["rho"] = cert.rho;
    out.headline["closed_form_used"] = cert.closed_form_used;
    out.headline["sample_count"] = cert.sample_count;
    return out;
}

ParamVector param_from_list(Layout layout, const std::vector<double>& values) {
    if (layout == Layout::OneNeuron) return ParamVector::one_neuron(values.at(0), values.at(1));
    return ParamVector::frozen_bias(values.at(0));
}

std::string trajectory_csv(const TrajectoryRecord& record, const DataPoint& p) {
    std::string csv = "step";
    const Eigen::Index n = record.iterates.front().size();
    for (Eigen::Index i = 0; i < n; ++i) csv += ",theta" + std::to_string(i);
    csv += ",pattern,loss\n";
    for (std::size_t t = 0; t < record.iterates.size(); ++t) {
        csv += std::to_string(t);
        for (Eigen::Index i = 0; i < n; ++i)
            csv += "," + format_full(record.iterates[t].values(i));
        csv += ",";
        const auto& signs = record.patterns[t].signs;
        for (Eigen::Index u = 0; u < signs.size(); ++u) {
            if (u) csv += ';';
            csv += std::to_string(signs(u));
        }
        csv += "," + format_full(loss(record.iterates[t], p)) + "\n";
    }
    return csv;
}

KindOutput run_trajectory(const ExperimentConfig& cfg) {
    const DataPoint p = DataPoint::scalar(cfg.x, cfg.y);
    const ParamVector theta0 = param_from_list(cfg.layout, cfg.theta0);
    const ParamVector theta0p = param_from_list(cfg.layout, cfg.theta0_prime);
    const double tau = cfg.tau.value_or(default_tau(theta0));
    const UpdateMap map = UpdateMap::make(cfg.eta, p, cfg.layout);
    const RegionSpec region =
        RegionSpec::half_space(cfg.layout, cfg.region_positive, cfg.delta);
    const double rho = cfg.rho.value_or(rho_closed_form(map, region));

    const TrajectoryRecord rec_a = run_gd(theta0, p, cfg.eta, cfg.steps, tau, cfg.policy);
    const TrajectoryRecord rec_b = run_gd(theta0p, p, cfg.eta, cfg.steps, tau, cfg.policy);
    const DivergenceReport report =
        paired_divergence(theta0, theta0p, p, cfg.eta, cfg.steps, region, rho, tau, cfg.policy);

    KindOutput out;
    out.csv_files.emplace_back("trajectory_a.csv", trajectory_csv(rec_a, p));
    out.csv_files.emplace_back("trajectory_b.csv", trajectory_csv(rec_b, p));

    ordered_json dj;
    dj["separations"] = report.separations;
    dj["bound"] = report.bound;
    dj["both_in_region"] = report.both_in_region;
    dj["first_violation"] =
        report.first_violation ? ordered_json(*report.first_violation) : ordered_json(nullptr);
    out.json_files.emplace_back("divergence.json", dump_json(dj));

    // The update rule must reproduce each recorded step exactly.
    bool exact = true;
    for (const TrajectoryRecord* rec : {&rec_a, &rec_b}) {
        for (int t = 0; t < rec->step_count; ++t) {
            const ParamVector& cur = rec->iterates[t];
            Eigen::VectorXd g;
            if (rec->patterns[t].on_boundary())
                g = gradient_with_boundary_gate(cur, p, tau,
                                                cfg.policy == BoundaryPolicy::PickActive);
            else
                g = gradient(cur, p, tau);
            const double err = (rec->iterates[t + 1].values + cfg.eta * g - cur.values)
                                   .cwiseAbs()
                                   .maxCoeff();
            if (err > 1e-15 * (1.0 + cur.norm())) exact = false;
        }
    }
    out.checks.push_back({"update_rule_exact", exact, ""});

    const bool violated = report.first_violation.has_value();
    out.checks.push_back(
        {"no_violation_while_in_region", !violated,
         violated ? "first violation at step " + std::to_string(*report.first_violation) : ""});

    const bool ever_applicable =
        std::any_of(report.both_in_region.begin(), report.both_in_region.end(),
                    [](bool b) { return b; });
    const std::string status = violated ? "violated" : (ever_applicable ? "held" : "inapplicable");

    out.headline["bound_status"] = status;
    out.headline["first_violation"] =
        report.first_violation ? ordered_json(*report.first_violation) : ordered_json(nullptr);
    out.headline["rho_effective"] = rho;
    out.headline["initial_separation"] = report.separations.front();
    out.headline["step1_separation_ratio"] =
        report.separations.size() > 1
            ? ordered_json(report.separations[1] / report.separations[0])
            : ordered_json(nullptr);
    out.headline["crossings_a"] = crossing_census(rec_a).total;
    out.headline["crossings_b"] = crossing_census(rec_b).total;
    out.headline["halted_a"] = rec_a.halted_at_boundary;
    out.headline["halted_b"] = rec_b.halted_at_boundary;
    out.headline["tau_effective"] = tau;
    return out;
}

const char* error_code_name(Error::Code code) {
    switch (code) {
        case Error::Code::Argument: return "argument";
        case Error::Code::Layout: return "layout";
        case Error::Code::Boundary: return "boundary";
        case Error::Code::Region: return "region";
        case Error::Code::Numeric: return "numeric";
        case Error::Code::Config: return "config";
        case Error::Code::Io: return "io";
        case Error::Code::Internal: return "internal";
    }
    return "unknown";
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& config, const fs::path& out_dir,
                         OutputFormat format) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir.string() + ": " +
                          ec.message());
    if (!fs::is_directory(out_dir))
        throw IoError("output path is not a directory: " + out_dir.string());

    ordered_json summary;
    summary["experiment"] = experiment_kind_name(config.kind);
    summary["config"] = config_echo(config);

    KindOutput out;
    try {
        switch (config.kind) {
            case ExperimentKind::LipschitzSweep: out = run_lipschitz(config); break;
            case ExperimentKind::SurrogateSweep: out = run_surrogate(config); break;
            case ExperimentKind::RhoCertificate: out = run_rho(config); break;
            case ExperimentKind::TrajectoryPerturb: out = run_trajectory(config); break;
        }
    } catch (const Error& e) {
        summary["error"] = ordered_json{{"code", error_code_name(e.code())},
                                        {"message", e.what()}};
        summary["outputs"] = ordered_json::array({"summary.json"});
        summary["pass"] = false;
        atomic_write_file(out_dir, "summary.json", dump_json(summary));
        throw;
    }

    RunResult result;
    if (format != OutputFormat::Json)
        for (const auto& [name, content] : out.csv_files) {
            atomic_write_file(out_dir, name, content);
            result.files_written.push_back(name);
        }
    if (format != OutputFormat::Csv)
        for (const auto& [name, content] : out.json_files) {
            atomic_write_file(out_dir, name, content);
            result.files_written.push_back(name);
        }

    bool all_pass = true;
    ordered_json checks = ordered_json::array();
    for (const Check& c : out.checks) {
        all_pass = all_pass && c.pass;
        ordered_json cj;
        cj["name"] = c.name;
        cj["pass"] = c.pass;
        if (!c.detail.empty()) cj["detail"] = c.detail;
        checks.push_back(cj);
    }

    summary["checks"] = checks;
    summary["headline"] = out.headline;
    ordered_json outputs = ordered_json::array();
    for (const std::string& f : result.files_written) outputs.push_back(f);
    outputs.push_back("summary.json");
    summary["outputs"] = outputs;
    summary["pass"] = all_pass;
    atomic_write_file(out_dir, "summary.json", dump_json(summary));
    result.files_written.push_back("summary.json");

    result.pass = all_pass;
    result.summary = summary;
    return result;
}

}  // namespace relukink
