#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace relukink {

// =============================================================================
// Error taxonomy (mirrored one-to-one by the C API status codes)
// =============================================================================

class Error : public std::runtime_error {
public:
    enum class Code {
        Argument,   // bad value passed by the caller
        Layout,     // parameter vector shape does not match the requested operation
        Boundary,   // evaluation requested on an activation boundary
        Region,     // empty or infeasible region
        Numeric,    // numerical failure (non-convergence, overflow, broken invariant)
        Config,     // experiment configuration rejected
        Io,         // filesystem failure
        Internal,
    };

    Error(Code code, std::string msg) : std::runtime_error(std::move(msg)), code_(code) {}
    Code code() const noexcept { return code_; }

private:
    Code code_;
};

class ArgumentError : public Error {
public:
    explicit ArgumentError(std::string msg) : Error(Code::Argument, std::move(msg)) {}
};

class LayoutError : public Error {
public:
    explicit LayoutError(std::string msg) : Error(Code::Layout, std::move(msg)) {}
};

/// Raised when a gradient (or Jacobian selection) is requested within
/// tolerance of an activation boundary, where the map is undefined.
class BoundaryError : public Error {
public:
    BoundaryError(std::string msg, std::vector<int> units)
        : Error(Code::Boundary, std::move(msg)), units_(std::move(units)) {}
    const std::vector<int>& units() const noexcept { return units_; }

private:
    std::vector<int> units_;
};

class RegionError : public Error {
public:
    explicit RegionError(std::string msg) : Error(Code::Region, std::move(msg)) {}
};

class NumericError : public Error {
public:
    explicit NumericError(std::string msg) : Error(Code::Numeric, std::move(msg)) {}
};

class IoError : public Error {
public:
    explicit IoError(std::string msg) : Error(Code::Io, std::move(msg)) {}
};

/// Configuration rejection carrying every validation failure, not just the first.
class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<std::string> issues)
        : Error(Code::Config, join(issues)), issues_(std::move(issues)) {}
    const std::vector<std::string>& issues() const noexcept { return issues_; }

private:
    static std::string join(const std::vector<std::string>& issues) {
        std::string out;
        for (const auto& s : issues) {
            if (!out.empty()) out += '\n';
            out += s;
        }
        return out;
    }
    std::vector<std::string> issues_;
};

// =============================================================================
// Core value types
// =============================================================================

/// Parameter layouts supported by the model family.
///   OneNeuron : f(x) = relu(w*x + b), parameters [w, b]
///   FrozenBias: f(x) = relu(w*x), single parameter [w]
///   TwoLayer  : f(x) = W2 * relu(W1 * [x; 1]), parameters row-major W1 then W2
enum class Layout { OneNeuron, FrozenBias, TwoLayer };

const char* layout_name(Layout layout);

/// Size ceilings for the two-layer family; keeps pattern enumeration trivial.
inline constexpr int kMaxInputs = 8;
inline constexpr int kMaxHidden = 8;

/// A point in parameter space. Immutable by convention: operations return
/// new vectors instead of mutating.
struct ParamVector {
    Layout layout = Layout::OneNeuron;
    int hidden = 1;  // two-layer only
    int inputs = 1;  // two-layer only
    Eigen::VectorXd values;

    static ParamVector one_neuron(double w, double b);
    static ParamVector frozen_bias(double w);
    /// w1 is hidden x (inputs + 1) with the bias column last; w2 has one entry per hidden unit.
    static ParamVector two_layer(const Eigen::MatrixXd& w1, const Eigen::VectorXd& w2);

    double w() const { return values(0); }                 // OneNeuron / FrozenBias
    double b() const { return values(1); }                 // OneNeuron
    Eigen::MatrixXd w1() const;                            // TwoLayer, hidden x (inputs+1)
    Eigen::VectorXd w2() const;                            // TwoLayer, hidden
    int units() const { return layout == Layout::TwoLayer ? hidden : 1; }
    Eigen::Index size() const { return values.size(); }
    double norm() const { return values.norm(); }
};

/// Validates dimension/layout consistency, finiteness, and size ceilings.
/// Throws LayoutError.
void validate(const ParamVector& theta);

/// One datum (x, y). x has one entry for the scalar layouts.
struct DataPoint {
    Eigen::VectorXd x;
    double y = 0.0;

    static DataPoint scalar(double x, double y);
    double x0() const { return x(0); }
};

/// Sign of each hidden unit's preactivation; |preactivation| <= tolerance maps to 0.
struct ActivationPattern {
    Eigen::VectorXi signs;
    double tolerance = 0.0;

    bool same_signs(const ActivationPattern& other) const {
        return signs.size() == other.signs.size() && (signs.array() == other.signs.array()).all();
    }
    bool on_boundary() const { return (signs.array() == 0).any(); }
};

/// Scale-aware default boundary tolerance used by the experiment drivers.
inline double default_tau(const ParamVector& theta) { return 1e-12 * (1.0 + theta.norm()); }

}  // namespace relukink
