#pragma once

#include "types.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace relukink {

using ordered_json = nlohmann::ordered_json;

/// Full-precision decimal rendering (17 significant digits): every double
/// round-trips and identical inputs produce identical bytes.
std::string format_full(double v);

/// Writes dir/name via a temporary file in the same directory plus rename,
/// so a failure never leaves a partially written file at the final path.
void atomic_write_file(const std::filesystem::path& dir, const std::string& name,
                       const std::string& content);

std::string read_text_file(const std::filesystem::path& path);

/// Flat-array serialization: one_neuron [w, b]; frozen_bias [w];
/// two_layer row-major W1 rows then W2.
ordered_json to_json_array(const Eigen::VectorXd& values);

/// Flat-array serialization of a datum: [x_0, ..., x_{d-1}, y].
ordered_json to_json_array(const DataPoint& p);

}  // namespace relukink
