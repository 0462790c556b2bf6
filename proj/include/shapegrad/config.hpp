#pragma once

#include <optional>
#include <string>

#include "shapegrad/mesh.hpp"
#include "shapegrad/optimizer.hpp"

namespace shapegrad {

/// Resolution at which the generator lands near the benchmark's 3435-node,
/// 6932-element mesh.
constexpr int kPaperResolution = 128;

/// One experiment: mesh source, metric, descent parameters, outputs.
/// Parsed from flat `key = value` text; unknown keys are errors.
struct RunConfig {
    // mesh source: either a file or generator parameters, never both
    std::optional<std::string> mesh_file;
    double mesh_radius = 1.0;
    Vec2 mesh_center{0.0, 0.0};
    double mesh_box = 3.0;
    int mesh_resolution = kPaperResolution;

    OptConfig opt; // includes the MetricSpec

    std::string out_dir = ".";
    unsigned long seed = 0;
    std::string label = "run";
};

RunConfig parse_config_text(const std::string& text, const std::string& origin = "<config>");
RunConfig parse_config_file(const std::string& path);

/// Builds the initial mesh from the configured source.
TriMesh make_mesh(const RunConfig& config);

} // namespace shapegrad
