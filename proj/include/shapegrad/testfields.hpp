#pragma once

#include <random>

#include "shapegrad/fem.hpp"
#include "shapegrad/mesh.hpp"

namespace shapegrad {

/// Smooth deterministic test field: low-order polynomial plus one trig mode
/// per component, damped by a bump that vanishes on the bounding box, then
/// pinned to exact zero on OUTER boundary vertices. Used by the verification
/// command and the property tests.
VectorField random_smooth_field(const TriMesh& mesh, std::mt19937& rng);

/// 3x3 vertex grid on [0,1]^2 (8 triangles), all boundary edges OUTER and a
/// single free interior vertex; the smallest configuration the geodesic
/// dense-FD oracle runs on.
TriMesh small_grid_mesh();

} // namespace shapegrad
