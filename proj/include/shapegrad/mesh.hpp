#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "shapegrad/geometry.hpp"

namespace shapegrad {

enum class Region : std::uint8_t { IN, OUT };
enum class BoundaryMarker : std::uint8_t { INNER, OUTER };

struct Triangle {
    std::array<int, 3> v{};
    Region tag = Region::OUT;
};

struct BoundaryEdge {
    std::array<int, 2> v{};
    BoundaryMarker marker = BoundaryMarker::OUTER;
};

/// Triangulation of the hold-all box with an embedded closed interface.
///
/// Triangles carry a region tag (IN = inside the shape, OUT = rest of the
/// box); the interface itself is the closed polyline of INNER boundary
/// edges. Meshes are treated as immutable: every operation that changes
/// geometry returns a new mesh.
struct TriMesh {
    std::vector<Vec2> vertices;
    std::vector<Triangle> triangles;
    std::vector<BoundaryEdge> boundary_edges;

    int vertex_count() const { return static_cast<int>(vertices.size()); }
    int triangle_count() const { return static_cast<int>(triangles.size()); }

    std::array<Vec2, 3> triangle_points(int t) const {
        const auto& tri = triangles[static_cast<std::size_t>(t)];
        return {vertices[static_cast<std::size_t>(tri.v[0])],
                vertices[static_cast<std::size_t>(tri.v[1])],
                vertices[static_cast<std::size_t>(tri.v[2])]};
    }

    double triangle_area(int t) const {
        const auto p = triangle_points(t);
        return signed_area(p[0], p[1], p[2]);
    }
};

/// One broken invariant, reported as data (never thrown).
struct Violation {
    std::string invariant; // e.g. "positive-orientation"
    std::string entity;    // e.g. "triangle 17"
    std::string detail;

    std::string format() const { return invariant + " violated by " + entity + ": " + detail; }
};

struct QualityReport {
    double min_quality = 0.0;
    int worst_triangle = -1;
    std::vector<double> per_triangle;
};

/// Structured mesh of a circle embedded in the box [-H,H]^2: the disk is
/// built from concentric vertex rings, the rest of the box by blending
/// between the circle polyline and the box boundary with geometric radial
/// grading (finest next to the interface). `resolution` is the number of
/// nominal interface vertices and the single size knob.
TriMesh generate_circle_in_box(double radius, Vec2 center, double box_half_width, int resolution);

std::vector<Violation> validate_mesh(const TriMesh& mesh);

QualityReport mesh_quality(const TriMesh& mesh, bool keep_per_triangle = false);

/// New mesh with vertices moved by t*field. Connectivity, tags and markers
/// are carried over unchanged; validity of the result is the caller's
/// problem (see validate_mesh).
TriMesh displace(const TriMesh& mesh, const std::vector<Vec2>& field, double t);

/// Submesh of one region plus vertex/triangle maps back to the parent.
struct Submesh {
    TriMesh mesh;
    std::vector<int> to_parent;       // submesh vertex -> parent vertex
    std::vector<int> from_parent;     // parent vertex -> submesh vertex, -1 if absent
    std::vector<int> triangle_to_parent;
};

Submesh extract_region(const TriMesh& mesh, Region tag);

void save_mesh(const TriMesh& mesh, const std::string& path);
TriMesh load_mesh(const std::string& path);

/// Vertices of the INNER interface as one ordered closed loop (the first
/// vertex is not repeated at the end). Requires a mesh whose INNER edges
/// form a single cycle.
std::vector<int> inner_polyline(const TriMesh& mesh);

/// Sorted vertex indices incident to boundary edges with the given marker.
std::vector<int> boundary_vertices(const TriMesh& mesh, BoundaryMarker marker);

} // namespace shapegrad
