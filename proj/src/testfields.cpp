#include "shapegrad/testfields.hpp"

#include <cmath>

namespace shapegrad {

VectorField random_smooth_field(const TriMesh& mesh, std::mt19937& rng) {
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    std::uniform_real_distribution<double> freq(0.5, 2.0);

    double H = 0.0;
    for (const auto& v : mesh.vertices) H = std::max({H, std::abs(v.x), std::abs(v.y)});
    if (H == 0.0) H = 1.0;

    struct Component {
        double a, bx, by, amp, kx, ky, phix, phiy;
    };
    Component comp[2];
    for (auto& c : comp)
        c = {coeff(rng), coeff(rng), coeff(rng), coeff(rng),
             freq(rng),  freq(rng),  coeff(rng) * 3.0, coeff(rng) * 3.0};

    VectorField W(mesh.vertices.size());
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        const double x = mesh.vertices[i].x;
        const double y = mesh.vertices[i].y;
        const double bump =
            std::max(0.0, 1.0 - (x / H) * (x / H)) * std::max(0.0, 1.0 - (y / H) * (y / H));
        double val[2];
        for (int d = 0; d < 2; ++d) {
            const auto& c = comp[d];
            val[d] = bump * (c.a + c.bx * x + c.by * y +
                             c.amp * std::sin(c.kx * x + c.phix) * std::cos(c.ky * y + c.phiy));
        }
        W[i] = {val[0], val[1]};
    }
    for (int v : boundary_vertices(mesh, BoundaryMarker::OUTER)) W[static_cast<std::size_t>(v)] = {0.0, 0.0};
    return W;
}

TriMesh small_grid_mesh() {
    TriMesh m;
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i)
            m.vertices.push_back({0.5 * i, 0.5 * j});
    auto at = [](int i, int j) { return 3 * j + i; };
    for (int j = 0; j < 2; ++j)
        for (int i = 0; i < 2; ++i) {
            m.triangles.push_back({{at(i, j), at(i + 1, j), at(i + 1, j + 1)}, Region::OUT});
            m.triangles.push_back({{at(i, j), at(i + 1, j + 1), at(i, j + 1)}, Region::OUT});
        }
    const int loop[] = {0, 1, 2, 5, 8, 7, 6, 3};
    for (int k = 0; k < 8; ++k)
        m.boundary_edges.push_back({{loop[k], loop[(k + 1) % 8]}, BoundaryMarker::OUTER});
    return m;
}

} // namespace shapegrad
