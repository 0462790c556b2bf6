#include "shapegrad/problem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace shapegrad {

double eval_r(double x, double y) {
    const double w = x + 0.4 - y * y;
    return 2.5 * w * w + x * x + y * y - 1.0;
}

Vec2 grad_r(double x, double y) {
    const double w = x + 0.4 - y * y;
    return {5.0 * w + 2.0 * x, -10.0 * y * w + 2.0 * y};
}

namespace {

// Vertices of the INNER boundary of the IN submesh (the moving interface),
// where the state and adjoint are pinned to zero.
std::vector<int> submesh_dirichlet(const Submesh& sub) {
    std::vector<int> dofs;
    for (const auto& be : sub.mesh.boundary_edges) {
        dofs.push_back(be.v[0]);
        dofs.push_back(be.v[1]);
    }
    std::sort(dofs.begin(), dofs.end());
    dofs.erase(std::unique(dofs.begin(), dofs.end()), dofs.end());
    return dofs;
}

template <typename F>
std::vector<double> assemble_load(const TriMesh& mesh, F source) {
    // Edge-midpoint rule: exact for quadratics, and every factor (source,
    // basis value) is evaluated at the same moving points, which keeps the
    // assembled shape derivative consistent with this right-hand side.
    std::vector<double> b(mesh.vertices.size(), 0.0);
    for (int e = 0; e < mesh.triangle_count(); ++e) {
        const auto& tri = mesh.triangles[static_cast<std::size_t>(e)];
        const auto p = mesh.triangle_points(e);
        const double area = mesh.triangle_area(e);
        for (int m = 0; m < 3; ++m) {
            const Vec2 mid = 0.5 * (p[static_cast<std::size_t>(m)] + p[static_cast<std::size_t>((m + 1) % 3)]);
            const double fv = source(mid.x, mid.y) * area / 3.0;
            // phi is 1/2 at the two adjacent midpoints and 0 at the opposite one.
            b[static_cast<std::size_t>(tri.v[static_cast<std::size_t>(m)])] += 0.5 * fv;
            b[static_cast<std::size_t>(tri.v[static_cast<std::size_t>((m + 1) % 3)])] += 0.5 * fv;
        }
    }
    return b;
}

ScalarField solve_poisson_on_in(const TriMesh& mesh, double rhs_sign_r, double constant_rhs,
                                double tol) {
    const Submesh sub = extract_region(mesh, Region::IN);
    if (sub.mesh.triangle_count() == 0)
        throw std::invalid_argument("benchmark solve: mesh has an empty IN region");
    SparseSystem K = assemble_scalar_laplace(sub.mesh, AssemblyRegion::ALL, 1.0);
    K = apply_dirichlet(K, submesh_dirichlet(sub), 0.0);
    std::vector<double> b;
    if (rhs_sign_r != 0.0)
        b = assemble_load(sub.mesh, [&](double x, double y) { return rhs_sign_r * eval_r(x, y); });
    else
        b = assemble_load(sub.mesh, [&](double, double) { return constant_rhs; });
    return solve_spd(K, b, tol);
}

} // namespace

ScalarField solve_state(const TriMesh& mesh, double tol) {
    return solve_poisson_on_in(mesh, 1.0, 0.0, tol);
}

ScalarField solve_adjoint(const TriMesh& mesh, double tol) {
    return solve_poisson_on_in(mesh, 0.0, -1.0, tol);
}

double objective(const TriMesh& mesh, const ScalarField& y) {
    const Submesh sub = extract_region(mesh, Region::IN);
    if (y.size() != sub.mesh.vertices.size())
        throw std::invalid_argument("objective: field does not match the IN submesh");
    double J = 0.0;
    for (int e = 0; e < sub.mesh.triangle_count(); ++e) {
        const auto& tri = sub.mesh.triangles[static_cast<std::size_t>(e)];
        const double area = sub.mesh.triangle_area(e);
        J += area / 3.0 * (y[static_cast<std::size_t>(tri.v[0])] + y[static_cast<std::size_t>(tri.v[1])] +
                           y[static_cast<std::size_t>(tri.v[2])]);
    }
    return J;
}

ProblemState reduced_objective(const TriMesh& mesh, double tol) {
    ProblemState st;
    st.y = solve_state(mesh, tol);
    st.p = solve_adjoint(mesh, tol);
    st.J = objective(mesh, st.y);
    return st;
}

ShapeDerivative assemble_shape_derivative(const TriMesh& mesh, const ScalarField& y,
                                          const ScalarField& p, SourceQuadrature quad) {
    const Submesh sub = extract_region(mesh, Region::IN);
    if (y.size() != sub.mesh.vertices.size() || p.size() != sub.mesh.vertices.size())
        throw std::invalid_argument("assemble_shape_derivative: fields do not match the mesh's IN region");

    ShapeDerivative d;
    d.f.assign(mesh.vertices.size(), Vec2{0.0, 0.0});

    const std::vector<Vec2> grad_y = p1_gradient(sub.mesh, y);
    const std::vector<Vec2> grad_p = p1_gradient(sub.mesh, p);

    for (int se = 0; se < sub.mesh.triangle_count(); ++se) {
        const auto& tri = sub.mesh.triangles[static_cast<std::size_t>(se)];
        const auto pts = sub.mesh.triangle_points(se);
        const auto eg = element_geometry(pts[0], pts[1], pts[2]);
        const double area = eg.area;
        const Vec2 gy = grad_y[static_cast<std::size_t>(se)];
        const Vec2 gp = grad_p[static_cast<std::size_t>(se)];
        const double gygp = dot(gy, gp);
        const double ybar = (y[static_cast<std::size_t>(tri.v[0])] + y[static_cast<std::size_t>(tri.v[1])] +
                             y[static_cast<std::size_t>(tri.v[2])]) / 3.0;

        const int parent_e = sub.triangle_to_parent[static_cast<std::size_t>(se)];
        const auto& ptri = mesh.triangles[static_cast<std::size_t>(parent_e)];

        for (int i = 0; i < 3; ++i) {
            const Vec2 g = eg.grad[static_cast<std::size_t>(i)]; // grad of basis fn of local vertex i
            const double g_c[2] = {g.x, g.y};
            const double gy_c[2] = {gy.x, gy.y};
            const double gp_c[2] = {gp.x, gp.y};
            const double g_dot_gp = dot(g, gp);
            const double g_dot_gy = dot(g, gy);

            for (int dcomp = 0; dcomp < 2; ++dcomp) {
                // W = phi_i e_d on this element: DW = e_d (X) g, div W = g[d].
                double val = 0.0;

                // int y div(W)
                val += area * ybar * g_c[dcomp];

                // int (grad y)^T [div(W) I - DW - DW^T] grad p
                val += area * (g_c[dcomp] * gygp - gy_c[dcomp] * g_dot_gp - g_dot_gy * gp_c[dcomp]);

                // -int div(rW) p = -int (grad r . W + r div W) p
                if (quad == SourceQuadrature::EdgeMidpoint) {
                    for (int m = 0; m < 3; ++m) {
                        const int m2 = (m + 1) % 3;
                        const Vec2 mid = 0.5 * (pts[static_cast<std::size_t>(m)] + pts[static_cast<std::size_t>(m2)]);
                        // basis value of local vertex i at this midpoint
                        const double phi_i = (m == i || m2 == i) ? 0.5 : 0.0;
                        const double p_mid = 0.5 * (p[static_cast<std::size_t>(tri.v[static_cast<std::size_t>(m)])] +
                                                    p[static_cast<std::size_t>(tri.v[static_cast<std::size_t>(m2)])]);
                        const Vec2 gr = grad_r(mid.x, mid.y);
                        const double gr_c[2] = {gr.x, gr.y};
                        const double integrand = gr_c[dcomp] * phi_i + eval_r(mid.x, mid.y) * g_c[dcomp];
                        val -= area / 3.0 * integrand * p_mid;
                    }
                } else {
                    const Vec2 cen = (pts[0] + pts[1] + pts[2]) * (1.0 / 3.0);
                    const double p_cen = (p[static_cast<std::size_t>(tri.v[0])] + p[static_cast<std::size_t>(tri.v[1])] +
                                          p[static_cast<std::size_t>(tri.v[2])]) / 3.0;
                    const Vec2 gr = grad_r(cen.x, cen.y);
                    const double gr_c[2] = {gr.x, gr.y};
                    const double integrand = gr_c[dcomp] / 3.0 + eval_r(cen.x, cen.y) * g_c[dcomp];
                    val -= area * integrand * p_cen;
                }

                Vec2& acc = d.f[static_cast<std::size_t>(ptri.v[static_cast<std::size_t>(i)])];
                if (dcomp == 0) acc.x += val; else acc.y += val;
            }
        }
    }
    return d;
}

} // namespace shapegrad
