#pragma once

#include "shapegrad/fem.hpp"
#include "shapegrad/mesh.hpp"

namespace shapegrad {

/// r(x,y) = 2.5*(x+0.4-y^2)^2 + x^2 + y^2 - 1, the benchmark source term.
double eval_r(double x, double y);
/// Closed-form gradient of r.
Vec2 grad_r(double x, double y);

/// State, adjoint and objective value of the benchmark on one mesh.
/// y and p live on the IN submesh (extract_region order).
struct ProblemState {
    ScalarField y;
    ScalarField p;
    double J = 0.0;
};

/// Covector dual to hold-all vector fields: f[i] pairs with the motion of
/// vertex i. Entries are nonzero only on vertices of IN triangles.
struct ShapeDerivative {
    std::vector<Vec2> f;
};

inline double pair_with(const ShapeDerivative& d, const VectorField& w) {
    double s = 0.0;
    for (std::size_t i = 0; i < d.f.size(); ++i) s += dot(d.f[i], w[i]);
    return s;
}

/// Quadrature used for the non-polynomial source r. EdgeMidpoint (3-point,
/// degree-2 exact) is the production rule; CentroidOnly exists as a
/// deliberately inconsistent rule for negative-control verification.
enum class SourceQuadrature { EdgeMidpoint, CentroidOnly };

ScalarField solve_state(const TriMesh& mesh, double tol = 1e-10);
ScalarField solve_adjoint(const TriMesh& mesh, double tol = 1e-10);

/// Exact P1 integral of y over the IN region.
double objective(const TriMesh& mesh, const ScalarField& y);

ProblemState reduced_objective(const TriMesh& mesh, double tol = 1e-10);

/// Volume form of the shape derivative, assembled against every hold-all
/// vertex basis field with the same quadrature the state solve uses, so the
/// result is the exact derivative of the discrete reduced objective under
/// vertex motion (up to solver tolerance).
ShapeDerivative assemble_shape_derivative(const TriMesh& mesh, const ScalarField& y,
                                          const ScalarField& p,
                                          SourceQuadrature quad = SourceQuadrature::EdgeMidpoint);

} // namespace shapegrad
