#pragma once

#include "shapegrad/fem.hpp"
#include "shapegrad/mesh.hpp"
#include "shapegrad/problem.hpp"

namespace shapegrad {

enum class MetricKind { SP, HS };

/// Which Riemannian metric defines gradients (and geodesics).
/// SP: linear-elasticity operator with harmonically interpolated mu.
/// HS: Sobolev metric (id - A*Lap)^s, realized as s Helmholtz factors.
struct MetricSpec {
    MetricKind kind = MetricKind::HS;
    // SP parameters
    double mu_min = 1.0;
    double mu_max = 5.0;
    double lambda = 0.0;
    // HS parameters
    int s = 2;
    double A = 0.09;

    static MetricSpec sp(double mu_min, double mu_max, double lambda);
    static MetricSpec hs(int s, double A);

    /// Throws std::invalid_argument on out-of-range parameters.
    void check() const;
    std::string label() const; // "SP", "H1".."H4"
};

struct GradientResult {
    VectorField V;    // Riemannian gradient; zero on OUTER boundary DOFs
    double l2_norm;   // sqrt(V^T M V)
    double pairing;   // dJ[V] = f . V, nonnegative for SPD metrics
};

/// Harmonic interpolation of the SP stiffness parameter: Laplace solve with
/// mu_max on the INNER and mu_min on the OUTER boundary.
ScalarField mu_field(const TriMesh& mesh, double mu_min, double mu_max, double tol = 1e-10);

/// Solves G V = f for the descent direction under the chosen metric, with
/// zero displacement on the OUTER boundary.
GradientResult riemannian_gradient(const TriMesh& mesh, const ShapeDerivative& f,
                                   const MetricSpec& spec, double tol = 1e-10);

/// U^T G V without forming G: SP applies the elasticity operator, HS applies
/// the factorization B (M^-1 B)^(s-1) through mass solves.
double metric_pairing(const TriMesh& mesh, const MetricSpec& spec, const VectorField& U,
                      const VectorField& V, double tol = 1e-11);

/// DOF indices (interleaved) of the OUTER boundary, the constrained set for
/// every metric solve.
std::vector<int> outer_boundary_dofs(const TriMesh& mesh);

} // namespace shapegrad
