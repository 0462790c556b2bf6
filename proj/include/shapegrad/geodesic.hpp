#pragma once

#include <stdexcept>

#include "shapegrad/fem.hpp"
#include "shapegrad/mesh.hpp"
#include "shapegrad/metrics.hpp"

namespace shapegrad {

/// Point in the cotangent bundle of mesh-vertex configuration space.
struct PhaseState {
    std::vector<Vec2> q; // vertex coordinates (template connectivity)
    std::vector<Vec2> p; // conjugate momenta, zero on OUTER boundary DOFs
};

class GeodesicIntegrationError : public std::runtime_error {
public:
    GeodesicIntegrationError(const std::string& what, int step)
        : std::runtime_error(what), step(step) {}
    int step;
};

struct ShootResult;

/// Discrete metric operator reassembled at arbitrary vertex positions q on
/// the template connectivity. For HS metrics with s >= 2 the inter-factor
/// mass matrix is lumped so G(q) stays sparse and its q-derivative stays
/// element-local; the SP variant freezes the nodal mu values computed on the
/// template configuration.
class GeodesicMetric {
public:
    GeodesicMetric(const TriMesh& mesh_template, const MetricSpec& spec);

    const TriMesh& mesh_template() const { return template_; }
    const MetricSpec& spec() const { return spec_; }

    /// Explicit G(q) with OUTER-boundary constraint bookkeeping.
    SparseSystem metric_matrix_at(const std::vector<Vec2>& q) const;

    /// G(q) v through the factor chain (no linear solves).
    std::vector<double> apply(const std::vector<Vec2>& q, const std::vector<double>& v) const;
    /// G(q)^{-1} rhs through s factor solves.
    std::vector<double> solve(const std::vector<Vec2>& q, const std::vector<double>& rhs,
                              double tol = 1e-12) const;

    /// H(q,p) = 1/2 p^T G(q)^{-1} p.
    double hamiltonian(const PhaseState& state, double tol = 1e-12) const;

    /// dH/dq_i = -1/2 v^T (dG/dq_i) v with v = G^{-1}p; dG by central finite
    /// differences of element-local contributions. Raw values at every
    /// vertex, including constrained ones (the integrator masks them).
    std::vector<Vec2> dH_dq(const PhaseState& state, double tol = 1e-12) const;

private:
    struct DeltaCache;
    void build_operator(const std::vector<Vec2>& q, SparseMatrix& B, std::vector<double>& lumped) const;
    void check_positive(const std::vector<Vec2>& q, int step) const;
    DeltaCache build_delta_cache_at(const std::vector<Vec2>& q) const;
    std::vector<Vec2> dH_with(const SparseMatrix& B, const std::vector<double>& lumped,
                              const DeltaCache& cache, const std::vector<double>& v) const;

    friend PhaseState verlet_step(const GeodesicMetric&, const PhaseState&, double);
    friend ShootResult shoot(const TriMesh&, const VectorField&, double, int, const MetricSpec&);

    TriMesh template_;
    MetricSpec spec_;
    ScalarField frozen_mu_;                 // SP only
    std::vector<unsigned char> constrained_; // per interleaved DOF
};

/// Convenience free functions matching the operation names.
SparseSystem metric_matrix_at(const std::vector<Vec2>& q, const TriMesh& mesh_template,
                              const MetricSpec& spec);
double hamiltonian(const PhaseState& state, const TriMesh& mesh_template, const MetricSpec& spec);
std::vector<Vec2> dH_dq(const PhaseState& state, const TriMesh& mesh_template,
                        const MetricSpec& spec);

struct ShootDiagnostics {
    int step;           // 0 is the initial state
    double hamiltonian;
    double min_quality;
};

struct ShootResult {
    TriMesh mesh;
    VectorField final_velocity; // G(q_T)^{-1} p_T
    std::vector<ShootDiagnostics> diagnostics;
};

/// Geodesic shooting by the generalized Stormer-Verlet scheme: p0 = G(q0)v0,
/// then n_steps symmetric steps of size T/n_steps with the implicit half-step
/// equations solved by fixed-point iteration. Throws
/// GeodesicIntegrationError if the mesh inverts mid-trajectory.
ShootResult shoot(const TriMesh& mesh, const VectorField& v0, double T, int n_steps,
                  const MetricSpec& spec);

/// Single Stormer-Verlet step of size h, exposed for symmetry tests.
PhaseState verlet_step(const GeodesicMetric& metric, const PhaseState& state, double h);

} // namespace shapegrad
