#pragma once

#include <string>
#include <vector>

#include "shapegrad/mesh.hpp"
#include "shapegrad/metrics.hpp"

namespace shapegrad {

enum class UpdateRule { Retraction, Geodesic };

struct OptConfig {
    double step_size = 1.0;
    int max_iterations = 500;
    int stop_window = 10;
    double stop_tol = 1e-4;
    MetricSpec metric;
    UpdateRule update = UpdateRule::Retraction;
    int geodesic_substeps = 10;
    double solver_tol = 1e-10;

    void check() const;
};

/// One row of the optimization trace; the series plotted in the benchmark
/// (objective, L2 norm of the shape gradient, mesh quality).
struct HistoryRecord {
    int iter = 0;
    double objective = 0.0;
    double norm_felas = 0.0;
    double msh_quality = 0.0;
};

enum class TerminationReason { Converged, MaxIterations, MeshInvalidated };
std::string to_string(TerminationReason r);

struct OptResult {
    TriMesh final_mesh;
    std::vector<HistoryRecord> history;
    TerminationReason reason = TerminationReason::MaxIterations;
};

/// max_{m=1..window} J[k-m] - J[k] < tol evaluated at the last record.
/// Requires at least window+1 records.
bool stopping_criterion(const std::vector<HistoryRecord>& history, int window, double tol);

/// Riemannian steepest descent with fixed step size. Each iteration is
/// evaluated (state, adjoint, objective, gradient) and logged before the
/// update, so record k describes iterate k. A proposed update that inverts
/// an element is retried with half the step, up to 30 times, after which the
/// run stops with reason MeshInvalidated.
OptResult steepest_descent(const TriMesh& mesh0, const OptConfig& config);

/// One descent iteration, exposed for testing. Returns the updated mesh and
/// the record of the incoming iterate (iter field left at 0).
std::pair<TriMesh, HistoryRecord> iteration_step(const TriMesh& mesh, const OptConfig& config);

} // namespace shapegrad
