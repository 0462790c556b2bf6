#include "shapegrad/optimizer.hpp"

#include <limits>
#include <stdexcept>

#include "shapegrad/geodesic.hpp"
#include "shapegrad/problem.hpp"

namespace shapegrad {

void OptConfig::check() const {
    if (!(step_size > 0.0)) throw std::invalid_argument("OptConfig: step_size must be positive");
    if (stop_window < 1) throw std::invalid_argument("OptConfig: stop_window must be >= 1");
    if (!(stop_tol > 0.0)) throw std::invalid_argument("OptConfig: stop_tol must be positive");
    if (max_iterations < 0) throw std::invalid_argument("OptConfig: max_iterations must be >= 0");
    if (update == UpdateRule::Geodesic && geodesic_substeps < 1)
        throw std::invalid_argument("OptConfig: geodesic_substeps must be >= 1");
    metric.check();
}

std::string to_string(TerminationReason r) {
    switch (r) {
        case TerminationReason::Converged: return "converged";
        case TerminationReason::MaxIterations: return "max iterations";
        case TerminationReason::MeshInvalidated: return "mesh invalidated";
    }
    return "unknown";
}

bool stopping_criterion(const std::vector<HistoryRecord>& history, int window, double tol) {
    if (static_cast<int>(history.size()) < window + 1)
        throw std::invalid_argument("stopping_criterion: needs at least window+1 records");
    const std::size_t k = history.size() - 1;
    double worst = -std::numeric_limits<double>::infinity();
    for (int m = 1; m <= window; ++m)
        worst = std::max(worst, history[k - static_cast<std::size_t>(m)].objective - history[k].objective);
    return worst < tol;
}

namespace {

bool has_inverted_element(const TriMesh& mesh) {
    for (int t = 0; t < mesh.triangle_count(); ++t)
        if (!(mesh.triangle_area(t) > 0.0)) return true;
    return false;
}

struct Evaluation {
    HistoryRecord record;
    VectorField direction; // Riemannian gradient V
};

Evaluation evaluate(const TriMesh& mesh, const OptConfig& config) {
    const ProblemState st = reduced_objective(mesh, config.solver_tol);
    const ShapeDerivative f = assemble_shape_derivative(mesh, st.y, st.p);
    const GradientResult g = riemannian_gradient(mesh, f, config.metric, config.solver_tol);
    Evaluation ev;
    ev.record.objective = st.J;
    ev.record.norm_felas = g.l2_norm;
    ev.record.msh_quality = mesh_quality(mesh).min_quality;
    ev.direction = g.V;
    return ev;
}

// Fixed step first, halving only when the proposal folds the mesh.
// Returns true with the accepted mesh, or false if 30 halvings were not
// enough (the stall is reported as MeshInvalidated by the caller).
bool try_update(const TriMesh& mesh, const VectorField& V, const OptConfig& config, TriMesh& out) {
    double s = config.step_size;
    for (int attempt = 0; attempt <= 30; ++attempt, s *= 0.5) {
        if (config.update == UpdateRule::Retraction) {
            TriMesh cand = displace(mesh, V, -s);
            if (!has_inverted_element(cand)) {
                out = std::move(cand);
                return true;
            }
        } else {
            VectorField v0(V.size());
            for (std::size_t i = 0; i < V.size(); ++i) v0[i] = V[i] * (-s);
            try {
                ShootResult sr = shoot(mesh, v0, 1.0, config.geodesic_substeps, config.metric);
                if (!has_inverted_element(sr.mesh)) {
                    out = std::move(sr.mesh);
                    return true;
                }
            } catch (const GeodesicIntegrationError&) {
                // inverted mid-trajectory: retry with a smaller step
            }
        }
    }
    return false;
}

} // namespace

OptResult steepest_descent(const TriMesh& mesh0, const OptConfig& config) {
    config.check();
    {
        const auto violations = validate_mesh(mesh0);
        if (!violations.empty())
            throw std::invalid_argument("steepest_descent: initial mesh invalid: " +
                                        violations.front().format());
    }

    OptResult res;
    res.final_mesh = mesh0;
    for (int k = 0;; ++k) {
        Evaluation ev;
        try {
            ev = evaluate(res.final_mesh, config);
        } catch (const SolverError& e) {
            throw SolverError("iteration " + std::to_string(k) + ": " + e.what(), e.final_residual,
                              e.iterations);
        }
        ev.record.iter = k;
        res.history.push_back(ev.record);

        if (k >= config.stop_window &&
            stopping_criterion(res.history, config.stop_window, config.stop_tol)) {
            res.reason = TerminationReason::Converged;
            return res;
        }
        if (k == config.max_iterations) {
            res.reason = TerminationReason::MaxIterations;
            return res;
        }

        TriMesh next;
        if (!try_update(res.final_mesh, ev.direction, config, next)) {
            res.reason = TerminationReason::MeshInvalidated;
            return res;
        }
        res.final_mesh = std::move(next);
    }
}

std::pair<TriMesh, HistoryRecord> iteration_step(const TriMesh& mesh, const OptConfig& config) {
    config.check();
    Evaluation ev = evaluate(mesh, config);
    TriMesh next;
    if (!try_update(mesh, ev.direction, config, next))
        throw std::runtime_error("iteration_step: update invalidated the mesh");
    return {std::move(next), ev.record};
}

} // namespace shapegrad
