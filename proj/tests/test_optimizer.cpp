#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "shapegrad/optimizer.hpp"
#include "shapegrad/problem.hpp"

using namespace shapegrad;

namespace {

std::vector<HistoryRecord> records_from(const std::vector<double>& objectives) {
    std::vector<HistoryRecord> h;
    for (std::size_t i = 0; i < objectives.size(); ++i)
        h.push_back({static_cast<int>(i), objectives[i], 0.0, 1.0});
    return h;
}

OptConfig small_config() {
    OptConfig cfg;
    cfg.metric = MetricSpec::hs(2, 0.09);
    cfg.step_size = 1.0;
    cfg.max_iterations = 200;
    return cfg;
}

} // namespace

TEST_CASE("stopping criterion window semantics") {
    SUBCASE("strictly decreasing objective never stops") {
        std::vector<double> j;
        for (int k = 0; k <= 15; ++k) j.push_back(-1.0 * k);
        CHECK_FALSE(stopping_criterion(records_from(j), 10, 1e-4));
    }
    SUBCASE("constant objective stops") {
        CHECK(stopping_criterion(records_from(std::vector<double>(11, 2.5)), 10, 1e-4));
    }
    SUBCASE("a plateau only stops once the old record leaves the window") {
        // [0, -0.5, -0.5, ...]: the lag-10 decrement still sees J=0 at the
        // 11th record, so the criterion is false there and true one later.
        std::vector<double> j{0.0};
        while (j.size() < 11) j.push_back(-0.5);
        CHECK_FALSE(stopping_criterion(records_from(j), 10, 1e-4));
        j.push_back(-0.5);
        CHECK(stopping_criterion(records_from(j), 10, 1e-4));
    }
    SUBCASE("needs window+1 records") {
        CHECK_THROWS_AS(stopping_criterion(records_from({1.0, 2.0}), 10, 1e-4),
                        std::invalid_argument);
    }
}

TEST_CASE("termination reasons and bounds") {
    const TriMesh mesh = generate_circle_in_box(1.0, {0.0, 0.0}, 3.0, 16);

    SUBCASE("max_iterations = 0 evaluates once and returns the input mesh") {
        OptConfig cfg = small_config();
        cfg.max_iterations = 0;
        const OptResult res = steepest_descent(mesh, cfg);
        CHECK(res.reason == TerminationReason::MaxIterations);
        CHECK(res.history.size() == 1);
        CHECK(res.history[0].iter == 0);
        for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
            CHECK(res.final_mesh.vertices[i].x == mesh.vertices[i].x);
            CHECK(res.final_mesh.vertices[i].y == mesh.vertices[i].y);
        }
        CHECK(to_string(res.reason) == "max iterations");
    }

    SUBCASE("an infinite tolerance converges as soon as the window fills") {
        OptConfig cfg = small_config();
        cfg.stop_window = 3;
        cfg.stop_tol = 1e100;
        const OptResult res = steepest_descent(mesh, cfg);
        CHECK(res.reason == TerminationReason::Converged);
        CHECK(res.history.back().iter == 3);
    }

    SUBCASE("never exceeds max_iterations") {
        OptConfig cfg = small_config();
        cfg.max_iterations = 5;
        const OptResult res = steepest_descent(mesh, cfg);
        CHECK(res.history.size() <= 6);
        CHECK(res.history.back().iter <= 5);
    }

    SUBCASE("invalid initial mesh is rejected") {
        TriMesh broken = mesh;
        std::swap(broken.triangles[0].v[0], broken.triangles[0].v[1]);
        CHECK_THROWS_AS(steepest_descent(broken, small_config()), std::invalid_argument);
    }

    SUBCASE("every logged quality is positive") {
        OptConfig cfg = small_config();
        cfg.max_iterations = 8;
        const OptResult res = steepest_descent(mesh, cfg);
        for (const auto& r : res.history) CHECK(r.msh_quality > 0.0);
    }
}

TEST_CASE("retraction update moves vertices by exactly -step * V") {
    const TriMesh mesh = generate_circle_in_box(1.0, {0.0, 0.0}, 3.0, 16);
    OptConfig cfg = small_config();
    cfg.step_size = 0.5;

    // recompute the gradient the same way the step does
    const ProblemState st = reduced_objective(mesh);
    const ShapeDerivative f = assemble_shape_derivative(mesh, st.y, st.p);
    const GradientResult g = riemannian_gradient(mesh, f, cfg.metric);

    const auto [next, rec] = iteration_step(mesh, cfg);
    CHECK(rec.objective == st.J);
    CHECK(rec.norm_felas == g.l2_norm);
    CHECK(std::isfinite(rec.msh_quality));
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        CHECK(next.vertices[i].x == mesh.vertices[i].x - 0.5 * g.V[i].x);
        CHECK(next.vertices[i].y == mesh.vertices[i].y - 0.5 * g.V[i].y);
    }
}

TEST_CASE("one small step decreases J at the predicted first-order rate") {
    const TriMesh mesh = generate_circle_in_box(1.0, {0.0, 0.0}, 3.0, 48);
    const ProblemState st = reduced_objective(mesh);
    const ShapeDerivative f = assemble_shape_derivative(mesh, st.y, st.p);
    const GradientResult g = riemannian_gradient(mesh, f, MetricSpec::hs(2, 0.09));

    auto slope = [&](double t) {
        const TriMesh moved = displace(mesh, g.V, -t);
        return (objective(moved, solve_state(moved)) - st.J) / t;
    };
    // Richardson extrapolation of the slopes at t and t/10 removes the O(t)
    // term; the limit is -dJ[V] = -f.V.
    const double s1 = slope(1e-3);
    const double s2 = slope(1e-4);
    const double extrapolated = (10.0 * s2 - s1) / 9.0;
    CHECK(std::abs(extrapolated + g.pairing) <= 0.05 * std::abs(g.pairing));
}

TEST_CASE("objective decreases monotonically on a short benchmark run") {
    const TriMesh mesh = generate_circle_in_box(1.0, {0.0, 0.0}, 3.0, 24);
    OptConfig cfg = small_config();
    cfg.max_iterations = 10;
    const OptResult res = steepest_descent(mesh, cfg);
    for (std::size_t k = 1; k < res.history.size(); ++k)
        CHECK(res.history[k].objective <= res.history[k - 1].objective + 1e-6);
}

TEST_CASE("step safeguard halves its way out of a fold or reports invalidation") {
    const TriMesh mesh = generate_circle_in_box(1.0, {0.0, 0.0}, 3.0, 16);
    OptConfig cfg = small_config();
    cfg.step_size = 2e4; // proposals at this step fold the mesh
    cfg.max_iterations = 3;
    const OptResult res = steepest_descent(mesh, cfg);
    CHECK((res.reason == TerminationReason::MaxIterations ||
           res.reason == TerminationReason::MeshInvalidated ||
           res.reason == TerminationReason::Converged));
    for (const auto& r : res.history) CHECK(r.msh_quality > 0.0);
    CHECK(validate_mesh(res.final_mesh).empty());
}
