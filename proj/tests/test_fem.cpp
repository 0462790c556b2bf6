#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "shapegrad/fem.hpp"
#include "shapegrad/metrics.hpp"

using namespace shapegrad;

namespace {

TriMesh unit_right_triangle() {
    TriMesh m;
    m.vertices = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
    m.triangles = {{{0, 1, 2}, Region::IN}};
    return m;
}

// Gaussian elimination with partial pivoting; the independent dense oracle.
std::vector<double> dense_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        std::swap(a[c], a[piv]);
        std::swap(b[c], b[piv]);
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = a[r][c] / a[c][c];
            for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
            b[r] -= f * b[c];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
        x[i] = s / a[i][i];
    }
    return x;
}

} // namespace

TEST_CASE("P1 stiffness of the unit right triangle matches hand integration") {
    const TriMesh m = unit_right_triangle();
    const SparseSystem K = assemble_scalar_laplace(m, AssemblyRegion::ALL, 1.0);
    const double expect[3][3] = {{1.0, -0.5, -0.5}, {-0.5, 0.5, 0.0}, {-0.5, 0.0, 0.5}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(K.matrix.entry(i, j) == doctest::Approx(expect[i][j]).epsilon(1e-14));

    SUBCASE("row sums vanish (constants in the kernel)") {
        for (int i = 0; i < 3; ++i) {
            double s = 0.0;
            for (int j = 0; j < 3; ++j) s += K.matrix.entry(i, j);
            CHECK(std::abs(s) <= 1e-15);
        }
    }
    SUBCASE("coefficient scales linearly") {
        const SparseSystem K2 = assemble_scalar_laplace(m, AssemblyRegion::ALL, 2.0);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                CHECK(K2.matrix.entry(i, j) == doctest::Approx(2.0 * K.matrix.entry(i, j)).epsilon(1e-14));
    }
    SUBCASE("nodal coefficient is taken at the centroid") {
        const ScalarField c = {1.0, 2.0, 3.0}; // centroid value 2
        const SparseSystem Kc = assemble_scalar_laplace(m, AssemblyRegion::ALL, c);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                CHECK(Kc.matrix.entry(i, j) == doctest::Approx(2.0 * K.matrix.entry(i, j)).epsilon(1e-14));
    }
}

TEST_CASE("P1 mass matrix of the unit right triangle") {
    const TriMesh m = unit_right_triangle();
    const SparseSystem M = assemble_scalar_mass(m, AssemblyRegion::ALL);
    const double area = 0.5;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(M.matrix.entry(i, j) ==
                  doctest::Approx(area / 12.0 * (i == j ? 2.0 : 1.0)).epsilon(1e-14));

    double total = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) total += M.matrix.entry(i, j);
    CHECK(total == doctest::Approx(area).epsilon(1e-14));
}

TEST_CASE("assembled operators are symmetric with mesh-graph sparsity") {
    const TriMesh mesh = generate_circle_in_box(1.0, {0.0, 0.0}, 3.0, 20);
    const auto K = assemble_scalar_laplace(mesh, AssemblyRegion::ALL, 1.0);
    const auto M = assemble_scalar_mass(mesh, AssemblyRegion::ALL);
    const auto B = assemble_vector_helmholtz(mesh, AssemblyRegion::ALL, 0.07);
    const auto E = assemble_elasticity(mesh, AssemblyRegion::ALL,
                                       ScalarField(mesh.vertices.size(), 1.5), 0.3);
    CHECK(K.matrix.symmetry_defect() <= 1e-12);
    CHECK(M.matrix.symmetry_defect() <= 1e-12);
    CHECK(B.matrix.symmetry_defect() <= 1e-12);
    CHECK(E.matrix.symmetry_defect() <= 1e-12);

    // scalar operators: one row per vertex, entries only on mesh neighbors
    CHECK(K.matrix.size() == mesh.vertex_count());
    CHECK(B.matrix.size() == 2 * mesh.vertex_count());
}

TEST_CASE("helmholtz operator is mass plus A times stiffness") {
    const TriMesh mesh = generate_circle_in_box(1.0, {0.0, 0.0}, 3.0, 12);
    const double A = 0.09;
    const auto B = assemble_vector_helmholtz(mesh, AssemblyRegion::ALL, A);
    const auto M = assemble_vector_mass(mesh, AssemblyRegion::ALL);
    const auto K = assemble_vector_stiffness(mesh, AssemblyRegion::ALL);

    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> x(static_cast<std::size_t>(B.matrix.size()));
    for (auto& v : x) v = u(rng);
    const auto bx = B.matrix.apply(x);
    const auto mx = M.matrix.apply(x);
    const auto kx = K.matrix.apply(x);
    double scale = 0.0, defect = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        scale = std::max(scale, std::abs(bx[i]));
        defect = std::max(defect, std::abs(bx[i] - mx[i] - A * kx[i]));
    }
    CHECK(defect <= 1e-12 * scale);

    SUBCASE("A = 0 reduces to the vector mass") {
        const auto B0 = assemble_vector_helmholtz(mesh, AssemblyRegion::ALL, 0.0);
        const auto b0x = B0.matrix.apply(x);
        for (std::size_t i = 0; i < x.size(); ++i)
            CHECK(b0x[i] == doctest::Approx(mx[i]).epsilon(1e-13));
    }
    SUBCASE("stiffness annihilates constant fields") {
        VectorField c(mesh.vertices.size(), {0.3, -0.8});
        const auto bc = B.matrix.apply(flatten(c));
        const auto mc = M.matrix.apply(flatten(c));
        for (std::size_t i = 0; i < bc.size(); ++i)
            CHECK(bc[i] == doctest::Approx(mc[i]).epsilon(1e-12));
    }
}

TEST_CASE("elasticity energy vanishes on rigid motions") {
    const TriMesh mesh = generate_circle_in_box(1.0, {0.0, 0.0}, 3.0, 16);
    ScalarField mu(mesh.vertices.size());
    for (std::size_t i = 0; i < mu.size(); ++i) mu[i] = 1.0 + 0.1 * static_cast<double>(i % 7);
    const auto E = assemble_elasticity(mesh, AssemblyRegion::ALL, mu, 0.0);

    auto energy = [&](const VectorField& f) {
        const auto x = flatten(f);
        const auto ax = E.matrix.apply(x);
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * ax[i];
        return s;
    };

    VectorField translation(mesh.vertices.size(), {0.7, -0.2});
    CHECK(std::abs(energy(translation)) <= 1e-12);

    VectorField rotation(mesh.vertices.size());
    for (std::size_t i = 0; i < rotation.size(); ++i)
        rotation[i] = {-mesh.vertices[i].y, mesh.vertices[i].x};
    CHECK(std::abs(energy(rotation)) <= 1e-10);

    SUBCASE("energies scale with mu when lambda = 0") {
        ScalarField mu2(mu.size());
        for (std::size_t i = 0; i < mu.size(); ++i) mu2[i] = 2.0 * mu[i];
        const auto E2 = assemble_elasticity(mesh, AssemblyRegion::ALL, mu2, 0.0);
        std::mt19937 rng(11);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        std::vector<double> x(static_cast<std::size_t>(E.matrix.size()));
        for (auto& v : x) v = u(rng);
        const auto a1 = E.matrix.apply(x);
        const auto a2 = E2.matrix.apply(x);
        double e1 = 0.0, e2 = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            e1 += x[i] * a1[i];
            e2 += x[i] * a2[i];
        }
        CHECK(e2 == doctest::Approx(2.0 * e1).epsilon(1e-12));
    }
}

TEST_CASE("dirichlet constraints are recovered exactly") {
    const TriMesh mesh = generate_circle_in_box(1.0, {0.0, 0.0}, 3.0, 12);
    SparseSystem K = assemble_scalar_laplace(mesh, AssemblyRegion::ALL, 1.0);

    SUBCASE("empty constraint set is the identity transformation") {
        const SparseSystem same = apply_dirichlet(K, {}, std::vector<double>{});
        CHECK(same.free_count() == same.size());
    }

    const auto outer = boundary_vertices(mesh, BoundaryMarker::OUTER);
    const auto inner = boundary_vertices(mesh, BoundaryMarker::INNER);
    SparseSystem sys = apply_dirichlet(K, outer, 2.0);
    sys = apply_dirichlet(sys, inner, -1.0);
    const auto x = solve_spd(sys, std::vector<double>(mesh.vertices.size(), 0.0));
    for (int v : outer) CHECK(x[static_cast<std::size_t>(v)] == 2.0);
    for (int v : inner) CHECK(x[static_cast<std::size_t>(v)] == -1.0);
    // harmonic interpolation stays between its boundary values
    for (double xv : x) {
        CHECK(xv >= -1.0 - 1e-9);
        CHECK(xv <= 2.0 + 1e-9);
    }
}

TEST_CASE("solve_spd agrees with a dense elimination oracle") {
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const int n = 5;
    std::vector<std::vector<double>> b(n, std::vector<double>(n));
    for (auto& row : b)
        for (auto& v : row) v = u(rng);
    // A = B^T B + I is SPD
    std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] += b[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
            if (i == j) a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] += 1.0;
        }
    std::vector<SparseMatrix::Triplet> t;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) t.push_back({i, j, a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]});
    SparseSystem sys;
    sys.matrix = SparseMatrix::from_triplets(n, std::move(t));

    std::vector<double> rhs(n);
    for (auto& v : rhs) v = u(rng);
    const auto x = solve_spd(sys, rhs, 1e-13);
    const auto ref = dense_solve(a, rhs);
    for (int i = 0; i < n; ++i)
        CHECK(x[static_cast<std::size_t>(i)] == doctest::Approx(ref[static_cast<std::size_t>(i)]).epsilon(1e-10));
}

TEST_CASE("solve_spd special cases and failures") {
    SUBCASE("identity system returns the right-hand side") {
        std::vector<SparseMatrix::Triplet> t = {{0, 0, 1.0}, {1, 1, 1.0}, {2, 2, 1.0}};
        SparseSystem sys;
        sys.matrix = SparseMatrix::from_triplets(3, std::move(t));
        const std::vector<double> rhs = {3.0, -1.0, 0.5};
        const auto x = solve_spd(sys, rhs);
        for (int i = 0; i < 3; ++i)
            CHECK(x[static_cast<std::size_t>(i)] == doctest::Approx(rhs[static_cast<std::size_t>(i)]).epsilon(1e-12));
    }
    SUBCASE("indefinite operator is detected") {
        // eigenvalues 3 and -1; the rhs must not lie in the positive
        // eigenspace or CG finds the solution without probing it
        std::vector<SparseMatrix::Triplet> t = {{0, 0, 1.0}, {0, 1, 2.0}, {1, 0, 2.0}, {1, 1, 1.0}};
        SparseSystem sys;
        sys.matrix = SparseMatrix::from_triplets(2, std::move(t));
        CHECK_THROWS_AS(solve_spd(sys, {1.0, 0.0}), SolverError);
    }
    SUBCASE("deterministic across repeated calls") {
        const TriMesh mesh = generate_circle_in_box(1.0, {0.0, 0.0}, 3.0, 16);
        SparseSystem K = assemble_scalar_laplace(mesh, AssemblyRegion::ALL, 1.0);
        K = apply_dirichlet(K, boundary_vertices(mesh, BoundaryMarker::OUTER), 0.0);
        std::vector<double> rhs(mesh.vertices.size());
        for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = std::sin(0.1 * static_cast<double>(i));
        const auto x1 = solve_spd(K, rhs);
        const auto x2 = solve_spd(K, rhs);
        for (std::size_t i = 0; i < rhs.size(); ++i) CHECK(x1[i] == x2[i]);
    }
}

TEST_CASE("galerkin exactness: rhs built from a P1 field is recovered") {
    const TriMesh mesh = generate_circle_in_box(1.0, {0.0, 0.0}, 3.0, 24);
    const SparseSystem K = assemble_scalar_laplace(mesh, AssemblyRegion::ALL, 1.0);
    ScalarField v(mesh.vertices.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = 0.3 * mesh.vertices[i].x - 0.7 * mesh.vertices[i].y + 0.1;
    const auto rhs = K.matrix.apply(v);

    std::vector<int> bnd = boundary_vertices(mesh, BoundaryMarker::OUTER);
    std::vector<double> bvals;
    for (int d : bnd) bvals.push_back(v[static_cast<std::size_t>(d)]);
    const SparseSystem sys = apply_dirichlet(K, bnd, bvals);
    const auto x = solve_spd(sys, rhs, 1e-12);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(x[i] == doctest::Approx(v[i]).epsilon(1e-9));
}

TEST_CASE("p1_gradient is exact for affine fields") {
    const TriMesh mesh = generate_circle_in_box(1.0, {0.0, 0.0}, 3.0, 16);
    ScalarField affine(mesh.vertices.size()), constant(mesh.vertices.size(), 4.2);
    for (std::size_t i = 0; i < affine.size(); ++i)
        affine[i] = 1.5 * mesh.vertices[i].x - 2.5 * mesh.vertices[i].y + 0.25;

    for (const Vec2& g : p1_gradient(mesh, affine)) {
        CHECK(g.x == doctest::Approx(1.5).epsilon(1e-12));
        CHECK(g.y == doctest::Approx(-2.5).epsilon(1e-12));
    }
    for (const Vec2& g : p1_gradient(mesh, constant)) {
        CHECK(std::abs(g.x) <= 1e-12);
        CHECK(std::abs(g.y) <= 1e-12);
    }

    SUBCASE("gradient of a sum is the sum of gradients") {
        ScalarField sum(affine.size());
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = affine[i] + constant[i];
        const auto ga = p1_gradient(mesh, affine);
        const auto gs = p1_gradient(mesh, sum);
        for (std::size_t t = 0; t < ga.size(); ++t) {
            CHECK(gs[t].x == doctest::Approx(ga[t].x).epsilon(1e-12));
            CHECK(gs[t].y == doctest::Approx(ga[t].y).epsilon(1e-12));
        }
    }
}
