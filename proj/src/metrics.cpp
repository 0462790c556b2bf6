#include "shapegrad/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace shapegrad {

MetricSpec MetricSpec::sp(double mu_min, double mu_max, double lambda) {
    MetricSpec m;
    m.kind = MetricKind::SP;
    m.mu_min = mu_min;
    m.mu_max = mu_max;
    m.lambda = lambda;
    m.check();
    return m;
}

MetricSpec MetricSpec::hs(int s, double A) {
    MetricSpec m;
    m.kind = MetricKind::HS;
    m.s = s;
    m.A = A;
    m.check();
    return m;
}

void MetricSpec::check() const {
    if (kind == MetricKind::SP) {
        if (!(mu_min > 0.0) || !(mu_max > 0.0))
            throw std::invalid_argument("MetricSpec: mu_min and mu_max must be positive");
        if (mu_min > mu_max) throw std::invalid_argument("MetricSpec: mu_min must be <= mu_max");
    } else {
        if (s < 1 || s > 4) throw std::invalid_argument("MetricSpec: s must be in {1,2,3,4}");
        if (!(A > 0.0)) throw std::invalid_argument("MetricSpec: A must be positive");
    }
}

std::string MetricSpec::label() const {
    if (kind == MetricKind::SP) return "SP";
    return "H" + std::to_string(s);
}

std::vector<int> outer_boundary_dofs(const TriMesh& mesh) {
    std::vector<int> dofs;
    for (int v : boundary_vertices(mesh, BoundaryMarker::OUTER)) {
        dofs.push_back(2 * v);
        dofs.push_back(2 * v + 1);
    }
    return dofs;
}

ScalarField mu_field(const TriMesh& mesh, double mu_min, double mu_max, double tol) {
    SparseSystem K = assemble_scalar_laplace(mesh, AssemblyRegion::ALL, 1.0);
    const auto inner = boundary_vertices(mesh, BoundaryMarker::INNER);
    const auto outer = boundary_vertices(mesh, BoundaryMarker::OUTER);
    K = apply_dirichlet(K, inner, mu_max);
    K = apply_dirichlet(K, outer, mu_min);
    return solve_spd(K, std::vector<double>(mesh.vertices.size(), 0.0), tol);
}

namespace {

double mass_l2_norm(const SparseMatrix& mass, const std::vector<double>& v) {
    return std::sqrt(std::max(0.0, [&] {
        const auto mv = mass.apply(v);
        double s = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * mv[i];
        return s;
    }()));
}

} // namespace

GradientResult riemannian_gradient(const TriMesh& mesh, const ShapeDerivative& f,
                                   const MetricSpec& spec, double tol) {
    spec.check();
    if (f.f.size() != mesh.vertices.size())
        throw std::invalid_argument("riemannian_gradient: derivative not assembled on this mesh");
    const std::vector<int> outer = outer_boundary_dofs(mesh);
    const std::vector<double> rhs = flatten(f.f);
    const SparseSystem mass = assemble_vector_mass(mesh, AssemblyRegion::ALL);

    std::vector<double> v;
    if (spec.kind == MetricKind::SP) {
        const ScalarField mu = mu_field(mesh, spec.mu_min, spec.mu_max, tol);
        SparseSystem a = assemble_elasticity(mesh, AssemblyRegion::ALL, mu, spec.lambda);
        a = apply_dirichlet(a, outer, 0.0);
        v = solve_spd(a, rhs, tol);
    } else {
        SparseSystem b = assemble_vector_helmholtz(mesh, AssemblyRegion::ALL, spec.A);
        b = apply_dirichlet(b, outer, 0.0);
        v = solve_spd(b, rhs, tol);
        for (int i = 1; i < spec.s; ++i) v = solve_spd(b, mass.matrix.apply(v), tol);
    }

    GradientResult res;
    res.V = unflatten(v);
    res.l2_norm = mass_l2_norm(mass.matrix, v);
    res.pairing = pair_with(f, res.V);
    return res;
}

double metric_pairing(const TriMesh& mesh, const MetricSpec& spec, const VectorField& U,
                      const VectorField& V, double tol) {
    spec.check();
    if (U.size() != mesh.vertices.size() || V.size() != mesh.vertices.size())
        throw std::invalid_argument("metric_pairing: field size mismatch");
    const std::vector<int> outer = outer_boundary_dofs(mesh);
    std::vector<unsigned char> is_outer(2 * mesh.vertices.size(), 0);
    for (int d : outer) is_outer[static_cast<std::size_t>(d)] = 1;
    auto mask = [&](std::vector<double>& x) {
        for (std::size_t i = 0; i < x.size(); ++i)
            if (is_outer[i]) x[i] = 0.0;
    };

    std::vector<double> u = flatten(U);
    std::vector<double> v = flatten(V);
    mask(u);
    mask(v);

    std::vector<double> z;
    if (spec.kind == MetricKind::SP) {
        const ScalarField mu = mu_field(mesh, spec.mu_min, spec.mu_max, tol);
        const SparseSystem a = assemble_elasticity(mesh, AssemblyRegion::ALL, mu, spec.lambda);
        z = a.matrix.apply(v);
        mask(z);
    } else {
        SparseSystem b = assemble_vector_helmholtz(mesh, AssemblyRegion::ALL, spec.A);
        SparseSystem mass = assemble_vector_mass(mesh, AssemblyRegion::ALL);
        mass = apply_dirichlet(mass, outer, 0.0);
        z = b.matrix.apply(v);
        mask(z);
        for (int i = 1; i < spec.s; ++i) {
            z = b.matrix.apply(solve_spd(mass, z, tol));
            mask(z);
        }
    }
    double s = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) s += u[i] * z[i];
    return s;
}

} // namespace shapegrad
