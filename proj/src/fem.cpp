#include "shapegrad/fem.hpp"

#include <algorithm>
#include <cmath>

namespace shapegrad {

std::vector<double> flatten(const VectorField& f) {
    std::vector<double> x(2 * f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        x[2 * i] = f[i].x;
        x[2 * i + 1] = f[i].y;
    }
    return x;
}

VectorField unflatten(const std::vector<double>& x) {
    VectorField f(x.size() / 2);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = {x[2 * i], x[2 * i + 1]};
    return f;
}

SparseMatrix SparseMatrix::from_triplets(int n, std::vector<Triplet> triplets) {
    std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    SparseMatrix m;
    m.n_ = n;
    m.row_ptr_.assign(static_cast<std::size_t>(n) + 1, 0);
    for (std::size_t k = 0; k < triplets.size();) {
        const int r = triplets[k].row;
        const int c = triplets[k].col;
        double v = 0.0;
        while (k < triplets.size() && triplets[k].row == r && triplets[k].col == c)
            v += triplets[k++].value;
        m.col_idx_.push_back(c);
        m.vals_.push_back(v);
        ++m.row_ptr_[static_cast<std::size_t>(r) + 1];
    }
    for (int r = 0; r < n; ++r)
        m.row_ptr_[static_cast<std::size_t>(r) + 1] += m.row_ptr_[static_cast<std::size_t>(r)];
    return m;
}

SparseMatrix::RowView SparseMatrix::row(int r) const {
    const int b = row_ptr_[static_cast<std::size_t>(r)];
    const int e = row_ptr_[static_cast<std::size_t>(r) + 1];
    return {col_idx_.data() + b, vals_.data() + b, e - b};
}

double SparseMatrix::entry(int i, int j) const {
    for (int k = row_ptr_[static_cast<std::size_t>(i)]; k < row_ptr_[static_cast<std::size_t>(i) + 1]; ++k)
        if (col_idx_[static_cast<std::size_t>(k)] == j) return vals_[static_cast<std::size_t>(k)];
    return 0.0;
}

void SparseMatrix::apply(const std::vector<double>& x, std::vector<double>& y) const {
    y.assign(static_cast<std::size_t>(n_), 0.0);
    for (int r = 0; r < n_; ++r) {
        double acc = 0.0;
        for (int k = row_ptr_[static_cast<std::size_t>(r)]; k < row_ptr_[static_cast<std::size_t>(r) + 1]; ++k)
            acc += vals_[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(col_idx_[static_cast<std::size_t>(k)])];
        y[static_cast<std::size_t>(r)] = acc;
    }
}

std::vector<double> SparseMatrix::apply(const std::vector<double>& x) const {
    std::vector<double> y;
    apply(x, y);
    return y;
}

std::vector<double> SparseMatrix::diagonal() const {
    std::vector<double> d(static_cast<std::size_t>(n_), 0.0);
    for (int r = 0; r < n_; ++r)
        d[static_cast<std::size_t>(r)] = entry(r, r);
    return d;
}

double SparseMatrix::symmetry_defect() const {
    double worst = 0.0, scale = 0.0;
    for (int r = 0; r < n_; ++r)
        for (int k = row_ptr_[static_cast<std::size_t>(r)]; k < row_ptr_[static_cast<std::size_t>(r) + 1]; ++k) {
            const int c = col_idx_[static_cast<std::size_t>(k)];
            const double v = vals_[static_cast<std::size_t>(k)];
            scale = std::max(scale, std::abs(v));
            worst = std::max(worst, std::abs(v - entry(c, r)));
        }
    return scale > 0.0 ? worst / scale : 0.0;
}

int SparseSystem::free_count() const {
    int n = 0;
    for (unsigned char c : constrained)
        if (!c) ++n;
    return n;
}

SparseSystem apply_dirichlet(const SparseSystem& system, const std::vector<int>& dofs,
                             const std::vector<double>& values) {
    if (dofs.size() != values.size())
        throw std::invalid_argument("apply_dirichlet: dofs/values size mismatch");
    SparseSystem out = system;
    if (out.constrained.empty()) {
        out.constrained.assign(static_cast<std::size_t>(out.size()), 0);
        out.constrained_value.assign(static_cast<std::size_t>(out.size()), 0.0);
    }
    for (std::size_t k = 0; k < dofs.size(); ++k) {
        const int d = dofs[k];
        if (d < 0 || d >= out.size()) throw std::invalid_argument("apply_dirichlet: DOF out of range");
        out.constrained[static_cast<std::size_t>(d)] = 1;
        out.constrained_value[static_cast<std::size_t>(d)] = values[k];
    }
    return out;
}

SparseSystem apply_dirichlet(const SparseSystem& system, const std::vector<int>& dofs, double value) {
    return apply_dirichlet(system, dofs, std::vector<double>(dofs.size(), value));
}

std::vector<double> solve_spd(const SparseSystem& system, const std::vector<double>& rhs,
                              double tol) {
    const int n = system.size();
    if (static_cast<int>(rhs.size()) != n)
        throw std::invalid_argument("solve_spd: rhs size mismatch");
    const bool has_constraints = !system.constrained.empty();
    auto is_free = [&](int i) {
        return !has_constraints || !system.constrained[static_cast<std::size_t>(i)];
    };

    // Eliminate prescribed values from the right-hand side.
    std::vector<double> g(static_cast<std::size_t>(n), 0.0);
    if (has_constraints)
        for (int i = 0; i < n; ++i)
            if (!is_free(i)) g[static_cast<std::size_t>(i)] = system.constrained_value[static_cast<std::size_t>(i)];
    std::vector<double> b = rhs;
    if (has_constraints) {
        std::vector<double> ag = system.matrix.apply(g);
        for (int i = 0; i < n; ++i)
            b[static_cast<std::size_t>(i)] = is_free(i) ? b[static_cast<std::size_t>(i)] - ag[static_cast<std::size_t>(i)] : 0.0;
    }

    auto mask = [&](std::vector<double>& v) {
        if (!has_constraints) return;
        for (int i = 0; i < n; ++i)
            if (!is_free(i)) v[static_cast<std::size_t>(i)] = 0.0;
    };

    std::vector<double> precond = system.matrix.diagonal();
    for (int i = 0; i < n; ++i) {
        double& d = precond[static_cast<std::size_t>(i)];
        d = (is_free(i) && d > 0.0) ? 1.0 / d : 0.0;
    }

    auto dot2 = [n](const std::vector<double>& a, const std::vector<double>& b2) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += a[static_cast<std::size_t>(i)] * b2[static_cast<std::size_t>(i)];
        return s;
    };

    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    std::vector<double> r = b;
    const double norm_b = std::sqrt(dot2(b, b));
    const int nfree = system.free_count();
    const int itmax = static_cast<int>(20.0 * std::sqrt(static_cast<double>(std::max(nfree, 1)))) + 1000;

    if (norm_b == 0.0) {
        for (int i = 0; i < n; ++i)
            if (!is_free(i)) x[static_cast<std::size_t>(i)] = g[static_cast<std::size_t>(i)];
        return x;
    }

    std::vector<double> z(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) z[static_cast<std::size_t>(i)] = precond[static_cast<std::size_t>(i)] * r[static_cast<std::size_t>(i)];
    std::vector<double> p = z;
    double rho = dot2(r, z);
    double res = norm_b;
    std::vector<double> ap;

    int it = 0;
    while (res > tol * norm_b && it < itmax) {
        system.matrix.apply(p, ap);
        mask(ap);
        const double pap = dot2(p, ap);
        if (!(pap > 0.0))
            throw SolverError("solve_spd: operator not positive definite on free DOFs", res / norm_b, it);
        const double alpha = rho / pap;
        for (int i = 0; i < n; ++i) {
            x[static_cast<std::size_t>(i)] += alpha * p[static_cast<std::size_t>(i)];
            r[static_cast<std::size_t>(i)] -= alpha * ap[static_cast<std::size_t>(i)];
        }
        for (int i = 0; i < n; ++i) z[static_cast<std::size_t>(i)] = precond[static_cast<std::size_t>(i)] * r[static_cast<std::size_t>(i)];
        const double rho_next = dot2(r, z);
        const double beta = rho_next / rho;
        rho = rho_next;
        for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = z[static_cast<std::size_t>(i)] + beta * p[static_cast<std::size_t>(i)];
        res = std::sqrt(dot2(r, r));
        ++it;
    }
    if (res > tol * norm_b)
        throw SolverError("solve_spd: no convergence after " + std::to_string(it) +
                              " iterations (relative residual " + std::to_string(res / norm_b) + ")",
                          res / norm_b, it);

    for (int i = 0; i < n; ++i)
        if (!is_free(i)) x[static_cast<std::size_t>(i)] = g[static_cast<std::size_t>(i)];
    return x;
}

ElementGeometry element_geometry(const Vec2& p0, const Vec2& p1, const Vec2& p2) {
    ElementGeometry eg;
    eg.area = signed_area(p0, p1, p2);
    const double inv = 1.0 / (2.0 * eg.area);
    eg.grad[0] = (p2 - p1).perp() * inv;
    eg.grad[1] = (p0 - p2).perp() * inv;
    eg.grad[2] = (p1 - p0).perp() * inv;
    return eg;
}

namespace {

bool in_region(Region tag, AssemblyRegion region) {
    switch (region) {
        case AssemblyRegion::IN: return tag == Region::IN;
        case AssemblyRegion::OUT: return tag == Region::OUT;
        case AssemblyRegion::ALL: return true;
    }
    return false;
}

using Triplets = std::vector<SparseMatrix::Triplet>;

SparseSystem finish_scalar(const TriMesh& mesh, Triplets t) {
    SparseSystem sys;
    sys.matrix = SparseMatrix::from_triplets(mesh.vertex_count(), std::move(t));
    return sys;
}

SparseSystem finish_vector(const TriMesh& mesh, Triplets t) {
    SparseSystem sys;
    sys.matrix = SparseMatrix::from_triplets(2 * mesh.vertex_count(), std::move(t));
    return sys;
}

template <typename CoeffAt>
SparseSystem scalar_laplace_impl(const TriMesh& mesh, AssemblyRegion region, CoeffAt coeff_at) {
    Triplets t;
    for (int e = 0; e < mesh.triangle_count(); ++e) {
        const auto& tri = mesh.triangles[static_cast<std::size_t>(e)];
        if (!in_region(tri.tag, region)) continue;
        const auto p = mesh.triangle_points(e);
        const auto eg = element_geometry(p[0], p[1], p[2]);
        const double c = coeff_at(tri);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                t.push_back({tri.v[static_cast<std::size_t>(i)], tri.v[static_cast<std::size_t>(j)],
                             c * eg.area * dot(eg.grad[static_cast<std::size_t>(i)], eg.grad[static_cast<std::size_t>(j)])});
    }
    return finish_scalar(mesh, std::move(t));
}

} // namespace

SparseSystem assemble_scalar_laplace(const TriMesh& mesh, AssemblyRegion region, double coefficient) {
    return scalar_laplace_impl(mesh, region, [&](const Triangle&) { return coefficient; });
}

SparseSystem assemble_scalar_laplace(const TriMesh& mesh, AssemblyRegion region,
                                     const ScalarField& coefficient) {
    if (coefficient.size() != mesh.vertices.size())
        throw std::invalid_argument("assemble_scalar_laplace: coefficient size mismatch");
    return scalar_laplace_impl(mesh, region, [&](const Triangle& tri) {
        return (coefficient[static_cast<std::size_t>(tri.v[0])] +
                coefficient[static_cast<std::size_t>(tri.v[1])] +
                coefficient[static_cast<std::size_t>(tri.v[2])]) / 3.0;
    });
}

SparseSystem assemble_scalar_mass(const TriMesh& mesh, AssemblyRegion region) {
    Triplets t;
    for (int e = 0; e < mesh.triangle_count(); ++e) {
        const auto& tri = mesh.triangles[static_cast<std::size_t>(e)];
        if (!in_region(tri.tag, region)) continue;
        const double area = mesh.triangle_area(e);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                t.push_back({tri.v[static_cast<std::size_t>(i)], tri.v[static_cast<std::size_t>(j)],
                             area / 12.0 * (i == j ? 2.0 : 1.0)});
    }
    return finish_scalar(mesh, std::move(t));
}

SparseSystem assemble_vector_mass(const TriMesh& mesh, AssemblyRegion region) {
    Triplets t;
    for (int e = 0; e < mesh.triangle_count(); ++e) {
        const auto& tri = mesh.triangles[static_cast<std::size_t>(e)];
        if (!in_region(tri.tag, region)) continue;
        const double area = mesh.triangle_area(e);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                const double v = area / 12.0 * (i == j ? 2.0 : 1.0);
                for (int d = 0; d < 2; ++d)
                    t.push_back({2 * tri.v[static_cast<std::size_t>(i)] + d,
                                 2 * tri.v[static_cast<std::size_t>(j)] + d, v});
            }
    }
    return finish_vector(mesh, std::move(t));
}

SparseSystem assemble_vector_stiffness(const TriMesh& mesh, AssemblyRegion region) {
    Triplets t;
    for (int e = 0; e < mesh.triangle_count(); ++e) {
        const auto& tri = mesh.triangles[static_cast<std::size_t>(e)];
        if (!in_region(tri.tag, region)) continue;
        const auto p = mesh.triangle_points(e);
        const auto eg = element_geometry(p[0], p[1], p[2]);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                const double v = eg.area * dot(eg.grad[static_cast<std::size_t>(i)], eg.grad[static_cast<std::size_t>(j)]);
                for (int d = 0; d < 2; ++d)
                    t.push_back({2 * tri.v[static_cast<std::size_t>(i)] + d,
                                 2 * tri.v[static_cast<std::size_t>(j)] + d, v});
            }
    }
    return finish_vector(mesh, std::move(t));
}

SparseSystem assemble_vector_helmholtz(const TriMesh& mesh, AssemblyRegion region, double A) {
    if (!(A >= 0.0)) throw std::invalid_argument("assemble_vector_helmholtz: A must be nonnegative");
    Triplets t;
    for (int e = 0; e < mesh.triangle_count(); ++e) {
        const auto& tri = mesh.triangles[static_cast<std::size_t>(e)];
        if (!in_region(tri.tag, region)) continue;
        const auto p = mesh.triangle_points(e);
        const auto eg = element_geometry(p[0], p[1], p[2]);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                const double v = eg.area / 12.0 * (i == j ? 2.0 : 1.0) +
                                 A * eg.area * dot(eg.grad[static_cast<std::size_t>(i)], eg.grad[static_cast<std::size_t>(j)]);
                for (int d = 0; d < 2; ++d)
                    t.push_back({2 * tri.v[static_cast<std::size_t>(i)] + d,
                                 2 * tri.v[static_cast<std::size_t>(j)] + d, v});
            }
    }
    return finish_vector(mesh, std::move(t));
}

SparseSystem assemble_elasticity(const TriMesh& mesh, AssemblyRegion region, const ScalarField& mu,
                                 double lambda) {
    if (mu.size() != mesh.vertices.size())
        throw std::invalid_argument("assemble_elasticity: mu size mismatch");
    Triplets t;
    for (int e = 0; e < mesh.triangle_count(); ++e) {
        const auto& tri = mesh.triangles[static_cast<std::size_t>(e)];
        if (!in_region(tri.tag, region)) continue;
        const auto p = mesh.triangle_points(e);
        const auto eg = element_geometry(p[0], p[1], p[2]);
        const double mu_e = (mu[static_cast<std::size_t>(tri.v[0])] + mu[static_cast<std::size_t>(tri.v[1])] +
                             mu[static_cast<std::size_t>(tri.v[2])]) / 3.0;
        // 2*mu*eps:eps + lambda*div*div with eps the symmetric gradient:
        // for basis fields phi_i e_a, phi_j e_b with g = grad phi,
        //   2 eps(phi_i e_a):eps(phi_j e_b)
        //     = g_i[b] g_j[a] + delta_ab (g_i . g_j).
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                const Vec2 gi = eg.grad[static_cast<std::size_t>(i)];
                const Vec2 gj = eg.grad[static_cast<std::size_t>(j)];
                const double gij = dot(gi, gj);
                const double gi_c[2] = {gi.x, gi.y};
                const double gj_c[2] = {gj.x, gj.y};
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b) {
                        const double eps_term = gi_c[b] * gj_c[a] + (a == b ? gij : 0.0);
                        const double div_term = gi_c[a] * gj_c[b];
                        const double v = eg.area * (mu_e * eps_term + lambda * div_term);
                        t.push_back({2 * tri.v[static_cast<std::size_t>(i)] + a,
                                     2 * tri.v[static_cast<std::size_t>(j)] + b, v});
                    }
            }
    }
    return finish_vector(mesh, std::move(t));
}

std::vector<Vec2> p1_gradient(const TriMesh& mesh, const ScalarField& field) {
    if (field.size() != mesh.vertices.size())
        throw std::invalid_argument("p1_gradient: field size mismatch");
    std::vector<Vec2> g(static_cast<std::size_t>(mesh.triangle_count()));
    for (int e = 0; e < mesh.triangle_count(); ++e) {
        const auto& tri = mesh.triangles[static_cast<std::size_t>(e)];
        const auto p = mesh.triangle_points(e);
        const auto eg = element_geometry(p[0], p[1], p[2]);
        Vec2 acc{0.0, 0.0};
        for (int k = 0; k < 3; ++k)
            acc += field[static_cast<std::size_t>(tri.v[static_cast<std::size_t>(k)])] * eg.grad[static_cast<std::size_t>(k)];
        g[static_cast<std::size_t>(e)] = acc;
    }
    return g;
}

} // namespace shapegrad
