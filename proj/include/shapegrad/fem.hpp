#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "shapegrad/mesh.hpp"

namespace shapegrad {

/// Nodal coefficient vectors of P1 fields; one entry per mesh vertex.
using ScalarField = std::vector<double>;
using VectorField = std::vector<Vec2>;

/// Vector DOFs are interleaved: DOF 2*i+d is component d of vertex i.
std::vector<double> flatten(const VectorField& f);
VectorField unflatten(const std::vector<double>& x);

enum class AssemblyRegion { IN, OUT, ALL };

/// Compressed sparse row matrix, assembled from (row, col, value) triplets
/// with duplicates summed. Symmetric by construction for all operators here.
class SparseMatrix {
public:
    struct Triplet {
        int row;
        int col;
        double value;
    };

    SparseMatrix() = default;
    static SparseMatrix from_triplets(int n, std::vector<Triplet> triplets);

    int size() const { return n_; }
    struct RowView {
        const int* cols;
        const double* vals;
        int count;
    };
    RowView row(int r) const;
    double entry(int i, int j) const;
    void apply(const std::vector<double>& x, std::vector<double>& y) const;
    std::vector<double> apply(const std::vector<double>& x) const;
    std::vector<double> diagonal() const;
    /// max_ij |A_ij - A_ji| / max_ij |A_ij|
    double symmetry_defect() const;
    std::size_t nonzero_count() const { return vals_.size(); }

private:
    int n_ = 0;
    std::vector<int> row_ptr_{0};
    std::vector<int> col_idx_;
    std::vector<double> vals_;
};

/// Symmetric operator plus Dirichlet bookkeeping. The matrix itself is kept
/// unmodified; constraints are imposed during solve by elimination on the
/// free DOFs, which preserves symmetry and returns prescribed values exactly.
struct SparseSystem {
    SparseMatrix matrix;
    std::vector<unsigned char> constrained; // one flag per DOF
    std::vector<double> constrained_value;

    int size() const { return matrix.size(); }
    int free_count() const;
};

SparseSystem apply_dirichlet(const SparseSystem& system, const std::vector<int>& dofs,
                             const std::vector<double>& values);
SparseSystem apply_dirichlet(const SparseSystem& system, const std::vector<int>& dofs, double value);

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double residual, int iterations)
        : std::runtime_error(what), final_residual(residual), iterations(iterations) {}
    double final_residual;
    int iterations;
};

/// Jacobi-preconditioned conjugate gradients on the free DOFs.
/// Relative residual tolerance defaults to 1e-10; iteration cap is
/// 20*sqrt(free DOFs)+1000. Throws SolverError on stagnation or if the
/// operator turns out indefinite on the free DOFs.
std::vector<double> solve_spd(const SparseSystem& system, const std::vector<double>& rhs,
                              double tol = 1e-10);

/// Scalar operators (one DOF per vertex).
SparseSystem assemble_scalar_laplace(const TriMesh& mesh, AssemblyRegion region, double coefficient);
SparseSystem assemble_scalar_laplace(const TriMesh& mesh, AssemblyRegion region,
                                     const ScalarField& coefficient);
SparseSystem assemble_scalar_mass(const TriMesh& mesh, AssemblyRegion region);

/// Vector operators (two interleaved DOFs per vertex).
SparseSystem assemble_vector_mass(const TriMesh& mesh, AssemblyRegion region);
SparseSystem assemble_vector_stiffness(const TriMesh& mesh, AssemblyRegion region);
/// mass + A * stiffness, componentwise: one first-order factor of (id - A*Lap)^s.
SparseSystem assemble_vector_helmholtz(const TriMesh& mesh, AssemblyRegion region, double A);
/// int 2*mu*eps(U):eps(V) + lambda*div(U)*div(V); mu nodal, taken at centroids.
SparseSystem assemble_elasticity(const TriMesh& mesh, AssemblyRegion region, const ScalarField& mu,
                                 double lambda);

/// Element-constant gradients of a P1 scalar field, one Vec2 per triangle.
std::vector<Vec2> p1_gradient(const TriMesh& mesh, const ScalarField& field);

/// Barycentric basis gradients and signed area of one triangle.
struct ElementGeometry {
    std::array<Vec2, 3> grad;
    double area;
};
ElementGeometry element_geometry(const Vec2& p0, const Vec2& p1, const Vec2& p2);

} // namespace shapegrad
