#pragma once

#include <array>
#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "mhb/mesh.hpp"

namespace mhb::fem {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

using ScalarFn = std::function<double(double, double)>;
using VectorFn = std::function<std::array<double, 2>(double, double)>;

/// Quadrature on a triangle in barycentric form. Weights sum to one, so
/// the physical weight is weight * area.
struct TriangleRule {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
  int degree = 0;
};

/// Seven-point rule, exact for polynomials of total degree 5.
const TriangleRule& degree5_rule();

/// Stiffness and mass restricted to interior nodes (Dirichlet rows removed).
SparseMatrix assemble_stiffness(const mesh::UniformMesh& m, double nu);
SparseMatrix assemble_mass(const mesh::UniformMesh& m, double sigma);
/// Same matrices over all nodes, before elimination.
SparseMatrix assemble_stiffness_full(const mesh::UniformMesh& m, double nu);
SparseMatrix assemble_mass_full(const mesh::UniformMesh& m, double sigma);

/// Row-sum lumped mass on interior nodes, as a diagonal.
Vector lumped_mass(const mesh::UniformMesh& m, double sigma);

/// (f, phi_i) for every interior node i.
Vector assemble_load(const mesh::UniformMesh& m, const ScalarFn& f);
/// (g, grad phi_i) for every interior node i.
Vector assemble_gradient_load(const mesh::UniformMesh& m, const VectorFn& g);

/// Zero-extends interior coefficients to all nodes.
Vector extend(const mesh::UniformMesh& m, const Vector& interior);
Vector restrict_to_interior(const mesh::UniformMesh& m, const Vector& full);
/// Nodal interpolant over all nodes.
Vector interpolate(const mesh::UniformMesh& m, const ScalarFn& f);

/// Value of a nodal P1 field (all nodes) inside a triangle.
double p1_value(const mesh::UniformMesh& m, const Vector& full, int tri, const std::array<double, 3>& bary);
mesh::Point p1_gradient(const mesh::UniformMesh& m, const Vector& full, int tri);

/// Piecewise-defined fields, evaluated per triangle at a quadrature point.
using ScalarField = std::function<double(int tri, const std::array<double, 3>& bary, mesh::Point x)>;
using VectorField = std::function<mesh::Point(int tri, const std::array<double, 3>& bary, mesh::Point x)>;

/// Integral of the square of a field of per-triangle polynomial degree <= 2.
/// Throws std::invalid_argument for larger degree.
double l2_norm_squared(const mesh::UniformMesh& m, const ScalarField& f, int degree = 2);
double l2_norm_squared(const mesh::UniformMesh& m, const VectorField& f, int degree = 2);

}  // namespace mhb::fem
