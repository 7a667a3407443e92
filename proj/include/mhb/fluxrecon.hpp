#pragma once

#include <vector>

#include "mhb/femcore.hpp"
#include "mhb/mesh.hpp"

namespace mhb::flux {

using fem::Vector;
using mesh::Point;
using mesh::UniformMesh;

/// Lowest-order Raviart-Thomas field. Coefficient e is the flux through
/// edge e along its global normal (the integral of tau . n over the edge).
class RTFlux {
 public:
  explicit RTFlux(const UniformMesh& m);
  RTFlux(const UniformMesh& m, Vector coefficients);

  const UniformMesh& mesh() const { return *mesh_; }
  const Vector& coefficients() const { return coef_; }
  Vector& coefficients() { return coef_; }

  /// Field value at a point of triangle `tri`.
  Point value(int tri, Point x) const;
  /// Constant divergence on triangle `tri`.
  double divergence(int tri) const;

  /// this += a * other. Throws std::invalid_argument for a different mesh.
  RTFlux& axpy(double a, const RTFlux& other);

 private:
  const UniformMesh* mesh_;
  Vector coef_;
};

/// Edge-averaged flux of nu * grad w for a nodal P1 field over all nodes.
/// Interior edges take the arithmetic mean of the two one-sided normal
/// fluxes, boundary edges the single adjacent one.
RTFlux reconstruct(const UniformMesh& m, const Vector& full, double nu = 1.0);

/// Canonical interpolant: edge fluxes of g by Gauss quadrature on each edge.
RTFlux interpolate(const UniformMesh& m, const fem::VectorFn& g, int points = 4);

/// Per-triangle divergence.
std::vector<double> divergence(const RTFlux& flux);

}  // namespace mhb::flux
