#include "mhb/fluxrecon.hpp"

#include <stdexcept>

#include "mhb/timefourier.hpp"

namespace mhb::flux {

RTFlux::RTFlux(const UniformMesh& m) : mesh_(&m), coef_(Vector::Zero(m.num_edges())) {}

RTFlux::RTFlux(const UniformMesh& m, Vector coefficients) : mesh_(&m), coef_(std::move(coefficients)) {
  if (coef_.size() != m.num_edges()) throw std::invalid_argument("one flux coefficient per edge expected");
}

Point RTFlux::value(int tri, Point x) const {
  // Basis of local edge l: sign * (x - P_l) / (2 |T|), P_l the opposite vertex.
  const auto v = mesh_->vertices(tri);
  const double scale = 1.0 / (2.0 * mesh_->area(tri));
  Point out;
  for (int l = 0; l < 3; ++l) {
    const double c = mesh_->edge_sign(tri, l) * coef_[mesh_->edge_of(tri, l)] * scale;
    out.x += c * (x.x - v[l].x);
    out.y += c * (x.y - v[l].y);
  }
  return out;
}

double RTFlux::divergence(int tri) const {
  double s = 0.0;
  for (int l = 0; l < 3; ++l) s += mesh_->edge_sign(tri, l) * coef_[mesh_->edge_of(tri, l)];
  return s / mesh_->area(tri);
}

RTFlux& RTFlux::axpy(double a, const RTFlux& other) {
  if (other.mesh_ != mesh_) throw std::invalid_argument("fluxes live on different meshes");
  coef_ += a * other.coef_;
  return *this;
}

RTFlux reconstruct(const UniformMesh& m, const Vector& full, double nu) {
  if (full.size() != m.num_nodes()) throw std::invalid_argument("reconstruct expects a field over all nodes");
  std::vector<Point> grad(m.num_triangles());
  for (int t = 0; t < m.num_triangles(); ++t) grad[t] = fem::p1_gradient(m, full, t);
  Vector coef(m.num_edges());
  for (int e = 0; e < m.num_edges(); ++e) {
    const auto& ed = m.edge(e);
    const Point n = m.unit_normal(e);
    const double len = m.edge_length(e);
    auto normal = [&](int t) { return grad[t].x * n.x + grad[t].y * n.y; };
    const double avg =
        ed.on_boundary() ? normal(ed.triangles[0]) : 0.5 * (normal(ed.triangles[0]) + normal(ed.triangles[1]));
    coef[e] = nu * avg * len;
  }
  return RTFlux(m, std::move(coef));
}

RTFlux interpolate(const UniformMesh& m, const fem::VectorFn& g, int points) {
  const tf::GaussRule rule = tf::gauss_legendre(points);
  Vector coef(m.num_edges());
  for (int e = 0; e < m.num_edges(); ++e) {
    const auto& ed = m.edge(e);
    const Point a = m.node(ed.a);
    const Point b = m.node(ed.b);
    // Length-scaled normal, so the weights need no edge length.
    const Point n{b.y - a.y, a.x - b.x};
    double s = 0.0;
    for (int q = 0; q < points; ++q) {
      const double u = 0.5 * (rule.nodes[q] + 1.0);
      const auto v = g(a.x + u * (b.x - a.x), a.y + u * (b.y - a.y));
      s += 0.5 * rule.weights[q] * (v[0] * n.x + v[1] * n.y);
    }
    coef[e] = s;
  }
  return RTFlux(m, std::move(coef));
}

std::vector<double> divergence(const RTFlux& flux) {
  std::vector<double> out(flux.mesh().num_triangles());
  for (int t = 0; t < flux.mesh().num_triangles(); ++t) out[t] = flux.divergence(t);
  return out;
}

}  // namespace mhb::flux
