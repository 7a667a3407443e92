#include "mhb/femcore.hpp"

#include <stdexcept>
#include <string>

namespace mhb::fem {

using mesh::Point;
using mesh::UniformMesh;

const TriangleRule& degree5_rule() {
  static const TriangleRule rule = [] {
    TriangleRule r;
    r.degree = 5;
    const double a1 = 0.0597158717897698, b1 = 0.4701420641051151, w1 = 0.1323941527885062;
    const double a2 = 0.7974269853530873, b2 = 0.1012865073234563, w2 = 0.1259391805448271;
    r.points = {{1.0 / 3, 1.0 / 3, 1.0 / 3}, {a1, b1, b1}, {b1, a1, b1}, {b1, b1, a1},
                {a2, b2, b2}, {b2, a2, b2}, {b2, b2, a2}};
    r.weights = {0.225, w1, w1, w1, w2, w2, w2};
    return r;
  }();
  return rule;
}

namespace {

enum class Kind { stiffness, mass };

SparseMatrix assemble(const UniformMesh& m, double coef, Kind kind, bool interior_only) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(9 * static_cast<std::size_t>(m.num_triangles()));
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto& tri = m.triangle(t);
    const double area = m.area(t);
    const auto g = m.barycentric_gradients(t);
    for (int a = 0; a < 3; ++a) {
      const int ra = interior_only ? m.dof(tri[a]) : tri[a];
      if (ra < 0) continue;
      for (int b = 0; b < 3; ++b) {
        const int cb = interior_only ? m.dof(tri[b]) : tri[b];
        if (cb < 0) continue;
        double v;
        if (kind == Kind::stiffness) {
          v = coef * area * (g[a].x * g[b].x + g[a].y * g[b].y);
        } else {
          v = coef * area / 12.0 * (a == b ? 2.0 : 1.0);
        }
        trip.emplace_back(ra, cb, v);
      }
    }
  }
  const int dim = interior_only ? m.num_interior_nodes() : m.num_nodes();
  SparseMatrix out(dim, dim);
  out.setFromTriplets(trip.begin(), trip.end());
  out.makeCompressed();
  return out;
}

}  // namespace

SparseMatrix assemble_stiffness(const UniformMesh& m, double nu) { return assemble(m, nu, Kind::stiffness, true); }
SparseMatrix assemble_mass(const UniformMesh& m, double sigma) { return assemble(m, sigma, Kind::mass, true); }
SparseMatrix assemble_stiffness_full(const UniformMesh& m, double nu) {
  return assemble(m, nu, Kind::stiffness, false);
}
SparseMatrix assemble_mass_full(const UniformMesh& m, double sigma) { return assemble(m, sigma, Kind::mass, false); }

Vector lumped_mass(const UniformMesh& m, double sigma) {
  Vector d = Vector::Zero(m.num_interior_nodes());
  for (int t = 0; t < m.num_triangles(); ++t) {
    for (int node : m.triangle(t)) {
      const int i = m.dof(node);
      if (i >= 0) d[i] += sigma * m.area(t) / 3.0;
    }
  }
  return d;
}

Vector assemble_load(const UniformMesh& m, const ScalarFn& f) {
  const auto& rule = degree5_rule();
  Vector b = Vector::Zero(m.num_interior_nodes());
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto& tri = m.triangle(t);
    std::array<double, 3> local{0.0, 0.0, 0.0};
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Point x = m.map(t, rule.points[q]);
      const double fw = f(x.x, x.y) * rule.weights[q] * m.area(t);
      for (int a = 0; a < 3; ++a) local[a] += fw * rule.points[q][a];
    }
    for (int a = 0; a < 3; ++a) {
      const int i = m.dof(tri[a]);
      if (i >= 0) b[i] += local[a];
    }
  }
  return b;
}

Vector assemble_gradient_load(const UniformMesh& m, const VectorFn& g) {
  const auto& rule = degree5_rule();
  Vector b = Vector::Zero(m.num_interior_nodes());
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto& tri = m.triangle(t);
    double gx = 0.0, gy = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Point x = m.map(t, rule.points[q]);
      const auto v = g(x.x, x.y);
      gx += v[0] * rule.weights[q];
      gy += v[1] * rule.weights[q];
    }
    gx *= m.area(t);
    gy *= m.area(t);
    const auto grad = m.barycentric_gradients(t);
    for (int a = 0; a < 3; ++a) {
      const int i = m.dof(tri[a]);
      if (i >= 0) b[i] += gx * grad[a].x + gy * grad[a].y;
    }
  }
  return b;
}

Vector extend(const UniformMesh& m, const Vector& interior) {
  if (interior.size() != m.num_interior_nodes()) {
    throw std::invalid_argument("interior vector has length " + std::to_string(interior.size()) + ", expected " +
                                std::to_string(m.num_interior_nodes()));
  }
  Vector full = Vector::Zero(m.num_nodes());
  for (int d = 0; d < m.num_interior_nodes(); ++d) full[m.node_of_dof(d)] = interior[d];
  return full;
}

Vector restrict_to_interior(const UniformMesh& m, const Vector& full) {
  Vector out(m.num_interior_nodes());
  for (int d = 0; d < m.num_interior_nodes(); ++d) out[d] = full[m.node_of_dof(d)];
  return out;
}

Vector interpolate(const UniformMesh& m, const ScalarFn& f) {
  Vector out(m.num_nodes());
  for (int i = 0; i < m.num_nodes(); ++i) out[i] = f(m.node(i).x, m.node(i).y);
  return out;
}

double p1_value(const UniformMesh& m, const Vector& full, int tri, const std::array<double, 3>& bary) {
  const auto& t = m.triangle(tri);
  return bary[0] * full[t[0]] + bary[1] * full[t[1]] + bary[2] * full[t[2]];
}

Point p1_gradient(const UniformMesh& m, const Vector& full, int tri) {
  const auto& t = m.triangle(tri);
  const auto g = m.barycentric_gradients(tri);
  Point out;
  for (int a = 0; a < 3; ++a) {
    out.x += full[t[a]] * g[a].x;
    out.y += full[t[a]] * g[a].y;
  }
  return out;
}

namespace {

void check_degree(int degree) {
  if (degree < 0 || 2 * degree > degree5_rule().degree) {
    throw std::invalid_argument("l2 norm supports per-triangle degree <= 2, got " + std::to_string(degree));
  }
}

}  // namespace

double l2_norm_squared(const UniformMesh& m, const ScalarField& f, int degree) {
  check_degree(degree);
  const auto& rule = degree5_rule();
  double sum = 0.0;
  for (int t = 0; t < m.num_triangles(); ++t) {
    double local = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double v = f(t, rule.points[q], m.map(t, rule.points[q]));
      local += rule.weights[q] * v * v;
    }
    sum += local * m.area(t);
  }
  return sum;
}

double l2_norm_squared(const UniformMesh& m, const VectorField& f, int degree) {
  check_degree(degree);
  const auto& rule = degree5_rule();
  double sum = 0.0;
  for (int t = 0; t < m.num_triangles(); ++t) {
    double local = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Point v = f(t, rule.points[q], m.map(t, rule.points[q]));
      local += rule.weights[q] * (v.x * v.x + v.y * v.y);
    }
    sum += local * m.area(t);
  }
  return sum;
}

}  // namespace mhb::fem
