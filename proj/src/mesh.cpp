#include "mhb/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

namespace mhb::mesh {

namespace {

int checked_cells(int n) {
  if (n < 1) {
    throw std::invalid_argument("mesh needs at least one cell per side, got " + std::to_string(n));
  }
  return n;
}

}  // namespace

UniformMesh::UniformMesh(int cells_per_side) : n_(checked_cells(cells_per_side)), h_(1.0 / cells_per_side) {
  const int np = n_ + 1;
  nodes_.reserve(static_cast<std::size_t>(np) * np);
  boundary_.reserve(nodes_.capacity());
  node_dof_.assign(static_cast<std::size_t>(np) * np, -1);
  for (int j = 0; j < np; ++j) {
    for (int i = 0; i < np; ++i) {
      nodes_.push_back({i * h_, j * h_});
      // Exact integer test; coordinates i*h may not hit 1.0 exactly.
      const bool on_bnd = i == 0 || j == 0 || i == n_ || j == n_;
      boundary_.push_back(on_bnd);
      if (!on_bnd) {
        node_dof_[static_cast<std::size_t>(j) * np + i] = static_cast<int>(dof_node_.size());
        dof_node_.push_back(j * np + i);
      }
    }
  }

  auto idx = [np](int i, int j) { return j * np + i; };
  triangles_.reserve(2 * static_cast<std::size_t>(n_) * n_);
  for (int j = 0; j < n_; ++j) {
    for (int i = 0; i < n_; ++i) {
      const int v00 = idx(i, j), v10 = idx(i + 1, j), v11 = idx(i + 1, j + 1), v01 = idx(i, j + 1);
      triangles_.push_back({v00, v10, v11});
      triangles_.push_back({v00, v11, v01});
    }
  }

  std::map<std::pair<int, int>, int> lookup;
  tri_edges_.resize(triangles_.size());
  tri_edge_signs_.resize(triangles_.size());
  for (int t = 0; t < num_triangles(); ++t) {
    const auto& tri = triangles_[t];
    for (int l = 0; l < 3; ++l) {
      const int p = tri[(l + 1) % 3];
      const int q = tri[(l + 2) % 3];
      const auto key = std::minmax(p, q);
      auto [it, inserted] = lookup.try_emplace({key.first, key.second}, num_edges());
      if (inserted) {
        edges_.push_back(Edge{key.first, key.second, {t, -1}});
      } else {
        edges_[it->second].triangles[1] = t;
      }
      tri_edges_[t][l] = it->second;
    }
  }
  for (int t = 0; t < num_triangles(); ++t) {
    for (int l = 0; l < 3; ++l) {
      const int e = tri_edges_[t][l];
      const Point nrm = unit_normal(e);
      const Point mid = midpoint(e);
      const Point& opp = nodes_[triangles_[t][l]];
      const double dot = (mid.x - opp.x) * nrm.x + (mid.y - opp.y) * nrm.y;
      tri_edge_signs_[t][l] = dot > 0.0 ? 1 : -1;
    }
  }
}

double UniformMesh::signed_area(int tri) const {
  const auto v = vertices(tri);
  return 0.5 * ((v[1].x - v[0].x) * (v[2].y - v[0].y) - (v[2].x - v[0].x) * (v[1].y - v[0].y));
}

double UniformMesh::edge_length(int e) const {
  const auto& ed = edges_[e];
  return std::hypot(nodes_[ed.b].x - nodes_[ed.a].x, nodes_[ed.b].y - nodes_[ed.a].y);
}

Point UniformMesh::unit_normal(int e) const {
  const auto& ed = edges_[e];
  const double dx = nodes_[ed.b].x - nodes_[ed.a].x;
  const double dy = nodes_[ed.b].y - nodes_[ed.a].y;
  const double len = std::hypot(dx, dy);
  return {dy / len, -dx / len};
}

Point UniformMesh::midpoint(int e) const {
  const auto& ed = edges_[e];
  return {0.5 * (nodes_[ed.a].x + nodes_[ed.b].x), 0.5 * (nodes_[ed.a].y + nodes_[ed.b].y)};
}

std::array<Point, 3> UniformMesh::vertices(int tri) const {
  const auto& t = triangles_[tri];
  return {nodes_[t[0]], nodes_[t[1]], nodes_[t[2]]};
}

Point UniformMesh::centroid(int tri) const {
  const auto v = vertices(tri);
  return {(v[0].x + v[1].x + v[2].x) / 3.0, (v[0].y + v[1].y + v[2].y) / 3.0};
}

std::array<Point, 3> UniformMesh::barycentric_gradients(int tri) const {
  const auto v = vertices(tri);
  const double two_area = 2.0 * signed_area(tri);
  std::array<Point, 3> g;
  for (int l = 0; l < 3; ++l) {
    const Point& p = v[(l + 1) % 3];
    const Point& q = v[(l + 2) % 3];
    g[l] = {(p.y - q.y) / two_area, (q.x - p.x) / two_area};
  }
  return g;
}

Point UniformMesh::map(int tri, const std::array<double, 3>& bary) const {
  const auto v = vertices(tri);
  return {bary[0] * v[0].x + bary[1] * v[1].x + bary[2] * v[2].x,
          bary[0] * v[0].y + bary[1] * v[1].y + bary[2] * v[2].y};
}

int UniformMesh::locate(Point p) const {
  int i = std::clamp(static_cast<int>(std::floor(p.x / h_)), 0, n_ - 1);
  int j = std::clamp(static_cast<int>(std::floor(p.y / h_)), 0, n_ - 1);
  const double lx = p.x - i * h_;
  const double ly = p.y - j * h_;
  const int cell = j * n_ + i;
  return lx >= ly ? 2 * cell : 2 * cell + 1;
}

UniformMesh build(int n) { return UniformMesh(n); }

}  // namespace mhb::mesh
