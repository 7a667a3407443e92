#pragma once

#include <array>
#include <vector>

namespace mhb::mesh {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Mesh edge stored with its endpoints in increasing node order.
/// The global unit normal is the edge direction rotated clockwise.
struct Edge {
  int a = -1;
  int b = -1;
  std::array<int, 2> triangles{-1, -1};

  bool on_boundary() const { return triangles[1] < 0; }
};

/// Uniform triangulation of the unit square. Every square cell is cut by
/// its bottom-left to top-right diagonal. Nodes are numbered row by row.
/// Local edge l of a triangle is the edge opposite local vertex l.
class UniformMesh {
 public:
  explicit UniformMesh(int cells_per_side);

  int cells_per_side() const { return n_; }
  double h() const { return h_; }

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_triangles() const { return static_cast<int>(triangles_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_interior_nodes() const { return static_cast<int>(dof_node_.size()); }

  const Point& node(int i) const { return nodes_[i]; }
  const std::array<int, 3>& triangle(int t) const { return triangles_[t]; }
  const Edge& edge(int e) const { return edges_[e]; }
  const std::vector<Edge>& edges() const { return edges_; }

  int edge_of(int tri, int local_edge) const { return tri_edges_[tri][local_edge]; }
  /// +1 if the global normal of local edge l points out of the triangle.
  int edge_sign(int tri, int local_edge) const { return tri_edge_signs_[tri][local_edge]; }

  bool is_boundary_node(int i) const { return boundary_[i]; }
  /// Interior unknown index of a node, or -1 on the boundary.
  int dof(int node) const { return node_dof_[node]; }
  int node_of_dof(int d) const { return dof_node_[d]; }

  double area(int /*tri*/) const { return 0.5 * h_ * h_; }
  double signed_area(int tri) const;
  double edge_length(int e) const;
  Point unit_normal(int e) const;
  Point midpoint(int e) const;
  std::array<Point, 3> vertices(int tri) const;
  Point centroid(int tri) const;
  /// Gradients of the three barycentric coordinates (constant per triangle).
  std::array<Point, 3> barycentric_gradients(int tri) const;
  Point map(int tri, const std::array<double, 3>& bary) const;

  /// Triangle index containing the cell-local point, used for nested evaluation.
  int locate(Point p) const;

 private:
  int n_;
  double h_;
  std::vector<Point> nodes_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<Edge> edges_;
  std::vector<std::array<int, 3>> tri_edges_;
  std::vector<std::array<int, 3>> tri_edge_signs_;
  std::vector<bool> boundary_;
  std::vector<int> node_dof_;
  std::vector<int> dof_node_;
};

/// Throws std::invalid_argument for n < 1.
UniformMesh build(int n);

}  // namespace mhb::mesh
