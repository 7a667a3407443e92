#pragma once

#include "mhb/femcore.hpp"
#include "mhb/mesh.hpp"

namespace mhb::systems {

using fem::SparseMatrix;
using fem::Vector;

enum class Problem { tracking, gradient_tracking };

const char* to_string(Problem p);

/// Interior-node matrices shared by all modes of one grid.
struct Matrices {
  SparseMatrix stiffness;           // K (unit coefficient)
  SparseMatrix mass;                // M
  SparseMatrix weighted_stiffness;  // nu K
  SparseMatrix weighted_mass;       // sigma M
  double nu = 1.0;
  double sigma = 1.0;

  int size() const { return static_cast<int>(mass.rows()); }
};

Matrices build_matrices(const mesh::UniformMesh& m, double nu, double sigma);

/// Block saddle-point system of one Fourier mode. Unknowns are ordered
/// (y^c, y^s, p^c, p^s); mode 0 keeps only (y^c, p^c).
class ModeSystem {
 public:
  ModeSystem(Problem problem, const Matrices& mats, int k, double lambda, double omega, Vector rhs);

  Problem problem() const { return problem_; }
  int mode() const { return k_; }
  double lambda() const { return lambda_; }
  double omega() const { return omega_; }
  int block_size() const { return mats_->size(); }
  int num_blocks() const { return k_ == 0 ? 2 : 4; }
  int size() const { return num_blocks() * block_size(); }
  const Matrices& matrices() const { return *mats_; }
  const Vector& rhs() const { return rhs_; }

  void apply(const Vector& x, Vector& y) const;
  Vector apply(const Vector& x) const;
  SparseMatrix assemble() const;

 private:
  const SparseMatrix& upper_left() const;

  Problem problem_;
  const Matrices* mats_;
  int k_;
  double lambda_;
  double omega_;
  Vector rhs_;
};

/// `load_cos`/`load_sin` are the assembled data loads (M y_d or the gradient
/// load). For k = 0 the sine load is ignored.
ModeSystem build_mode_system(Problem problem, const Matrices& mats, int k, double lambda, double omega,
                             const Vector& load_cos, const Vector& load_sin);
ModeSystem build_mode_system_tracking(const Matrices& mats, int k, double lambda, double omega,
                                      const Vector& load_cos, const Vector& load_sin);
ModeSystem build_mode_system_gradient(const Matrices& mats, int k, double lambda, double omega,
                                      const Vector& load_cos, const Vector& load_sin);

/// Interior nodal coefficients of one mode. Sine parts are zero for k = 0.
struct ModeSolution {
  int k = 0;
  Vector y_cos, y_sin, p_cos, p_sin;
};

ModeSolution unpack(const ModeSystem& sys, const Vector& x);
Vector pack(const ModeSystem& sys, const ModeSolution& s);

}  // namespace mhb::systems
