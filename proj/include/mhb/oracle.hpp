#pragma once

#include <array>

#include <Eigen/Dense>

#include "mhb/bounds.hpp"
#include "mhb/systems.hpp"
#include "mhb/timefourier.hpp"

// Brute-force references for the test suite. Nothing here is fast and
// nothing here calls the production assembly or solvers.
namespace mhb::oracle {

using systems::Problem;

/// Element matrices of the two right-triangle orientations of the uniform
/// mesh: 0 = {(0,0),(h,0),(h,h)}, 1 = {(0,0),(h,h),(0,h)}.
struct ElementMatrices {
  std::array<Eigen::Matrix3d, 2> stiffness;
  std::array<Eigen::Matrix3d, 2> mass;
};

/// Closed-form matrices for unit coefficients. Throws for h <= 0.
ElementMatrices element_matrices(double h);

struct DenseSystem {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd rhs;
};

/// Interior stiffness and mass of the n x n mesh, assembled densely from
/// element_matrices with its own node numbering (row by row, interior only).
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> dense_stiffness_mass(int n, double nu = 1.0, double sigma = 1.0);

/// Dense saddle system of one mode in (y^c, y^s, p^c, p^s) order. Loads
/// have length (n-1)^2; the sine load is ignored for k = 0.
DenseSystem dense_mode_system(Problem problem, int n, int k, double lambda, double omega,
                              const Eigen::VectorXd& load_cos, const Eigen::VectorXd& load_sin, double nu = 1.0,
                              double sigma = 1.0);

/// LU solve with a 1e-12 relative residual check. Throws std::length_error
/// above `max_dim` and std::runtime_error for singular systems.
Eigen::VectorXd dense_solve(const DenseSystem& sys, int max_dim = 4 * 49);

struct GridSearchResult {
  double alpha = 0.0;
  double beta = 0.0;
  double value = 0.0;
};

/// Minimum of the mode majorant over a log-spaced grid in [1e-6, 1e6]^2,
/// evaluated term by term from the residual norms.
GridSearchResult grid_search_alpha_beta(double misfit, double r1, double r2, double adjoint,
                                        const bounds::Params& params, int points = 40);

/// Optimal continuous mode of a separable problem whose data is d(t) S(x)
/// (tracking) or d(t) grad S(x)/pi (gradient tracking), S = sin(pi x1) sin(pi x2),
/// unit coefficients. States and adjoints are multiples of S.
struct ExactMode {
  double y_cos = 0.0, y_sin = 0.0, p_cos = 0.0, p_sin = 0.0;
  double cost = 0.0;
};

ExactMode separable_mode(Problem problem, int k, double lambda, double omega, double d_cos, double d_sin);

/// Known state y(t) S(x) and the time factor of the data.
struct SeparableSolution {
  tf::TimeFn state;
  tf::TimeFn state_dt;
  tf::TimeFn data;
  double omega = 1.0;
};

/// Mode-k cost 1/2 ||y_k - y_d,k||^2 + lambda/2 ||u_k||^2 with u = d_t y - Laplace y,
/// from time projection by composite Gauss rules and tensor Gauss in space.
double spacetime_mode_cost(Problem problem, const SeparableSolution& s, double lambda, int k, int panels = 128,
                           int points = 10);

/// Full space-time cost over one period, integrated directly in time.
double spacetime_cost(Problem problem, const SeparableSolution& s, double lambda, int panels = 256, int points = 10);

}  // namespace mhb::oracle
