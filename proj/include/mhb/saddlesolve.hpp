#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <Eigen/SparseCholesky>

#include "mhb/systems.hpp"

namespace mhb::saddle {

using fem::SparseMatrix;
using fem::Vector;
using systems::ModeSystem;

using Cholesky = Eigen::SimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>>;

/// Symmetric positive definite preconditioner, applied as z = P^{-1} r.
class Preconditioner {
 public:
  virtual ~Preconditioner() = default;
  virtual void apply(const Vector& r, Vector& z) const = 0;
  virtual int size() const = 0;
};

class IdentityPreconditioner final : public Preconditioner {
 public:
  explicit IdentityPreconditioner(int n) : n_(n) {}
  void apply(const Vector& r, Vector& z) const override { z = r; }
  int size() const override { return n_; }

 private:
  int n_;
};

/// Shared sparse Cholesky factors, keyed by a caller-chosen string.
/// Lookups and inserts are serialized; factors are immutable once stored.
class FactorCache {
 public:
  std::shared_ptr<const Cholesky> get_or_factor(const std::string& key, const SparseMatrix& matrix);
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const Cholesky>> factors_;
};

/// Throws std::runtime_error if the matrix is not positive definite.
std::shared_ptr<const Cholesky> factor(const SparseMatrix& matrix);

enum class Family { tracking, schur_state, schur_adjoint, none };

/// Preconditioner choice for one mode system. Sparse blocks are factored
/// exactly; `inner_tol` controls the inner iteration of the Schur blocks.
struct PrecondSpec {
  Family family = Family::tracking;
  double inner_tol = 1e-12;
};

const char* to_string(Family f);

/// diag(D, D, D/lambda, D/lambda) with D = sqrt(lambda) nu K + k omega sqrt(lambda) sigma M + M,
/// or diag(D, D/lambda) with D = M + sqrt(lambda) nu K for k = 0.
std::unique_ptr<Preconditioner> build_precond_tracking(const systems::Matrices& mats, int k, double lambda,
                                                       double omega);

/// Block-diagonal Schur complement preconditioners for the gradient-tracking
/// systems. `schur_state` uses diag(K, K, S, S) with
/// S = nu K + M/lambda + (k omega sigma)^2 M K^{-1} M;
/// `schur_adjoint` uses diag(R, R, M/lambda, M/lambda) with
/// R = K + (k omega sigma)^2 lambda M + nu^2 lambda K M^{-1} K.
/// The blocks containing inverses are applied by an inner preconditioned
/// conjugate gradient iteration to `inner_tol`.
std::unique_ptr<Preconditioner> build_precond_gradient(const systems::Matrices& mats, int k, double lambda,
                                                       double omega, Family family, double inner_tol = 1e-12,
                                                       FactorCache* cache = nullptr);

/// Family `none` gives the identity.
std::unique_ptr<Preconditioner> make_preconditioner(const ModeSystem& sys, const PrecondSpec& spec,
                                                    FactorCache* cache = nullptr);

struct StopSpec {
  double tol = 1e-8;
  int max_iters = 200;
  /// Run exactly max_iters steps, ignoring tol.
  bool fixed_iterations = false;

  static StopSpec fixed(int iterations) { return {0.0, iterations, true}; }
};

enum class SolveStatus { converged, max_iterations, fixed_iterations, breakdown };

const char* to_string(SolveStatus s);

struct SolveStats {
  int iterations = 0;
  /// Preconditioned residual norm relative to the initial one.
  double residual = 0.0;
  /// Euclidean residual of the returned iterate relative to the right-hand side.
  double true_residual = 0.0;
  double wall_seconds = 0.0;
  SolveStatus status = SolveStatus::converged;
  std::vector<double> trace;
};

struct SolveResult {
  Vector x;
  SolveStats stats;
};

/// Preconditioned minimal residual iteration from a zero initial guess.
/// Throws std::runtime_error if the preconditioner is not positive definite.
SolveResult minres(const ModeSystem& sys, const Preconditioner& precond, const StopSpec& stop = {});

/// Sparse LDL^T of the assembled saddle matrix. Throws std::length_error
/// above `max_unknowns` and std::runtime_error if factorization fails or
/// the residual exceeds 1e-10 relative.
Vector direct_solve(const ModeSystem& sys, int max_unknowns = 400000);

}  // namespace mhb::saddle

