#include "mhb/saddlesolve.hpp"

#include <chrono>
#include <functional>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mhb::saddle {

namespace {

using ColMatrix = Eigen::SparseMatrix<double>;

std::string matrix_key(const SparseMatrix& m, const std::string& key) {
  std::ostringstream os;
  os << key << '@' << static_cast<const void*>(m.valuePtr()) << '#' << m.rows();
  return os.str();
}

/// Conjugate gradient for an SPD operator with a Cholesky preconditioner.
template <class Op>
int pcg(const Op& op, const Cholesky& pre, const Vector& b, Vector& x, double tol, int max_iters) {
  x = Vector::Zero(b.size());
  const double bnorm = b.norm();
  if (bnorm == 0.0) return 0;
  Vector r = b;
  Vector z = pre.solve(r);
  Vector p = z;
  double rz = r.dot(z);
  Vector q(b.size());
  for (int it = 1; it <= max_iters; ++it) {
    op(p, q);
    const double alpha = rz / p.dot(q);
    x += alpha * p;
    r -= alpha * q;
    if (r.norm() <= tol * bnorm) return it;
    z = pre.solve(r);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  return max_iters;
}

class BlockDiagonal final : public Preconditioner {
 public:
  using BlockSolve = std::function<void(const Vector&, Vector&)>;

  BlockDiagonal(int block, std::vector<BlockSolve> solves) : block_(block), solves_(std::move(solves)) {}

  void apply(const Vector& r, Vector& z) const override {
    z.resize(size());
    Vector out;
    for (std::size_t b = 0; b < solves_.size(); ++b) {
      const Vector seg = r.segment(static_cast<Eigen::Index>(b) * block_, block_);
      solves_[b](seg, out);
      z.segment(static_cast<Eigen::Index>(b) * block_, block_) = out;
    }
  }
  int size() const override { return block_ * static_cast<int>(solves_.size()); }

 private:
  int block_;
  std::vector<BlockSolve> solves_;
};

BlockDiagonal::BlockSolve scaled_solve(std::shared_ptr<const Cholesky> f, double scale) {
  return [f = std::move(f), scale](const Vector& r, Vector& z) { z = scale * f->solve(r); };
}

std::shared_ptr<const Cholesky> cached(FactorCache* cache, const std::string& key, const SparseMatrix& m) {
  if (cache == nullptr) return factor(m);
  return cache->get_or_factor(matrix_key(m, key), m);
}

}  // namespace

std::shared_ptr<const Cholesky> factor(const SparseMatrix& matrix) {
  auto f = std::make_shared<Cholesky>();
  const ColMatrix col = matrix;
  f->compute(col);
  if (f->info() != Eigen::Success) throw std::runtime_error("sparse Cholesky failed: matrix not positive definite");
  return f;
}

std::shared_ptr<const Cholesky> FactorCache::get_or_factor(const std::string& key, const SparseMatrix& matrix) {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    if (auto it = factors_.find(key); it != factors_.end()) return it->second;
  }
  auto f = factor(matrix);
  std::lock_guard<std::mutex> lock(mutex_);
  return factors_.try_emplace(key, std::move(f)).first->second;
}

std::size_t FactorCache::size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return factors_.size();
}

const char* to_string(Family f) {
  switch (f) {
    case Family::tracking: return "tracking";
    case Family::schur_state: return "schur-state";
    case Family::schur_adjoint: return "schur-adjoint";
    case Family::none: return "none";
  }
  return "?";
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iterations: return "max-iterations";
    case SolveStatus::fixed_iterations: return "fixed-iterations";
    case SolveStatus::breakdown: return "breakdown";
  }
  return "?";
}

std::unique_ptr<Preconditioner> build_precond_tracking(const systems::Matrices& mats, int k, double lambda,
                                                       double omega) {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  const double sl = std::sqrt(lambda);
  SparseMatrix D = mats.mass + sl * mats.weighted_stiffness;
  if (k > 0) D += (k * omega * sl) * mats.weighted_mass;
  auto f = factor(D);
  std::vector<BlockDiagonal::BlockSolve> blocks;
  const int nb = k == 0 ? 1 : 2;
  for (int i = 0; i < nb; ++i) blocks.push_back(scaled_solve(f, 1.0));
  for (int i = 0; i < nb; ++i) blocks.push_back(scaled_solve(f, lambda));
  return std::make_unique<BlockDiagonal>(mats.size(), std::move(blocks));
}

std::unique_ptr<Preconditioner> build_precond_gradient(const systems::Matrices& mats, int k, double lambda,
                                                       double omega, Family family, double inner_tol,
                                                       FactorCache* cache) {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  const double nu = mats.nu;
  const double ws = k * omega * mats.sigma;
  const int n = mats.size();
  const int nb = k == 0 ? 1 : 2;
  const int max_inner = 10 * n + 100;
  std::vector<BlockDiagonal::BlockSolve> blocks;

  if (family == Family::schur_state) {
    auto fk = cached(cache, "K", mats.stiffness);
    for (int i = 0; i < nb; ++i) blocks.push_back(scaled_solve(fk, 1.0));
    SparseMatrix base = nu * mats.stiffness + (1.0 / lambda) * mats.mass;
    if (k == 0) {
      auto fs = factor(base);
      blocks.push_back(scaled_solve(fs, 1.0));
    } else {
      auto fp = factor(SparseMatrix(base + ws * mats.mass));
      auto op = [&mats, base, fk, c = ws * ws](const Vector& x, Vector& y) {
        const Vector mx = mats.mass * x;
        y = base * x + c * (mats.mass * fk->solve(mx));
      };
      auto solve = [op, fp, inner_tol, max_inner](const Vector& r, Vector& z) {
        pcg(op, *fp, r, z, inner_tol, max_inner);
      };
      for (int i = 0; i < nb; ++i) blocks.emplace_back(solve);
    }
    return std::make_unique<BlockDiagonal>(n, std::move(blocks));
  }

  if (family == Family::schur_adjoint) {
    auto fm = cached(cache, "M", mats.mass);
    SparseMatrix base = mats.stiffness + (ws * ws * lambda) * mats.mass;
    // Lumped-mass surrogate of K M^{-1} K for the inner preconditioner.
    const Vector ml = mats.mass * Vector::Ones(n);
    SparseMatrix kml = mats.stiffness * ml.cwiseInverse().asDiagonal() * mats.stiffness;
    auto fp = factor(SparseMatrix(base + (nu * nu * lambda) * kml));
    auto op = [&mats, base, fm, c = nu * nu * lambda](const Vector& x, Vector& y) {
      const Vector kx = mats.stiffness * x;
      y = base * x + c * (mats.stiffness * fm->solve(kx));
    };
    auto solve = [op, fp, inner_tol, max_inner](const Vector& r, Vector& z) {
      pcg(op, *fp, r, z, inner_tol, max_inner);
    };
    for (int i = 0; i < nb; ++i) blocks.emplace_back(solve);
    for (int i = 0; i < nb; ++i) blocks.push_back(scaled_solve(fm, lambda));
    return std::make_unique<BlockDiagonal>(n, std::move(blocks));
  }

  throw std::invalid_argument(std::string("family ") + to_string(family) + " does not apply to gradient tracking");
}

std::unique_ptr<Preconditioner> make_preconditioner(const ModeSystem& sys, const PrecondSpec& spec,
                                                    FactorCache* cache) {
  if (spec.family == Family::none) return std::make_unique<IdentityPreconditioner>(sys.size());
  if (sys.problem() == systems::Problem::tracking) {
    if (spec.family != Family::tracking) {
      throw std::invalid_argument("tracking systems use the tracking preconditioner family");
    }
    return build_precond_tracking(sys.matrices(), sys.mode(), sys.lambda(), sys.omega());
  }
  return build_precond_gradient(sys.matrices(), sys.mode(), sys.lambda(), sys.omega(), spec.family, spec.inner_tol,
                                cache);
}

SolveResult minres(const ModeSystem& sys, const Preconditioner& precond, const StopSpec& stop) {
  const auto start = std::chrono::steady_clock::now();
  const int n = sys.size();
  if (precond.size() != n) throw std::invalid_argument("preconditioner size does not match the system");
  SolveResult res;
  res.x = Vector::Zero(n);
  auto& st = res.stats;
  const Vector& b = sys.rhs();
  const double bnorm = b.norm();
  auto finish = [&] {
    st.true_residual = bnorm > 0.0 ? (b - sys.apply(res.x)).norm() / bnorm : 0.0;
    st.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
  };
  if (bnorm == 0.0) {
    st.status = SolveStatus::converged;
    return finish();
  }

  Vector v_old = Vector::Zero(n), v = b, v_new(n);
  Vector w_old = Vector::Zero(n), w = Vector::Zero(n), w_new(n);
  Vector z(n), z_new(n), az(n);
  precond.apply(v, z);
  double gamma = v.dot(z);
  if (!(gamma > 0.0)) throw std::runtime_error("preconditioner is not positive definite");
  gamma = std::sqrt(gamma);
  const double gamma1 = gamma;
  double gamma_old = 1.0;
  double eta = gamma;
  double s_old = 0.0, s = 0.0, c_old = 1.0, c = 1.0;
  st.trace.push_back(1.0);

  const int limit = stop.max_iters;
  for (int j = 1; j <= limit; ++j) {
    z /= gamma;
    sys.apply(z, az);
    const double delta = az.dot(z);
    v_new = az - (delta / gamma) * v - (gamma / gamma_old) * v_old;
    precond.apply(v_new, z_new);
    double gnew2 = v_new.dot(z_new);
    if (gnew2 < -1e-12 * gamma * gamma) throw std::runtime_error("preconditioner is not positive definite");
    const double gamma_new = std::sqrt(std::max(gnew2, 0.0));

    const double a0 = c * delta - c_old * s * gamma;
    const double a1 = std::hypot(a0, gamma_new);
    const double a2 = s * delta + c_old * c * gamma;
    const double a3 = s_old * gamma;
    if (a1 == 0.0) {
      st.status = SolveStatus::breakdown;
      st.iterations = j - 1;
      return finish();
    }
    const double c_new = a0 / a1;
    const double s_new = gamma_new / a1;
    w_new = (z - a3 * w_old - a2 * w) / a1;
    res.x += (c_new * eta) * w_new;
    eta = -s_new * eta;

    st.iterations = j;
    st.residual = std::abs(eta) / gamma1;
    st.trace.push_back(st.residual);

    if (!stop.fixed_iterations && st.residual <= stop.tol) {
      st.status = SolveStatus::converged;
      return finish();
    }
    if (gamma_new == 0.0) {
      // Invariant subspace reached; the iterate is exact unless eta survived.
      st.status = st.residual <= std::max(stop.tol, 1e-14) ? SolveStatus::converged : SolveStatus::breakdown;
      return finish();
    }

    v_old.swap(v);
    v.swap(v_new);
    w_old.swap(w);
    w.swap(w_new);
    z.swap(z_new);
    gamma_old = gamma;
    gamma = gamma_new;
    c_old = c;
    c = c_new;
    s_old = s;
    s = s_new;
  }
  st.status = stop.fixed_iterations ? SolveStatus::fixed_iterations : SolveStatus::max_iterations;
  return finish();
}

Vector direct_solve(const ModeSystem& sys, int max_unknowns) {
  if (sys.size() > max_unknowns) {
    throw std::length_error("system with " + std::to_string(sys.size()) + " unknowns exceeds the direct-solve cap " +
                            std::to_string(max_unknowns));
  }
  const Vector& b = sys.rhs();
  if (b.norm() == 0.0) return Vector::Zero(sys.size());
  const ColMatrix A = sys.assemble();
  Eigen::SimplicialLDLT<ColMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt(A);
  if (ldlt.info() != Eigen::Success) throw std::runtime_error("saddle factorization failed (singular system)");
  Vector x = ldlt.solve(b);
  const double rel = (b - A * x).norm() / b.norm();
  if (!(rel <= 1e-10)) {
    // One step of iterative refinement before giving up.
    x += ldlt.solve(Vector(b - A * x));
    const double rel2 = (b - A * x).norm() / b.norm();
    if (!(rel2 <= 1e-10)) throw std::runtime_error("direct solve residual " + std::to_string(rel2) + " too large");
  }
  return x;
}

}  // namespace mhb::saddle
