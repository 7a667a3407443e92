#include "mhb/systems.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace mhb::systems {

const char* to_string(Problem p) { return p == Problem::tracking ? "I" : "II"; }

Matrices build_matrices(const mesh::UniformMesh& m, double nu, double sigma) {
  if (!(nu > 0.0) || !(sigma > 0.0)) throw std::invalid_argument("coefficients must be positive constants");
  Matrices out;
  out.stiffness = fem::assemble_stiffness(m, 1.0);
  out.mass = fem::assemble_mass(m, 1.0);
  out.weighted_stiffness = nu * out.stiffness;
  out.weighted_mass = sigma * out.mass;
  out.nu = nu;
  out.sigma = sigma;
  return out;
}

ModeSystem::ModeSystem(Problem problem, const Matrices& mats, int k, double lambda, double omega, Vector rhs)
    : problem_(problem), mats_(&mats), k_(k), lambda_(lambda), omega_(omega), rhs_(std::move(rhs)) {
  if (k < 0) throw std::invalid_argument("mode index must be nonnegative");
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  if (rhs_.size() != size()) throw std::invalid_argument("right-hand side has wrong length");
}

const SparseMatrix& ModeSystem::upper_left() const {
  return problem_ == Problem::tracking ? mats_->mass : mats_->stiffness;
}

void ModeSystem::apply(const Vector& x, Vector& y) const {
  const int n = block_size();
  const auto& A = upper_left();
  const auto& K = mats_->weighted_stiffness;
  const auto& Ms = mats_->weighted_mass;
  const auto& M = mats_->mass;
  y.resize(size());
  if (k_ == 0) {
    const auto yc = x.segment(0, n);
    const auto pc = x.segment(n, n);
    y.segment(0, n) = A * yc - K * pc;
    y.segment(n, n) = -(K * yc) - (M * pc) / lambda_;
    return;
  }
  const double w = k_ * omega_;
  const auto yc = x.segment(0, n);
  const auto ys = x.segment(n, n);
  const auto pc = x.segment(2 * n, n);
  const auto ps = x.segment(3 * n, n);
  const Vector Kpc = K * pc, Kps = K * ps, Mpc = Ms * pc, Mps = Ms * ps;
  const Vector Kyc = K * yc, Kys = K * ys, Myc = Ms * yc, Mys = Ms * ys;
  y.segment(0, n) = A * yc - Kpc + w * Mps;
  y.segment(n, n) = A * ys - w * Mpc - Kps;
  y.segment(2 * n, n) = -Kyc - w * Mys - (M * pc) / lambda_;
  y.segment(3 * n, n) = w * Myc - Kys - (M * ps) / lambda_;
}

Vector ModeSystem::apply(const Vector& x) const {
  Vector y;
  apply(x, y);
  return y;
}

SparseMatrix ModeSystem::assemble() const {
  const int n = block_size();
  std::vector<Eigen::Triplet<double>> trip;
  auto put = [&](const SparseMatrix& B, int bi, int bj, double s) {
    if (s == 0.0) return;
    for (int r = 0; r < B.outerSize(); ++r) {
      for (SparseMatrix::InnerIterator it(B, r); it; ++it) {
        trip.emplace_back(bi * n + it.row(), bj * n + it.col(), s * it.value());
      }
    }
  };
  const auto& A = upper_left();
  const auto& K = mats_->weighted_stiffness;
  const auto& Ms = mats_->weighted_mass;
  const auto& M = mats_->mass;
  if (k_ == 0) {
    put(A, 0, 0, 1.0);
    put(K, 0, 1, -1.0);
    put(K, 1, 0, -1.0);
    put(M, 1, 1, -1.0 / lambda_);
  } else {
    const double w = k_ * omega_;
    put(A, 0, 0, 1.0);
    put(A, 1, 1, 1.0);
    put(K, 0, 2, -1.0);
    put(Ms, 0, 3, w);
    put(Ms, 1, 2, -w);
    put(K, 1, 3, -1.0);
    put(K, 2, 0, -1.0);
    put(Ms, 2, 1, -w);
    put(Ms, 3, 0, w);
    put(K, 3, 1, -1.0);
    put(M, 2, 2, -1.0 / lambda_);
    put(M, 3, 3, -1.0 / lambda_);
  }
  SparseMatrix out(size(), size());
  out.setFromTriplets(trip.begin(), trip.end());
  out.makeCompressed();
  return out;
}

ModeSystem build_mode_system(Problem problem, const Matrices& mats, int k, double lambda, double omega,
                             const Vector& load_cos, const Vector& load_sin) {
  const int n = mats.size();
  if (load_cos.size() != n || (k > 0 && load_sin.size() != n)) {
    throw std::invalid_argument("load vector length does not match the matrices");
  }
  Vector rhs = Vector::Zero((k == 0 ? 2 : 4) * n);
  rhs.segment(0, n) = load_cos;
  if (k > 0) rhs.segment(n, n) = load_sin;
  return ModeSystem(problem, mats, k, lambda, omega, std::move(rhs));
}

ModeSystem build_mode_system_tracking(const Matrices& mats, int k, double lambda, double omega,
                                      const Vector& load_cos, const Vector& load_sin) {
  return build_mode_system(Problem::tracking, mats, k, lambda, omega, load_cos, load_sin);
}

ModeSystem build_mode_system_gradient(const Matrices& mats, int k, double lambda, double omega,
                                      const Vector& load_cos, const Vector& load_sin) {
  return build_mode_system(Problem::gradient_tracking, mats, k, lambda, omega, load_cos, load_sin);
}

ModeSolution unpack(const ModeSystem& sys, const Vector& x) {
  const int n = sys.block_size();
  ModeSolution s;
  s.k = sys.mode();
  if (sys.mode() == 0) {
    s.y_cos = x.segment(0, n);
    s.p_cos = x.segment(n, n);
    s.y_sin = Vector::Zero(n);
    s.p_sin = Vector::Zero(n);
  } else {
    s.y_cos = x.segment(0, n);
    s.y_sin = x.segment(n, n);
    s.p_cos = x.segment(2 * n, n);
    s.p_sin = x.segment(3 * n, n);
  }
  return s;
}

Vector pack(const ModeSystem& sys, const ModeSolution& s) {
  Vector x(sys.size());
  if (sys.mode() == 0) {
    x << s.y_cos, s.p_cos;
  } else {
    x << s.y_cos, s.y_sin, s.p_cos, s.p_sin;
  }
  return x;
}

}  // namespace mhb::systems
