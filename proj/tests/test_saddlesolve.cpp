#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "mhb/bench.hpp"
#include "mhb/oracle.hpp"
#include "mhb/saddlesolve.hpp"

using mhb::systems::Problem;
namespace fem = mhb::fem;
namespace saddle = mhb::saddle;
namespace systems = mhb::systems;

namespace {

constexpr double kPi = std::numbers::pi;

double sine_product(double x, double y) { return std::sin(kPi * x) * std::sin(kPi * y); }

fem::Vector data_load(Problem p, const mhb::mesh::UniformMesh& m) {
  if (p == Problem::tracking) return fem::assemble_load(m, sine_product);
  return fem::assemble_gradient_load(m, [](double x, double y) {
    return std::array<double, 2>{std::cos(kPi * x) * std::sin(kPi * y), std::sin(kPi * x) * std::cos(kPi * y)};
  });
}

saddle::Family default_family(Problem p) {
  return p == Problem::tracking ? saddle::Family::tracking : saddle::Family::schur_state;
}

Eigen::MatrixXd dense_inverse(const saddle::Preconditioner& P) {
  const int n = P.size();
  Eigen::MatrixXd out(n, n);
  fem::Vector z;
  for (int j = 0; j < n; ++j) {
    P.apply(fem::Vector::Unit(n, j), z);
    out.col(j) = z;
  }
  return out;
}

double spread(const systems::ModeSystem& sys, const saddle::Preconditioner& P) {
  const Eigen::MatrixXd A = sys.assemble();
  Eigen::MatrixXd Pinv = dense_inverse(P);
  Pinv = 0.5 * (Pinv + Pinv.transpose());
  // Eigenvalues of P^{-1} A through the symmetric similarity L^T A L with P^{-1} = L L^T.
  const Eigen::MatrixXd L = Pinv.llt().matrixL();
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(L.transpose() * A * L).eigenvalues();
  const Eigen::VectorXd mag = ev.cwiseAbs();
  return mag.maxCoeff() / mag.minCoeff();
}

}  // namespace

TEST_CASE("identity preconditioner on a 4x4 system converges in at most 4 steps") {
  const mhb::mesh::UniformMesh m(2);
  const auto mats = systems::build_matrices(m, 1.0, 1.0);
  const fem::Vector load = fem::Vector::Constant(1, 0.125);
  const auto sys = systems::build_mode_system(Problem::tracking, mats, 1, 0.1, 1.0, load, fem::Vector::Zero(1));
  const auto dense = mhb::oracle::dense_mode_system(Problem::tracking, 2, 1, 0.1, 1.0, load, fem::Vector::Zero(1));
  const fem::Vector ref = mhb::oracle::dense_solve(dense);
  saddle::StopSpec stop;
  stop.tol = 1e-12;
  const auto res = saddle::minres(sys, saddle::IdentityPreconditioner(4), stop);
  CHECK(res.stats.iterations <= 4);
  CHECK(res.stats.status == saddle::SolveStatus::converged);
  CHECK((res.x - ref).norm() < 1e-10 * ref.norm());
  CHECK((saddle::direct_solve(sys) - ref).norm() < 1e-10 * ref.norm());
}

TEST_CASE("zero right-hand side") {
  const mhb::mesh::UniformMesh m(8);
  const auto mats = systems::build_matrices(m, 1.0, 1.0);
  const fem::Vector z = fem::Vector::Zero(mats.size());
  const auto sys = systems::build_mode_system(Problem::tracking, mats, 1, 0.1, 1.0, z, z);
  const auto pre = saddle::make_preconditioner(sys, {});
  const auto res = saddle::minres(sys, *pre);
  CHECK(res.stats.iterations == 0);
  CHECK(res.x.norm() == 0.0);
  CHECK(saddle::direct_solve(sys).norm() == 0.0);
}

TEST_CASE("preconditioner blocks on one interior node") {
  const mhb::mesh::UniformMesh m(2);
  const auto mats = systems::build_matrices(m, 1.0, 1.0);
  fem::Vector z;

  // Tracking, k = 0, lambda = 1: D_0 = M + sqrt(lambda) K = 0.125 + 4.
  const auto p0 = saddle::build_precond_tracking(mats, 0, 1.0, 1.0);
  p0->apply(fem::Vector::Ones(2), z);
  CHECK(z[0] == doctest::Approx(1.0 / 4.125));
  CHECK(z[1] == doctest::Approx(1.0 / 4.125));

  // Gradient tracking, k = 0, family schur_state: diag(K, nu K + M/lambda).
  const double lambda = 0.1, omega = 2.0;
  const auto g0 = saddle::build_precond_gradient(mats, 0, lambda, omega, saddle::Family::schur_state);
  g0->apply(fem::Vector::Ones(2), z);
  CHECK(z[0] == doctest::Approx(0.25));
  CHECK(z[1] == doctest::Approx(1.0 / (4.0 + 0.125 / lambda)));

  // k = 1: S = nu K + M/lambda + (omega sigma)^2 M K^{-1} M.
  const auto g1 = saddle::build_precond_gradient(mats, 1, lambda, omega, saddle::Family::schur_state);
  g1->apply(fem::Vector::Ones(4), z);
  const double S = 4.0 + 0.125 / lambda + omega * omega * 0.125 * 0.25 * 0.125;
  CHECK(z[1] == doctest::Approx(0.25));
  CHECK(z[2] == doctest::Approx(1.0 / S).epsilon(1e-10));
  CHECK(z[3] == doctest::Approx(1.0 / S).epsilon(1e-10));

  // Family schur_adjoint: R = K + (omega sigma)^2 lambda M + nu^2 lambda K M^{-1} K, then lambda M^{-1}.
  const auto a1 = saddle::build_precond_gradient(mats, 1, lambda, omega, saddle::Family::schur_adjoint);
  a1->apply(fem::Vector::Ones(4), z);
  const double R = 4.0 + omega * omega * lambda * 0.125 + lambda * 16.0 / 0.125;
  CHECK(z[0] == doctest::Approx(1.0 / R).epsilon(1e-10));
  CHECK(z[2] == doctest::Approx(lambda / 0.125));
}

TEST_CASE("preconditioned spectrum is robust in lambda") {
  const mhb::mesh::UniformMesh m(16);
  const auto mats = systems::build_matrices(m, 1.0, 1.0);
  for (Problem p : {Problem::tracking, Problem::gradient_tracking}) {
    const fem::Vector load = data_load(p, m);
    for (int k : {0, 1}) {
      double lo = INFINITY, hi = 0.0;
      for (double lambda : {1e-4, 1e-2, 1.0}) {
        const auto sys = systems::build_mode_system(p, mats, k, lambda, 1.0, load, load);
        const auto pre = saddle::make_preconditioner(sys, {default_family(p), 1e-13});
        const double s = spread(sys, *pre);
        lo = std::min(lo, s);
        hi = std::max(hi, s);
      }
      INFO("problem " << std::string(systems::to_string(p)) << ", k = " << k << ": spread " << lo << " .. " << hi);
      CHECK(hi < 4.0);
    }
  }
}

TEST_CASE("MinRes residuals are nonincreasing and agree with the direct solve") {
  const auto ex = mhb::bench::example_data(1);
  const auto coeffs = ex.coefficients(8);
  const mhb::mesh::UniformMesh m(16);
  const auto mats = systems::build_matrices(m, 1.0, 1.0);
  const fem::Vector load = fem::assemble_load(m, sine_product);
  saddle::FactorCache cache;
  saddle::StopSpec stop;
  stop.tol = 1e-12;
  for (int k = 0; k <= 8; ++k) {
    const auto sys = systems::build_mode_system(Problem::tracking, mats, k, 0.1, 1.0, coeffs.cos_coeff(k) * load,
                                                coeffs.sin_coeff(k) * load);
    const auto pre = saddle::make_preconditioner(sys, {}, &cache);
    const auto res = saddle::minres(sys, *pre, stop);
    const fem::Vector x = saddle::direct_solve(sys);
    CHECK((res.x - x).norm() <= 1e-8 * x.norm());
    for (std::size_t i = 1; i < res.stats.trace.size(); ++i) {
      CHECK(res.stats.trace[i] <= res.stats.trace[i - 1] * (1.0 + 1e-12));
    }
    CHECK(res.stats.true_residual < 1e-9);
  }
  // Tracking factors depend on k and are not shared; the gradient blocks share K.
  CHECK(cache.size() == 0);
  saddle::build_precond_gradient(mats, 1, 0.1, 1.0, saddle::Family::schur_state, 1e-12, &cache);
  const auto before = cache.size();
  saddle::build_precond_gradient(mats, 2, 0.1, 1.0, saddle::Family::schur_state, 1e-12, &cache);
  CHECK(before > 0);
  CHECK(cache.size() < 2 * before);
}

TEST_CASE("fixed iteration mode runs exactly the requested steps") {
  const mhb::mesh::UniformMesh m(16);
  const auto mats = systems::build_matrices(m, 1.0, 1.0);
  const fem::Vector load = fem::assemble_load(m, sine_product);
  const auto sys = systems::build_mode_system(Problem::tracking, mats, 1, 0.1, 1.0, load, load);
  const auto pre = saddle::make_preconditioner(sys, {});
  const auto res = saddle::minres(sys, *pre, saddle::StopSpec::fixed(8));
  CHECK(res.stats.iterations == 8);
  CHECK(res.stats.status == saddle::SolveStatus::fixed_iterations);
}

TEST_CASE("iteration counts stay bounded under refinement") {
  saddle::StopSpec stop;
  stop.tol = 1e-10;
  for (Problem p : {Problem::tracking, Problem::gradient_tracking}) {
    const int ex_id = p == Problem::tracking ? 1 : 4;
    const auto coeffs = mhb::bench::example_data(ex_id).coefficients(8);
    for (int n : {16, 32, 64}) {
      const mhb::mesh::UniformMesh m(n);
      const auto mats = systems::build_matrices(m, 1.0, 1.0);
      const fem::Vector load = data_load(p, m);
      saddle::FactorCache cache;
      for (int k : {0, 1, 4, 8}) {
        const auto sys = systems::build_mode_system(p, mats, k, 0.1, 1.0, coeffs.cos_coeff(k) * load,
                                                    coeffs.sin_coeff(k) * load);
        const auto pre = saddle::make_preconditioner(sys, {default_family(p), 1e-12}, &cache);
        const auto res = saddle::minres(sys, *pre, stop);
        INFO("n = " << n << ", k = " << k);
        CHECK(res.stats.status == saddle::SolveStatus::converged);
        CHECK(res.stats.iterations <= (p == Problem::tracking ? 30 : 40));
      }
    }
  }
}

TEST_CASE("argument errors") {
  const mhb::mesh::UniformMesh m(4);
  const auto mats = systems::build_matrices(m, 1.0, 1.0);
  const fem::Vector z = fem::Vector::Ones(mats.size());
  const auto sys = systems::build_mode_system(Problem::tracking, mats, 1, 0.1, 1.0, z, z);
  CHECK_THROWS_AS(saddle::make_preconditioner(sys, {saddle::Family::schur_state, 1e-12}), std::invalid_argument);
  CHECK_THROWS_AS(saddle::direct_solve(sys, 10), std::length_error);
  CHECK(saddle::make_preconditioner(sys, {saddle::Family::none, 1e-12})->size() == sys.size());
}
