#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mhb/femcore.hpp"
#include "mhb/oracle.hpp"

namespace fem = mhb::fem;
using mhb::mesh::UniformMesh;

namespace {

constexpr double kPi = std::numbers::pi;

double sine_product(double x, double y) { return std::sin(kPi * x) * std::sin(kPi * y); }

}  // namespace

TEST_CASE("single interior node") {
  const UniformMesh m(2);
  const auto K = fem::assemble_stiffness(m, 1.0);
  const auto M = fem::assemble_mass(m, 1.0);
  REQUIRE(K.rows() == 1);
  CHECK(K.coeff(0, 0) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(M.coeff(0, 0) == doctest::Approx(0.125).epsilon(1e-14));
  CHECK(fem::assemble_stiffness(m, 2.0).coeff(0, 0) == doctest::Approx(8.0));
  CHECK(fem::assemble_mass(m, 3.0).coeff(0, 0) == doctest::Approx(0.375));
}

TEST_CASE("matrices agree with the dense element oracle for n <= 8") {
  for (int n = 2; n <= 8; ++n) {
    const UniformMesh m(n);
    const auto [Kd, Md] = mhb::oracle::dense_stiffness_mass(n, 1.7, 0.6);
    const Eigen::MatrixXd K = fem::assemble_stiffness(m, 1.7);
    const Eigen::MatrixXd M = fem::assemble_mass(m, 0.6);
    CHECK((K - Kd).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((M - Md).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("full matrices: constants are in the kernel and mass sums to the area") {
  const UniformMesh m(7);
  const auto K = fem::assemble_stiffness_full(m, 1.0);
  const auto M = fem::assemble_mass_full(m, 1.0);
  const fem::Vector one = fem::Vector::Ones(m.num_nodes());
  CHECK((K * one).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(one.dot(M * one) == doctest::Approx(1.0).epsilon(1e-14));
  // Row sums of the full mass, boundary columns included.
  const fem::Vector rows = fem::restrict_to_interior(m, M * one);
  CHECK((fem::lumped_mass(m, 2.0) - 2.0 * rows).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("loads") {
  const UniformMesh m(8);
  CHECK(fem::assemble_load(m, [](double, double) { return 0.0; }).norm() == 0.0);
  const auto ones = fem::assemble_load(m, [](double, double) { return 1.0; });
  const double h = m.h();
  CHECK((ones.array() - h * h).abs().maxCoeff() < 1e-15);

  CHECK(fem::assemble_gradient_load(m, [](double, double) { return std::array<double, 2>{0.0, 0.0}; }).norm() == 0.0);
  const UniformMesh m2(2);
  const auto c = fem::assemble_gradient_load(m2, [](double, double) { return std::array<double, 2>{1.3, -0.4}; });
  CHECK(std::abs(c[0]) < 1e-15);
}

TEST_CASE("sine load is close to an eigenvector") {
  const UniformMesh m(64);
  const auto v = fem::assemble_load(m, sine_product);
  const auto K = fem::assemble_stiffness(m, 1.0);
  const auto M = fem::assemble_mass(m, 1.0);
  const double rq = v.dot(K * v) / v.dot(M * v);
  CHECK(rq == doctest::Approx(2.0 * kPi * kPi).epsilon(0.005));
}

TEST_CASE("gradient load of grad S is K times the interpolant up to O(h^2)") {
  double prev = 0.0;
  for (int n : {16, 32}) {
    const UniformMesh m(n);
    const auto g = fem::assemble_gradient_load(m, [](double x, double y) {
      return std::array<double, 2>{kPi * std::cos(kPi * x) * std::sin(kPi * y),
                                   kPi * std::sin(kPi * x) * std::cos(kPi * y)};
    });
    const fem::Vector Ku = fem::assemble_stiffness(m, 1.0) * fem::restrict_to_interior(m, fem::interpolate(m, sine_product));
    // Entries scale like h^2, so compare relative to h^2.
    const double err = (g - Ku).cwiseAbs().maxCoeff() / (m.h() * m.h());
    if (prev > 0.0) CHECK(err < 0.3 * prev);
    prev = err;
  }
}

TEST_CASE("l2 norms of fields") {
  const UniformMesh m(6);
  CHECK(fem::l2_norm_squared(m, fem::ScalarField([](int, const std::array<double, 3>&, mhb::mesh::Point) {
          return 1.0;
        })) == doctest::Approx(1.0).epsilon(1e-14));
  const auto x1 = fem::interpolate(m, [](double x, double) { return x; });
  const double v = fem::l2_norm_squared(
      m, fem::ScalarField([&](int t, const std::array<double, 3>& b, mhb::mesh::Point) { return fem::p1_value(m, x1, t, b); }));
  CHECK(std::abs(v - 1.0 / 3.0) < 1e-14);

  const UniformMesh m2(2);
  fem::Vector hat = fem::Vector::Zero(9);
  hat[4] = 1.0;
  const double hv = fem::l2_norm_squared(
      m2, fem::ScalarField([&](int t, const std::array<double, 3>& b, mhb::mesh::Point) { return fem::p1_value(m2, hat, t, b); }));
  CHECK(hv == doctest::Approx(fem::assemble_mass(m2, 1.0).coeff(0, 0)).epsilon(1e-14));
  CHECK_THROWS_AS(fem::l2_norm_squared(m, fem::ScalarField([](int, const std::array<double, 3>&, mhb::mesh::Point) {
                    return 0.0;
                  }), 3),
                  std::invalid_argument);
}

TEST_CASE("Galerkin energy of the interpolant converges at second order") {
  std::vector<double> errs;
  for (int n : {8, 16, 32}) {
    const UniformMesh m(n);
    const auto u = fem::restrict_to_interior(m, fem::interpolate(m, sine_product));
    errs.push_back(std::abs(u.dot(fem::assemble_stiffness(m, 1.0) * u) - kPi * kPi / 2.0));
  }
  CHECK(std::log2(errs[0] / errs[1]) > 1.8);
  CHECK(std::log2(errs[1] / errs[2]) > 1.8);
}

TEST_CASE("extend and restrict round trip") {
  const UniformMesh m(5);
  const fem::Vector v = fem::Vector::LinSpaced(16, 1.0, 16.0);
  const auto full = fem::extend(m, v);
  CHECK(full.size() == 36);
  CHECK(full[0] == 0.0);
  CHECK((fem::restrict_to_interior(m, full) - v).norm() == 0.0);
}
