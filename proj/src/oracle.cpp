#include "mhb/oracle.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace mhb::oracle {

namespace {

constexpr double kPi = std::numbers::pi;

/// Gauss-Legendre on [a, b], composite.
template <class F>
double composite(F&& f, double a, double b, int panels, int points) {
  const tf::GaussRule rule = tf::gauss_legendre(points);
  const double width = (b - a) / panels;
  double s = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * width;
    for (int q = 0; q < points; ++q) s += 0.5 * width * rule.weights[q] * f(mid + 0.5 * width * rule.nodes[q]);
  }
  return s;
}

/// Integrals of S^2 and |grad S|^2 over the unit square by tensor Gauss.
std::pair<double, double> spatial_factors() {
  auto s2 = [](double x) { return std::sin(kPi * x) * std::sin(kPi * x); };
  auto c2 = [](double x) { return std::cos(kPi * x) * std::cos(kPi * x); };
  const double is = composite(s2, 0.0, 1.0, 4, 10);
  const double ic = composite(c2, 0.0, 1.0, 4, 10);
  return {is * is, 2.0 * kPi * kPi * ic * is};
}

}  // namespace

ElementMatrices element_matrices(double h) {
  if (!(h > 0.0)) throw std::invalid_argument("mesh size must be positive");
  ElementMatrices e;
  // Right angle at local vertex 1 (orientation 0) or 2 (orientation 1);
  // the stiffness entry of an edge is -cot(opposite angle)/2.
  e.stiffness[0] << 0.5, -0.5, 0.0, -0.5, 1.0, -0.5, 0.0, -0.5, 0.5;
  e.stiffness[1] << 0.5, 0.0, -0.5, 0.0, 0.5, -0.5, -0.5, -0.5, 1.0;
  Eigen::Matrix3d mass;
  mass << 2, 1, 1, 1, 2, 1, 1, 1, 2;
  mass *= h * h / 24.0;
  e.mass = {mass, mass};
  return e;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> dense_stiffness_mass(int n, double nu, double sigma) {
  if (n < 1) throw std::invalid_argument("need at least one cell per side");
  const int ni = n - 1;
  const auto el = element_matrices(1.0 / n);
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(ni * ni, ni * ni);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(ni * ni, ni * ni);
  auto index = [n, ni](int i, int j) { return (i <= 0 || j <= 0 || i >= n || j >= n) ? -1 : (j - 1) * ni + (i - 1); };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const std::array<std::array<int, 3>, 2> tris{{{index(i, j), index(i + 1, j), index(i + 1, j + 1)},
                                                    {index(i, j), index(i + 1, j + 1), index(i, j + 1)}}};
      for (int o = 0; o < 2; ++o) {
        for (int a = 0; a < 3; ++a) {
          for (int b = 0; b < 3; ++b) {
            const int r = tris[o][a], c = tris[o][b];
            if (r < 0 || c < 0) continue;
            K(r, c) += nu * el.stiffness[o](a, b);
            M(r, c) += sigma * el.mass[o](a, b);
          }
        }
      }
    }
  }
  return {K, M};
}

DenseSystem dense_mode_system(Problem problem, int n, int k, double lambda, double omega,
                              const Eigen::VectorXd& load_cos, const Eigen::VectorXd& load_sin, double nu,
                              double sigma) {
  const auto [K, M] = dense_stiffness_mass(n, nu, sigma);
  const auto [K1, M1] = dense_stiffness_mass(n, 1.0, 1.0);
  const Eigen::Index b = K.rows();
  const Eigen::MatrixXd& top = problem == Problem::tracking ? M1 : K1;
  DenseSystem s;
  if (k == 0) {
    s.matrix = Eigen::MatrixXd::Zero(2 * b, 2 * b);
    s.matrix.block(0, 0, b, b) = top;
    s.matrix.block(0, b, b, b) = -K;
    s.matrix.block(b, 0, b, b) = -K;
    s.matrix.block(b, b, b, b) = -M1 / lambda;
    s.rhs = Eigen::VectorXd::Zero(2 * b);
    s.rhs.head(b) = load_cos;
    return s;
  }
  const double w = k * omega;
  s.matrix = Eigen::MatrixXd::Zero(4 * b, 4 * b);
  auto blk = [&](int i, int j) { return s.matrix.block(i * b, j * b, b, b); };
  blk(0, 0) = top;
  blk(1, 1) = top;
  blk(0, 2) = -K;
  blk(0, 3) = w * M;
  blk(1, 2) = -w * M;
  blk(1, 3) = -K;
  blk(2, 0) = -K;
  blk(2, 1) = -w * M;
  blk(3, 0) = w * M;
  blk(3, 1) = -K;
  blk(2, 2) = -M1 / lambda;
  blk(3, 3) = -M1 / lambda;
  s.rhs = Eigen::VectorXd::Zero(4 * b);
  s.rhs.segment(0, b) = load_cos;
  s.rhs.segment(b, b) = load_sin;
  return s;
}

Eigen::VectorXd dense_solve(const DenseSystem& sys, int max_dim) {
  if (sys.matrix.rows() > max_dim) throw std::length_error("dense system too large for the oracle");
  if (sys.rhs.size() == 0) return {};
  Eigen::FullPivLU<Eigen::MatrixXd> lu(sys.matrix);
  if (!lu.isInvertible()) throw std::runtime_error("dense system is singular");
  Eigen::VectorXd x = lu.solve(sys.rhs);
  const double bn = sys.rhs.norm();
  if (bn > 0.0 && (sys.rhs - sys.matrix * x).norm() > 1e-12 * bn * std::max(1.0, sys.matrix.norm())) {
    throw std::runtime_error("dense solve residual too large");
  }
  return x;
}

GridSearchResult grid_search_alpha_beta(double misfit, double r1, double r2, double adjoint,
                                        const bounds::Params& params, int points) {
  const double cf = params.constants.friedrichs;
  const double mu = params.constants.mu1;
  GridSearchResult best;
  best.value = std::numeric_limits<double>::infinity();
  for (int i = 0; i < points; ++i) {
    const double alpha = std::pow(10.0, -6.0 + 12.0 * i / (points - 1));
    for (int j = 0; j < points; ++j) {
      const double beta = std::pow(10.0, -6.0 + 12.0 * j / (points - 1));
      const double gamma = (1.0 + alpha) * (1.0 + beta) * cf * cf / (2.0 * alpha * mu * mu);
      const double v = 0.5 * (1.0 + alpha) * misfit + adjoint / (2.0 * params.lambda) +
                       gamma * (r2 * r2 + cf * cf / beta * r1 * r1);
      if (v < best.value) best = {alpha, beta, v};
    }
  }
  return best;
}

ExactMode separable_mode(Problem problem, int k, double lambda, double omega, double d_cos, double d_sin) {
  // Galerkin in span{S}: M -> m, K -> L m with m = 1/4, L = 2 pi^2; the
  // system is divided by m.
  const double L = 2.0 * kPi * kPi;
  const double w = k * omega;
  const bool tracking = problem == Problem::tracking;
  const double top = tracking ? 1.0 : L;
  const double dc = tracking ? d_cos : d_cos / kPi;
  const double ds = tracking ? d_sin : d_sin / kPi;
  Eigen::Matrix4d A = Eigen::Matrix4d::Zero();
  A(0, 0) = A(1, 1) = top;
  Eigen::Matrix2d B;
  B << -L, -w, w, -L;
  A.block<2, 2>(2, 0) = B;
  A.block<2, 2>(0, 2) = B.transpose();
  A(2, 2) = A(3, 3) = -1.0 / lambda;
  Eigen::Vector4d rhs(top * dc, top * ds, 0.0, 0.0);
  const Eigen::Vector4d x = A.fullPivLu().solve(rhs);
  ExactMode e{x[0], x[1], x[2], x[3], 0.0};
  const double m = 0.25;
  const double mis = (x[0] - dc) * (x[0] - dc) + (x[1] - ds) * (x[1] - ds);
  e.cost = 0.5 * m * top * mis + m * (x[2] * x[2] + x[3] * x[3]) / (2.0 * lambda);
  return e;
}

double spacetime_mode_cost(Problem problem, const SeparableSolution& s, double lambda, int k, int panels,
                           int points) {
  const double T = 2.0 * kPi / s.omega;
  const double L = 2.0 * kPi * kPi;
  auto u = [&](double t) { return s.state_dt(t) + L * s.state(t); };
  auto proj = [&](const tf::TimeFn& f, bool sine) {
    const double scale = k == 0 ? 1.0 / T : 2.0 / T;
    return scale * composite(
                       [&](double t) {
                         const double b = sine ? std::sin(k * s.omega * t) : std::cos(k * s.omega * t);
                         return f(t) * b;
                       },
                       0.0, T, panels, points);
  };
  const auto [ss, gs] = spatial_factors();
  const bool tracking = problem == Problem::tracking;
  const double dscale = tracking ? 1.0 : 1.0 / kPi;
  const double mis_w = tracking ? ss : gs;
  double mis = 0.0, ctl = 0.0;
  for (bool sine : {false, true}) {
    if (k == 0 && sine) continue;
    const double yk = proj(s.state, sine);
    const double dk = proj(s.data, sine) * dscale;
    const double uk = proj(u, sine);
    mis += (yk - dk) * (yk - dk);
    ctl += uk * uk;
  }
  return 0.5 * mis_w * mis + 0.5 * lambda * ss * ctl;
}

double spacetime_cost(Problem problem, const SeparableSolution& s, double lambda, int panels, int points) {
  const double T = 2.0 * kPi / s.omega;
  const double L = 2.0 * kPi * kPi;
  const auto [ss, gs] = spatial_factors();
  const bool tracking = problem == Problem::tracking;
  const double dscale = tracking ? 1.0 : 1.0 / kPi;
  const double mis_w = tracking ? ss : gs;
  return composite(
      [&](double t) {
        const double e = s.state(t) - dscale * s.data(t);
        const double u = s.state_dt(t) + L * s.state(t);
        return 0.5 * mis_w * e * e + 0.5 * lambda * ss * u * u;
      },
      0.0, T, panels, points);
}

}  // namespace mhb::oracle
