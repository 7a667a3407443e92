#include "mhb/timefourier.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace mhb::tf {

GaussRule gauss_legendre(int points) {
  if (points < 1) throw std::invalid_argument("Gauss rule needs at least one point");
  // Golub-Welsch: eigenvalues of the Jacobi matrix are the nodes.
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(points, points);
  for (int i = 1; i < points; ++i) {
    const double b = i / std::sqrt(4.0 * i * i - 1.0);
    jac(i, i - 1) = b;
    jac(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jac);
  GaussRule rule;
  rule.nodes.resize(points);
  rule.weights.resize(points);
  for (int i = 0; i < points; ++i) {
    rule.nodes[i] = eig.eigenvalues()[i];
    const double v0 = eig.eigenvectors()(0, i);
    rule.weights[i] = 2.0 * v0 * v0;
  }
  return rule;
}

double integrate(const TimeFn& f, double a, double b, int panels, int points) {
  if (panels < 1) throw std::invalid_argument("need at least one panel");
  const GaussRule rule = gauss_legendre(points);
  const double width = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * width;
    double local = 0.0;
    for (int q = 0; q < points; ++q) local += rule.weights[q] * f(mid + 0.5 * width * rule.nodes[q]);
    sum += 0.5 * width * local;
  }
  return sum;
}

double TimeSignalCoeffs::period() const { return 2.0 * std::numbers::pi / omega; }

double TimeSignalCoeffs::cos_coeff(int k) const {
  if (k == 0) return c0;
  return k <= kmax() ? cos_k[k - 1] : 0.0;
}

double TimeSignalCoeffs::sin_coeff(int k) const {
  if (k == 0) return 0.0;
  return k <= kmax() ? sin_k[k - 1] : 0.0;
}

double TimeSignalCoeffs::evaluate(double t) const {
  double v = c0;
  for (int k = 1; k <= kmax(); ++k) v += cos_k[k - 1] * std::cos(k * omega * t) + sin_k[k - 1] * std::sin(k * omega * t);
  return v;
}

TimeSignalCoeffs fourier_coeffs(const TimeFn& u, double omega, int kmax, QuadratureSpec quad) {
  if (kmax < 0) throw std::invalid_argument("kmax must be nonnegative, got " + std::to_string(kmax));
  if (!(omega > 0.0)) throw std::invalid_argument("omega must be positive");
  TimeSignalCoeffs out;
  out.omega = omega;
  out.cos_k.assign(kmax, 0.0);
  out.sin_k.assign(kmax, 0.0);
  const double T = out.period();
  const GaussRule rule = gauss_legendre(quad.points);
  const double width = T / quad.panels;
  // One pass over the samples; the basis is evaluated per sample.
  for (int p = 0; p < quad.panels; ++p) {
    const double mid = (p + 0.5) * width;
    for (int q = 0; q < quad.points; ++q) {
      const double t = mid + 0.5 * width * rule.nodes[q];
      const double w = 0.5 * width * rule.weights[q] * u(t);
      out.c0 += w;
      for (int k = 1; k <= kmax; ++k) {
        out.cos_k[k - 1] += w * std::cos(k * omega * t);
        out.sin_k[k - 1] += w * std::sin(k * omega * t);
      }
    }
  }
  out.c0 /= T;
  for (int k = 0; k < kmax; ++k) {
    out.cos_k[k] *= 2.0 / T;
    out.sin_k[k] *= 2.0 / T;
  }
  return out;
}

TimeSignalCoeffs perp(const TimeSignalCoeffs& u) {
  TimeSignalCoeffs out = u;
  out.c0 = 0.0;
  for (int k = 0; k < u.kmax(); ++k) {
    out.cos_k[k] = u.sin_k[k];
    out.sin_k[k] = -u.cos_k[k];
  }
  return out;
}

TimeSignalCoeffs time_derivative(const TimeSignalCoeffs& u) {
  TimeSignalCoeffs out = u;
  out.c0 = 0.0;
  for (int k = 1; k <= u.kmax(); ++k) {
    out.cos_k[k - 1] = k * u.omega * u.sin_k[k - 1];
    out.sin_k[k - 1] = -k * u.omega * u.cos_k[k - 1];
  }
  return out;
}

namespace {

void check_compatible(const TimeSignalCoeffs& u, const TimeSignalCoeffs& v) {
  if (u.omega != v.omega) throw std::invalid_argument("signals have different frequencies");
}

}  // namespace

double l2_inner(const TimeSignalCoeffs& u, const TimeSignalCoeffs& v, double sigma) {
  check_compatible(u, v);
  const int kmax = std::max(u.kmax(), v.kmax());
  double s = 0.0;
  for (int k = 1; k <= kmax; ++k) s += u.cos_coeff(k) * v.cos_coeff(k) + u.sin_coeff(k) * v.sin_coeff(k);
  const double T = u.period();
  return sigma * (T * u.c0 * v.c0 + 0.5 * T * s);
}

double half_derivative_inner(const TimeSignalCoeffs& u, const TimeSignalCoeffs& v, double sigma) {
  check_compatible(u, v);
  const int kmax = std::max(u.kmax(), v.kmax());
  double s = 0.0;
  for (int k = 1; k <= kmax; ++k) {
    s += k * u.omega * (u.cos_coeff(k) * v.cos_coeff(k) + u.sin_coeff(k) * v.sin_coeff(k));
  }
  return sigma * 0.5 * u.period() * s;
}

RemainderTerm remainder_parseval(const TimeFn& u, double omega, int N, double spatial_norm2, QuadratureSpec quad) {
  const TimeSignalCoeffs c = fourier_coeffs(u, omega, N, quad);
  const double T = c.period();
  auto sq = [&u](double t) {
    const double v = u(t);
    return v * v;
  };
  const double total = integrate(sq, 0.0, T, quad.panels, quad.points);
  const double total_fine = integrate(sq, 0.0, T, 2 * quad.panels, quad.points);
  double retained = T * c.c0 * c.c0;
  for (int k = 0; k < N; ++k) retained += 0.5 * T * (c.cos_k[k] * c.cos_k[k] + c.sin_k[k] * c.sin_k[k]);
  RemainderTerm r;
  r.N = N;
  r.value = std::max(0.0, spatial_norm2 * (total_fine - retained));
  r.error_bound = spatial_norm2 * std::abs(total_fine - total);
  return r;
}

RemainderTerm remainder_series(const std::function<double(int)>& mode_norm2, double period, int N, int kmax,
                               const std::function<double(int)>& tail_bound) {
  const double tail = tail_bound(kmax);
  if (!std::isfinite(tail)) throw std::domain_error("series tail cannot be bounded");
  double sum = 0.0;
  // Summed from the small end.
  for (int k = kmax; k > N; --k) sum += mode_norm2(k);
  RemainderTerm r;
  r.N = N;
  r.value = 0.5 * period * sum;
  r.error_bound = 0.5 * period * tail;
  return r;
}

double overall_from_modes(double period, double mode0, const std::vector<double>& modes, double remainder_part) {
  double s = 0.0;
  for (double v : modes) s += v;
  return period * mode0 + 0.5 * period * s + remainder_part;
}

}  // namespace mhb::tf
