#pragma once

#include <functional>
#include <vector>

namespace mhb::tf {

using TimeFn = std::function<double(double)>;

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussRule gauss_legendre(int points);

/// Composite Gauss-Legendre quadrature over [a, b].
double integrate(const TimeFn& f, double a, double b, int panels, int points);

struct QuadratureSpec {
  int panels = 64;
  int points = 8;
};

/// Real Fourier coefficients of a T-periodic signal,
/// u(t) = c0 + sum_k (c_k cos(k omega t) + s_k sin(k omega t)).
struct TimeSignalCoeffs {
  double omega = 1.0;
  double c0 = 0.0;
  std::vector<double> cos_k;  // entry k-1
  std::vector<double> sin_k;

  double period() const;
  int kmax() const { return static_cast<int>(cos_k.size()); }
  double cos_coeff(int k) const;
  double sin_coeff(int k) const;
  double evaluate(double t) const;
};

/// Throws std::invalid_argument for kmax < 0 or a nonpositive omega.
TimeSignalCoeffs fourier_coeffs(const TimeFn& u, double omega, int kmax, QuadratureSpec quad = {});

/// Mode-wise rotation (c_k, s_k) -> (s_k, -c_k); the mean is dropped.
TimeSignalCoeffs perp(const TimeSignalCoeffs& u);
TimeSignalCoeffs time_derivative(const TimeSignalCoeffs& u);

/// Integral of sigma*u*v over one period, from the coefficients.
double l2_inner(const TimeSignalCoeffs& u, const TimeSignalCoeffs& v, double sigma = 1.0);
/// Integral of sigma times the product of the half time derivatives.
double half_derivative_inner(const TimeSignalCoeffs& u, const TimeSignalCoeffs& v, double sigma = 1.0);

struct RemainderTerm {
  double value = 0.0;
  int N = 0;
  /// Bound on the error of `value` from quadrature or series truncation.
  double error_bound = 0.0;
};

/// (T/2) sum_{k>N} |f_k|^2 |g|^2 for data f(t) g(x), computed as the full
/// space-time norm minus the retained modes.
RemainderTerm remainder_parseval(const TimeFn& u, double omega, int N, double spatial_norm2, QuadratureSpec quad = {});

/// (T/2) sum_{k>N} mode_norm2(k), summed to kmax with `tail_bound(kmax)`
/// bounding the rest. Throws std::domain_error if the tail bound is not finite.
RemainderTerm remainder_series(const std::function<double(int)>& mode_norm2, double period, int N, int kmax,
                               const std::function<double(int)>& tail_bound);

/// T J_0 + (T/2) sum_k J_k + remainder_part.
double overall_from_modes(double period, double mode0, const std::vector<double>& modes, double remainder_part);

}  // namespace mhb::tf
