#pragma once

#include <limits>
#include <vector>

#include "mhb/fluxrecon.hpp"
#include "mhb/systems.hpp"

namespace mhb::bounds {

using systems::Problem;

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Constants {
  double friedrichs = 0.0;  // C_F
  double mu1 = 0.0;         // lower bound of the coefficients, scaled

  /// C_F = 1/(sqrt(2) pi), mu_1 = min(nu, sigma)/sqrt(2).
  static Constants unit_square(double nu = 1.0, double sigma = 1.0);
};

struct Params {
  double lambda = 0.1;
  double omega = 1.0;
  double nu = 1.0;
  double sigma = 1.0;
  Constants constants = Constants::unit_square();
};

/// Desired data of one mode: the spatial factor times cosine and sine
/// coefficients. Tracking uses `state`, gradient tracking `gradient`.
struct ModeData {
  fem::ScalarFn state;
  fem::VectorFn gradient;
  /// Raviart-Thomas interpolant of `gradient`; built on demand when null.
  const flux::RTFlux* gradient_flux = nullptr;
  double cos_coeff = 0.0;
  double sin_coeff = 0.0;
};

/// Residual norms and the solution-dependent terms of one mode. Cosine and
/// sine parts are combined as vector norms.
struct ResidualSet {
  double r1 = 0.0, r2 = 0.0, r3 = 0.0, r4 = 0.0;
  /// ||y - y_d||^2 for tracking, ||grad y - g_d||^2 for gradient tracking.
  double misfit = 0.0;
  /// ||p||^2
  double adjoint = 0.0;
  /// Parts of the mixed integral: y^T (nu K) p, the time coupling
  /// k omega (y^s M_sigma p^c - y^c M_sigma p^s), and p^T M p / lambda.
  double ykp = 0.0;
  double time_coupling = 0.0;
  double pmp = 0.0;
};

ResidualSet residuals_mode(Problem problem, const mesh::UniformMesh& m, const systems::Matrices& mats,
                           const systems::ModeSolution& sol, const ModeData& data, const Params& params);

/// Cost of a discrete mode at u = -p/lambda: misfit/2 + ||p||^2/(2 lambda).
double discrete_cost(Problem problem, const mesh::UniformMesh& m, const systems::ModeSolution& sol,
                     const ModeData& data, double lambda);

struct MajorantResult {
  double value = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
};

/// Majorant of one mode at fixed parameters. alpha = +inf, beta = +inf and
/// beta = 0 evaluate the corresponding limits.
double majorant_form(const ResidualSet& r, const Params& params, double alpha, double beta);

/// Majorant at the minimizing (alpha, beta).
MajorantResult majorant_mode(const ResidualSet& r, const Params& params);

/// `legacy` flips the sign of y^T K p in the mixed integral of the tracking
/// minorant. It reproduces published tables but is not a guaranteed bound.
enum class Convention { printed, legacy };

const char* to_string(Convention c);

double minorant_mode(Problem problem, const ResidualSet& r, const Params& params,
                     Convention convention = Convention::printed);

struct ErrorMajorant {
  double m = 0.0;   // J+ - J-
  double m1 = 0.0;  // with the residual term added
};

ErrorMajorant error_majorant_mode(double majorant, double minorant, const ResidualSet& r, const Params& params);

/// Squared state errors of one mode.
struct ErrorNorms {
  double l2 = 0.0;
  double grad = 0.0;
};

/// Squared combined norm of the state error of mode k.
double combined_norm_mode(Problem problem, int k, const ErrorNorms& e, const Params& params);

struct Indices {
  double minorant = kNaN;
  double majorant = kNaN;
  double ratio = kNaN;
  double m1 = kNaN;
};

/// NaN entries mark indices whose reference is missing or zero.
Indices efficiency_indices(double minorant, double majorant, double m1, double reference, double combined);

struct ModeBounds {
  int k = 0;
  ResidualSet residuals;
  MajorantResult majorant;
  double minorant = 0.0;
  ErrorMajorant error;
  double reference = kNaN;
  double combined = kNaN;
  Indices indices;
};

/// Evaluates everything derivable from the residuals for one mode.
ModeBounds evaluate_mode(Problem problem, int k, const ResidualSet& r, const Params& params,
                         Convention convention = Convention::printed, double reference = kNaN,
                         double combined = kNaN);

struct OverallBounds {
  double minorant = 0.0;
  double majorant = 0.0;
  double m1 = 0.0;
  double reference = kNaN;
  double combined = kNaN;
  double remainder = 0.0;
  Indices indices;
};

/// T X_0 + (T/2) sum X_k over the modes, plus remainder weights
/// (1 + alpha_rem)/2 for the majorant, 1/2 for the minorant and alpha_rem/2
/// for M1. The combined norm ignores the remainder.
OverallBounds overall(double period, const std::vector<ModeBounds>& modes, double remainder, double alpha_rem = 1e-8,
                      double reference = kNaN);

}  // namespace mhb::bounds
