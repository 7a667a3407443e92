#include "mhb/bounds.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

namespace mhb::bounds {

using fem::Vector;
using mesh::Point;

Constants Constants::unit_square(double nu, double sigma) {
  Constants c;
  c.friedrichs = 1.0 / (std::numbers::sqrt2 * std::numbers::pi);
  c.mu1 = std::min(nu, sigma) / std::numbers::sqrt2;
  return c;
}

const char* to_string(Convention c) { return c == Convention::printed ? "printed" : "legacy"; }

namespace {

/// Fields of one trigonometric component (cosine or sine) of a mode.
struct Component {
  Vector y, p;            // full nodal
  Vector y_perp, p_perp;  // full nodal, rotated partner
  flux::RTFlux tau;
  flux::RTFlux rho;
  double coeff = 0.0;
};

double sq(double v) { return v * v; }
double sq(Point v) { return v.x * v.x + v.y * v.y; }

}  // namespace

ResidualSet residuals_mode(Problem problem, const mesh::UniformMesh& m, const systems::Matrices& mats,
                           const systems::ModeSolution& sol, const ModeData& data, const Params& params) {
  const int n = mats.size();
  if (m.num_interior_nodes() != n) throw std::invalid_argument("mesh does not match the matrices");
  const bool tracking = problem == Problem::tracking;
  if (tracking && !data.state) throw std::invalid_argument("tracking needs a scalar target");
  if (!tracking && !data.gradient) throw std::invalid_argument("gradient tracking needs a vector target");
  const int k = sol.k;
  const double w = k * params.omega;
  const double nu = params.nu;
  const double sigma = params.sigma;
  const double lambda = params.lambda;

  auto component_vec = [n](const Vector& v) { return v.size() == n ? v : Vector(Vector::Zero(n)); };
  const Vector yc = component_vec(sol.y_cos), ys = component_vec(sol.y_sin);
  const Vector pc = component_vec(sol.p_cos), ps = component_vec(sol.p_sin);

  std::optional<flux::RTFlux> own_gflux;
  const flux::RTFlux* gflux = data.gradient_flux;
  if (!tracking && gflux == nullptr) {
    own_gflux.emplace(flux::interpolate(m, data.gradient));
    gflux = &*own_gflux;
  }

  auto make = [&](const Vector& y, const Vector& p, const Vector& y_perp, const Vector& p_perp, double coeff) {
    Component c{fem::extend(m, y), fem::extend(m, p), fem::extend(m, y_perp), fem::extend(m, p_perp),
                flux::RTFlux(m), flux::RTFlux(m), coeff};
    c.tau = flux::reconstruct(m, c.y, nu);
    c.rho = flux::reconstruct(m, c.p, nu);
    if (!tracking) {
      c.rho.axpy(-1.0, flux::reconstruct(m, c.y, 1.0));
      c.rho.axpy(coeff, *gflux);
    }
    return c;
  };

  std::vector<Component> comps;
  // y^perp = (-y^s, y^c).
  comps.push_back(make(yc, pc, -ys, -ps, data.cos_coeff));
  if (k > 0) comps.push_back(make(ys, ps, yc, pc, data.sin_coeff));

  ResidualSet r;
  const auto& rule = fem::degree5_rule();
  for (const auto& c : comps) {
    for (int t = 0; t < m.num_triangles(); ++t) {
      const Point gy = fem::p1_gradient(m, c.y, t);
      const Point gp = fem::p1_gradient(m, c.p, t);
      const double div_tau = c.tau.divergence(t);
      const double div_rho = c.rho.divergence(t);
      const double area = m.area(t);
      double s1 = 0, s2 = 0, s3 = 0, s4 = 0, sa = 0, sp = 0;
      for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const auto& b = rule.points[q];
        const Point x = m.map(t, b);
        const double y = fem::p1_value(m, c.y, t, b);
        const double p = fem::p1_value(m, c.p, t, b);
        const double yp = fem::p1_value(m, c.y_perp, t, b);
        const double pp = fem::p1_value(m, c.p_perp, t, b);
        const Point tau = c.tau.value(t, x);
        const Point rho = c.rho.value(t, x);
        const double wq = rule.weights[q];
        s1 += wq * sq(w * sigma * yp + div_tau - p / lambda);
        s2 += wq * sq(Point{tau.x - nu * gy.x, tau.y - nu * gy.y});
        sp += wq * p * p;
        if (tracking) {
          const double yd = c.coeff * data.state(x.x, x.y);
          s3 += wq * sq(y - yd + div_rho - w * sigma * pp);
          s4 += wq * sq(Point{rho.x - nu * gp.x, rho.y - nu * gp.y});
          sa += wq * sq(y - yd);
        } else {
          const auto g = data.gradient(x.x, x.y);
          const Point e{gy.x - c.coeff * g[0], gy.y - c.coeff * g[1]};
          s3 += wq * sq(div_rho - w * sigma * pp);
          s4 += wq * sq(Point{rho.x - nu * gp.x + e.x, rho.y - nu * gp.y + e.y});
          sa += wq * sq(e);
        }
      }
      r.r1 += area * s1;
      r.r2 += area * s2;
      r.r3 += area * s3;
      r.r4 += area * s4;
      r.misfit += area * sa;
      r.adjoint += area * sp;
    }
  }
  r.r1 = std::sqrt(r.r1);
  r.r2 = std::sqrt(r.r2);
  r.r3 = std::sqrt(r.r3);
  r.r4 = std::sqrt(r.r4);

  const auto& K = mats.weighted_stiffness;
  const auto& M = mats.mass;
  r.ykp = yc.dot(K * pc) + ys.dot(K * ps);
  r.pmp = (pc.dot(M * pc) + ps.dot(M * ps)) / lambda;
  if (k > 0) {
    const auto& Ms = mats.weighted_mass;
    r.time_coupling = w * (ys.dot(Ms * pc) - yc.dot(Ms * ps));
  }
  return r;
}

double discrete_cost(Problem problem, const mesh::UniformMesh& m, const systems::ModeSolution& sol,
                     const ModeData& data, double lambda) {
  const bool tracking = problem == Problem::tracking;
  const int n = m.num_interior_nodes();
  const auto& rule = fem::degree5_rule();
  double misfit = 0.0, adjoint = 0.0;
  auto add = [&](const Vector& y_int, const Vector& p_int, double coeff) {
    if (y_int.size() != n || p_int.size() != n) return;
    const Vector y = fem::extend(m, y_int);
    const Vector p = fem::extend(m, p_int);
    for (int t = 0; t < m.num_triangles(); ++t) {
      const Point gy = fem::p1_gradient(m, y, t);
      double sa = 0.0, sp = 0.0;
      for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const auto& b = rule.points[q];
        const Point x = m.map(t, b);
        if (tracking) {
          sa += rule.weights[q] * sq(fem::p1_value(m, y, t, b) - coeff * data.state(x.x, x.y));
        } else {
          const auto g = data.gradient(x.x, x.y);
          sa += rule.weights[q] * sq(Point{gy.x - coeff * g[0], gy.y - coeff * g[1]});
        }
        sp += rule.weights[q] * sq(fem::p1_value(m, p, t, b));
      }
      misfit += m.area(t) * sa;
      adjoint += m.area(t) * sp;
    }
  };
  add(sol.y_cos, sol.p_cos, data.cos_coeff);
  if (sol.k > 0) add(sol.y_sin, sol.p_sin, data.sin_coeff);
  return 0.5 * misfit + adjoint / (2.0 * lambda);
}

double majorant_form(const ResidualSet& r, const Params& params, double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta >= 0.0)) throw std::invalid_argument("alpha must be positive, beta nonnegative");
  const auto& c = params.constants;
  const double a2 = sq(r.r2);
  const double b2 = sq(c.friedrichs * r.r1);
  // (1+beta) a^2 + (1+1/beta) b^2, with zero norms dropped before the limits.
  double bracket = 0.0;
  if (a2 > 0.0) bracket += std::isinf(beta) ? std::numeric_limits<double>::infinity() : (1.0 + beta) * a2;
  if (b2 > 0.0) bracket += beta == 0.0 ? std::numeric_limits<double>::infinity() : (1.0 + 1.0 / beta) * b2;
  const double scale = sq(c.friedrichs) / (2.0 * sq(c.mu1));
  double value = r.adjoint / (2.0 * params.lambda);
  if (std::isinf(alpha)) {
    if (r.misfit > 0.0) return std::numeric_limits<double>::infinity();
    return value + scale * bracket;
  }
  value += 0.5 * (1.0 + alpha) * r.misfit;
  if (bracket > 0.0) value += (1.0 + alpha) / alpha * scale * bracket;
  return value;
}

MajorantResult majorant_mode(const ResidualSet& r, const Params& params) {
  const auto& c = params.constants;
  const double a = r.r2;
  const double b = c.friedrichs * r.r1;
  MajorantResult out;
  if (a == 0.0 && b == 0.0) {
    out.beta = 1.0;
  } else if (a == 0.0) {
    out.beta = std::numeric_limits<double>::infinity();
  } else if (b == 0.0) {
    out.beta = 0.0;  // the beta -> 0 limit
  } else {
    out.beta = b / a;
  }
  const double H = sq(c.friedrichs) / (2.0 * sq(c.mu1)) * sq(a + b);
  const double P = r.adjoint / (2.0 * params.lambda);
  const double A = r.misfit;
  if (H == 0.0) {
    out.alpha = 1e-8;
    out.value = 0.5 * (1.0 + out.alpha) * A + P;
  } else if (A == 0.0) {
    out.alpha = std::numeric_limits<double>::infinity();
    out.value = H + P;
  } else {
    out.alpha = std::sqrt(2.0 * H / A);
    out.value = sq(std::sqrt(0.5 * A) + std::sqrt(H)) + P;
  }
  return out;
}

double minorant_mode(Problem problem, const ResidualSet& r, const Params& params, Convention convention) {
  const auto& c = params.constants;
  const double ykp = (convention == Convention::legacy && problem == Problem::tracking) ? -r.ykp : r.ykp;
  const double mixed = ykp + r.time_coupling + r.pmp;
  const double r34 = c.friedrichs * r.r3 + r.r4;
  const double r12 = c.friedrichs * r.r1 + r.r2;
  return 0.5 * r.misfit + r.adjoint / (2.0 * params.lambda) - mixed -
         sq(c.friedrichs) / (sq(c.mu1) * params.lambda) * sq(r34) - r12 * r34 / c.mu1;
}

ErrorMajorant error_majorant_mode(double majorant, double minorant, const ResidualSet& r, const Params& params) {
  const auto& c = params.constants;
  ErrorMajorant e;
  e.m = majorant - minorant;
  e.m1 = e.m + 3.0 * params.lambda / (4.0 * sq(c.friedrichs)) * sq(c.friedrichs * r.r1 + r.r2);
  return e;
}

double combined_norm_mode(Problem problem, int k, const ErrorNorms& e, const Params& params) {
  const auto& c = params.constants;
  const double base = params.lambda * sq(c.mu1) / (2.0 * sq(c.friedrichs));
  const double time = k * params.omega * base;
  if (problem == Problem::tracking) return (0.5 + time) * e.l2 + base * e.grad;
  return time * e.l2 + (0.5 + base) * e.grad;
}

Indices efficiency_indices(double minorant, double majorant, double m1, double reference, double combined) {
  Indices idx;
  if (std::isfinite(reference) && reference != 0.0) {
    idx.minorant = minorant / reference;
    idx.majorant = majorant / reference;
  }
  if (minorant != 0.0) idx.ratio = majorant / minorant;
  if (std::isfinite(combined) && combined > 0.0 && m1 >= 0.0) idx.m1 = std::sqrt(m1 / combined);
  return idx;
}

ModeBounds evaluate_mode(Problem problem, int k, const ResidualSet& r, const Params& params, Convention convention,
                         double reference, double combined) {
  ModeBounds b;
  b.k = k;
  b.residuals = r;
  b.majorant = majorant_mode(r, params);
  b.minorant = minorant_mode(problem, r, params, convention);
  b.error = error_majorant_mode(b.majorant.value, b.minorant, r, params);
  b.reference = reference;
  b.combined = combined;
  b.indices = efficiency_indices(b.minorant, b.majorant.value, b.error.m1, reference, combined);
  return b;
}

OverallBounds overall(double period, const std::vector<ModeBounds>& modes, double remainder, double alpha_rem,
                      double reference) {
  OverallBounds o;
  o.remainder = remainder;
  o.reference = reference;
  double combined = 0.0;
  for (const auto& b : modes) {
    const double wgt = b.k == 0 ? period : 0.5 * period;
    o.minorant += wgt * b.minorant;
    o.majorant += wgt * b.majorant.value;
    o.m1 += wgt * b.error.m1;
    combined += wgt * b.combined;
  }
  o.majorant += 0.5 * (1.0 + alpha_rem) * remainder;
  o.minorant += 0.5 * remainder;
  o.m1 += 0.5 * alpha_rem * remainder;
  o.combined = combined;
  o.indices = efficiency_indices(o.minorant, o.majorant, o.m1, reference, o.combined);
  return o;
}

}  // namespace mhb::bounds
