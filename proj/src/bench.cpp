#include "mhb/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "mhb/oracle.hpp"

namespace mhb::bench {

namespace {

constexpr double kPi = std::numbers::pi;
using Clock = std::chrono::steady_clock;
using fem::Vector;
using mesh::Point;
using mesh::UniformMesh;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double sine_product(double x, double y) { return std::sin(kPi * x) * std::sin(kPi * y); }

std::array<double, 2> scaled_gradient(double x, double y) {
  return {std::cos(kPi * x) * std::sin(kPi * y), std::sin(kPi * x) * std::cos(kPi * y)};
}

double upper_quadrant(double x, double y) { return (x >= 0.5 && y >= 0.5) ? 1.0 : 0.0; }

double pulse(double t) {
  const double s = t - std::floor(t);
  return (s >= 0.25 && s <= 0.75) ? 1.0 : 0.0;
}

/// sin(m pi / 2) without rounding.
int quarter_sine(int m) {
  static constexpr int table[4] = {0, 1, 0, -1};
  return table[m % 4];
}

std::pair<double, double> pulse_coefficients(int k) {
  if (k == 0) return {0.5, 0.0};
  return {(quarter_sine(3 * k) - quarter_sine(k)) / (k * kPi), 0.0};
}

}  // namespace

double Example::period() const { return 2.0 * kPi / omega; }

tf::TimeSignalCoeffs Example::coefficients(int kmax, tf::QuadratureSpec quad) const {
  if (!closed_form) return tf::fourier_coeffs(time_factor, omega, kmax, quad);
  if (kmax < 0) throw std::invalid_argument("kmax must be nonnegative");
  tf::TimeSignalCoeffs c;
  c.omega = omega;
  c.c0 = closed_form(0).first;
  for (int k = 1; k <= kmax; ++k) {
    const auto [ck, sk] = closed_form(k);
    c.cos_k.push_back(ck);
    c.sin_k.push_back(sk);
  }
  return c;
}

tf::RemainderTerm Example::remainder(int N, tf::QuadratureSpec quad) const {
  if (!closed_form) return tf::remainder_parseval(time_factor, omega, N, spatial_norm2, quad);
  const double g2 = spatial_norm2;
  auto mode = [this, g2](int k) {
    const auto [c, s] = closed_form(k);
    return g2 * (c * c + s * s);
  };
  // |c_k| <= 2/(k pi), so the tail past K is below g2 * 4/(pi^2 K).
  auto tail = [g2](int K) { return g2 * 4.0 / (kPi * kPi * K); };
  return tf::remainder_series(mode, period(), N, 1000000, tail);
}

Example example_data(int id) {
  Example e;
  e.id = id;
  auto exp_sin3 = [](double t) { return std::exp(t) * std::pow(std::sin(t), 3); };
  auto exp_sin3_dt = [](double t) {
    const double s = std::sin(t);
    return std::exp(t) * s * s * (s + 3.0 * std::cos(t));
  };
  auto exp_sin = [](double t) { return std::exp(t) * std::sin(t); };
  auto exp_sin_dt = [](double t) { return std::exp(t) * (std::sin(t) + std::cos(t)); };
  const double pi2 = kPi * kPi;
  const double pi4 = pi2 * pi2;
  switch (id) {
    case 1:
      e.problem = Problem::tracking;
      e.time_factor = [pi4](double t) {
        const double s = std::sin(t), c = std::cos(t);
        return std::exp(t) * s * 0.1 * ((12.0 + 4.0 * pi4) * s * s - 6.0 * c * (c + s));
      };
      e.exact_state = exp_sin3;
      e.exact_state_dt = exp_sin3_dt;
      break;
    case 2:
      e.problem = Problem::tracking;
      e.time_factor = [pi4](double t) {
        return std::exp(t) * 0.2 * ((5.0 + 2.0 * pi4) * std::sin(t) - std::cos(t));
      };
      e.exact_state = exp_sin;
      e.exact_state_dt = exp_sin_dt;
      break;
    case 3:
      e.problem = Problem::tracking;
      e.lambda = 0.01;
      e.omega = 2.0 * kPi;
      e.time_factor = pulse;
      e.closed_form = pulse_coefficients;
      break;
    case 4:
      e.problem = Problem::gradient_tracking;
      e.time_factor = [pi2, pi4](double t) {
        const double s = std::sin(t), c = std::cos(t);
        return std::exp(t) * s * (-3.0 * c * (c + s) + (10.0 * pi2 + 1.0 + 2.0 * pi4) * s * s) / (10.0 * kPi);
      };
      e.exact_state = exp_sin3;
      e.exact_state_dt = exp_sin3_dt;
      break;
    case 5:
      e.problem = Problem::gradient_tracking;
      e.time_factor = [pi2](double t) {
        return std::exp(t) * (pi2 * (1.0 + 0.2 * pi2) * std::sin(t) - 0.1 * std::cos(t)) / kPi;
      };
      e.exact_state = exp_sin;
      e.exact_state_dt = exp_sin_dt;
      break;
    case 6:
      e.problem = Problem::gradient_tracking;
      e.lambda = 0.01;
      e.omega = 2.0 * kPi;
      e.time_factor = pulse;
      e.closed_form = pulse_coefficients;
      break;
    default:
      throw std::invalid_argument("unknown example id " + std::to_string(id) + " (expected 1-6)");
  }
  if (e.problem == Problem::tracking) {
    if (e.closed_form) {
      e.state = upper_quadrant;
      e.spatial_norm2 = 0.25;
    } else {
      e.state = sine_product;
      e.spatial_norm2 = 0.25;
    }
  } else {
    if (e.closed_form) {
      e.gradient = [](double x, double y) {
        const double v = upper_quadrant(x, y);
        return std::array<double, 2>{v, v};
      };
      e.spatial_norm2 = 0.5;
    } else {
      e.gradient = scaled_gradient;
      e.spatial_norm2 = 0.5;
    }
  }
  return e;
}

const char* to_string(Solver s) { return s == Solver::minres ? "minres" : "direct"; }

Problem ExperimentConfig::resolved_problem() const {
  return problem.value_or(example_data(example).problem);
}

double ExperimentConfig::resolved_lambda() const {
  return std::isnan(lambda) ? example_data(example).lambda : lambda;
}

double ExperimentConfig::resolved_omega() const { return std::isnan(omega) ? example_data(example).omega : omega; }

saddle::Family ExperimentConfig::resolved_family() const {
  if (family) return *family;
  return resolved_problem() == Problem::tracking ? saddle::Family::tracking : saddle::Family::schur_state;
}

void ExperimentConfig::validate() const {
  std::vector<std::string> errs;
  if (example < 1 || example > 6) errs.push_back("example must be 1-6");
  if (errs.empty() && problem && *problem != example_data(example).problem) {
    errs.push_back("problem does not match the example");
  }
  if (grids.empty()) errs.push_back("at least one grid is required");
  for (int n : grids) {
    if (n < 2) errs.push_back("grid sizes must be at least 2");
  }
  if (modes.empty() && truncations.empty()) errs.push_back("no modes requested");
  for (int k : modes) {
    if (k < 0) errs.push_back("modes must be nonnegative");
  }
  for (int N : truncations) {
    if (N < 0) errs.push_back("truncation index must be nonnegative");
  }
  if (!std::isnan(lambda) && !(lambda > 0.0)) errs.push_back("lambda must be positive");
  if (!std::isnan(omega) && !(omega > 0.0)) errs.push_back("omega must be positive");
  if (!(nu > 0.0) || !(sigma > 0.0)) errs.push_back("nu and sigma must be positive");
  if (!stop.fixed_iterations && !(stop.tol > 0.0)) errs.push_back("tolerance must be positive");
  if (stop.max_iters < 1) errs.push_back("max_iters must be at least 1");
  if (!(inner_tol > 0.0)) errs.push_back("inner tolerance must be positive");
  if (threads < 1) errs.push_back("threads must be at least 1");
  if (nref < 0) errs.push_back("nref must be nonnegative");
  if (nref > 0) {
    for (int n : grids) {
      if (n > 0 && (nref < n || nref % n != 0)) errs.push_back("nref must be a multiple of every grid size");
    }
  }
  if (family && errs.empty()) {
    const bool tracking = resolved_problem() == Problem::tracking;
    const auto f = *family;
    if (tracking && (f == saddle::Family::schur_state || f == saddle::Family::schur_adjoint)) {
      errs.push_back("Schur families apply to gradient tracking only");
    }
    if (!tracking && f == saddle::Family::tracking) errs.push_back("tracking family applies to problem I only");
  }
  if (errs.empty()) return;
  std::string msg = "invalid configuration:";
  for (const auto& e : errs) msg += "\n  - " + e;
  throw std::invalid_argument(msg);
}

ExperimentConfig config_from_json(const std::string& text, ExperimentConfig c) {
  using nlohmann::json;
  const json j = json::parse(text);
  if (!j.is_object()) throw std::invalid_argument("configuration must be a JSON object");
  auto int_list = [](const json& v) {
    std::vector<int> out;
    if (v.is_array()) {
      for (const auto& x : v) out.push_back(x.get<int>());
    } else {
      out.push_back(v.get<int>());
    }
    return out;
  };
  for (const auto& [key, v] : j.items()) {
    if (key == "example") {
      c.example = v.get<int>();
    } else if (key == "problem") {
      const auto s = v.get<std::string>();
      if (s != "I" && s != "II") throw std::invalid_argument("problem must be I or II");
      c.problem = s == "I" ? Problem::tracking : Problem::gradient_tracking;
    } else if (key == "grid") {
      c.grids = int_list(v);
    } else if (key == "modes") {
      c.modes = int_list(v);
    } else if (key == "N") {
      c.truncations = int_list(v);
    } else if (key == "lambda") {
      c.lambda = v.get<double>();
    } else if (key == "omega") {
      c.omega = v.get<double>();
    } else if (key == "nu") {
      c.nu = v.get<double>();
    } else if (key == "sigma") {
      c.sigma = v.get<double>();
    } else if (key == "solver") {
      const auto s = v.get<std::string>();
      if (s != "minres" && s != "direct") throw std::invalid_argument("solver must be minres or direct");
      c.solver = s == "minres" ? Solver::minres : Solver::direct;
    } else if (key == "tol") {
      c.stop.tol = v.get<double>();
    } else if (key == "max_iters") {
      c.stop.max_iters = v.get<int>();
    } else if (key == "paper_mode") {
      if (v.get<bool>()) c.stop = saddle::StopSpec::fixed(8);
    } else if (key == "family") {
      const auto s = v.get<std::string>();
      if (s == "tracking") {
        c.family = saddle::Family::tracking;
      } else if (s == "schur-state") {
        c.family = saddle::Family::schur_state;
      } else if (s == "schur-adjoint") {
        c.family = saddle::Family::schur_adjoint;
      } else if (s == "none") {
        c.family = saddle::Family::none;
      } else {
        throw std::invalid_argument("unknown preconditioner family " + s);
      }
    } else if (key == "inner_tol") {
      c.inner_tol = v.get<double>();
    } else if (key == "convention") {
      const auto s = v.get<std::string>();
      if (s != "printed" && s != "legacy") throw std::invalid_argument("convention must be printed or legacy");
      c.convention = s == "printed" ? bounds::Convention::printed : bounds::Convention::legacy;
    } else if (key == "nref") {
      c.nref = v.get<int>();
    } else if (key == "alpha_rem") {
      c.alpha_rem = v.get<double>();
    } else if (key == "threads") {
      c.threads = v.get<int>();
    } else if (key == "out") {
      c.out = v.get<std::string>();
    } else if (key == "trace") {
      c.trace = v.get<bool>();
    } else {
      throw std::invalid_argument("unknown configuration key " + key);
    }
  }
  return c;
}

bounds::ErrorNorms analytic_error(const UniformMesh& m, const Vector& full, double c) {
  const auto& rule = fem::degree5_rule();
  bounds::ErrorNorms e;
  for (int t = 0; t < m.num_triangles(); ++t) {
    const Point g = fem::p1_gradient(m, full, t);
    double sl = 0.0, sg = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Point x = m.map(t, rule.points[q]);
      const auto gs = scaled_gradient(x.x, x.y);
      const double d = c * sine_product(x.x, x.y) - fem::p1_value(m, full, t, rule.points[q]);
      const double gx = c * kPi * gs[0] - g.x;
      const double gy = c * kPi * gs[1] - g.y;
      sl += rule.weights[q] * d * d;
      sg += rule.weights[q] * (gx * gx + gy * gy);
    }
    e.l2 += m.area(t) * sl;
    e.grad += m.area(t) * sg;
  }
  return e;
}

bounds::ErrorNorms nested_error(const UniformMesh& coarse, const Vector& coarse_full, const UniformMesh& fine,
                                const Vector& fine_full) {
  if (fine.cells_per_side() % coarse.cells_per_side() != 0) {
    throw std::invalid_argument("meshes are not nested");
  }
  const auto& rule = fem::degree5_rule();
  bounds::ErrorNorms e;
  for (int t = 0; t < fine.num_triangles(); ++t) {
    const Point c = fine.centroid(t);
    const int ct = coarse.locate(c);
    const Point gc = fem::p1_gradient(coarse, coarse_full, ct);
    const Point gf = fem::p1_gradient(fine, fine_full, t);
    const auto bg = coarse.barycentric_gradients(ct);
    const auto cv = coarse.vertices(ct);
    double sl = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Point x = fine.map(t, rule.points[q]);
      const double l1 = bg[1].x * (x.x - cv[0].x) + bg[1].y * (x.y - cv[0].y);
      const double l2 = bg[2].x * (x.x - cv[0].x) + bg[2].y * (x.y - cv[0].y);
      const double vc = fem::p1_value(coarse, coarse_full, ct, {1.0 - l1 - l2, l1, l2});
      const double d = fem::p1_value(fine, fine_full, t, rule.points[q]) - vc;
      sl += rule.weights[q] * d * d;
    }
    e.l2 += fine.area(t) * sl;
    const double dx = gf.x - gc.x, dy = gf.y - gc.y;
    e.grad += fine.area(t) * (dx * dx + dy * dy);
  }
  return e;
}

namespace {

/// Mesh-level data shared by all modes of one grid.
struct GridContext {
  explicit GridContext(int n, const Example& ex, double nu, double sigma)
      : mesh(n), mats(systems::build_matrices(mesh, nu, sigma)), gflux(mesh) {
    if (ex.problem == Problem::tracking) {
      load = fem::assemble_load(mesh, ex.state);
    } else {
      load = fem::assemble_gradient_load(mesh, ex.gradient);
      gflux = flux::interpolate(mesh, ex.gradient);
    }
  }

  UniformMesh mesh;
  systems::Matrices mats;
  Vector load;
  flux::RTFlux gflux;
  saddle::FactorCache cache;
};

struct Solved {
  systems::ModeSolution solution;
  saddle::SolveStats stats;
};

Solved solve_mode(GridContext& ctx, Problem problem, int k, double lambda, double omega, double dc, double ds,
                  Solver solver, const saddle::StopSpec& stop, const saddle::PrecondSpec& pspec, int direct_cap) {
  const auto sys = systems::build_mode_system(problem, ctx.mats, k, lambda, omega, dc * ctx.load, ds * ctx.load);
  Solved out;
  if (solver == Solver::direct) {
    const auto t0 = Clock::now();
    const Vector x = saddle::direct_solve(sys, direct_cap);
    out.stats.wall_seconds = seconds_since(t0);
    const double bn = sys.rhs().norm();
    out.stats.true_residual = bn > 0.0 ? (sys.rhs() - sys.apply(x)).norm() / bn : 0.0;
    out.solution = systems::unpack(sys, x);
    return out;
  }
  const auto pre = saddle::make_preconditioner(sys, pspec, &ctx.cache);
  auto res = saddle::minres(sys, *pre, stop);
  out.stats = std::move(res.stats);
  out.solution = systems::unpack(sys, res.x);
  return out;
}

template <class F>
void parallel_for(int count, int threads, F&& f) {
  if (threads <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(count);
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < std::min(threads, count); ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

Report run(const ExperimentConfig& cfg) {
  cfg.validate();
  const Example ex = example_data(cfg.example);
  const Problem problem = cfg.resolved_problem();
  bounds::Params params;
  params.lambda = cfg.resolved_lambda();
  params.omega = cfg.resolved_omega();
  params.nu = cfg.nu;
  params.sigma = cfg.sigma;
  params.constants = bounds::Constants::unit_square(cfg.nu, cfg.sigma);
  Example data = ex;
  data.omega = params.omega;

  std::set<int> needed(cfg.modes.begin(), cfg.modes.end());
  for (int N : cfg.truncations) {
    for (int k = 0; k <= N; ++k) needed.insert(k);
  }
  const std::vector<int> ks(needed.begin(), needed.end());
  const int kmax = std::max(1, ks.back());
  const auto coeffs = data.coefficients(kmax);

  const bool analytic = cfg.nref == 0 && ex.has_exact_solution() && cfg.nu == 1.0 && cfg.sigma == 1.0;
  Report report;
  report.config = cfg;
  report.reference = cfg.nref > 0 ? "fine-grid" : (analytic ? "analytic" : "none");

  const saddle::PrecondSpec pspec{cfg.resolved_family(), cfg.inner_tol};
  saddle::StopSpec fine_stop;
  fine_stop.tol = std::min(cfg.stop.fixed_iterations ? 1e-10 : cfg.stop.tol, 1e-10);
  fine_stop.max_iters = 1000;

  std::unique_ptr<GridContext> fine;
  if (cfg.nref > 0) fine = std::make_unique<GridContext>(cfg.nref, ex, cfg.nu, cfg.sigma);

  for (int n : cfg.grids) {
    const auto t_setup = Clock::now();
    GridContext ctx(n, ex, cfg.nu, cfg.sigma);
    const double setup = seconds_since(t_setup);
    std::vector<ModeResult> results(ks.size());
    std::vector<double> ref_cost(ks.size(), bounds::kNaN);

    parallel_for(static_cast<int>(ks.size()), cfg.threads, [&](int i) {
      const int k = ks[i];
      const double dc = coeffs.cos_coeff(k), ds = coeffs.sin_coeff(k);
      const auto t0 = Clock::now();
      Solved s = solve_mode(ctx, problem, k, params.lambda, params.omega, dc, ds, cfg.solver, cfg.stop, pspec,
                            cfg.direct_cap);
      bounds::ModeData md{ex.state, ex.gradient, &ctx.gflux, dc, ds};
      const auto rs = bounds::residuals_mode(problem, ctx.mesh, ctx.mats, s.solution, md, params);
      ModeResult& r = results[i];
      r.n = n;
      r.k = k;
      r.stats = std::move(s.stats);
      r.bounds = bounds::evaluate_mode(problem, k, rs, params, cfg.convention);
      r.t_sec = setup + seconds_since(t0);

      double reference = bounds::kNaN;
      bounds::ErrorNorms err;
      bool have_err = false;
      if (analytic) {
        const auto e = oracle::separable_mode(problem, k, params.lambda, params.omega, dc, ds);
        reference = e.cost;
        const double scale = 1.0;
        const auto ec = analytic_error(ctx.mesh, fem::extend(ctx.mesh, s.solution.y_cos), scale * e.y_cos);
        err = ec;
        if (k > 0) {
          const auto es = analytic_error(ctx.mesh, fem::extend(ctx.mesh, s.solution.y_sin), scale * e.y_sin);
          err.l2 += es.l2;
          err.grad += es.grad;
        }
        have_err = true;
      } else if (fine && fine->mesh.cells_per_side() == n) {
        // Degenerate reference: the solution is its own reference.
        bounds::ModeData fd{ex.state, ex.gradient, &ctx.gflux, dc, ds};
        reference = bounds::discrete_cost(problem, ctx.mesh, s.solution, fd, params.lambda);
        have_err = true;
      } else if (fine) {
        Solved f = solve_mode(*fine, problem, k, params.lambda, params.omega, dc, ds,
                              fine->mats.size() * (k == 0 ? 2 : 4) <= cfg.direct_cap ? cfg.solver : Solver::minres,
                              fine_stop, pspec, cfg.direct_cap);
        bounds::ModeData fd{ex.state, ex.gradient, &fine->gflux, dc, ds};
        reference = bounds::discrete_cost(problem, fine->mesh, f.solution, fd, params.lambda);
        err = nested_error(ctx.mesh, fem::extend(ctx.mesh, s.solution.y_cos), fine->mesh,
                           fem::extend(fine->mesh, f.solution.y_cos));
        if (k > 0) {
          const auto es = nested_error(ctx.mesh, fem::extend(ctx.mesh, s.solution.y_sin), fine->mesh,
                                       fem::extend(fine->mesh, f.solution.y_sin));
          err.l2 += es.l2;
          err.grad += es.grad;
        }
        have_err = true;
      }
      if (have_err) {
        const double combined = bounds::combined_norm_mode(problem, k, err, params);
        r.bounds = bounds::evaluate_mode(problem, k, rs, params, cfg.convention, reference, combined);
      }
      ref_cost[i] = reference;
      r.solution = std::move(s.solution);
    });

    for (int N : cfg.truncations) {
      std::vector<bounds::ModeBounds> parts;
      for (std::size_t i = 0; i < ks.size(); ++i) {
        if (ks[i] <= N) parts.push_back(results[i].bounds);
      }
      const double rem = data.remainder(N).value;
      double reference = bounds::kNaN;
      const double T = data.period();
      if (analytic) {
        // Exact modes well past N, the rest bounded by the data tail.
        const int kref = std::max(N, 64);
        const auto cref = data.coefficients(kref);
        reference = 0.0;
        for (int k = 0; k <= kref; ++k) {
          const auto e = oracle::separable_mode(problem, k, params.lambda, params.omega, cref.cos_coeff(k),
                                                cref.sin_coeff(k));
          reference += (k == 0 ? T : 0.5 * T) * e.cost;
        }
        reference += 0.5 * data.remainder(kref).value;
      } else if (fine) {
        reference = 0.5 * rem;
        for (std::size_t i = 0; i < ks.size(); ++i) {
          if (ks[i] <= N) reference += (ks[i] == 0 ? T : 0.5 * T) * ref_cost[i];
        }
      }
      OverallResult o;
      o.n = n;
      o.N = N;
      o.bounds = bounds::overall(T, parts, rem, cfg.alpha_rem, reference);
      report.overall.push_back(o);
    }
    for (auto& r : results) report.modes.push_back(std::move(r));
  }
  return report;
}

std::vector<TableRow> table(const Report& report) {
  const auto& cfg = report.config;
  const bool by_grid = cfg.grids.size() > 1;
  const bool by_mode = cfg.modes.size() > 1 || !by_grid;
  std::vector<TableRow> rows;
  const std::set<int> listed(cfg.modes.begin(), cfg.modes.end());
  auto grid_label = [](int n) { return std::to_string(n) + "x" + std::to_string(n); };
  for (const auto& m : report.modes) {
    if (!listed.count(m.k)) continue;
    TableRow r;
    if (by_grid && by_mode) {
      r.label = grid_label(m.n) + " k=" + std::to_string(m.k);
    } else if (by_grid) {
      r.label = grid_label(m.n);
    } else {
      r.label = "k=" + std::to_string(m.k);
    }
    r.t_sec = m.t_sec;
    r.minorant = m.bounds.minorant;
    r.majorant = m.bounds.majorant.value;
    r.ieff_minorant = m.bounds.indices.minorant;
    r.ieff_majorant = m.bounds.indices.majorant;
    r.ieff_ratio = m.bounds.indices.ratio;
    r.ieff_m1 = m.bounds.indices.m1;
    rows.push_back(r);
  }
  for (const auto& o : report.overall) {
    TableRow r;
    r.label = (by_grid ? grid_label(o.n) + " " : std::string()) + "overall (N=" + std::to_string(o.N) + ")";
    r.t_sec = bounds::kNaN;
    r.minorant = o.bounds.minorant;
    r.majorant = o.bounds.majorant;
    r.ieff_minorant = o.bounds.indices.minorant;
    r.ieff_majorant = o.bounds.indices.majorant;
    r.ieff_ratio = o.bounds.indices.ratio;
    r.ieff_m1 = o.bounds.indices.m1;
    rows.push_back(r);
  }
  return rows;
}

namespace {

constexpr const char* kCsvHeader = "label,t_sec,minorant,ieff_minorant,majorant,ieff_majorant,ieff_ratio,ieff_m1";

std::string exact(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(const char* spec, double v) {
  if (!std::isfinite(v)) return "--";
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace

std::string to_csv(const std::vector<TableRow>& rows) {
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (const auto& r : rows) {
    if (r.label.find(',') != std::string::npos) throw std::invalid_argument("labels must not contain commas");
    os << r.label << ',' << exact(r.t_sec) << ',' << exact(r.minorant) << ',' << exact(r.ieff_minorant) << ','
       << exact(r.majorant) << ',' << exact(r.ieff_majorant) << ',' << exact(r.ieff_ratio) << ','
       << exact(r.ieff_m1) << '\n';
  }
  return os.str();
}

std::vector<TableRow> parse_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader) throw std::runtime_error("unexpected CSV header");
  std::vector<TableRow> rows;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != 8) throw std::runtime_error("CSV line " + std::to_string(lineno) + ": expected 8 fields");
    auto num = [&](const std::string& s) {
      char* end = nullptr;
      const double v = std::strtod(s.c_str(), &end);
      if (s.empty() || *end != '\0') throw std::runtime_error("CSV line " + std::to_string(lineno) + ": bad number");
      return v;
    };
    rows.push_back({f[0], num(f[1]), num(f[2]), num(f[3]), num(f[4]), num(f[5]), num(f[6]), num(f[7])});
  }
  return rows;
}

std::string to_markdown(const std::vector<TableRow>& rows) {
  std::ostringstream os;
  os << "| | t_sec | J- | Ieff J- | J+ | Ieff J+ | Ieff J | Ieff M1 |\n";
  os << "|---|---|---|---|---|---|---|---|\n";
  for (const auto& r : rows) {
    os << "| " << r.label << " | " << fmt("%.2f", r.t_sec) << " | " << fmt("%.2e", r.minorant) << " | "
       << fmt("%.2f", r.ieff_minorant) << " | " << fmt("%.2e", r.majorant) << " | " << fmt("%.2f", r.ieff_majorant)
       << " | " << fmt("%.2f", r.ieff_ratio) << " | " << fmt("%.2f", r.ieff_m1) << " |\n";
  }
  return os.str();
}

std::string to_json(const Report& report) {
  using nlohmann::json;
  const auto& cfg = report.config;
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  json j;
  j["config"] = {{"example", cfg.example},
                 {"problem", systems::to_string(cfg.resolved_problem())},
                 {"grids", cfg.grids},
                 {"modes", cfg.modes},
                 {"N", cfg.truncations},
                 {"lambda", cfg.resolved_lambda()},
                 {"omega", cfg.resolved_omega()},
                 {"nu", cfg.nu},
                 {"sigma", cfg.sigma},
                 {"solver", to_string(cfg.solver)},
                 {"family", saddle::to_string(cfg.resolved_family())},
                 {"tol", cfg.stop.tol},
                 {"max_iters", cfg.stop.max_iters},
                 {"fixed_iterations", cfg.stop.fixed_iterations},
                 {"convention", bounds::to_string(cfg.convention)},
                 {"nref", cfg.nref},
                 {"alpha_rem", cfg.alpha_rem}};
  j["reference"] = report.reference;
  j["modes"] = json::array();
  for (const auto& m : report.modes) {
    const auto& b = m.bounds;
    const auto& r = b.residuals;
    j["modes"].push_back({{"n", m.n},
                          {"k", m.k},
                          {"t_sec", m.t_sec},
                          {"residuals", {{"r1", r.r1}, {"r2", r.r2}, {"r3", r.r3}, {"r4", r.r4}}},
                          {"misfit", r.misfit},
                          {"adjoint_norm2", r.adjoint},
                          {"mixed", {{"ykp", r.ykp}, {"time", r.time_coupling}, {"pmp", r.pmp}}},
                          {"alpha", num(b.majorant.alpha)},
                          {"beta", num(b.majorant.beta)},
                          {"minorant", b.minorant},
                          {"majorant", b.majorant.value},
                          {"m", b.error.m},
                          {"m1", b.error.m1},
                          {"reference", num(b.reference)},
                          {"combined_norm2", num(b.combined)},
                          {"ieff", {{"minorant", num(b.indices.minorant)},
                                    {"majorant", num(b.indices.majorant)},
                                    {"ratio", num(b.indices.ratio)},
                                    {"m1", num(b.indices.m1)}}},
                          {"solver", {{"iterations", m.stats.iterations},
                                      {"residual", m.stats.residual},
                                      {"true_residual", m.stats.true_residual},
                                      {"status", saddle::to_string(m.stats.status)},
                                      {"wall_seconds", m.stats.wall_seconds}}}});
  }
  j["overall"] = json::array();
  for (const auto& o : report.overall) {
    const auto& b = o.bounds;
    j["overall"].push_back({{"n", o.n},
                            {"N", o.N},
                            {"minorant", b.minorant},
                            {"majorant", b.majorant},
                            {"m1", b.m1},
                            {"remainder", b.remainder},
                            {"reference", num(b.reference)},
                            {"combined_norm2", num(b.combined)},
                            {"ieff", {{"minorant", num(b.indices.minorant)},
                                      {"majorant", num(b.indices.majorant)},
                                      {"ratio", num(b.indices.ratio)},
                                      {"m1", num(b.indices.m1)}}}});
  }
  return j.dump(2);
}

void write_outputs(const Report& report) {
  const auto& out = report.config.out;
  if (out.empty()) return;
  auto write = [](const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << text;
  };
  const auto rows = table(report);
  write(out + ".csv", to_csv(rows));
  write(out + ".md", to_markdown(rows));
  write(out + ".json", to_json(report));
  if (report.config.trace) {
    std::ostringstream os;
    os << "n,k,iteration,residual\n";
    for (const auto& m : report.modes) {
      for (std::size_t i = 0; i < m.stats.trace.size(); ++i) {
        os << m.n << ',' << m.k << ',' << i << ',' << exact(m.stats.trace[i]) << '\n';
      }
    }
    write(out + "_trace.csv", os.str());
  }
}

}  // namespace mhb::bench
