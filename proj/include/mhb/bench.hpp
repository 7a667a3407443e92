#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mhb/bounds.hpp"
#include "mhb/saddlesolve.hpp"
#include "mhb/timefourier.hpp"

namespace mhb::bench {

using systems::Problem;

/// Benchmark data: desired state (or gradient) q(t) g(x).
struct Example {
  int id = 0;
  Problem problem = Problem::tracking;
  double lambda = 0.1;
  double omega = 1.0;
  tf::TimeFn time_factor;
  fem::ScalarFn state;      // tracking target g(x)
  fem::VectorFn gradient;   // gradient-tracking target g(x)
  double spatial_norm2 = 0; // ||g||^2 over the unit square
  /// Closed-form (c_k, s_k) for k >= 1 and c_0, when known.
  std::function<std::pair<double, double>(int)> closed_form;
  /// Exact state e(t) S(x) when the data is built from one (with its time derivative).
  tf::TimeFn exact_state;
  tf::TimeFn exact_state_dt;

  double period() const;
  bool has_exact_solution() const { return static_cast<bool>(exact_state); }
  tf::TimeSignalCoeffs coefficients(int kmax, tf::QuadratureSpec quad = {}) const;
  /// (T/2) sum_{k>N} ||g_d,k||^2. Closed-form examples sum the series, the
  /// others subtract the retained modes from the space-time norm.
  tf::RemainderTerm remainder(int N, tf::QuadratureSpec quad = {}) const;
};

/// Examples 1-6. Throws std::invalid_argument for other ids.
Example example_data(int id);

enum class Solver { minres, direct };

const char* to_string(Solver s);

struct ExperimentConfig {
  int example = 1;
  /// Must agree with the example when set.
  std::optional<Problem> problem;
  std::vector<int> grids{64};
  std::vector<int> modes{0};
  /// Truncation index of the overall rows; negative means no overall row.
  std::vector<int> truncations;
  /// NaN selects the example's default.
  double lambda = bounds::kNaN;
  double omega = bounds::kNaN;
  double nu = 1.0;
  double sigma = 1.0;
  Solver solver = Solver::minres;
  saddle::StopSpec stop;
  /// Unset selects tracking for problem I and schur_state for problem II.
  std::optional<saddle::Family> family;
  double inner_tol = 1e-12;
  bounds::Convention convention = bounds::Convention::printed;
  /// Fine-grid reference size; 0 uses the analytic reference if there is one.
  int nref = 0;
  double alpha_rem = 1e-8;
  int threads = 1;
  int direct_cap = 400000;
  std::string out;
  bool trace = false;

  /// Throws std::invalid_argument listing every problem found.
  void validate() const;
  Problem resolved_problem() const;
  double resolved_lambda() const;
  double resolved_omega() const;
  saddle::Family resolved_family() const;
};

/// Applies the keys of a JSON object (same names as the CLI flags) on top of `base`.
ExperimentConfig config_from_json(const std::string& text, ExperimentConfig base = {});

struct ModeResult {
  int n = 0;
  int k = 0;
  double t_sec = 0.0;
  bounds::ModeBounds bounds;
  saddle::SolveStats stats;
  systems::ModeSolution solution;
};

struct OverallResult {
  int n = 0;
  int N = 0;
  bounds::OverallBounds bounds;
};

struct Report {
  ExperimentConfig config;
  /// "analytic", "fine-grid" or "none".
  std::string reference;
  std::vector<ModeResult> modes;
  std::vector<OverallResult> overall;
};

Report run(const ExperimentConfig& config);

struct TableRow {
  std::string label;
  double t_sec = 0.0;
  double minorant = 0.0;
  double ieff_minorant = bounds::kNaN;
  double majorant = 0.0;
  double ieff_majorant = bounds::kNaN;
  double ieff_ratio = bounds::kNaN;
  double ieff_m1 = bounds::kNaN;
};

/// Rows for the listed modes followed by the overall rows. Mode rows are
/// labelled by grid when several grids are swept, by mode otherwise.
std::vector<TableRow> table(const Report& report);

std::string to_csv(const std::vector<TableRow>& rows);
/// Throws std::runtime_error on a malformed header or row.
std::vector<TableRow> parse_csv(const std::string& text);
std::string to_markdown(const std::vector<TableRow>& rows);
std::string to_json(const Report& report);

/// Writes <out>.csv, <out>.md, <out>.json and, with tracing, <out>_trace.csv.
void write_outputs(const Report& report);

/// Squared errors of a coarse P1 state against the same field on a nested
/// finer mesh (fine n a multiple of coarse n), both given over all nodes.
bounds::ErrorNorms nested_error(const mesh::UniformMesh& coarse, const fem::Vector& coarse_full,
                                const mesh::UniformMesh& fine, const fem::Vector& fine_full);

/// Squared errors of a P1 state against c S(x), S = sin(pi x1) sin(pi x2).
bounds::ErrorNorms analytic_error(const mesh::UniformMesh& m, const fem::Vector& full, double c);

}  // namespace mhb::bench
