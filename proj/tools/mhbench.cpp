// Runs one benchmark experiment and prints the result table.
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mhb/bench.hpp"

namespace {

using mhb::bench::ExperimentConfig;

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiharmonic optimal control bounds benchmark"};

  std::string config_path;
  int example = 1;
  std::string problem;
  std::vector<int> grids, modes, truncations;
  double lambda = 0.0, omega = 0.0, tol = 0.0, inner_tol = 0.0, alpha_rem = 0.0, nu = 1.0, sigma = 1.0;
  int nref = 0, max_iters = 0, threads = 1;
  bool paper_mode = false, trace = false, quiet = false;
  std::string out, convention, family, solver;

  app.add_option("--config", config_path, "JSON file with experiment settings (flags override it)")
      ->check(CLI::ExistingFile);
  auto* o_example = app.add_option("--example", example, "Example id")->check(CLI::Range(1, 6));
  auto* o_problem = app.add_option("--problem", problem, "I or II; must match the example")
                        ->check(CLI::IsMember({"I", "II"}));
  auto* o_grid = app.add_option("--grid", grids, "Cells per side (repeatable)");
  auto* o_modes = app.add_option("--modes", modes, "Fourier modes to report");
  auto* o_N = app.add_option("--N", truncations, "Truncation index for the overall rows");
  auto* o_lambda = app.add_option("--lambda", lambda, "Cost parameter (default from the example)");
  auto* o_omega = app.add_option("--omega", omega, "Base frequency (default from the example)");
  auto* o_nu = app.add_option("--nu", nu, "Diffusion coefficient");
  auto* o_sigma = app.add_option("--sigma", sigma, "Time-derivative coefficient");
  auto* o_paper = app.add_flag("--paper-mode", paper_mode, "Eight MinRes steps per mode");
  auto* o_nref = app.add_option("--nref", nref, "Fine reference grid (0 = analytic when available)");
  auto* o_out = app.add_option("--out", out, "Output prefix for .csv/.md/.json");
  auto* o_conv = app.add_option("--convention", convention, "Minorant convention")
                     ->check(CLI::IsMember({"printed", "legacy"}));
  auto* o_family = app.add_option("--family", family, "Preconditioner family")
                       ->check(CLI::IsMember({"tracking", "schur-state", "schur-adjoint", "none"}));
  auto* o_solver = app.add_option("--solver", solver, "minres or direct")->check(CLI::IsMember({"minres", "direct"}));
  auto* o_tol = app.add_option("--tol", tol, "Relative MinRes tolerance");
  auto* o_iters = app.add_option("--max-iters", max_iters, "MinRes iteration cap");
  auto* o_inner = app.add_option("--inner-tol", inner_tol, "Inner PCG tolerance of the Schur blocks");
  auto* o_alpha = app.add_option("--alpha-rem", alpha_rem, "Remainder weight parameter");
  auto* o_threads = app.add_option("--threads", threads, "Worker threads over modes");
  auto* o_trace = app.add_flag("--trace", trace, "Write the MinRes residual history");
  app.add_flag("--quiet", quiet, "Do not print the table");

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg;
    if (!config_path.empty()) cfg = mhb::bench::config_from_json(read_file(config_path), cfg);
    if (*o_example) cfg.example = example;
    if (*o_problem) cfg.problem = problem == "I" ? mhb::systems::Problem::tracking
                                                 : mhb::systems::Problem::gradient_tracking;
    if (*o_grid) cfg.grids = grids;
    if (*o_modes) cfg.modes = modes;
    if (*o_N) cfg.truncations = truncations;
    if (*o_lambda) cfg.lambda = lambda;
    if (*o_omega) cfg.omega = omega;
    if (*o_nu) cfg.nu = nu;
    if (*o_sigma) cfg.sigma = sigma;
    if (*o_paper && paper_mode) cfg.stop = mhb::saddle::StopSpec::fixed(8);
    if (*o_nref) cfg.nref = nref;
    if (*o_out) cfg.out = out;
    if (*o_conv) cfg.convention = convention == "legacy" ? mhb::bounds::Convention::legacy
                                                         : mhb::bounds::Convention::printed;
    if (*o_family) {
      static const std::map<std::string, mhb::saddle::Family> families{
          {"tracking", mhb::saddle::Family::tracking},
          {"schur-state", mhb::saddle::Family::schur_state},
          {"schur-adjoint", mhb::saddle::Family::schur_adjoint},
          {"none", mhb::saddle::Family::none}};
      cfg.family = families.at(family);
    }
    if (*o_solver) cfg.solver = solver == "direct" ? mhb::bench::Solver::direct : mhb::bench::Solver::minres;
    if (*o_tol) {
      cfg.stop.tol = tol;
      cfg.stop.fixed_iterations = false;
    }
    if (*o_iters) cfg.stop.max_iters = max_iters;
    if (*o_inner) cfg.inner_tol = inner_tol;
    if (*o_alpha) cfg.alpha_rem = alpha_rem;
    if (*o_threads) cfg.threads = threads;
    if (*o_trace) cfg.trace = trace;

    const auto report = mhb::bench::run(cfg);
    mhb::bench::write_outputs(report);
    if (!quiet) {
      std::cout << "example " << cfg.example << ", reference: " << report.reference << "\n\n"
                << mhb::bench::to_markdown(mhb::bench::table(report));
    }
  } catch (const std::exception& e) {
    std::cerr << "mhbench: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
