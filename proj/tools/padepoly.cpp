// padepoly: batch driver for polynomial and polynomial-matrix problems.
//
//   padepoly solve   problem.json [--seeds FILE] [--algorithm A] [--out FILE] ...
//   padepoly explore problem.json [--delta D] [--sigma S]
//   padepoly ecp     problem.json [--seeds FILE] [--evolutions N]
//   padepoly eigvec  problem.json [--lambda RE[,IM]] [--pivot-tol T]
//   padepoly plot    problem.json --range LO,HI [--samples N] --out FILE.csv
//
// Reports are JSON on stdout or in --out. The exit code is 0 only when every
// reported root passes its residual check (1 otherwise, 2 on usage or input
// errors).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "padepoly/padepoly.hpp"

namespace {

using namespace padepoly;

struct Overrides {
  std::optional<double> delta;
  std::optional<int> sigma;
  std::optional<double> step_tol;
  std::optional<double> residual_tol;
  std::optional<int> nu_max;
  std::optional<int> evolutions;
  std::optional<double> pivot_tol;
  std::optional<std::string> algorithm;
  std::optional<std::string> seeds_file;
};

void add_tuning(CLI::App* app, Overrides& ov) {
  app->add_option("--delta", ov.delta, "Scan step for real-axis exploration")->check(CLI::PositiveNumber);
  app->add_option("--sigma", ov.sigma, "Stop rule exponent: |p| <= 10^-sigma")->check(CLI::Range(1, 300));
  app->add_option("--step-tol", ov.step_tol, "Relative step tolerance")->check(CLI::PositiveNumber);
  app->add_option("--residual-tol", ov.residual_tol, "Relative residual bound")->check(CLI::PositiveNumber);
  app->add_option("--nu-max", ov.nu_max, "Largest multiplicity probed (0: the degree)")->check(CLI::NonNegativeNumber);
}

void apply(const Overrides& ov, ProblemSpec& spec) {
  auto& o = spec.options;
  if (ov.delta) o.delta = *ov.delta;
  if (ov.sigma) o.sigma = *ov.sigma;
  if (ov.step_tol) o.step_tol = *ov.step_tol;
  if (ov.residual_tol) o.residual_tol = *ov.residual_tol;
  if (ov.nu_max) o.nu_max = *ov.nu_max;
  if (ov.evolutions) o.evolutions = *ov.evolutions;
  if (ov.pivot_tol) o.pivot_tol = *ov.pivot_tol;
  if (ov.algorithm) o.algorithm = parse_algorithm(*ov.algorithm);
  if (ov.seeds_file) {
    o.seeds = read_seeds_file(*ov.seeds_file);
    o.seed_source = SeedMode::External;
  }
}

void emit(const Json& j, const std::string& out) {
  const std::string text = j.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f || !(f << text) || !(f.flush())) throw Error(ErrorCode::Io, "cannot write '" + out + "'");
}

Complex parse_lambda(const std::string& s) {
  std::string t = s;
  for (char& c : t) {
    if (c == ',') c = ' ';
  }
  std::istringstream is(t);
  double re = 0, im = 0;
  if (!(is >> re)) throw Error(ErrorCode::Parse, "--lambda expects RE or RE,IM");
  if (!(is >> im)) im = 0;
  return {re, im};
}

int solve(ProblemSpec spec, const std::string& out, bool force_ecp) {
  if (force_ecp) spec.options.ecp = true;
  const auto rep = run_pipeline(spec);
  emit(report_to_json(rep), out);
  return rep.all_ok() ? 0 : 1;
}

int explore(const ProblemSpec& spec, const std::string& out) {
  const auto f = problem_polynomial(spec);
  ExploreOptions eo;
  eo.delta = spec.options.delta;
  eo.start = spec.options.start;
  eo.sigma = spec.options.sigma;
  const auto ex = explore_real_axis(f, eo);
  emit(exploration_to_json(ex), out);
  return ex.seeds.empty() ? 1 : 0;
}

int eigvec(const ProblemSpec& spec, const std::optional<std::string>& lambda, const std::string& out) {
  if (spec.kind != ProblemKind::PolynomialMatrix) {
    throw Error(ErrorCode::InvalidArgument, "eigvec needs a matrix problem");
  }
  if (!lambda) return solve(spec, out, false);
  const auto b = eigen_bundle(*spec.matrix, parse_lambda(*lambda), spec.options.pivot_tol);
  emit(bundle_to_json(b), out);
  const double bound = spec.options.residual_tol * (1.0 + b.scale);
  return b.right_residual <= bound && b.left_residual <= bound ? 0 : 1;
}

int plot(const ProblemSpec& spec, const std::string& range, int samples, const std::string& out) {
  std::string t = range;
  for (char& c : t) {
    if (c == ',' || c == ':') c = ' ';
  }
  std::istringstream is(t);
  double lo = 0, hi = 0;
  if (!(is >> lo >> hi)) throw Error(ErrorCode::Parse, "--range expects LO,HI");
  const auto f = problem_polynomial(spec);
  if (out.empty()) {
    write_plot_data(f, lo, hi, samples, std::cout);
  } else {
    emit_plot_data(f, lo, hi, samples, out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zeros of polynomials and eigenvalues of polynomial matrices"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "padepoly 1.0.0");

  std::string input;
  std::string out;
  Overrides ov;
  std::optional<std::string> lambda;
  std::string range;
  int samples = 400;

  auto* s_solve = app.add_subcommand("solve", "Seed, refine and report every root");
  auto* s_explore = app.add_subcommand("explore", "Scan the real axis for sign changes of the Pade function");
  auto* s_ecp = app.add_subcommand("ecp", "Solve with the ECP phase: lists, evolutions, sum control, disks");
  auto* s_eig = app.add_subcommand("eigvec", "Eigenvectors of a polynomial matrix");
  auto* s_plot = app.add_subcommand("plot", "Write CSV samples of f, p and h");

  for (auto* sc : {s_solve, s_explore, s_ecp, s_eig, s_plot}) {
    sc->add_option("problem", input, "Problem file (JSON)")->required()->check(CLI::ExistingFile);
    sc->add_option("--out,-o", out, "Output file (default: stdout)");
  }
  for (auto* sc : {s_solve, s_explore, s_ecp, s_eig}) add_tuning(sc, ov);
  for (auto* sc : {s_solve, s_ecp, s_eig}) {
    sc->add_option("--seeds", ov.seeds_file, "Seed list file (JSON array or one value per line)")
        ->check(CLI::ExistingFile);
    sc->add_option("--algorithm", ov.algorithm, "test_nu, pade, halley, rayleigh or reduced")
        ->check(CLI::IsMember({"test_nu", "pade", "halley", "rayleigh", "reduced"}));
    sc->add_option("--pivot-tol", ov.pivot_tol, "Relative pivot tolerance for rank decisions")
        ->check(CLI::PositiveNumber);
  }
  for (auto* sc : {s_solve, s_ecp}) {
    sc->add_option("--evolutions", ov.evolutions, "Maximum number of list evolutions")
        ->check(CLI::NonNegativeNumber);
  }
  s_eig->add_option("--lambda", lambda, "Eigenvalue RE or RE,IM (default: all roots)");
  s_plot->add_option("--range", range, "Sample interval LO,HI")->required();
  s_plot->add_option("--samples", samples, "Number of samples")->check(CLI::Range(2, 10000000));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    auto spec = parse_problem_file(input);
    apply(ov, spec);
    if (s_solve->parsed()) return solve(spec, out, false);
    if (s_ecp->parsed()) return solve(spec, out, true);
    if (s_explore->parsed()) return explore(spec, out);
    if (s_eig->parsed()) return eigvec(spec, lambda, out);
    if (s_plot->parsed()) return plot(spec, range, samples, out);
  } catch (const padepoly::Error& e) {
    std::cerr << "padepoly: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "padepoly: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
