#pragma once

// Problem files, the seed -> refine -> report pipeline, and plot data.
//
// A problem file is JSON. Complex numbers are a plain number or [re, im];
// polynomial coefficients are listed in ascending order; a matrix problem
// lists the coefficient matrices A_0..A_rho as nested rows.

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "padepoly/ecp.hpp"
#include "padepoly/explore.hpp"
#include "padepoly/matpoly.hpp"
#include "padepoly/polynomial.hpp"
#include "padepoly/refine.hpp"

namespace padepoly {

using Json = nlohmann::ordered_json;

enum class ProblemKind { ScalarPolynomial, PolynomialMatrix };
enum class SeedMode { Explore, Diagonal, Companion, External };
enum class Algorithm { TestNu, Pade, Halley, Rayleigh, Reduced };

inline const char* to_string(ProblemKind k) noexcept {
  return k == ProblemKind::ScalarPolynomial ? "polynomial" : "matrix";
}

inline const char* to_string(SeedMode m) noexcept {
  switch (m) {
    case SeedMode::Explore: return "explore";
    case SeedMode::Diagonal: return "diagonal";
    case SeedMode::Companion: return "companion";
    case SeedMode::External: return "external";
  }
  return "unknown";
}

inline const char* to_string(Algorithm a) noexcept {
  switch (a) {
    case Algorithm::TestNu: return "test_nu";
    case Algorithm::Pade: return "pade";
    case Algorithm::Halley: return "halley";
    case Algorithm::Rayleigh: return "rayleigh";
    case Algorithm::Reduced: return "reduced";
  }
  return "unknown";
}

inline SeedMode parse_seed_mode(const std::string& s) {
  for (auto m : {SeedMode::Explore, SeedMode::Diagonal, SeedMode::Companion, SeedMode::External}) {
    if (s == to_string(m)) return m;
  }
  throw Error(ErrorCode::Parse, "unknown seed source '" + s + "'");
}

inline Algorithm parse_algorithm(const std::string& s) {
  for (auto a : {Algorithm::TestNu, Algorithm::Pade, Algorithm::Halley, Algorithm::Rayleigh, Algorithm::Reduced}) {
    if (s == to_string(a)) return a;
  }
  throw Error(ErrorCode::Parse, "unknown algorithm '" + s + "'");
}

struct ProblemOptions {
  double delta = 0;  ///< 0 picks a step from the Cauchy bound
  double start = 0;
  int sigma = 5;
  double step_tol = 1e-12;
  double residual_tol = 1e-10;
  double divergence_factor = 10;
  int max_iters = 100;
  int nu_max = 0;  ///< 0 means the degree
  double taylor_tol = 1e-7;
  double pivot_tol = 1e-10;
  SeedMode seed_source = SeedMode::Explore;
  std::vector<Complex> seeds;
  Algorithm algorithm = Algorithm::TestNu;
  bool ecp = false;
  int evolutions = 20;

  IterationSettings settings() const {
    IterationSettings s;
    s.max_iters = max_iters;
    s.step_tol = step_tol;
    s.residual_tol = residual_tol;
    s.divergence_factor = divergence_factor;
    return s;
  }

  friend bool operator==(const ProblemOptions&, const ProblemOptions&) = default;
};

struct ProblemSpec {
  std::string name;
  ProblemKind kind = ProblemKind::ScalarPolynomial;
  std::optional<Polynomial> polynomial;
  std::optional<PolynomialMatrix> matrix;
  ProblemOptions options;

  friend bool operator==(const ProblemSpec& a, const ProblemSpec& b) {
    return a.name == b.name && a.kind == b.kind && a.polynomial == b.polynomial && a.matrix == b.matrix &&
           a.options == b.options;
  }
};

namespace detail {

inline Error field_error(const std::string& field, const std::string& what) {
  return Error(ErrorCode::Parse, "field '" + field + "': " + what);
}

inline Complex complex_from_json(const Json& j, const std::string& field) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return Complex(j[0].get<double>(), j[1].get<double>());
  }
  throw field_error(field, "expected a number or [re, im]");
}

inline Json complex_to_json(const Complex& z) { return Json::array({z.real(), z.imag()}); }

inline std::vector<Complex> complex_list(const Json& j, const std::string& field) {
  if (!j.is_array()) throw field_error(field, "expected an array");
  std::vector<Complex> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(complex_from_json(j[i], field + "[" + std::to_string(i) + "]"));
  }
  return out;
}

inline Matrix matrix_from_json(const Json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw field_error(field, "expected a non-empty list of rows");
  const std::size_t n = j.size();
  Matrix M(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    const std::string rf = field + "[" + std::to_string(r) + "]";
    if (!j[r].is_array()) throw field_error(rf, "expected a row");
    if (j[r].size() != n) {
      throw field_error(rf, "row has " + std::to_string(j[r].size()) + " entries, expected " + std::to_string(n));
    }
    for (std::size_t c = 0; c < n; ++c) {
      M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          complex_from_json(j[r][c], rf + "[" + std::to_string(c) + "]");
    }
  }
  return M;
}

inline Json matrix_to_json(const Matrix& M) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(complex_to_json(M(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <class T>
T get_field(const Json& obj, const char* key, const T& fallback, const std::string& ctx) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw field_error(ctx + key, "wrong type");
  }
}

inline std::string line_context(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::Parse, origin + ": " + line_context(text, e.byte > 0 ? e.byte - 1 : 0) + ": " +
                                      e.what());
  }
}

}  // namespace detail

inline ProblemSpec problem_from_json(const Json& j) {
  if (!j.is_object()) throw detail::field_error("<root>", "expected an object");
  ProblemSpec spec;
  spec.name = detail::get_field<std::string>(j, "name", "", "");
  const std::string kind = detail::get_field<std::string>(j, "kind", "polynomial", "");
  if (kind == "polynomial") {
    spec.kind = ProblemKind::ScalarPolynomial;
    if (!j.contains("coefficients")) throw detail::field_error("coefficients", "missing");
    auto c = detail::complex_list(j.at("coefficients"), "coefficients");
    Polynomial p(std::move(c));
    if (p.is_zero()) throw Error(ErrorCode::Parse, "field 'coefficients': zero polynomial");
    spec.polynomial = std::move(p);
  } else if (kind == "matrix") {
    spec.kind = ProblemKind::PolynomialMatrix;
    if (!j.contains("matrices")) throw detail::field_error("matrices", "missing");
    const auto& ms = j.at("matrices");
    if (!ms.is_array()) throw detail::field_error("matrices", "expected a list of matrices");
    std::vector<Matrix> mats;
    for (std::size_t i = 0; i < ms.size(); ++i) {
      mats.push_back(detail::matrix_from_json(ms[i], "matrices[" + std::to_string(i) + "]"));
    }
    try {
      spec.matrix = PolynomialMatrix(std::move(mats));
    } catch (const Error& e) {
      throw Error(ErrorCode::Parse, std::string("field 'matrices': ") + e.what());
    }
  } else {
    throw detail::field_error("kind", "expected \"polynomial\" or \"matrix\", got \"" + kind + "\"");
  }

  const Json opts = j.contains("options") ? j.at("options") : Json::object();
  if (!opts.is_object()) throw detail::field_error("options", "expected an object");
  auto& o = spec.options;
  const std::string ctx = "options.";
  o.delta = detail::get_field(opts, "delta", o.delta, ctx);
  o.start = detail::get_field(opts, "start", o.start, ctx);
  o.sigma = detail::get_field(opts, "sigma", o.sigma, ctx);
  o.step_tol = detail::get_field(opts, "step_tol", o.step_tol, ctx);
  o.residual_tol = detail::get_field(opts, "residual_tol", o.residual_tol, ctx);
  o.divergence_factor = detail::get_field(opts, "divergence_factor", o.divergence_factor, ctx);
  o.max_iters = detail::get_field(opts, "max_iters", o.max_iters, ctx);
  o.nu_max = detail::get_field(opts, "nu_max", o.nu_max, ctx);
  o.taylor_tol = detail::get_field(opts, "taylor_tol", o.taylor_tol, ctx);
  o.pivot_tol = detail::get_field(opts, "pivot_tol", o.pivot_tol, ctx);
  o.ecp = detail::get_field(opts, "ecp", o.ecp, ctx);
  o.evolutions = detail::get_field(opts, "evolutions", o.evolutions, ctx);
  if (opts.contains("seed_source")) {
    o.seed_source = parse_seed_mode(detail::get_field<std::string>(opts, "seed_source", "", ctx));
  }
  if (opts.contains("algorithm")) {
    o.algorithm = parse_algorithm(detail::get_field<std::string>(opts, "algorithm", "", ctx));
  }
  if (opts.contains("seeds")) o.seeds = detail::complex_list(opts.at("seeds"), "options.seeds");
  if (o.seed_source == SeedMode::Diagonal && spec.kind != ProblemKind::PolynomialMatrix) {
    throw detail::field_error("options.seed_source", "diagonal seeds need a matrix problem");
  }
  if (o.sigma < 1) throw detail::field_error("options.sigma", "must be >= 1");
  if (o.evolutions < 0) throw detail::field_error("options.evolutions", "must be >= 0");
  try {
    o.settings().validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::Parse, std::string("options: ") + e.what());
  }
  return spec;
}

inline Json problem_to_json(const ProblemSpec& spec) {
  Json j;
  j["name"] = spec.name;
  j["kind"] = to_string(spec.kind);
  if (spec.polynomial) {
    Json c = Json::array();
    for (const auto& a : spec.polynomial->coeffs()) c.push_back(detail::complex_to_json(a));
    j["coefficients"] = std::move(c);
  }
  if (spec.matrix) {
    Json ms = Json::array();
    for (const auto& A : spec.matrix->coeffs()) ms.push_back(detail::matrix_to_json(A));
    j["matrices"] = std::move(ms);
  }
  const auto& o = spec.options;
  Json opts;
  opts["delta"] = o.delta;
  opts["start"] = o.start;
  opts["sigma"] = o.sigma;
  opts["step_tol"] = o.step_tol;
  opts["residual_tol"] = o.residual_tol;
  opts["divergence_factor"] = o.divergence_factor;
  opts["max_iters"] = o.max_iters;
  opts["nu_max"] = o.nu_max;
  opts["taylor_tol"] = o.taylor_tol;
  opts["pivot_tol"] = o.pivot_tol;
  opts["seed_source"] = to_string(o.seed_source);
  Json seeds = Json::array();
  for (const auto& s : o.seeds) seeds.push_back(detail::complex_to_json(s));
  opts["seeds"] = std::move(seeds);
  opts["algorithm"] = to_string(o.algorithm);
  opts["ecp"] = o.ecp;
  opts["evolutions"] = o.evolutions;
  j["options"] = std::move(opts);
  return j;
}

inline ProblemSpec parse_problem_text(const std::string& text, const std::string& origin = "<input>") {
  return problem_from_json(detail::parse_json_text(text, origin));
}

inline ProblemSpec parse_problem_file(const std::string& path) {
  return parse_problem_text(detail::read_file(path), path);
}

/// A seeds file is either a JSON array of complex values or plain text with
/// one value per line: "re", "re im" or "re,im"; '#' starts a comment.
inline std::vector<Complex> read_seeds_text(const std::string& text, const std::string& origin = "<seeds>") {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '[') {
    return detail::complex_list(detail::parse_json_text(text, origin), "seeds");
  }
  std::vector<Complex> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    std::vector<double> nums;
    std::string tok;
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        nums.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw Error(ErrorCode::Parse, origin + ": line " + std::to_string(lineno) + ": bad number '" + tok + "'");
      }
    }
    if (nums.empty()) continue;
    if (nums.size() > 2) {
      throw Error(ErrorCode::Parse, origin + ": line " + std::to_string(lineno) + ": expected 're' or 're im'");
    }
    out.emplace_back(nums[0], nums.size() == 2 ? nums[1] : 0.0);
  }
  return out;
}

inline std::vector<Complex> read_seeds_file(const std::string& path) {
  return read_seeds_text(detail::read_file(path), path);
}

struct RootEntry {
  Complex value;
  int multiplicity = 1;
  double residual = 0;  ///< |f(value)|
  double residual_scale = 0;
  bool residual_ok = false;
  Algorithm algorithm = Algorithm::TestNu;
  int iterations = 0;
  Complex seed;
  SeedSource seed_source = SeedSource::External;
  int evidence = 1;  ///< seeds that led to this root
  std::vector<std::string> notes;
  std::optional<EigenvectorBundle> eigen;
};

struct EcpDiagnostics {
  std::vector<EcpList> lists;
  SumControl<double> control;
  std::vector<GershgorinDisk> disks;
  std::string stop_reason;
};

struct RootReport {
  std::string name;
  ProblemKind kind = ProblemKind::ScalarPolynomial;
  Polynomial polynomial;
  int nominal_degree = 0;
  int effective_degree = 0;
  std::vector<RootEntry> roots;
  int multiplicity_sum = 0;
  bool conserved = false;
  std::vector<std::string> errors;
  std::vector<std::string> notes;
  std::optional<EcpDiagnostics> ecp;

  bool all_ok() const {
    return conserved && !roots.empty() &&
           std::all_of(roots.begin(), roots.end(), [](const RootEntry& r) { return r.residual_ok; });
  }
};

namespace detail {

/// Smallest nu the Taylor ladder accepts at x, or nullopt.
inline std::optional<int> taylor_order(const Polynomial& f, const Complex& x, double tol) {
  for (int nu = 1; nu <= f.degree(); ++nu) {
    if (std::holds_alternative<TaylorVerdict<double>>(taylor_multiplicity_test(f, x, nu, tol))) return nu;
  }
  return std::nullopt;
}

inline void finish_entry(const Polynomial& f, const ProblemOptions& o, RootEntry& e) {
  e.residual = std::abs(value(f, e.value));
  e.residual_scale = magnitude_scale(f, e.value);
  // A nu-fold root is only located to about eps^(1/nu); its residual is
  // correspondingly at rounding level of the scale.
  e.residual_ok = e.residual <= o.residual_tol * e.residual_scale;
}

inline std::string format_complex(const Complex& z) {
  std::ostringstream os;
  os << std::setprecision(16) << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
  return os.str();
}

}  // namespace detail

inline RootReport run_pipeline(const ProblemSpec& spec) {
  RootReport rep;
  rep.name = spec.name;
  rep.kind = spec.kind;
  const auto& o = spec.options;
  const auto settings = o.settings();

  if (spec.kind == ProblemKind::PolynomialMatrix) {
    if (!spec.matrix) throw Error(ErrorCode::InvalidArgument, "matrix problem without matrices");
    const auto cp = characteristic_polynomial(*spec.matrix);
    rep.polynomial = cp.poly;
    rep.nominal_degree = cp.nominal_degree;
    rep.effective_degree = cp.effective_degree;
  } else {
    if (!spec.polynomial) throw Error(ErrorCode::InvalidArgument, "polynomial problem without coefficients");
    rep.polynomial = *spec.polynomial;
    rep.nominal_degree = rep.effective_degree = rep.polynomial.degree();
  }
  const Polynomial& f = rep.polynomial;
  if (f.degree() < 1) {
    rep.errors.emplace_back("polynomial has no roots (degree < 1)");
    return rep;
  }

  // (1) seeds
  std::vector<Seed> seeds;
  try {
    switch (o.seed_source) {
      case SeedMode::Explore: {
        ExploreOptions eo;
        eo.delta = o.delta;
        eo.start = o.start;
        eo.sigma = o.sigma;
        auto ex = explore_real_axis(f, eo);
        seeds = ex.seeds;
        break;
      }
      case SeedMode::Diagonal: {
        auto ds = diagonal_seeds(*spec.matrix);
        for (int r : ds.degenerate_rows) {
          rep.errors.push_back("diagonal entry " + std::to_string(r + 1) + " has degree below rho");
        }
        for (const auto& s : ds.seeds) seeds.push_back({s, SeedSource::Diagonal});
        break;
      }
      case SeedMode::Companion: {
        auto cs = companion_seed_all(f);
        if (cs.low_confidence) rep.errors.emplace_back("companion seeds: low confidence");
        for (const auto& s : cs.seeds) seeds.push_back({s, SeedSource::Companion});
        break;
      }
      case SeedMode::External:
        for (const auto& s : o.seeds) seeds.push_back({s, SeedSource::External});
        break;
    }
  } catch (const Error& e) {
    rep.errors.push_back(std::string("seeding: ") + e.what());
  }
  if (seeds.empty()) rep.errors.emplace_back("no seeds");

  // (2) refinement per seed
  std::vector<RootEntry> found;
  auto add_single = [&](const Seed& seed, const IterationTrace& t, Algorithm alg) {
    RootEntry e;
    e.seed = seed.value;
    e.seed_source = seed.source;
    e.algorithm = alg;
    e.iterations = static_cast<int>(t.size());
    e.value = t.final_value();
    for (const auto& n : t.notes) e.notes.push_back(n);
    if (!t.converged()) {
      rep.errors.push_back(std::string(to_string(alg)) + " from " + detail::format_complex(seed.value) + ": " +
                           to_string(t.status));
      return;
    }
    // Single-root methods only converge quadratically on simple roots.
    e.multiplicity = 1;
    if (!std::holds_alternative<TaylorVerdict<double>>(taylor_multiplicity_test(f, e.value, 1, o.taylor_tol))) {
      e.notes.emplace_back("Taylor ladder does not confirm a simple root at this tolerance");
    }
    found.push_back(std::move(e));
  };

  std::optional<EcpList> ecp_seed_list;
  if (o.algorithm == Algorithm::Rayleigh || o.algorithm == Algorithm::Reduced) {
    try {
      std::vector<Complex> sig;
      for (const auto& s : seeds) sig.push_back(s.value);
      ecp_seed_list = build_ecp_list(f, sig);
    } catch (const Error& e) {
      rep.errors.push_back(std::string("ECP list from seeds: ") + e.what());
    }
  }

  auto refine = [&](const Seed& seed, std::size_t k, Algorithm alg) {
    try {
      switch (alg) {
        case Algorithm::TestNu: {
          try {
            auto v = detect_multiplicity(f, seed.value, o.nu_max, settings, o.taylor_tol);
            RootEntry e;
            e.value = v.root;
            e.multiplicity = v.multiplicity;
            e.seed = seed.value;
            e.seed_source = seed.source;
            e.algorithm = Algorithm::TestNu;
            e.iterations = static_cast<int>(v.probes[static_cast<std::size_t>(v.multiplicity - 1)].size());
            found.push_back(std::move(e));
          } catch (const AmbiguousMultiplicityError<double>& amb) {
            // Each candidate is a Taylor-validated root in its own right.
            for (const auto& [nu, root] : amb.candidates()) {
              RootEntry e;
              e.value = root;
              e.multiplicity = nu;
              e.seed = seed.value;
              e.seed_source = seed.source;
              e.algorithm = Algorithm::TestNu;
              e.notes.emplace_back("probes from this seed reached several roots");
              found.push_back(std::move(e));
            }
          }
          break;
        }
        case Algorithm::Pade: add_single(seed, iterate_pade(f, seed.value, settings), alg); break;
        case Algorithm::Halley: add_single(seed, iterate_halley(f, seed.value, settings), alg); break;
        case Algorithm::Rayleigh:
        case Algorithm::Reduced: {
          if (!ecp_seed_list) break;
          const Complex start = ecp_seed_list->rows[k].main_value;
          const auto t = o.algorithm == Algorithm::Rayleigh ? rayleigh_iterate(*ecp_seed_list, start, settings)
                                                             : reduced_pade_iterate(*ecp_seed_list, start, settings);
          add_single(Seed{start, seed.source}, t, o.algorithm);
          break;
        }
      }
    } catch (const Error& e) {
      rep.errors.push_back("seed " + detail::format_complex(seed.value) + ": " + e.what());
    }
  };
  for (std::size_t k = 0; k < seeds.size(); ++k) refine(seeds[k], k, o.algorithm);

  // (3) deduplicate
  auto merge = [&]() {
  for (auto& e : found) {
    auto it = std::find_if(rep.roots.begin(), rep.roots.end(),
                           [&](const RootEntry& r) { return same_root(r.value, e.value, 1e-8); });
    if (it == rep.roots.end()) {
      rep.roots.push_back(std::move(e));
      continue;
    }
    ++it->evidence;
    if (e.multiplicity != it->multiplicity) {
      it->notes.push_back("seeds disagree on multiplicity (" + std::to_string(it->multiplicity) + " vs " +
                          std::to_string(e.multiplicity) + "); larger kept");
      if (e.multiplicity > it->multiplicity) {
        const int ev = it->evidence;
        auto notes = it->notes;
        *it = std::move(e);
        it->evidence = ev;
        it->notes.insert(it->notes.begin(), notes.begin(), notes.end());
      }
    }
  }
  found.clear();
  };
  merge();

  // Seeds that collapsed onto the same root leave a multiplicity gap. The
  // found roots are divided out and the quotient supplies fresh seeds, which
  // are refined on f itself.
  auto sum_nu = [&]() {
    int n = 0;
    for (const auto& r : rep.roots) n += r.multiplicity;
    return n;
  };
  if (!rep.roots.empty() && sum_nu() < f.degree()) {
    try {
      Polynomial q = f;
      for (const auto& r : rep.roots) {
        for (int i = 0; i < r.multiplicity && q.degree() >= 1; ++i) q = deflate_horner(q, r.value).quotient;
      }
      if (q.degree() >= 1) {
        const auto cs = companion_seed_all(q);
        const Algorithm alg = o.algorithm == Algorithm::TestNu ? Algorithm::TestNu : Algorithm::Pade;
        for (const auto& z : cs.seeds) refine(Seed{z, SeedSource::Companion}, 0, alg);
        rep.notes.push_back("completion: " + std::to_string(cs.seeds.size()) +
                            " seeds from the deflated quotient");
        merge();
      }
    } catch (const Error& e) {
      rep.errors.push_back(std::string("completion: ") + e.what());
    }
  }
  for (auto& r : rep.roots) detail::finish_entry(f, o, r);
  std::sort(rep.roots.begin(), rep.roots.end(), [](const RootEntry& a, const RootEntry& b) {
    if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
    return a.value.imag() < b.value.imag();
  });

  // (4) ECP phase: the list is anchored on the seeds when there is one per
  // root, otherwise on the refined roots when they are all simple.
  if (o.ecp) {
    std::vector<Complex> sig;
    if (static_cast<int>(seeds.size()) == f.degree()) {
      for (const auto& s : seeds) sig.push_back(s.value);
    } else if (static_cast<int>(rep.roots.size()) == f.degree()) {
      for (const auto& r : rep.roots) sig.push_back(r.value);
    }
    if (sig.empty()) {
      rep.errors.emplace_back("ECP phase skipped: need one distinct interpolation value per root");
    } else {
      try {
        auto hist = evolve_until(f, sig, o.evolutions);
        EcpDiagnostics d;
        d.control = sum_control(hist.lists.back());
        d.disks = gershgorin_enclosures(hist.lists.back());
        d.stop_reason = hist.stop_reason;
        d.lists = std::move(hist.lists);
        rep.ecp = std::move(d);
      } catch (const Error& e) {
        rep.errors.push_back(std::string("ECP phase: ") + e.what());
      }
    }
  }

  // (5) eigenvectors
  if (spec.kind == ProblemKind::PolynomialMatrix) {
    for (auto& r : rep.roots) {
      try {
        r.eigen = eigen_bundle(*spec.matrix, r.value, o.pivot_tol, Normalization::LastEntryMinusOne,
                               std::optional<int>(r.multiplicity));
      } catch (const Error& e) {
        rep.errors.push_back("eigenvectors at " + detail::format_complex(r.value) + ": " + e.what());
      }
    }
  }

  // (6) conservation
  rep.multiplicity_sum = 0;
  for (const auto& r : rep.roots) rep.multiplicity_sum += r.multiplicity;
  rep.conserved = rep.multiplicity_sum == rep.effective_degree;
  if (!rep.conserved) {
    rep.errors.push_back("multiplicities sum to " + std::to_string(rep.multiplicity_sum) +
                         " but the effective degree is " + std::to_string(rep.effective_degree));
  }
  return rep;
}

inline Json trace_to_json(const IterationTrace& t) {
  Json rows = Json::array();
  for (const auto& r : t.rows) {
    rows.push_back({{"lambda", detail::complex_to_json(r.value)}, {"step", detail::complex_to_json(r.step)}});
  }
  Json j;
  j["status"] = to_string(t.status);
  j["residual"] = t.residual;
  j["rows"] = std::move(rows);
  j["notes"] = t.notes;
  return j;
}

inline Json ecp_list_to_json(const EcpList& L) {
  Json rows = Json::array();
  for (const auto& r : L.rows) {
    rows.push_back({{"sigma", detail::complex_to_json(r.sigma)},
                    {"defect", detail::complex_to_json(r.defect)},
                    {"main_value", detail::complex_to_json(r.main_value)}});
  }
  Json j;
  j["max_defect"] = L.max_defect();
  j["rows"] = std::move(rows);
  return j;
}

inline Json bundle_to_json(const EigenvectorBundle& b) {
  Json j;
  j["eigenvalue"] = detail::complex_to_json(b.eigenvalue);
  j["rank_deficiency"] = b.rank_deficiency;
  if (b.right_vectors.size() > 0) j["right_vectors"] = detail::matrix_to_json(b.right_vectors);
  if (b.left_vectors.size() > 0) j["left_vectors"] = detail::matrix_to_json(b.left_vectors);
  j["right_residual"] = b.right_residual;
  j["left_residual"] = b.left_residual;
  j["scale"] = b.scale;
  j["normalization"] = b.normalization == Normalization::UnitNorm ? "unit_norm" : "last_entry_minus_one";
  if (b.algebraic_multiplicity) j["algebraic_multiplicity"] = *b.algebraic_multiplicity;
  j["defective"] = b.defective();
  return j;
}

inline Json disks_to_json(const std::vector<GershgorinDisk>& disks) {
  Json arr = Json::array();
  for (const auto& d : disks) {
    Json dj;
    dj["center"] = detail::complex_to_json(d.center);
    dj["radius"] = d.radius;
    dj["separated"] = d.separated;
    if (d.separated) {
      dj["real"] = d.real_interval;
      dj["re_bounds"] = {d.re_lo, d.re_hi};
      dj["im_bounds"] = {d.im_lo, d.im_hi};
    }
    arr.push_back(std::move(dj));
  }
  return arr;
}

inline Json report_to_json(const RootReport& rep) {
  Json j;
  j["name"] = rep.name;
  j["kind"] = to_string(rep.kind);
  Json c = Json::array();
  for (const auto& a : rep.polynomial.coeffs()) c.push_back(detail::complex_to_json(a));
  j["polynomial"] = std::move(c);
  j["nominal_degree"] = rep.nominal_degree;
  j["effective_degree"] = rep.effective_degree;
  Json roots = Json::array();
  for (const auto& r : rep.roots) {
    Json rj;
    rj["value"] = detail::complex_to_json(r.value);
    rj["multiplicity"] = r.multiplicity;
    rj["residual"] = r.residual;
    rj["residual_scale"] = r.residual_scale;
    rj["residual_ok"] = r.residual_ok;
    rj["algorithm"] = to_string(r.algorithm);
    rj["iterations"] = r.iterations;
    rj["seed"] = detail::complex_to_json(r.seed);
    rj["seed_source"] = to_string(r.seed_source);
    rj["evidence"] = r.evidence;
    if (!r.notes.empty()) rj["notes"] = r.notes;
    if (r.eigen) rj["eigenvectors"] = bundle_to_json(*r.eigen);
    roots.push_back(std::move(rj));
  }
  j["roots"] = std::move(roots);
  j["multiplicity_sum"] = rep.multiplicity_sum;
  j["conserved"] = rep.conserved;
  j["ok"] = rep.all_ok();
  j["errors"] = rep.errors;
  j["notes"] = rep.notes;
  if (rep.ecp) {
    Json e;
    Json lists = Json::array();
    for (const auto& L : rep.ecp->lists) lists.push_back(ecp_list_to_json(L));
    e["lists"] = std::move(lists);
    e["sum_control"] = {{"expected", detail::complex_to_json(rep.ecp->control.expected)},
                        {"actual", detail::complex_to_json(rep.ecp->control.actual)},
                        {"discrepancy", rep.ecp->control.discrepancy}};
    e["gershgorin"] = disks_to_json(rep.ecp->disks);
    e["stop_reason"] = rep.ecp->stop_reason;
    j["ecp"] = std::move(e);
  }
  return j;
}

inline Json exploration_to_json(const ExplorationReport& ex) {
  Json samples = Json::array();
  for (const auto& s : ex.samples) {
    Json sj;
    sj["lambda"] = s.lambda;
    if (s.p) {
      sj["p"] = *s.p;
    } else {
      sj["p"] = nullptr;
    }
    samples.push_back(std::move(sj));
  }
  Json brackets = Json::array();
  for (const auto& b : ex.brackets) {
    brackets.push_back({{"lo", b.lo}, {"hi", b.hi}, {"p_lo", b.p_lo}, {"p_hi", b.p_hi}});
  }
  Json seeds = Json::array();
  for (const auto& s : ex.seeds) {
    seeds.push_back({{"value", detail::complex_to_json(s.value)}, {"source", to_string(s.source)}});
  }
  Json j;
  j["seeds"] = std::move(seeds);
  j["brackets"] = std::move(brackets);
  j["samples"] = std::move(samples);
  j["notes"] = ex.notes;
  return j;
}

/// The scalar polynomial a problem reduces to: its coefficients, or the
/// characteristic polynomial of its matrix polynomial.
inline Polynomial problem_polynomial(const ProblemSpec& spec) {
  if (spec.kind == ProblemKind::PolynomialMatrix) {
    if (!spec.matrix) throw Error(ErrorCode::InvalidArgument, "matrix problem without matrices");
    return characteristic_polynomial(*spec.matrix).poly;
  }
  if (!spec.polynomial) throw Error(ErrorCode::InvalidArgument, "polynomial problem without coefficients");
  return *spec.polynomial;
}

/// CSV "lambda,f,p,h" over [lo, hi]; p and h are blank where a guard fires.
/// Values of complex-coefficient f are written as re+imi.
inline void write_plot_data(const Polynomial& f, double lo, double hi, int samples, std::ostream& out) {
  if (samples < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 samples");
  if (!(lo < hi)) throw Error(ErrorCode::InvalidArgument, "plot range needs lo < hi");
  detail::require_nonzero(f);
  const bool real = f.is_real();
  auto fmt = [real](const Complex& z) {
    std::ostringstream os;
    os << std::setprecision(17);
    if (real) {
      os << z.real();
    } else {
      os << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
    }
    return os.str();
  };
  out << "lambda,f,p,h\n";
  for (int s = 0; s < samples; ++s) {
    const double x = lo + (hi - lo) * static_cast<double>(s) / static_cast<double>(samples - 1);
    const Complex z(x);
    std::ostringstream line;
    line << std::setprecision(17) << x << ',' << fmt(value(f, z)) << ',';
    try {
      line << fmt(pade_eval(f, z));
    } catch (const Error&) {
    }
    line << ',';
    try {
      line << fmt(halley_eval(f, z));
    } catch (const Error&) {
    }
    out << line.str() << '\n';
  }
}

inline void emit_plot_data(const Polynomial& f, double lo, double hi, int samples, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  write_plot_data(f, lo, hi, samples, out);
  out.flush();
  if (!out) throw Error(ErrorCode::Io, "write to '" + path + "' failed");
}

}  // namespace padepoly
