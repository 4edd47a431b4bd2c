#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <sstream>

#include "fixtures.hpp"

using namespace padepoly;

namespace {

const std::vector<std::string> kFixtures{"example1.json",        "example2.json", "example3.json",
                                         "example4_matrix.json", "example4_spectrum.json",
                                         "example5.json",        "example6.json", "example7.json",
                                         "example8.json"};

std::string error_text(const std::string& text) {
  try {
    (void)parse_problem_text(text);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

}  // namespace

TEST_CASE("fixtures parse", "[cli]") {
  const auto s1 = parse_problem_file(fixtures::sample_path("example1.json"));
  REQUIRE(s1.kind == ProblemKind::ScalarPolynomial);
  REQUIRE(s1.polynomial->degree() == 6);
  REQUIRE(*s1.polynomial == fixtures::example1());

  const auto s7 = parse_problem_file(fixtures::sample_path("example7.json"));
  REQUIRE(s7.kind == ProblemKind::PolynomialMatrix);
  REQUIRE(s7.matrix->degree() == 4);
  REQUIRE(s7.matrix->order() == 2);
  REQUIRE_FALSE(s7.matrix->leading_regular());
}

TEST_CASE("parse errors carry context", "[cli]") {
  REQUIRE(contains(error_text(R"({"kind": "polynomial", "coefficients": []})"), "zero polynomial"));
  REQUIRE(contains(error_text(R"({"kind": "polynomial", "coefficients": [0, 0]})"), "zero polynomial"));
  REQUIRE(contains(error_text("{\n  \"kind\": \"polynomial\",\n  \"coefficients\": [1, 2\n}"), "line"));
  REQUIRE(contains(error_text(R"({"kind": "polynomial", "coefficients": [1, "x"]})"), "coefficients"));
  REQUIRE(contains(error_text(R"({"kind": "matrix", "matrices": [[[1, 0], [0, 1]], [[1, 0, 0], [0, 1, 0]]]})"),
                   "matrices"));
  REQUIRE(contains(error_text(R"({"kind": "banana", "coefficients": [1, 2]})"), "kind"));
  REQUIRE(contains(error_text(R"({"kind": "polynomial", "coefficients": [1, 2], "options": {"algorithm": "x"}})"),
                   "algorithm"));
  REQUIRE(contains(error_text(R"({"kind": "polynomial", "coefficients": [1, 2],
                                  "options": {"seed_source": "diagonal"}})"),
                   "diagonal"));
  REQUIRE_THROWS_AS(parse_problem_file("/nonexistent/problem.json"), Error);
}

TEST_CASE("complex numbers as pairs", "[cli]") {
  const auto s = parse_problem_text(R"({"kind": "polynomial", "coefficients": [[0, -2], [2, -1], 1]})");
  REQUIRE((*s.polynomial)[0] == Complex(0, -2));
  REQUIRE((*s.polynomial)[1] == Complex(2, -1));
  REQUIRE_FALSE(s.polynomial->is_real());
}

TEST_CASE("round trip parse, serialize, parse", "[cli]") {
  for (const auto& name : kFixtures) {
    INFO(name);
    const auto a = parse_problem_file(fixtures::sample_path(name));
    const auto text = problem_to_json(a).dump(2);
    const auto b = parse_problem_text(text);
    REQUIRE(a == b);
    REQUIRE(problem_to_json(b).dump(2) == text);
  }
}

TEST_CASE("seed files", "[cli]") {
  const auto s = read_seeds_text("# comment\n1.5\n2 3\n-1,0.25\n\n");
  REQUIRE(s == std::vector<Complex>{Complex(1.5), Complex(2, 3), Complex(-1, 0.25)});
  const auto j = read_seeds_text("[1, [0, 2]]");
  REQUIRE(j == std::vector<Complex>{Complex(1), Complex(0, 2)});
  REQUIRE_THROWS_AS(read_seeds_text("1 2 3\n"), Error);
  REQUIRE_THROWS_AS(read_seeds_text("abc\n"), Error);

  const auto f3 = read_seeds_file(fixtures::sample_path("example3_seeds.txt"));
  REQUIRE(f3 == fixtures::example3_sigma());
  const auto f5 = read_seeds_file(fixtures::sample_path("example5_seeds.txt"));
  REQUIRE(f5.size() == 10);
}

TEST_CASE("pipeline on the double and quadruple roots", "[cli]") {
  const auto rep = run_pipeline(parse_problem_file(fixtures::sample_path("example1.json")));
  REQUIRE(rep.all_ok());
  REQUIRE(rep.roots.size() == 2);
  REQUIRE(std::abs(rep.roots[0].value + 1.0) <= 1e-12);
  REQUIRE(rep.roots[0].multiplicity == 4);
  REQUIRE(std::abs(rep.roots[1].value - 2.0) <= 1e-12);
  REQUIRE(rep.roots[1].multiplicity == 2);
}

TEST_CASE("pipeline on the palindromic polynomial", "[cli]") {
  const auto rep = run_pipeline(parse_problem_file(fixtures::sample_path("example5.json")));
  REQUIRE(rep.all_ok());
  REQUIRE(rep.roots.size() == 4);
  const Complex w(-0.5, 8.660254037844386e-01);
  int found = 0;
  for (const auto& r : rep.roots) {
    if (std::abs(r.value - w) <= 1e-12 || std::abs(r.value - std::conj(w)) <= 1e-12) {
      REQUIRE(r.multiplicity == 3);
      ++found;
    } else {
      REQUIRE(std::abs(std::abs(r.value.imag()) - 1.0) <= 1e-12);
      REQUIRE(r.multiplicity == 2);
    }
  }
  REQUIRE(found == 2);
}

TEST_CASE("pipeline ECP phase on the Wilkinson polynomial", "[cli]") {
  const auto rep = run_pipeline(parse_problem_file(fixtures::sample_path("example3.json")));
  REQUIRE(rep.all_ok());
  REQUIRE(rep.ecp.has_value());
  REQUIRE(rep.ecp->lists.size() == 3);
  REQUIRE(rep.ecp->control.expected == Complex(55));
  REQUIRE(rep.ecp->disks.size() == 10);
  const auto j = report_to_json(rep);
  REQUIRE(j.at("ecp").at("lists").size() == 3);
}

TEST_CASE("every fixture conserves multiplicity", "[cli]") {
  for (const auto& name : kFixtures) {
    INFO(name);
    const auto rep = run_pipeline(parse_problem_file(fixtures::sample_path(name)));
    REQUIRE(rep.conserved);
    REQUIRE(rep.all_ok());
    int sum = 0;
    for (const auto& r : rep.roots) sum += r.multiplicity;
    REQUIRE(sum == rep.effective_degree);
    REQUIRE(std::is_sorted(rep.roots.begin(), rep.roots.end(), [](const RootEntry& a, const RootEntry& b) {
      return a.value.real() < b.value.real() || (a.value.real() == b.value.real() && a.value.imag() < b.value.imag());
    }));
  }
}

TEST_CASE("matrix reports carry eigenvectors", "[cli]") {
  const auto rep = run_pipeline(parse_problem_file(fixtures::sample_path("example4_matrix.json")));
  REQUIRE(rep.all_ok());
  for (const auto& r : rep.roots) {
    REQUIRE(r.eigen.has_value());
    REQUIRE(r.eigen->left_vectors.cols() == r.eigen->right_vectors.cols());
  }
  const auto it = std::find_if(rep.roots.begin(), rep.roots.end(),
                               [](const RootEntry& r) { return std::abs(r.value + 1.0) < 1e-6; });
  REQUIRE(it != rep.roots.end());
  REQUIRE(it->multiplicity == 2);
  REQUIRE(it->eigen->rank_deficiency == 1);
  REQUIRE(it->eigen->defective());
}

TEST_CASE("an unreachable residual bound flags the report", "[cli]") {
  auto spec = parse_problem_file(fixtures::sample_path("example8.json"));
  spec.options.residual_tol = 1e-300;
  const auto rep = run_pipeline(spec);
  REQUIRE_FALSE(rep.all_ok());
  REQUIRE_FALSE(report_to_json(rep).at("ok").get<bool>());
}

TEST_CASE("pipeline errors are attached, not thrown", "[cli]") {
  auto spec = parse_problem_text(R"({"kind": "polynomial", "coefficients": [-2, 0, 1],
    "options": {"seed_source": "external", "seeds": [0, 1.4, [0, 30]], "algorithm": "pade"}})");
  RootReport rep;
  REQUIRE_NOTHROW(rep = run_pipeline(spec));
  REQUIRE_FALSE(rep.errors.empty());
  REQUIRE(rep.conserved);
}

TEST_CASE("reports are deterministic", "[cli]") {
  for (const auto& name : kFixtures) {
    INFO(name);
    const auto spec = parse_problem_file(fixtures::sample_path(name));
    const auto a = report_to_json(run_pipeline(spec)).dump(2);
    const auto b = report_to_json(run_pipeline(spec)).dump(2);
    REQUIRE(a == b);
  }
}

TEST_CASE("plot data", "[cli]") {
  std::ostringstream os;
  write_plot_data(fixtures::example1(), 0.0, 2.5, 26, os);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  REQUIRE(line == "lambda,f,p,h");
  std::vector<double> lam, p;
  while (std::getline(is, line)) {
    std::stringstream ls(line);
    std::string a, b, c;
    std::getline(ls, a, ',');
    std::getline(ls, b, ',');
    std::getline(ls, c, ',');
    if (c.empty()) continue;
    lam.push_back(std::stod(a));
    p.push_back(std::stod(c));
  }
  bool crossing = false;
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (p[i - 1] > 0 && p[i] < 0 && lam[i - 1] >= 1.8 - 1e-9 && lam[i] <= 2.1 + 1e-9) crossing = true;
  }
  REQUIRE(crossing);

  std::ostringstream flat;
  write_plot_data(Polynomial{3}, 0.0, 1.0, 5, flat);
  std::istringstream fs(flat.str());
  std::getline(fs, line);
  while (std::getline(fs, line)) {
    REQUIRE(line.size() >= 2);
    REQUIRE(line.substr(line.size() - 2) == ",,");
  }
  REQUIRE_THROWS_AS(write_plot_data(fixtures::example1(), 0.0, 1.0, 1, os), Error);
}

TEST_CASE("plot data for the defective pencil's polynomial", "[cli]") {
  const auto cp = characteristic_polynomial(fixtures::example4_matrix()).poly;
  const auto path = (std::filesystem::temp_directory_path() / "padepoly_plot_test.csv").string();
  emit_plot_data(cp, -2.5, 1.5, 400, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  REQUIRE(line == "lambda,f,p,h");
  int rows = 0;
  int changes = 0;
  double prev = 0;
  bool have = false;
  while (std::getline(in, line)) {
    ++rows;
    std::stringstream ls(line);
    std::string a, b, c;
    std::getline(ls, a, ',');
    std::getline(ls, b, ',');
    std::getline(ls, c, ',');
    if (c.empty()) continue;
    const double pv = std::stod(c);
    if (have && prev > 0 && pv < 0) ++changes;
    prev = pv;
    have = true;
  }
  REQUIRE(rows == 400);
  // Falling crossings at -1.618, -1, 0.618 and 1.
  REQUIRE(changes == 4);
  std::remove(path.c_str());
  REQUIRE_THROWS_AS(emit_plot_data(cp, 0, 1, 10, "/nonexistent/dir/x.csv"), Error);
}
