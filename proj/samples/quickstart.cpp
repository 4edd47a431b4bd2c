// A tour of the library: multiplicity detection, Halley refinement, the
// real-axis scan and a polynomial eigenvalue problem.

#include <cstdio>

#include "padepoly/padepoly.hpp"

using namespace padepoly;

int main() {
  // (x - 2)^2 (x + 1)^4, ascending coefficients.
  const Polynomial f{4, 12, 9, -4, -6, 0, 1};

  const auto v = detect_multiplicity(f, Complex(2.01389));
  std::printf("root %.16g with multiplicity %d (%zu probe rows)\n", v.root.real(), v.multiplicity,
              v.probes[static_cast<std::size_t>(v.multiplicity - 1)].size());

  // Scan both half axes for sign changes of p = f / (-f') and refine.
  ExploreOptions eo;
  eo.delta = 0.3;
  const auto ex = explore_real_axis(f, eo);
  for (const auto& s : ex.seeds) {
    const auto r = detect_multiplicity(f, s.value);
    std::printf("seed %+.6f (%s) -> %+.16g, nu = %d\n", s.value.real(), to_string(s.source), r.root.real(),
                r.multiplicity);
  }

  // Halley iteration on (x-1)(x-2)(x-3)(x-4)(x-5).
  const Polynomial g{-120, 274, -225, 85, -15, 1};
  const auto t = iterate_halley(g, Complex(0.9));
  std::printf("Halley: %.17g after %zu rows (%s)\n", t.final_value().real(), t.size(), to_string(t.status));

  // F(lambda) = A0 + A1 lambda: eigenvalues are those of -A1^-1 A0.
  Matrix a0(2, 2), a1(2, 2);
  a0 << 2, 1, 1, 2;
  a1 << -1, 0, 0, -1;
  const PolynomialMatrix F({a0, a1});
  const auto cp = characteristic_polynomial(F);
  for (const auto& z : companion_seed_all(cp.poly).seeds) {
    const auto root = iterate_pade(cp.poly, z).final_value();
    const auto b = eigen_bundle(F, root);
    std::printf("eigenvalue %+.12f, right residual %.2e, left residual %.2e\n", root.real(), b.right_residual,
                b.left_residual);
  }
  return 0;
}
