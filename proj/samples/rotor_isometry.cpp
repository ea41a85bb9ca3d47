// A spin element of Minkowski space from a bivector exponential, its isometry
// matrix, and the recovery of the element from the matrix.

#include <cstdio>
#include <memory>
#include <variant>

#include "extalg/extalg.hpp"

using namespace extalg;

int main() {
  Matrix g = -Matrix::Identity(4, 4);
  g(3, 3) = 1.0;
  const Metric mk = Metric::make(g, Components::Upper);
  auto t = std::make_shared<const Table>(build_product_table(mk));

  // A boost in the (1, 4) plane followed by a rotation in the (1, 2) plane.
  Multivector w(4);
  w[Blade{0b1001}] = 0.4;
  w[Blade{0b0011}] = 0.3;
  const SpinElement f = SpinElement::make(exp(w, *t), t);

  const Matrix p = isometry_of(f);
  std::printf("isometry of F (row i is F* e^i F):\n");
  for (int i = 0; i < 4; ++i)
    std::printf("  % .6f % .6f % .6f % .6f\n", p(i, 0), p(i, 1), p(i, 2), p(i, 3));
  std::printf("det = %.12f, isometry: %s\n", p.determinant(), is_isometry(mk, p) ? "yes" : "no");

  const FactorResult r = factor_isometry(p, t);
  if (const auto* back = std::get_if<SpinElement>(&r)) {
    const double plus = max_abs_diff(back->form(), f.form());
    const double minus = max_abs_diff(back->form(), (-f).form());
    std::printf("recovered F up to sign: defect %.3g\n", std::min(plus, minus));
  } else {
    std::printf("not a spin isometry: %s\n", std::get<NotSpinIsometry>(r).reason.c_str());
  }

  // A reflection has determinant -1 and no spin preimage.
  Matrix refl = Matrix::Identity(4, 4);
  refl(0, 0) = -1.0;
  const FactorResult bad = factor_isometry(refl, t);
  if (const auto* e = std::get_if<NotSpinIsometry>(&bad)) std::printf("reflection: %s\n", e->reason.c_str());
  return 0;
}
