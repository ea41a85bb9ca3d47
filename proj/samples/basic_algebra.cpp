// Clifford products on an oblique metric in three dimensions: generator
// relations, the Grassmann/Clifford basis change, and the Hodge star.

#include <cstdio>
#include <string>

#include "extalg/extalg.hpp"

using namespace extalg;

namespace {

void show(const char* label, const Multivector& u) {
  std::printf("%-22s", label);
  bool any = false;
  for (Blade b = 0; b < u.size(); ++b) {
    if (std::abs(u[b]) < 1e-14) continue;
    std::printf(" %+.6g %s", u[b].real(), blade_text(b, Basis::Grassmann).c_str());
    any = true;
  }
  std::printf("%s\n", any ? "" : " 0");
}

}  // namespace

int main() {
  Matrix g(3, 3);
  g << 1.0, 0.3, 0.0,
       0.3, -1.0, 0.2,
       0.0, 0.2, 2.0;
  const Metric m = Metric::make(g, Components::Upper);
  const Table t = build_product_table(m);

  const Multivector e1 = Multivector::generator(3, 0), e2 = Multivector::generator(3, 1);
  const Multivector e3 = Multivector::generator(3, 2);

  // e^i e^j + e^j e^i = 2 g^{ij}
  show("e1 e2 + e2 e1", clifford_mul(e1, e2, t) + clifford_mul(e2, e1, t));
  show("e1 e2", clifford_mul(e1, e2, t));
  show("e1 ^ e2", wedge(e1, e2));

  // The Clifford monomial e^{123} expanded on the Grassmann basis and back.
  Multivector c(3);
  c[Blade{7}] = 1.0;
  const Multivector gr = basis_convert(c, Basis::Clifford, Basis::Grassmann, m);
  show("e^{123} (Grassmann)", gr);
  show("round trip", basis_convert(gr, Basis::Grassmann, Basis::Clifford, m));

  // Star of a 1-form, and the volume form squared.
  const Multivector v = e1 + e3 * Complex(2.0);
  show("*(e1 + 2 e3)", hodge_star(v, t));
  show("I I", clifford_mul(volume_form(t), volume_form(t), t));
  std::printf("(v, v) = %.6g\n", scalar_product(v, v, t).real());
  return 0;
}
