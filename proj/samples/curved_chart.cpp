// Geometry of the unit sphere in colatitude/longitude coordinates: Christoffel
// symbols, curvature, and d, delta and the Laplacian of a form field.

#include <cmath>
#include <cstdio>
#include <vector>

#include "extalg/extalg.hpp"

using namespace extalg;

int main() {
  const Chart sphere = Chart::make(2, {parse("1"), parse("0"), parse("0"), parse("sin(x1)^2")},
                                   {Interval{0.3, 2.8}, Interval{-3.0, 3.0}});
  const std::vector<double> p{1.1, 0.4};

  const CurvatureData cd = curvature(sphere, p);
  // R_{12,12} = sin^2 x1 for the unit sphere.
  std::printf("R_{12,12} = %.12f (sin^2 x1 = %.12f)\n", cd.R_lower(0, 1, 0, 1), std::sin(1.1) * std::sin(1.1));

  FormField u(2);
  u.add(Blade{0}, parse("cos(x1)*sin(x2)"));
  u.add(Blade{1}, parse("x1*x2"));
  u.add(Blade{3}, parse("exp(0.5*x1)"));

  const Multivector du = d_op(sphere, u, p), lu = laplace(sphere, u, p);
  const PointGeometry geo = geometry_at(sphere, p);
  const Multivector dd = value_of(d_op(geo, d_op(geo, u.jet(p))));
  for (Blade b = 0; b < du.size(); ++b)
    std::printf("blade %-8s d u = % .6f   Laplacian u = % .6f   d d u = % .1e\n", blade_text(b, Basis::Grassmann).c_str(),
                du[b].real(), lu[b].real(), std::abs(dd[b]));
  return 0;
}
