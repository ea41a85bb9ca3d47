#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "extalg/manifold.hpp"
#include "extalg/random.hpp"

using namespace extalg;
using Catch::Matchers::WithinAbs;

namespace {

Chart diagonal_chart(std::initializer_list<const char*> diag, std::vector<Interval> box) {
  const int n = static_cast<int>(diag.size());
  std::vector<Expr> g(static_cast<std::size_t>(n) * n);
  int i = 0;
  for (const char* d : diag) {
    g[i * n + i] = parse(d, n);
    ++i;
  }
  return Chart::make(n, std::move(g), std::move(box));
}

Chart polar() { return diagonal_chart({"1", "x1^2"}, {{0.5, 2.0}, {-3.0, 3.0}}); }
Chart sphere() { return diagonal_chart({"1", "sin(x1)^2"}, {{0.3, 2.8}, {-3.0, 3.0}}); }

/// Christoffel symbols from central differences of the evaluated metric.
std::vector<double> christoffel_fd(const Chart& c, const std::vector<double>& p) {
  const int n = c.dim();
  const double h = 1e-5;
  std::vector<Matrix> dg(n);
  for (int l = 0; l < n; ++l) {
    auto a = p, b = p;
    a[l] += h;
    b[l] -= h;
    dg[l] = (c.g_lower_at(a) - c.g_lower_at(b)) / (2 * h);
  }
  const Matrix gi = c.g_lower_at(p).inverse();
  std::vector<double> out(static_cast<std::size_t>(n) * n * n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) s += gi(k, l) * (dg[i](l, j) + dg[j](i, l) - dg[l](i, j));
        out[(k * n + i) * n + j] = 0.5 * s;
      }
  return out;
}

/// Beltrami-Laplace of a scalar expression by nested central differences.
double laplace_fd(const Chart& c, const Expr& phi, const std::vector<double>& p) {
  const int n = c.dim();
  const double h = 1e-4;
  auto flux = [&](std::vector<double> x, int i) {
    const Matrix g = c.g_lower_at(x);
    const Matrix gi = g.inverse();
    const double root = std::sqrt(std::abs(g.determinant()));
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
      auto a = x, b = x;
      a[j] += h;
      b[j] -= h;
      s += gi(i, j) * (eval(phi, a) - eval(phi, b)) / (2 * h);
    }
    return root * s;
  };
  double div = 0.0;
  for (int i = 0; i < n; ++i) {
    auto a = p, b = p;
    a[i] += h;
    b[i] -= h;
    div += (flux(a, i) - flux(b, i)) / (2 * h);
  }
  return div / std::sqrt(std::abs(c.g_lower_at(p).determinant()));
}

/// sqrt|det g| as an expression, for the volume form field.
Expr root_det(const Chart& c) {
  const int n = c.dim();
  std::vector<Expr> g;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g.push_back(c.g_lower(i, j));
  const Expr det = detail::expr_det(g, n);
  return eval(det, c.center()) > 0 ? sqrt(det) : sqrt(-det);
}

double diff_norm(const JetForm& a, const JetForm& b) { return max_abs_diff(value_of(a), value_of(b)); }

}  // namespace

TEST_CASE("Christoffel symbols", "[manifold]") {
  Rng rng(51);
  const Chart flat = Chart::make(2, {Expr(2.0), Expr(0.5), Expr(0.5), Expr(-1.0)}, {{-1, 1}, {-1, 1}});
  for (double g : christoffel(flat, std::vector<double>{0.2, 0.3})) CHECK(g == 0.0);

  const std::vector<double> p{1.3, 0.4};
  const auto G = christoffel(polar(), p);
  const auto at = [&](int k, int i, int j) { return G[(k * 2 + i) * 2 + j]; };
  CHECK_THAT(at(0, 1, 1), WithinAbs(-1.3, 1e-14));
  CHECK_THAT(at(1, 0, 1), WithinAbs(1 / 1.3, 1e-14));
  CHECK_THAT(at(1, 1, 0), WithinAbs(1 / 1.3, 1e-14));
  CHECK(at(0, 0, 0) == 0.0);
  CHECK(at(0, 0, 1) == 0.0);
  CHECK(at(1, 1, 1) == 0.0);

  for (int trial = 0; trial < 10; ++trial) {
    const Chart c = random_chart(rng.integer(2, 4), rng);
    const auto x = random_point(c, rng);
    const auto exact = christoffel(c, x), fd = christoffel_fd(c, x);
    for (std::size_t a = 0; a < exact.size(); ++a) CHECK_THAT(exact[a], WithinAbs(fd[a], 1e-7));
  }
}

TEST_CASE("contracted Christoffel symbols are log-derivatives of the volume", "[manifold]") {
  Rng rng(52);
  for (int trial = 0; trial < 10; ++trial) {
    const Chart c = random_chart(rng.integer(2, 4), rng);
    const int n = c.dim();
    const auto p = random_point(c, rng);
    const auto G = christoffel(c, p);
    for (int l = 0; l < n; ++l) {
      double contracted = 0.0;
      for (int k = 0; k < n; ++k) contracted += G[(k * n + k) * n + l];
      auto a = p, b = p;
      a[l] += 1e-5;
      b[l] -= 1e-5;
      const double fd = (std::log(std::sqrt(std::abs(c.g_lower_at(a).determinant()))) -
                         std::log(std::sqrt(std::abs(c.g_lower_at(b).determinant())))) /
                        2e-5;
      CHECK_THAT(contracted, WithinAbs(fd, 1e-7));
    }
  }
}

TEST_CASE("Christoffel symbols under an affine change", "[manifold]") {
  Rng rng(53);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = rng.integer(2, 4);
    const Chart c = random_chart(n, rng);
    Matrix q = Matrix::Identity(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) q(i, j) += 0.2 * rng.uniform(-1, 1);
    const CoordinateChange ch = CoordinateChange::linear(q);
    const Chart ct = transform_chart(c, ch, std::vector<Interval>(n, Interval{-0.2, 0.2}));
    std::vector<double> pt(n);
    for (double& v : pt) v = rng.uniform(-0.1, 0.1);
    const auto p = ch.map_point(pt);
    const auto G = christoffel(c, p), Gt = christoffel(ct, pt);
    const Matrix qi = q.inverse();
    for (int cc = 0; cc < n; ++cc)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          double want = 0.0;
          for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
              for (int j = 0; j < n; ++j) want += qi(cc, k) * q(i, a) * q(j, b) * G[(k * n + i) * n + j];
          CHECK_THAT(Gt[(cc * n + a) * n + b], WithinAbs(want, 1e-10));
        }
  }
}

TEST_CASE("covariant derivative of tensor fields", "[manifold]") {
  Rng rng(54);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = rng.integer(2, 4);
    const Chart c = random_chart(n, rng);
    const auto p = random_point(c, rng);
    TensorField g{n, {false, false}, {}};
    TensorField delta{n, {true, false}, {}};
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        g.components.push_back(c.g_lower(i, j));
        delta.components.push_back(Expr(i == j ? 1.0 : 0.0));
      }
    for (double v : nabla(c, g, p)) CHECK_THAT(v, WithinAbs(0.0, 1e-12));
    for (double v : nabla(c, delta, p)) CHECK_THAT(v, WithinAbs(0.0, 1e-12));

    TensorField t{n, {false}, {}};
    for (int i = 0; i < n; ++i) t.components.push_back(random_smooth_expr(n, rng));
    const auto nt = nabla(c, t, p);
    const auto G = christoffel(c, p);
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i) {
        double want = eval(diff(t.components[i], k), p);
        for (int j = 0; j < n; ++j) want -= G[(j * n + k) * n + i] * eval(t.components[j], p);
        CHECK_THAT(nt[k * n + i], WithinAbs(want, 1e-12));
      }
    CHECK_THROWS_AS(nabla(c, TensorField{n, {false}, {Expr()}}, p), ArgumentError);
  }
}

TEST_CASE("Clifford differentiation rules", "[manifold]") {
  Rng rng(55);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = rng.integer(2, 4);
    const Chart c = random_chart(n, rng);
    const auto p = random_point(c, rng);
    const PointGeometry geo = geometry_at(c, p);
    FormField vol(n);
    vol.add((Blade{1} << n) - 1, root_det(c));
    const JetForm u = random_form_field(n, rng).jet(p), v = random_form_field(n, rng).jet(p);
    for (int k = 0; k < n; ++k) {
      CHECK(value_of(upsilon(geo, vol.jet(p), k)).norm() < 1e-10);
      CHECK(diff_norm(upsilon(geo, conjugate_star(u), k), conjugate_star(upsilon(geo, u, k))) < 1e-12);
      const JetForm uv = clifford_mul(u, v, *geo.table);
      const JetForm leibniz =
          clifford_mul(upsilon(geo, u, k), v, *geo.table) + clifford_mul(u, upsilon(geo, v, k), *geo.table);
      CHECK(diff_norm(upsilon(geo, uv, k), leibniz) < 1e-10);
      CHECK(std::abs(trace(upsilon(geo, u, k)).value() - trace(u).partial(k).value()) < 1e-12);
      const Complex lhs = scalar_product(u, v, *geo.table).partial(k).value();
      const Complex rhs = scalar_product(value_of(upsilon(geo, u, k)), value_of(v), *geo.value_table) +
                          scalar_product(value_of(u), value_of(upsilon(geo, v, k)), *geo.value_table);
      CHECK(std::abs(lhs - rhs) < 1e-10);
      CHECK(diff_norm(upsilon(geo, hodge_star(u, *geo.table), k), hodge_star(upsilon(geo, u, k), *geo.table)) < 1e-10);
    }
  }
}

TEST_CASE("curvature of flat and spherical charts", "[manifold]") {
  Rng rng(56);
  const Chart flat_charts[] = {polar(), diagonal_chart({"1", "x1^2", "x1^2*sin(x2)^2"}, {{0.5, 2}, {0.3, 2.8}, {-3, 3}})};
  for (const Chart& c : flat_charts)
    for (int trial = 0; trial < 10; ++trial) {
      const CurvatureData cd = curvature(c, random_point(c, rng));
      for (double r : cd.r_mixed) CHECK_THAT(r, WithinAbs(0.0, 1e-9));
    }
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = random_point(sphere(), rng);
    const CurvatureData cd = curvature(sphere(), p);
    const double s2 = std::sin(p[0]) * std::sin(p[0]);
    CHECK_THAT(cd.R_lower(0, 1, 0, 1), WithinAbs(s2, 1e-12));
    CHECK_THAT(cd.R_lower(1, 0, 0, 1), WithinAbs(-s2, 1e-12));
    CHECK_THAT(cd.R_lower(0, 0, 0, 1), WithinAbs(0.0, 1e-12));
  }
}

TEST_CASE("curvature tensor symmetries and the commutator identity", "[manifold]") {
  Rng rng(57);
  std::vector<Chart> charts{sphere(), diagonal_chart({"1", "sin(x1)^2", "sin(x1)^2*sin(x2)^2"}, {{0.3, 2.8}, {0.3, 2.8}, {-3, 3}})};
  for (int trial = 0; trial < 6; ++trial) charts.push_back(random_chart(rng.integer(2, 4), rng));
  for (const Chart& c : charts) {
    const int n = c.dim();
    const auto p = random_point(c, rng);
    const PointGeometry geo = geometry_at(c, p);
    const CurvatureData cd = curvature(geo);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int r = 0; r < n; ++r)
          for (int l = 0; l < n; ++l) {
            CHECK_THAT(cd.R_lower(i, j, r, l) + cd.R_lower(j, i, r, l), WithinAbs(0.0, 1e-10));
            CHECK_THAT(cd.R_lower(i, j, r, l) + cd.R_lower(i, j, l, r), WithinAbs(0.0, 1e-10));
            CHECK_THAT(cd.R_lower(i, j, r, l) - cd.R_lower(r, l, i, j), WithinAbs(0.0, 1e-10));
          }
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const Multivector got = value_of(upsilon_commutator(geo, jet_generator(n, k), i, j));
          Multivector want(n);
          for (int r = 0; r < n; ++r) want[Blade{1} << r] = cd.R(k, i, j, r);
          CHECK(max_abs_diff(got, want) < 1e-8);
        }
  }
}

TEST_CASE("exterior differential, divergence and Laplacian", "[manifold]") {
  Rng rng(58);
  for (int trial = 0; trial < 15; ++trial) {
    const int n = rng.integer(2, 4);
    const Chart c = trial < 3 ? sphere() : random_chart(n, rng);
    const int dim = c.dim();
    const auto p = random_point(c, rng);
    const PointGeometry geo = geometry_at(c, p);
    const JetForm u = random_form_field(dim, rng).jet(p);

    CHECK(value_of(d_op(geo, d_op(geo, u))).norm() < 1e-8);
    CHECK(value_of(delta_op(geo, delta_op(geo, u))).norm() < 1e-8);
    const JetForm lap = laplace(geo, u);
    CHECK(diff_norm(lap, -(d_op(geo, delta_op(geo, u)) + delta_op(geo, d_op(geo, u)))) < 1e-8);

    Multivector d_partials(dim);
    for (int j = 0; j < dim; ++j) d_partials += wedge(Multivector::generator(dim, j), value_of(partial(u, j)));
    CHECK(max_abs_diff(value_of(d_op(geo, u)), d_partials) < 1e-10);

    for (int k = 0; k <= dim; ++k) {
      JetForm h(dim);
      for (Blade b : blades_of_grade(dim, k)) h[b] = u[b];
      const JetForm via_star = hodge_star_inverse(d_op(geo, hodge_star(h, *geo.table)), *geo.table);
      const Complex s = k % 2 ? -1.0 : 1.0;
      CHECK(max_abs_diff(value_of(delta_op(geo, h)), value_of(via_star) * s) < 1e-9);
      CHECK(off_grade_norm(value_of(d_op(geo, h)), k + 1 <= dim ? k + 1 : k) < 1e-12 * (k + 1 <= dim ? 1 : 0) +
                                                                                   (k + 1 <= dim ? 0.0 : 1e300));
    }

    const Expr phi = random_smooth_expr(dim, rng, 3);
    const Complex via_upsilon = value_of(laplace(geo, FormField::scalar(dim, phi).jet(p)))[0];
    CHECK_THAT(via_upsilon.real(), WithinAbs(laplace_fd(c, phi, p), 1e-5));
    CHECK(std::abs(via_upsilon - scalar_laplace_formula(geo, FormField::scalar(dim, phi).jet(p)[0])) < 1e-10);
  }
}

TEST_CASE("Clifford differentiation follows the chain rule", "[manifold]") {
  Rng rng(59);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = rng.integer(2, 4);
    const Chart c = random_chart(n, rng);
    Matrix q = Matrix::Identity(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) q(i, j) += 0.3 * rng.uniform(-1, 1);
    const CoordinateChange ch = CoordinateChange::linear(q);
    const Chart ct = transform_chart(c, ch, std::vector<Interval>(n, Interval{-0.2, 0.2}));
    const FormField u = random_form_field(n, rng);
    const FormField ut = pullback(u, ch);
    std::vector<double> pt(n);
    for (double& v : pt) v = rng.uniform(-0.1, 0.1);
    const auto p = ch.map_point(pt);
    for (int a = 0; a < n; ++a) {
      Multivector want(n);
      for (int i = 0; i < n; ++i) want += outermorphism(upsilon_k(c, u, i, p), q) * Complex(q(i, a));
      CHECK(max_abs_diff(upsilon_k(ct, ut, a, pt), want) < 1e-9);
    }
  }
}

TEST_CASE("chart and field validation", "[manifold]") {
  CHECK_THROWS_AS(Chart::make(5, std::vector<Expr>(25, Expr(1.0)), std::vector<Interval>(5, {0, 1})), ArgumentError);
  CHECK_THROWS_AS(diagonal_chart({"1", "x1"}, {{-1, 1}, {-1, 1}}), ConstructionError);
  CHECK_THROWS_AS(geometry_at(polar(), {3.0, 0.0}), ArgumentError);
  FormField f(2);
  CHECK_THROWS_AS(f.add(Blade{4}, Expr(1.0)), ArgumentError);
  CHECK_THROWS_AS(FormField(5), ArgumentError);
}
