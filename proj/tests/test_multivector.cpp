#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "extalg/hodge.hpp"
#include "extalg/multivector.hpp"
#include "extalg/product_table.hpp"
#include "extalg/random.hpp"

using namespace extalg;
using Catch::Matchers::WithinAbs;

namespace {

Multivector blade(int n, std::initializer_list<int> one_based, Complex c = 1.0) {
  Blade b = 0;
  for (int i : one_based) b |= Blade{1} << (i - 1);
  return Multivector::blade(n, b, c);
}

/// Clifford monomial e^{i1} e^{i2} ... on the Grassmann basis.
Multivector monomial(int n, std::initializer_list<int> one_based, const Metric& m) {
  return basis_convert(blade(n, one_based), Basis::Clifford, Basis::Grassmann, m);
}

/// Product oracle: diagonalise g^{..} = V L V^T, so e^i = V_ij f^j with f^j
/// orthogonal. On f-blades the product is a sign and a product of squares.
struct DiagonalOracle {
  Matrix v, vinv;
  Eigen::VectorXd lambda;
  int n;

  explicit DiagonalOracle(const Metric& m) : n(m.dim()) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m.upper());
    v = es.eigenvectors();
    vinv = v.inverse();
    lambda = es.eigenvalues();
  }

  static Multivector change(const Multivector& u, const Matrix& q) {
    const int n = u.dim();
    Multivector r(n);
    for (Blade b = 0; b < u.size(); ++b) {
      if (u[b] == Complex{}) continue;
      Multivector w = Multivector::scalar(n, u[b]);
      for (int i : blade_indices(b)) {
        Multivector row(n);
        for (int j = 0; j < n; ++j) row[Blade{1} << j] = q(i, j);
        w = wedge(w, row);
      }
      r += w;
    }
    return r;
  }

  Multivector mul(const Multivector& a, const Multivector& b) const {
    const Multivector fa = change(a, v), fb = change(b, v);
    Multivector r(n);
    for (Blade x = 0; x < fa.size(); ++x)
      for (Blade y = 0; y < fb.size(); ++y) {
        if (fa[x] == Complex{} || fb[y] == Complex{}) continue;
        // sign of moving every generator of y past the generators of x above it
        int swaps = 0;
        for (int j = 0; j < n; ++j)
          if ((y >> j) & 1u) swaps += std::popcount(x >> (j + 1));
        double c = swaps % 2 ? -1.0 : 1.0;
        for (int j = 0; j < n; ++j)
          if (((x & y) >> j) & 1u) c *= lambda(j);
        r[x ^ y] += c * fa[x] * fb[y];
      }
    return change(r, vinv);
  }
};

}  // namespace

TEST_CASE("wedge product basics", "[multivector]") {
  const Multivector e1 = Multivector::generator(3, 0);
  CHECK(wedge(e1, e1).norm() == 0.0);
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const Multivector u = random_homogeneous(4, 3, rng), v = random_homogeneous(4, 2, rng);
    CHECK(wedge(u, v).norm() == 0.0);
  }
  CHECK_THROWS_AS(wedge(Multivector(2), Multivector(3)), DimensionError);
}

TEST_CASE("wedge of Clifford monomials", "[multivector]") {
  Rng rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const Metric m = random_metric(3, rng);
    const auto g = [&](int i, int j) { return m.upper(i - 1, j - 1); };
    const Multivector w = wedge(monomial(3, {1, 3}, m), monomial(3, {2, 3}, m));
    const Multivector got = basis_convert(w, Basis::Grassmann, Basis::Clifford, m);
    const Multivector want = blade(3, {1, 3}, g(2, 3)) + blade(3, {2, 3}, g(1, 3)) - blade(3, {}, g(1, 3) * g(2, 3));
    CHECK(max_abs_diff(got, want) < 1e-12);
  }
}

TEST_CASE("Clifford product examples", "[multivector]") {
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const Metric m4 = random_metric(4, rng);
    const Table t4 = build_product_table(m4);
    const auto g = [&](int i, int j) { return m4.upper(i - 1, j - 1); };
    const Multivector p = clifford_mul(monomial(4, {1, 3}, m4), monomial(4, {2, 3, 4}, m4), t4);
    const Multivector want = blade(4, {1, 2, 4}, -g(3, 3)) + blade(4, {1, 3, 4}, 2 * g(2, 3));
    CHECK(max_abs_diff(basis_convert(p, Basis::Grassmann, Basis::Clifford, m4), want) < 1e-12);

    const Metric m3 = random_metric(3, rng);
    const Table t3 = build_product_table(m3);
    const auto h = [&](int i, int j) { return m3.upper(i - 1, j - 1); };
    const Multivector q = clifford_mul(blade(3, {1, 3}), blade(3, {2, 3}), t3);
    const Multivector expect = blade(3, {1, 2}, -h(3, 3)) + blade(3, {1, 3}, h(2, 3)) - blade(3, {2, 3}, h(1, 3)) +
                               blade(3, {}, h(1, 3) * h(2, 3) - h(1, 2) * h(3, 3));
    CHECK(max_abs_diff(q, expect) < 1e-12);

    const Multivector u = random_multivector(4, rng);
    CHECK(max_abs_diff(clifford_mul(Multivector::scalar(4, 1.0), u, t4), u) == 0.0);
    CHECK(max_abs_diff(clifford_mul(u, Multivector::scalar(4, 1.0), t4), u) == 0.0);
  }
}

TEST_CASE("small algebras: complex numbers and quaternions", "[multivector]") {
  const Table c = build_product_table(Metric::diagonal({-1}));
  const Multivector e1 = Multivector::generator(1, 0);
  CHECK(max_abs_diff(clifford_mul(e1, e1, c), Multivector::scalar(1, -1.0)) == 0.0);

  const Table q = build_product_table(Metric::diagonal({-1, -1}));
  const Multivector i = Multivector::generator(2, 0), j = Multivector::generator(2, 1), k = blade(2, {1, 2});
  const Multivector minus_one = Multivector::scalar(2, -1.0);
  CHECK(max_abs_diff(clifford_mul(i, i, q), minus_one) == 0.0);
  CHECK(max_abs_diff(clifford_mul(j, j, q), minus_one) == 0.0);
  CHECK(max_abs_diff(clifford_mul(k, k, q), minus_one) == 0.0);
  CHECK(max_abs_diff(clifford_mul(i, j, q), k) == 0.0);
  CHECK(max_abs_diff(clifford_mul(j, k, q), i) == 0.0);
  CHECK(max_abs_diff(clifford_mul(k, i, q), j) == 0.0);
  CHECK(max_abs_diff(clifford_mul(j, i, q), -k) == 0.0);
}

TEST_CASE("diagonal metrics: Clifford and Grassmann blades coincide", "[multivector]") {
  Rng rng(4);
  for (int n = 1; n <= 6; ++n) {
    std::vector<double> d(n);
    for (double& x : d) x = rng.uniform(0.5, 2.0) * (rng.coin() ? 1 : -1);
    const Metric m = Metric::diagonal(d);
    for (Blade b = 0; b < (Blade{1} << n); ++b) {
      const Multivector u = Multivector::blade(n, b);
      CHECK(max_abs_diff(basis_convert(u, Basis::Clifford, Basis::Grassmann, m), u) < 1e-15);
    }
  }
}

TEST_CASE("product table agrees with an orthogonal-frame oracle", "[multivector][property]") {
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = rng.integer(1, 5);
    const Metric m = random_metric(n, rng);
    const Table t = build_product_table(m);
    const DiagonalOracle oracle(m);
    const Multivector u = random_multivector(n, rng), v = random_multivector(n, rng);
    const Multivector want = oracle.mul(u, v);
    CHECK(max_abs_diff(clifford_mul(u, v, t), want) < 1e-10 * std::max(1.0, want.norm()));
  }
}

TEST_CASE("basis conversion formulas", "[multivector]") {
  Rng rng(6);
  const Metric m = random_metric(4, rng);
  const auto g = [&](int i, int j) { return m.upper(i - 1, j - 1); };
  // e^{i1} ^ e^{i2} = e^{i1 i2} - g^{i1 i2} e
  const Multivector cl = basis_convert(blade(4, {2, 4}), Basis::Grassmann, Basis::Clifford, m);
  CHECK(max_abs_diff(cl, blade(4, {2, 4}) - blade(4, {}, g(2, 4))) < 1e-14);
  // e^{i1} e^{i2} e^{i3} on the Grassmann basis
  const Multivector gr = monomial(4, {1, 2, 4}, m);
  const Multivector want = blade(4, {1, 2, 4}) + blade(4, {1}, g(2, 4)) - blade(4, {2}, g(1, 4)) + blade(4, {4}, g(1, 2));
  CHECK(max_abs_diff(gr, want) < 1e-14);
  // and the same monomial as a product of generators
  const Table t = build_product_table(m);
  const Multivector chain = clifford_mul(clifford_mul(blade(4, {1}), blade(4, {2}), t), blade(4, {4}), t);
  CHECK(max_abs_diff(chain, want) < 1e-14);
}

TEST_CASE("basis conversion round trip", "[multivector][property]") {
  Rng rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = rng.integer(1, 5);
    const Metric m = random_metric(n, rng);
    const Multivector u = random_multivector(n, rng);
    const Multivector back = basis_convert(basis_convert(u, Basis::Grassmann, Basis::Clifford, m), Basis::Clifford,
                                           Basis::Grassmann, m);
    REQUIRE(max_abs_diff(back, u) < 1e-12);
  }
}

TEST_CASE("grade projection", "[multivector]") {
  const Multivector u = blade(3, {}) + blade(3, {1}) + blade(3, {1, 2});
  CHECK(max_abs_diff(grade_project(u, 1), blade(3, {1})) == 0.0);
  CHECK_THROWS_AS(grade_project(u, 4), ArgumentError);
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = rng.integer(1, 6);
    const Multivector r = random_multivector(n, rng);
    Multivector sum(n);
    for (int k = 0; k <= n; ++k) sum += grade_project(r, k);
    CHECK(max_abs_diff(sum, r) == 0.0);

    const Metric m = random_metric(n, rng);
    const Table t = build_product_table(m);
    const int k = rng.integer(0, n);
    const Multivector p = clifford_mul(random_homogeneous(n, 1, rng), random_homogeneous(n, k, rng), t);
    for (int j = 0; j <= n; ++j)
      if (j != k - 1 && j != k + 1) CHECK(grade_project(p, j).norm() < 1e-12);
  }
}

TEST_CASE("reversion and conjugation", "[multivector]") {
  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = rng.integer(1, 5);
    const Table t = build_product_table(random_metric(n, rng));
    const Multivector u = random_multivector(n, rng), v = random_multivector(n, rng);
    CHECK(max_abs_diff(conjugate_star(clifford_mul(u, v, t)), clifford_mul(conjugate_star(v), conjugate_star(u), t)) <
          1e-12);
    CHECK(max_abs_diff(conjugate_star(conjugate_star(u)), u) == 0.0);
    const Multivector r = random_multivector(n, rng, false);
    CHECK(max_abs_diff(conjugate_star(r), reversion(r)) == 0.0);
    for (int k = 0; k <= n; ++k) {
      const Multivector h = random_homogeneous(n, k, rng);
      const double s = (k / 2) % 2 ? -1.0 : 1.0;
      CHECK(max_abs_diff(reversion(h), h * Complex(s)) == 0.0);
    }
  }
}

TEST_CASE("trace", "[multivector]") {
  CHECK(trace(Multivector::scalar(3, 1.0)) == Complex(1.0));
  Rng rng(10);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = rng.integer(1, 5);
    const Table t = build_product_table(random_metric(n, rng));
    const Multivector a = random_multivector(n, rng), b = random_multivector(n, rng);
    CHECK(std::abs(trace(clifford_mul(a, b, t) - clifford_mul(b, a, t))) < 1e-12);
    const Multivector x = random_multivector(n, rng) * Complex(0.3);
    const Multivector bb = exp(x, t), binv = exp(-x, t);
    REQUIRE(max_abs_diff(clifford_mul(bb, binv, t), Multivector::scalar(n, 1.0)) < 1e-12);
    const Multivector c = random_multivector(n, rng);
    CHECK(std::abs(trace(clifford_mul(clifford_mul(binv, c, t), bb, t)) - trace(c)) < 1e-11);
  }
}

TEST_CASE("scalar product", "[multivector]") {
  Rng rng(11);
  const Metric m = random_metric(4, rng);
  const Table t = build_product_table(m);
  const auto g = [&](int i, int j) { return m.upper(i - 1, j - 1); };
  const Complex s = scalar_product(blade(4, {1, 3}), blade(4, {2, 4}), t);
  CHECK_THAT(s.real(), WithinAbs(g(1, 2) * g(3, 4) - g(3, 2) * g(1, 4), 1e-13));
  CHECK(std::abs(scalar_product(blade(4, {1, 3}), blade(4, {2}), t)) < 1e-14);
  for (int trial = 0; trial < 50; ++trial) {
    const Multivector u = random_multivector(4, rng), v = random_multivector(4, rng);
    CHECK(std::abs(scalar_product(u, v, t) - std::conj(scalar_product(v, u, t))) < 1e-12);
  }
}

TEST_CASE("exponential", "[multivector]") {
  const Table e2 = build_product_table(Metric::diagonal({1, 1}));
  CHECK(max_abs_diff(exp(Multivector(2), e2), Multivector::scalar(2, 1.0)) == 0.0);
  for (double th : {0.3, 1.2, -2.5}) {
    const Multivector r = exp(blade(2, {1, 2}, th), e2);
    CHECK(max_abs_diff(r, blade(2, {}, std::cos(th)) + blade(2, {1, 2}, std::sin(th))) < 1e-14);
  }
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = rng.integer(1, 5);
    const Table t = build_product_table(random_metric(n, rng));
    const Multivector u = random_multivector(n, rng) * Complex(0.4);
    CHECK(max_abs_diff(clifford_mul(exp(u, t), exp(-u, t), t), Multivector::scalar(n, 1.0)) < 1e-12);
  }
}

TEST_CASE("algebraic laws on random metrics", "[multivector][property]") {
  Rng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = rng.integer(1, 5);
    const Metric m = random_metric(n, rng);
    const Table t = build_product_table(m);
    const Multivector a = random_multivector(n, rng), b = random_multivector(n, rng), c = random_multivector(n, rng);
    const double scale = a.norm() * b.norm() * c.norm();
    CHECK(max_abs_diff(clifford_mul(clifford_mul(a, b, t), c, t), clifford_mul(a, clifford_mul(b, c, t), t)) <
          1e-10 * std::max(1.0, scale) * (1 << n));
    CHECK(max_abs_diff(wedge(wedge(a, b), c), wedge(a, wedge(b, c))) < 1e-12 * (1 << n));

    const int r = rng.integer(0, n), s = rng.integer(0, n);
    const Multivector u = random_homogeneous(n, r, rng), v = random_homogeneous(n, s, rng);
    CHECK(max_abs_diff(wedge(u, v), wedge(v, u) * Complex((r * s) % 2 ? -1.0 : 1.0)) < 1e-13);

    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const Multivector ei = Multivector::generator(n, i), ej = Multivector::generator(n, j);
        const Multivector anti = clifford_mul(ei, ej, t) + clifford_mul(ej, ei, t);
        CHECK(max_abs_diff(anti, Multivector::scalar(n, 2.0 * m.upper(i, j))) < 1e-14);
      }

    const Multivector w = random_homogeneous(n, 1, rng, false);
    double q = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) q += m.upper(i, j) * w[Blade{1} << i].real() * w[Blade{1} << j].real();
    CHECK(max_abs_diff(clifford_mul(w, w, t), Multivector::scalar(n, q)) < 1e-13);

    const Multivector ea = even_part(a), eb = even_part(b);
    CHECK(odd_part(clifford_mul(ea, eb, t)).norm() < 1e-13);
    CHECK(odd_part(wedge(ea, eb)).norm() == 0.0);
  }
}
