#include <catch_amalgamated.hpp>

#include <cmath>

#include "extalg/hodge.hpp"
#include "extalg/random.hpp"

using namespace extalg;

namespace {

Multivector gen(int n, int one_based) { return Multivector::generator(n, one_based - 1); }

double sign_pow(int e) { return e % 2 ? -1.0 : 1.0; }

}  // namespace

TEST_CASE("exterior metric blocks", "[hodge]") {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = rng.integer(1, 5);
    const Metric m = random_metric(n, rng);
    const Table t = build_product_table(m);
    CHECK(std::abs(exterior_metric_block(t, 0)(0, 0) - 1.0) < 1e-15);
    CHECK((exterior_metric_block(t, 1) - m.upper()).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(std::abs(exterior_metric_block(t, n)(0, 0) - m.upper().determinant()) < 1e-11);
    for (int k = 0; k <= n; ++k)
      CHECK((exterior_metric_block(t, k) - minor_matrix(m, k)).cwiseAbs().maxCoeff() < 1e-10);
  }
  CHECK_THROWS_AS(exterior_metric_block(build_product_table(Metric::diagonal({1, 1})), 3), ArgumentError);
}

TEST_CASE("diagonal and positive-definite metrics give matching blocks", "[hodge]") {
  Rng rng(22);
  const Table d = build_product_table(Metric::diagonal({2.0, -0.5, 1.5, 3.0}));
  for (int k = 0; k <= 4; ++k) {
    const Matrix b = exterior_metric_block(d, k);
    CHECK((b - Matrix(b.diagonal().asDiagonal())).cwiseAbs().maxCoeff() < 1e-15);
  }
  for (int trial = 0; trial < 10; ++trial) {
    Matrix a = Matrix::Random(4, 4);
    const Metric m = Metric::make(a * a.transpose() + 0.5 * Matrix::Identity(4, 4));
    const Table t = build_product_table(m);
    for (int k = 0; k <= 4; ++k) {
      Eigen::LLT<Matrix> llt(exterior_metric_block(t, k));
      CHECK(llt.info() == Eigen::Success);
    }
  }
}

TEST_CASE("volume form identities", "[hodge]") {
  Rng rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = rng.integer(1, 5);
    const Metric m = random_metric(n, rng);
    const Table t = build_product_table(m);
    const Multivector vol = volume_form(t);
    const Multivector e = Multivector::scalar(n, 1.0);
    CHECK(max_abs_diff(hodge_star(e, t), vol) < 1e-14);
    CHECK(max_abs_diff(clifford_mul(vol, conjugate_star(vol), t), e * Complex(m.sign())) < 1e-12);
    CHECK(max_abs_diff(clifford_mul(conjugate_star(vol), vol, t), e * Complex(m.sign())) < 1e-12);
    CHECK(max_abs_diff(clifford_mul(vol, vol, t), e * Complex(sign_pow(n * (n - 1) / 2) * m.sign())) < 1e-12);
    for (int k = 0; k <= n; ++k) {
      const Multivector u = random_homogeneous(n, k, rng);
      const Complex s = sign_pow(k * (n + 1));
      CHECK(max_abs_diff(clifford_mul(vol, u, t), clifford_mul(u, vol, t) * s) < 1e-12);
      CHECK(max_abs_diff(hodge_star(hodge_star(u, t), t), u * (s * Complex(m.sign()))) < 1e-12);
      CHECK(max_abs_diff(hodge_star_inverse(hodge_star(u, t), t), u) < 1e-12);
    }
  }
}

TEST_CASE("star via the volume form equals the component formula", "[hodge]") {
  Rng rng(24);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = rng.integer(1, 5);
    const Metric m = random_metric(n, rng);
    const Table t = build_product_table(m);
    for (Blade b = 0; b < (Blade{1} << n); ++b) {
      const Multivector u = Multivector::blade(n, b);
      CHECK(max_abs_diff(hodge_star(u, t), hodge_star_components(u, m)) < 1e-12);
    }
  }
}

TEST_CASE("commutator of basis 2-forms", "[hodge]") {
  Rng rng(25);
  const Metric m = random_metric(4, rng);
  const Table t = build_product_table(m);
  const auto g = [&](int i, int j) { return m.upper(i - 1, j - 1); };
  for (int i1 = 1; i1 <= 4; ++i1)
    for (int i2 = i1 + 1; i2 <= 4; ++i2)
      for (int j1 = 1; j1 <= 4; ++j1)
        for (int j2 = j1 + 1; j2 <= 4; ++j2) {
          const Multivector u = wedge(gen(4, i1), gen(4, i2)), v = wedge(gen(4, j1), gen(4, j2));
          const Multivector want = wedge(gen(4, i2), gen(4, j2)) * Complex(-2 * g(i1, j1)) +
                                   wedge(gen(4, i1), gen(4, j1)) * Complex(-2 * g(i2, j2)) +
                                   wedge(gen(4, i2), gen(4, j1)) * Complex(2 * g(i1, j2)) +
                                   wedge(gen(4, i1), gen(4, j2)) * Complex(2 * g(i2, j1));
          CHECK(max_abs_diff(commutator_2forms(u, v, t), want) < 1e-13);
        }
}

TEST_CASE("commutator of 2-forms is a Lie bracket", "[hodge]") {
  Rng rng(26);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = rng.integer(2, 5);
    const Table t = build_product_table(random_metric(n, rng));
    const Multivector a = random_homogeneous(n, 2, rng), b = random_homogeneous(n, 2, rng),
                      c = random_homogeneous(n, 2, rng);
    CHECK(commutator_2forms(a, a, t).norm() < 1e-14);
    const Multivector ab = commutator_2forms(a, b, t);
    CHECK(off_grade_norm(ab, 2) < 1e-12);
    const Multivector jac = commutator_2forms(a, commutator_2forms(b, c, t), t) +
                            commutator_2forms(b, commutator_2forms(c, a, t), t) +
                            commutator_2forms(c, commutator_2forms(a, b, t), t);
    CHECK(jac.norm() < 1e-11);
  }
  const Table t3 = build_product_table(Metric::diagonal({1, 1, 1}));
  CHECK_THROWS_AS(commutator_2forms(gen(3, 1), wedge(gen(3, 1), gen(3, 2)), t3), ArgumentError);
}

TEST_CASE("Clifford product from wedge and star: sample formulas", "[hodge]") {
  Rng rng(27);
  for (int trial = 0; trial < 20; ++trial) {
    const Metric m2 = random_metric(2, rng);
    const Table t2 = build_product_table(m2);
    const Multivector u = random_homogeneous(2, 1, rng), v = random_homogeneous(2, 1, rng);
    const Multivector want2 = wedge(u, v) + hodge_star(wedge(u, hodge_star(v, t2)), t2) * Complex(m2.sign());
    CHECK(max_abs_diff(clifford_mul(u, v, t2), want2) < 1e-12);
    CHECK(max_abs_diff(clifford_via_star(u, v, t2), want2) < 1e-12);

    const Metric m4 = random_metric(4, rng);
    const Table t4 = build_product_table(m4);
    const Multivector p = random_homogeneous(4, 2, rng), q = random_homogeneous(4, 2, rng);
    const Multivector want4 = wedge(p, q) - hodge_star(wedge(p, hodge_star(q, t4)), t4) * Complex(m4.sign()) +
                              commutator_2forms(p, q, t4) * Complex(0.5);
    CHECK(max_abs_diff(clifford_mul(p, q, t4), want4) < 1e-11);
    CHECK(max_abs_diff(clifford_via_star(p, q, t4), want4) < 1e-11);
  }
}

TEST_CASE("Clifford product from wedge and star: all grade pairs", "[hodge][property]") {
  Rng rng(28);
  for (int n = 2; n <= 4; ++n)
    for (int sgn : {1, -1})
      for (int k = 0; k <= n; ++k)
        for (int l = 0; l <= n; ++l)
          for (int trial = 0; trial < 20; ++trial) {
            const Table t = build_product_table(random_metric(n, rng, sgn));
            const Multivector u = random_homogeneous(n, k, rng), v = random_homogeneous(n, l, rng);
            const Multivector want = clifford_mul(u, v, t);
            INFO("n=" << n << " k=" << k << " l=" << l << " sign=" << sgn);
            REQUIRE(max_abs_diff(clifford_via_star(u, v, t), want) < 1e-10 * std::max(1.0, want.norm()));
          }
}

TEST_CASE("Clifford product from wedge and star: preconditions", "[hodge]") {
  Rng rng(29);
  const Table t5 = build_product_table(random_metric(5, rng));
  CHECK_THROWS_AS(clifford_via_star(gen(5, 1), gen(5, 2), t5), ArgumentError);
  const Table t3 = build_product_table(random_metric(3, rng));
  CHECK_THROWS_AS(clifford_via_star(gen(3, 1) + wedge(gen(3, 1), gen(3, 2)), gen(3, 2), t3), ArgumentError);
}
