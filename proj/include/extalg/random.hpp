#ifndef EXTALG_RANDOM_HPP
#define EXTALG_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "extalg/expr.hpp"
#include "extalg/hodge.hpp"
#include "extalg/manifold.hpp"
#include "extalg/metric.hpp"
#include "extalg/multivector.hpp"
#include "extalg/product_table.hpp"
#include "extalg/spin.hpp"

namespace extalg {

/// Seeded generator with platform-independent draws: mt19937_64 is fully
/// specified, and the conversions below avoid std::*_distribution.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [lo, hi].
  int integer(int lo, int hi) { return lo + static_cast<int>(gen_() % static_cast<std::uint64_t>(hi - lo + 1)); }
  bool coin() { return (gen_() >> 63) != 0; }
  std::uint64_t bits() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

/// g^{ij} = A D A^T with A = I + 0.4 U (U uniform in [-1, 1]) and D diagonal
/// with |d| in [0.5, 2]. det_sign = +1 or -1 fixes the sign of det g, 0 leaves it random.
inline Metric random_metric(int n, Rng& rng, int det_sign = 0) {
  Matrix a = Matrix::Identity(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) += 0.4 * rng.uniform(-1.0, 1.0);
  Matrix d = Matrix::Zero(n, n);
  int sign = 1;
  for (int i = 0; i < n; ++i) {
    d(i, i) = rng.uniform(0.5, 2.0) * (rng.coin() ? -1.0 : 1.0);
    if (d(i, i) < 0) sign = -sign;
  }
  if (det_sign != 0 && sign != det_sign) d(0, 0) = -d(0, 0);
  // A stays invertible for these perturbation sizes in practice; retry otherwise.
  if (std::abs(a.determinant()) < 0.05) return random_metric(n, rng, det_sign);
  const Matrix g = a * d * a.transpose();
  return Metric::make(0.5 * (g + g.transpose()), Components::Upper);
}

/// As random_metric, with exactly `negatives` negative eigenvalues of g^{ij}.
inline Metric random_metric_signature(int n, int negatives, Rng& rng) {
  for (;;) {
    Matrix a = Matrix::Identity(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) += 0.4 * rng.uniform(-1.0, 1.0);
    if (std::abs(a.determinant()) < 0.05) continue;
    Matrix d = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) d(i, i) = rng.uniform(0.5, 2.0) * (i < negatives ? -1.0 : 1.0);
    const Matrix g = a * d * a.transpose();
    return Metric::make(0.5 * (g + g.transpose()), Components::Upper);
  }
}

inline Multivector random_multivector(int n, Rng& rng, bool complex = true) {
  Multivector u(n);
  for (Blade b = 0; b < u.size(); ++b) u[b] = Complex(rng.uniform(-1, 1), complex ? rng.uniform(-1, 1) : 0.0);
  return u;
}

inline Multivector random_homogeneous(int n, int k, Rng& rng, bool complex = true) {
  Multivector u(n);
  for (Blade b : blades_of_grade(n, k)) u[b] = Complex(rng.uniform(-1, 1), complex ? rng.uniform(-1, 1) : 0.0);
  return u;
}

inline Multivector random_bivector(int n, Rng& rng, double scale = 1.0) {
  Multivector u(n);
  for (Blade b : blades_of_grade(n, 2)) u[b] = scale * rng.uniform(-1, 1);
  return u;
}

/// exp of a random real bivector; F F* = e holds by construction.
inline SpinElement random_spin(std::shared_ptr<const Table> t, Rng& rng, double scale = 0.7) {
  return SpinElement::make(exp(random_bivector(t->dim(), rng, scale), *t), t);
}

/// A smooth, bounded expression in x1..xn: a short sum of products of
/// polynomial, trigonometric, exponential and rational factors.
inline Expr random_smooth_expr(int n, Rng& rng, int terms = 3) {
  auto coeff = [&] { return std::round(rng.uniform(-1.0, 1.0) * 100.0) / 100.0; };
  auto linear = [&] {
    Expr s(coeff());
    for (int i = 0; i < n; ++i)
      if (rng.uniform() < 0.6) s = s + Expr(coeff()) * Expr::var(i);
    return s;
  };
  Expr sum(coeff());
  for (int t = 0; t < terms; ++t) {
    Expr term(coeff());
    const int factors = rng.integer(1, 2);
    for (int f = 0; f < factors; ++f) {
      switch (rng.integer(0, 4)) {
        case 0: term = term * Expr::var(rng.integer(0, n - 1)); break;
        case 1: term = term * sin(linear()); break;
        case 2: term = term * cos(linear()); break;
        case 3: term = term * exp(Expr(0.5) * linear()); break;
        default: term = term / (Expr(2.0) + pow(linear(), 2)); break;
      }
    }
    sum = sum + term;
  }
  return sum;
}

/// Field with random expressions on every blade whose grade bit is set in `grades`.
inline FormField random_form_field(int n, Rng& rng, unsigned grades = ~0u, bool complex = true, int terms = 2) {
  FormField f(n);
  for (Blade b = 0; b < (Blade{1} << n); ++b) {
    if (!((grades >> grade_of(b)) & 1u)) continue;
    f.add(b, random_smooth_expr(n, rng, terms), complex ? random_smooth_expr(n, rng, terms) : Expr());
  }
  return f;
}

/// Point drawn from the middle half of each domain interval.
inline std::vector<double> random_point(const Chart& c, Rng& rng) {
  std::vector<double> p(c.dim());
  for (int i = 0; i < c.dim(); ++i) {
    const auto& iv = c.domain()[i];
    const double mid = 0.5 * (iv.lo + iv.hi), half = 0.25 * (iv.hi - iv.lo);
    p[i] = rng.uniform(mid - half, mid + half);
  }
  return p;
}

/// Curved chart on [-0.5, 0.5]^n: a random constant metric plus small smooth
/// symmetric perturbations. Draws again when the result degenerates on the box.
inline Chart random_chart(int n, Rng& rng, int det_sign = 0, double bump = 0.15) {
  for (int attempt = 0; attempt < 50; ++attempt) {
    const Metric base = random_metric(n, rng, det_sign);
    std::vector<Expr> g(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        const Expr e = Expr(base.lower(i, j)) + Expr(bump) * random_smooth_expr(n, rng, 2);
        g[i * n + j] = e;
        g[j * n + i] = e;
      }
    try {
      return Chart::make(n, std::move(g), std::vector<Interval>(n, Interval{-0.5, 0.5}));
    } catch (const ConstructionError&) {
    }
  }
  throw NumericError("random_chart: no valid chart found");
}

}  // namespace extalg

#endif  // EXTALG_RANDOM_HPP
