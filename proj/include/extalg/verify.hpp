#ifndef EXTALG_VERIFY_HPP
#define EXTALG_VERIFY_HPP

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "extalg/dirac.hpp"
#include "extalg/error.hpp"
#include "extalg/expr.hpp"
#include "extalg/field_model.hpp"
#include "extalg/hodge.hpp"
#include "extalg/io.hpp"
#include "extalg/manifold.hpp"
#include "extalg/metric.hpp"
#include "extalg/multivector.hpp"
#include "extalg/product_table.hpp"
#include "extalg/random.hpp"
#include "extalg/spin.hpp"

namespace extalg {

/// One named property check: the largest defect seen and the bound it is held to.
struct CaseResult {
  std::string id;
  bool passed = false;
  double max_defect = 0.0;
  double tolerance = 0.0;
  /// Evaluation point of a pointwise residual; empty for aggregate checks.
  std::vector<double> point{};
};

struct RunReport {
  std::string suite;
  std::uint64_t seed = 0;
  int count = 0;
  std::vector<CaseResult> cases;
  std::optional<double> wall_time;

  bool passed() const {
    return std::all_of(cases.begin(), cases.end(), [](const CaseResult& c) { return c.passed; });
  }
};

/// Running maximum that turns NaN into +inf so it can never pass.
class Defect {
 public:
  void add(double d) { m_ = std::isnan(d) ? INFINITY : std::max(m_, d); }
  double value() const { return m_; }

 private:
  double m_ = 0.0;
};

inline CaseResult make_case(std::string id, const Defect& d, double tol) {
  return {std::move(id), d.value() < tol, d.value(), tol, {}};
}

/// Stable per-case seed: FNV-1a of the case id mixed with the run seed.
inline std::uint64_t case_seed(std::uint64_t seed, const std::string& id) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : id) h = (h ^ c) * 1099511628211ull;
  return h ^ (seed * 0x9E3779B97F4A7C15ull);
}

namespace detail {

inline Multivector grassmann(int n, std::initializer_list<int> one_based) {
  Blade b = 0;
  for (int i : one_based) b |= Blade{1} << (i - 1);
  return Multivector::blade(n, b);
}

inline Multivector clifford_chain(const std::vector<int>& idx, int n, const Table& t) {
  Multivector r = Multivector::scalar(n, 1.0);
  for (int i : idx) r = clifford_mul(r, Multivector::generator(n, i), t);
  return r;
}

inline Multivector wedge_chain(const std::vector<int>& idx, int n) {
  Multivector r = Multivector::scalar(n, 1.0);
  for (int i : idx) r = wedge(r, Multivector::generator(n, i));
  return r;
}

/// k distinct indices in random order.
inline std::vector<int> distinct_indices(int n, int k, Rng& rng) {
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  for (int i = n - 1; i > 0; --i) std::swap(all[i], all[rng.integer(0, i)]);
  all.resize(k);
  return all;
}

inline double relative(double d, double scale) { return d / std::max(1.0, scale); }

inline Metric random_signature_metric(int n, Rng& rng) { return random_metric(n, rng, 0); }

inline std::shared_ptr<const Table> shared_table(const Metric& m) {
  return std::make_shared<const Table>(build_product_table(m));
}

}  // namespace detail

// =============================================================================
// algebra
// =============================================================================

/// e^{13} e^{234} = -g^{33} e^{124} + 2 g^{23} e^{134} with Clifford-basis operands (n = 4).
inline double example1_defect(const Metric& m) {
  const int n = m.dim();
  const Table t = build_product_table(m);
  auto c = [&](std::initializer_list<int> idx) {
    return basis_convert(detail::grassmann(n, idx), Basis::Clifford, Basis::Grassmann, m);
  };
  const Multivector lhs = clifford_mul(c({1, 3}), c({2, 3, 4}), t);
  const Multivector rhs = c({1, 2, 4}) * Complex(-m.upper(2, 2)) + c({1, 3, 4}) * Complex(2.0 * m.upper(1, 2));
  return max_abs_diff(lhs, rhs);
}

/// Wedge products of k = 2, 3, 4 generators expanded in Clifford products.
inline double example4_defect(const Metric& m, const std::vector<int>& i) {
  const int n = m.dim();
  const Table t = build_product_table(m);
  auto g = [&](int a, int b) { return Complex(m.upper(i[a], i[b])); };
  auto p = [&](std::initializer_list<int> pos) {
    std::vector<int> idx;
    for (int q : pos) idx.push_back(i[q]);
    return detail::clifford_chain(idx, n, t);
  };
  const Multivector e = Multivector::scalar(n, 1.0);
  const int k = static_cast<int>(i.size());
  const Multivector w = detail::wedge_chain(i, n);
  Multivector rhs(n);
  if (k == 2) rhs = p({0, 1}) - e * g(0, 1);
  if (k == 3) rhs = p({0, 1, 2}) - p({0}) * g(1, 2) + p({1}) * g(0, 2) - p({2}) * g(0, 1);
  if (k == 4)
    rhs = p({0, 1, 2, 3}) - p({0, 1}) * g(2, 3) + p({0, 2}) * g(1, 3) - p({0, 3}) * g(1, 2) - p({1, 2}) * g(0, 3) +
          p({1, 3}) * g(0, 2) - p({2, 3}) * g(0, 1) + e * (g(0, 3) * g(1, 2) - g(0, 2) * g(1, 3) + g(0, 1) * g(2, 3));
  return max_abs_diff(w, rhs);
}

/// Clifford products of k = 2, 3, 4 generators expanded in wedge products.
inline double example5_defect(const Metric& m, const std::vector<int>& i) {
  const int n = m.dim();
  const Table t = build_product_table(m);
  auto g = [&](int a, int b) { return Complex(m.upper(i[a], i[b])); };
  auto w = [&](std::initializer_list<int> pos) {
    std::vector<int> idx;
    for (int q : pos) idx.push_back(i[q]);
    return detail::wedge_chain(idx, n);
  };
  const Multivector e = Multivector::scalar(n, 1.0);
  const int k = static_cast<int>(i.size());
  const Multivector lhs = detail::clifford_chain(i, n, t);
  Multivector rhs(n);
  if (k == 2) rhs = w({0, 1}) + e * g(0, 1);
  if (k == 3) rhs = w({0, 1, 2}) + w({0}) * g(1, 2) - w({1}) * g(0, 2) + w({2}) * g(0, 1);
  if (k == 4)
    rhs = w({0, 1, 2, 3}) + w({0, 1}) * g(2, 3) - w({0, 2}) * g(1, 3) + w({0, 3}) * g(1, 2) + w({1, 2}) * g(0, 3) -
          w({1, 3}) * g(0, 2) + w({2, 3}) * g(0, 1) + e * (g(0, 3) * g(1, 2) - g(0, 2) * g(1, 3) + g(0, 1) * g(2, 3));
  return max_abs_diff(lhs, rhs);
}

/// e^{13} ^ e^{23} = g^{23} e^{13} + g^{13} e^{23} - g^{13} g^{23} e with Clifford-basis operands (n >= 3).
inline double example6_defect(const Metric& m) {
  const int n = m.dim();
  auto c = [&](std::initializer_list<int> idx) {
    return basis_convert(detail::grassmann(n, idx), Basis::Clifford, Basis::Grassmann, m);
  };
  const Complex g13 = m.upper(0, 2), g23 = m.upper(1, 2);
  const Multivector lhs = wedge(c({1, 3}), c({2, 3}));
  const Multivector rhs = c({1, 3}) * g23 + c({2, 3}) * g13 - Multivector::scalar(n, g13 * g23);
  return max_abs_diff(lhs, rhs);
}

/// (e^1^e^3)(e^2^e^3) = -g^{33} e^1^e^2 + g^{23} e^1^e^3 - g^{13} e^2^e^3 + (g^{13} g^{23} - g^{12} g^{33}) e.
inline double example7_defect(const Metric& m) {
  const int n = m.dim();
  const Table t = build_product_table(m);
  auto gr = [&](std::initializer_list<int> idx) { return detail::grassmann(n, idx); };
  const Complex g12 = m.upper(0, 1), g13 = m.upper(0, 2), g23 = m.upper(1, 2), g33 = m.upper(2, 2);
  const Multivector lhs = clifford_mul(gr({1, 3}), gr({2, 3}), t);
  const Multivector rhs = gr({1, 2}) * (-g33) + gr({1, 3}) * g23 - gr({2, 3}) * g13 +
                          Multivector::scalar(n, g13 * g23 - g12 * g33);
  return max_abs_diff(lhs, rhs);
}

/// Examples 1, 4, 5, 6, 7 over `metrics` random metrics with n in 3..4.
inline CaseResult check_worked_examples(Rng& rng, int metrics, double tol = 1e-10) {
  Defect d;
  for (int trial = 0; trial < metrics; ++trial) {
    const int n = rng.integer(3, 4);
    const Metric m = random_metric(n, rng);
    if (n == 4) d.add(example1_defect(m));
    for (int k = 2; k <= std::min(4, n); ++k) {
      d.add(example4_defect(m, detail::distinct_indices(n, k, rng)));
      d.add(example5_defect(m, detail::distinct_indices(n, k, rng)));
    }
    d.add(example6_defect(m));
    d.add(example7_defect(m));
  }
  return make_case("algebra.worked_examples", d, tol);
}

/// Cl(0,1) is the complex numbers and Cl(0,2) the quaternions.
inline CaseResult check_small_algebras(Rng& rng, int count) {
  Defect d;
  const Table t1 = build_product_table(Metric::diagonal({-1.0}));
  for (int trial = 0; trial < count; ++trial) {
    const double a = rng.uniform(-1, 1), b = rng.uniform(-1, 1), c = rng.uniform(-1, 1), e = rng.uniform(-1, 1);
    const Multivector u = real_multivector(1, std::vector<double>{a, b});
    const Multivector v = real_multivector(1, std::vector<double>{c, e});
    const Multivector uv = clifford_mul(u, v, t1);
    const std::complex<double> z = std::complex<double>(a, b) * std::complex<double>(c, e);
    d.add(std::abs(uv[0] - z.real()) + std::abs(uv[1] - z.imag()));
  }
  const Table t2 = build_product_table(Metric::diagonal({-1.0, -1.0}));
  const Multivector one = Multivector::scalar(2, 1.0);
  const Multivector i = Multivector::generator(2, 0), j = Multivector::generator(2, 1);
  const Multivector k = clifford_mul(i, j, t2);
  d.add(max_abs_diff(clifford_mul(i, i, t2), -one));
  d.add(max_abs_diff(clifford_mul(j, j, t2), -one));
  d.add(max_abs_diff(clifford_mul(k, k, t2), -one));
  d.add(max_abs_diff(clifford_mul(k, k, t2), -one));
  d.add(max_abs_diff(clifford_mul(clifford_mul(i, j, t2), k, t2), -one));
  d.add(max_abs_diff(k, Multivector::blade(2, 3)));
  return make_case("algebra.small_algebras", d, 1e-14);
}

inline CaseResult check_associativity(Rng& rng, int count) {
  Defect d;
  for (int trial = 0; trial < count; ++trial) {
    const int n = rng.integer(1, 6);
    const Metric m = random_metric(n, rng);
    const Table t = build_product_table(m);
    const Multivector u = random_multivector(n, rng), v = random_multivector(n, rng), w = random_multivector(n, rng);
    const Multivector a = clifford_mul(clifford_mul(u, v, t), w, t), b = clifford_mul(u, clifford_mul(v, w, t), t);
    d.add(detail::relative(max_abs_diff(a, b), a.norm()));
    const Multivector c = wedge(wedge(u, v), w), e = wedge(u, wedge(v, w));
    d.add(detail::relative(max_abs_diff(c, e), c.norm()));
  }
  return make_case("algebra.associativity", d, 1e-10);
}

inline CaseResult check_anticommutativity(Rng& rng, int count) {
  Defect d;
  for (int trial = 0; trial < count; ++trial) {
    const int n = rng.integer(1, 6);
    const int r = rng.integer(0, n), s = rng.integer(0, n);
    const Multivector u = random_homogeneous(n, r, rng), v = random_homogeneous(n, s, rng);
    const Complex sign = (r * s) % 2 == 0 ? 1.0 : -1.0;
    d.add(max_abs_diff(wedge(u, v), wedge(v, u) * sign));
  }
  return make_case("algebra.anticommutativity", d, 1e-12);
}

inline CaseResult check_generator_relations(Rng& rng, int count) {
  Defect d;
  for (int trial = 0; trial < count; ++trial) {
    const int n = rng.integer(1, 6);
    const Metric m = random_metric(n, rng);
    const Table t = build_product_table(m);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const Multivector ei = Multivector::generator(n, i), ej = Multivector::generator(n, j);
        const Multivector s = clifford_mul(ei, ej, t) + clifford_mul(ej, ei, t);
        d.add(max_abs_diff(s, Multivector::scalar(n, 2.0 * m.upper(i, j))));
      }
    // (u_k e^k)^2 = g^{ij} u_i u_j e
    const Multivector u = random_homogeneous(n, 1, rng);
    Complex q{};
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) q += m.upper(i, j) * u[Blade{1} << i] * u[Blade{1} << j];
    d.add(max_abs_diff(clifford_mul(u, u, t), Multivector::scalar(n, q)));
  }
  return make_case("algebra.generator_relations", d, 1e-12);
}

/// Table products against the direct rule e^i W = e^i ^ W + e^i _| W.
inline CaseResult check_generator_route(Rng& rng, int count) {
  Defect d;
  for (int trial = 0; trial < count; ++trial) {
    const int n = rng.integer(1, 6);
    const Table t = build_product_table(random_metric(n, rng));
    const Blade w = static_cast<Blade>(rng.integer(0, (1 << n) - 1));
    const int i = rng.integer(0, n - 1);
    const Multivector a = clifford_mul(Multivector::generator(n, i), Multivector::blade(n, w), t);
    const auto b = generator_times_blade(t, i, w);
    d.add(max_abs_diff(a, map_coeffs<Complex>(b, [](double x) { return Complex(x); })));
  }
  return make_case("algebra.generator_route", d, 1e-12);
}

/// Grassmann -> Clifford -> Grassmann on every basis blade, n = 0..6.
inline CaseResult check_basis_round_trip(Rng& rng, int metrics_per_dim, double tol = 1e-12) {
  Defect d;
  for (int n = 1; n <= 6; ++n)
    for (int trial = 0; trial < metrics_per_dim; ++trial) {
      const Metric m = random_metric(n, rng);
      for (Blade b = 0; b < (Blade{1} << n); ++b) {
        const Multivector u = Multivector::blade(n, b);
        const Multivector c = basis_convert(u, Basis::Grassmann, Basis::Clifford, m);
        d.add(max_abs_diff(basis_convert(c, Basis::Clifford, Basis::Grassmann, m), u));
        const Multivector g = basis_convert(u, Basis::Clifford, Basis::Grassmann, m);
        d.add(max_abs_diff(basis_convert(g, Basis::Grassmann, Basis::Clifford, m), u));
        // The Clifford basis element e^{i1..ik} is the product of its generators.
        const Table t = build_product_table(m);
        d.add(max_abs_diff(g, detail::clifford_chain(blade_indices(b), n, t)));
      }
    }
  return make_case("algebra.basis_round_trip", d, tol);
}

inline CaseResult check_even_subalgebra(Rng& rng, int count) {
  Defect d;
  for (int trial = 0; trial < count; ++trial) {
    const int n = rng.integer(1, 6);
    const Table t = build_product_table(random_metric(n, rng));
    const Multivector u = even_part(random_multivector(n, rng)), v = even_part(random_multivector(n, rng));
    d.add(odd_part(clifford_mul(u, v, t)).norm());
    d.add(odd_part(wedge(u, v)).norm());
  }
  return make_case("algebra.even_subalgebra", d, 1e-12);
}

inline CaseResult check_metric_identities(Rng& rng, int count) {
  Defect d;
  for (int trial = 0; trial < count; ++trial) {
    const int n = rng.integer(1, 6);
    const Metric m = random_metric(n, rng);
    d.add((m.upper() * m.lower() - Matrix::Identity(n, n)).cwiseAbs().maxCoeff());
    const int k = rng.integer(1, n);
    const auto rows = detail::distinct_indices(n, k, rng), cols = detail::distinct_indices(n, k, rng);
    std::vector<int> r = rows, c = cols;
    std::sort(r.begin(), r.end());
    std::sort(c.begin(), c.end());
    d.add(std::abs(minor(m, r, c) - minor(m, c, r)));
    // isometries from spin elements compose to isometries
    if (n <= 4) {
      const auto tp = detail::shared_table(m);
      const Matrix p = isometry_of(random_spin(tp, rng)), q = isometry_of(random_spin(tp, rng));
      const Matrix pq = p * q;
      const double scale = std::max(1.0, m.upper().cwiseAbs().maxCoeff() * std::pow(pq.cwiseAbs().maxCoeff(), 2));
      d.add((pq * m.upper() * pq.transpose() - m.upper()).cwiseAbs().maxCoeff() / scale);
      d.add(is_isometry(m, pq) ? 0.0 : 1.0);
    }
  }
  return make_case("algebra.metric_identities", d, 1e-10);
}

// =============================================================================
// hodge
// =============================================================================

/// Algebraic star against the component formula and the closed-form inverse, on all blades, n = 1..5.
inline CaseResult check_star_formulas(Rng& rng, int metrics_per_dim, double tol = 1e-12) {
  Defect d;
  for (int n = 1; n <= 5; ++n)
    for (int trial = 0; trial < metrics_per_dim; ++trial) {
      const Metric m = random_metric(n, rng);
      const Table t = build_product_table(m);
      for (Blade b = 0; b < (Blade{1} << n); ++b) {
        const Multivector u = Multivector::blade(n, b);
        const Multivector s = hodge_star(u, t);
        d.add(detail::relative(max_abs_diff(s, hodge_star_components(u, m)), s.norm()));
        const int k = grade_of(b);
        const double sign = ((k * (n + 1)) % 2 == 0 ? 1.0 : -1.0) * m.sign();
        d.add(detail::relative(max_abs_diff(hodge_star(s, t), u * Complex(sign)), s.norm()));
        d.add(detail::relative(max_abs_diff(hodge_star_inverse(s, t), u), s.norm()));
      }
    }
  return make_case("hodge.star_formulas", d, tol);
}

/// *e = I, I I* = I* I = sgn(g) e, I^2 = (-1)^{n(n-1)/2} sgn(g) e, I U = (-1)^{k(n+1)} U I.
inline CaseResult check_volume_form(Rng& rng, int metrics_per_dim, double tol = 1e-12) {
  Defect d;
  for (int n = 1; n <= 5; ++n)
    for (int trial = 0; trial < metrics_per_dim; ++trial) {
      const Metric m = random_metric(n, rng);
      const Table t = build_product_table(m);
      const Multivector vol = volume_form(t);
      const double scale = vol.norm() * vol.norm();
      const Multivector sg = Multivector::scalar(n, static_cast<double>(m.sign()));
      d.add(max_abs_diff(hodge_star(Multivector::scalar(n, 1.0), t), vol));
      d.add(detail::relative(max_abs_diff(clifford_mul(vol, conjugate_star(vol), t), sg), scale));
      d.add(detail::relative(max_abs_diff(clifford_mul(conjugate_star(vol), vol, t), sg), scale));
      const double sq = ((n * (n - 1) / 2) % 2 == 0 ? 1.0 : -1.0) * m.sign();
      d.add(detail::relative(max_abs_diff(clifford_mul(vol, vol, t), Multivector::scalar(n, sq)), scale));
      for (Blade b = 0; b < (Blade{1} << n); ++b) {
        const Multivector u = Multivector::blade(n, b);
        const int k = grade_of(b);
        const Complex s = (k * (n + 1)) % 2 == 0 ? 1.0 : -1.0;
        const Multivector iu = clifford_mul(vol, u, t);
        d.add(detail::relative(max_abs_diff(iu, clifford_mul(u, vol, t) * s), iu.norm()));
      }
    }
  return make_case("hodge.volume_form", d, tol);
}

/// Gram blocks of the exterior metric equal the k x k minor matrices of g^{ij}.
inline CaseResult check_exterior_metric_blocks(Rng& rng, int metrics, double tol = 1e-10) {
  Defect d;
  for (int trial = 0; trial < metrics; ++trial)
    for (int n = 1; n <= 5; ++n) {
      const Metric m = random_metric(n, rng);
      const Table t = build_product_table(m);
      for (int k = 0; k <= n; ++k) {
        const Matrix a = exterior_metric_block(t, k), b = minor_matrix(m, k);
        d.add(detail::relative((a - b).cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()));
      }
    }
  return make_case("hodge.exterior_metric_blocks", d, tol);
}

/// Clifford products rebuilt from wedge, star, sgn(g) and com, n = 2, 3, 4, both signs of det g.
inline CaseResult check_clifford_via_star(Rng& rng, int pairs_per_combination, double tol = 1e-10) {
  Defect d;
  for (int n = 2; n <= 4; ++n)
    for (int sign : {1, -1})
      for (int k = 1; k <= n; ++k)
        for (int l = 1; l <= n; ++l)
          for (int trial = 0; trial < pairs_per_combination; ++trial) {
            const Table t = build_product_table(random_metric(n, rng, sign));
            const Multivector u = random_homogeneous(n, k, rng), v = random_homogeneous(n, l, rng);
            const Multivector a = clifford_mul(u, v, t);
            d.add(detail::relative(max_abs_diff(a, clifford_via_star(u, v, t)), a.norm()));
          }
  return make_case("hodge.clifford_via_star", d, tol);
}

/// com on basis 2-forms against the explicit contraction formula; Jacobi identity.
inline CaseResult check_commutator(Rng& rng, int count) {
  Defect d;
  for (int trial = 0; trial < count; ++trial) {
    const int n = rng.integer(2, 5);
    const Metric m = random_metric(n, rng);
    const Table t = build_product_table(m);
    const auto i = detail::distinct_indices(n, 2, rng), j = detail::distinct_indices(n, 2, rng);
    auto w = [&](int a, int b) { return wedge(Multivector::generator(n, a), Multivector::generator(n, b)); };
    auto g = [&](int a, int b) { return Complex(2.0 * m.upper(a, b)); };
    const Multivector lhs = commutator_2forms(w(i[0], i[1]), w(j[0], j[1]), t);
    const Multivector rhs = -w(i[1], j[1]) * g(i[0], j[0]) - w(i[0], j[0]) * g(i[1], j[1]) +
                            w(i[1], j[0]) * g(i[0], j[1]) + w(i[0], j[1]) * g(i[1], j[0]);
    d.add(max_abs_diff(lhs, rhs));
    const Multivector x = random_homogeneous(n, 2, rng), y = random_homogeneous(n, 2, rng),
                      z = random_homogeneous(n, 2, rng);
    d.add(commutator(x, x, t).norm());
    const Multivector jac = commutator(x, commutator(y, z, t), t) + commutator(y, commutator(z, x, t), t) +
                            commutator(z, commutator(x, y, t), t);
    d.add(jac.norm() / std::max(1.0, x.norm() * y.norm() * z.norm()));
    d.add(off_grade_norm(commutator(x, y, t), 2));
  }
  return make_case("hodge.commutator", d, 1e-12);
}

/// Tr(UV - VU) = 0.
inline CaseResult check_trace(Rng& rng, int count) {
  Defect d;
  for (int trial = 0; trial < count; ++trial) {
    const int n = rng.integer(1, 6);
    const Table t = build_product_table(random_metric(n, rng));
    const Multivector u = random_multivector(n, rng), v = random_multivector(n, rng);
    d.add(std::abs(trace(commutator(u, v, t))));
  }
  return make_case("hodge.trace_commutator", d, 1e-12);
}

// =============================================================================
// spin
// =============================================================================

/// Running defects of the spin battery.
struct SpinDefects {
  Defect unit, grades, scalar, det, round_trip, homomorphism, sign, basis, isometry;
};

/// One random bivector exponential F (and a second factor G) in Spin(m): unit
/// norm, grade and scalar-product preservation, det = 1, factorisation round
/// trip, homomorphism, sign invariance and the basis-change reconstruction.
inline void spin_trial(const Metric& m, Rng& rng, SpinDefects& d) {
  const int n = m.dim();
  const auto tp = detail::shared_table(m);
  const Table& t = *tp;
  const SpinElement f = random_spin(tp, rng), g = random_spin(tp, rng);
  d.unit.add(max_abs_diff(clifford_mul(f.form(), conjugate_star(f.form()), t), Multivector::scalar(n, 1.0)));
  const Multivector u = random_multivector(n, rng), v = random_multivector(n, rng);
  for (int k = 0; k <= n; ++k) d.grades.add(max_abs_diff(grade_project(f.act(u), k), f.act(grade_project(u, k))));
  d.scalar.add(std::abs(scalar_product(f.act(u), f.act(v), t) - scalar_product(u, v, t)));
  const Matrix p = isometry_of(f);
  d.det.add(std::abs(p.determinant() - 1.0));
  d.isometry.add((p * m.upper() * p.transpose() - m.upper()).cwiseAbs().maxCoeff());
  const FactorResult back = factor_isometry(p, tp);
  if (const auto* s = std::get_if<SpinElement>(&back))
    d.round_trip.add(std::min(max_abs_diff(s->form(), f.form()), max_abs_diff(s->form(), -f.form())));
  else
    d.round_trip.add(INFINITY);
  d.homomorphism.add((isometry_of(f * g) - isometry_of(f) * isometry_of(g)).cwiseAbs().maxCoeff());
  d.sign.add(max_abs_diff((-f).act(u), f.act(u)));
  d.sign.add((isometry_of(-f) - p).cwiseAbs().maxCoeff());
  // New basis e~^i = F* e^i F; the same coefficients on it give F* U F, so F (.) F* restores U.
  Multivector moved(n);
  for (Blade b = 0; b < u.size(); ++b) {
    Multivector blade = Multivector::scalar(n, 1.0);
    for (int i : blade_indices(b)) {
      Multivector ei(n);
      for (int j = 0; j < n; ++j) ei[Blade{1} << j] = p(i, j);
      blade = wedge(blade, ei);
    }
    moved += blade * u[b];
  }
  d.basis.add(max_abs_diff(clifford_mul(clifford_mul(f.form(), moved, t), conjugate_star(f.form()), t), u));
}

/// The spin battery for n = 1..4 and random signatures, plus the kernel checks.
inline std::vector<CaseResult> check_spin(Rng& rng, int count, double tol = 1e-8) {
  SpinDefects sd;
  for (int n = 1; n <= 4; ++n)
    for (int trial = 0; trial < count; ++trial) spin_trial(random_metric(n, rng), rng, sd);
  // Kernel: +-e act trivially; a reflection has no spin preimage.
  Defect kernel;
  {
    const Metric m = Metric::diagonal({1.0, 1.0});
    const auto tp = detail::shared_table(m);
    const SpinElement e = SpinElement::make(Multivector::scalar(2, 1.0), tp);
    kernel.add((isometry_of(e) - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff());
    kernel.add((isometry_of(-e) - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff());
    Matrix refl = Matrix::Identity(2, 2);
    refl(1, 1) = -1.0;
    kernel.add(std::holds_alternative<NotSpinIsometry>(factor_isometry(refl, tp)) ? 0.0 : 1.0);
  }
  return {make_case("spin.unit_norm", sd.unit, tol),
          make_case("spin.grade_preservation", sd.grades, tol),
          make_case("spin.scalar_product_preservation", sd.scalar, tol),
          make_case("spin.det_one", sd.det, tol),
          make_case("spin.isometry", sd.isometry, tol),
          make_case("spin.factor_round_trip", sd.round_trip, tol),
          make_case("spin.homomorphism", sd.homomorphism, tol),
          make_case("spin.sign_invariance", sd.sign, tol),
          make_case("spin.basis_change", sd.basis, tol),
          make_case("spin.kernel", kernel, tol)};
}

// =============================================================================
// manifold
// =============================================================================

/// Flat metrics in polar and spherical coordinates.
inline Chart polar_chart() {
  return Chart::make(2, {Expr(1.0), Expr(0.0), Expr(0.0), parse("x1^2")}, {{0.5, 2.0}, {-3.0, 3.0}});
}

inline Chart spherical_flat_chart() {
  return Chart::make(3,
                     {Expr(1.0), Expr(0.0), Expr(0.0), Expr(0.0), parse("x1^2"), Expr(0.0), Expr(0.0), Expr(0.0),
                      parse("x1^2*sin(x2)^2")},
                     {{0.5, 2.0}, {0.3, 2.8}, {-3.0, 3.0}});
}

/// Round 2- and 3-sphere charts.
inline Chart sphere_chart(int n) {
  if (n == 2) return Chart::make(2, {Expr(1.0), Expr(0.0), Expr(0.0), parse("sin(x1)^2")}, {{0.3, 2.8}, {-3.0, 3.0}});
  return Chart::make(3,
                     {Expr(1.0), Expr(0.0), Expr(0.0), Expr(0.0), parse("sin(x1)^2"), Expr(0.0), Expr(0.0), Expr(0.0),
                      parse("sin(x1)^2*sin(x2)^2")},
                     {{0.3, 2.8}, {0.3, 2.8}, {-3.0, 3.0}});
}

inline CaseResult check_flat_curvature(Rng& rng, int points, double tol = 1e-9) {
  Defect d;
  const std::array<Chart, 2> charts{polar_chart(), spherical_flat_chart()};
  for (const Chart& c : charts)
    for (int trial = 0; trial < points; ++trial) {
      const CurvatureData cd = curvature(c, random_point(c, rng));
      for (double v : cd.r_mixed) d.add(std::abs(v));
    }
  return make_case("manifold.flat_curvature", d, tol);
}

/// (Upsilon_i Upsilon_j - Upsilon_j Upsilon_i) dx^k = R^k_{ij,r} dx^r on sphere charts
/// and random curved charts; also the sphere value R_{12,12} = sin^2 x1.
inline CaseResult check_curvature_commutator(Rng& rng, int points, double tol = 1e-8) {
  Defect d;
  std::vector<Chart> charts{sphere_chart(2), sphere_chart(3)};
  for (int n = 2; n <= 4; ++n) charts.push_back(random_chart(n, rng));
  for (const Chart& c : charts)
    for (int trial = 0; trial < points; ++trial) {
      const auto p = random_point(c, rng);
      const PointGeometry geo = geometry_at(c, p);
      const CurvatureData cd = curvature(geo);
      const int n = c.dim();
      for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            const Multivector cm = value_of(upsilon_commutator(geo, jet_generator(n, k), i, j));
            Multivector expect(n);
            for (int r = 0; r < n; ++r) expect[Blade{1} << r] = cd.R(k, i, j, r);
            d.add(max_abs_diff(cm, expect));
          }
      if (&c == &charts[0]) d.add(std::abs(cd.R_lower(0, 1, 0, 1) - std::pow(std::sin(p[0]), 2)));
    }
  return make_case("manifold.curvature_commutator", d, tol);
}

/// d^2 = 0, delta^2 = 0, delta = (-1)^k *^-1 d * on homogeneous parts, scalar Laplacian
/// formula, and d against antisymmetrised partial derivatives; random charts n = 2..4.
inline std::vector<CaseResult> check_operators(Rng& rng, int fields, double tol = 1e-8) {
  Defect dd, deldel, star, lap, partials;
  for (int trial = 0; trial < fields; ++trial) {
    const int n = 2 + trial % 3;
    const Chart c = random_chart(n, rng);
    const auto p = random_point(c, rng);
    const PointGeometry geo = geometry_at(c, p);
    const FormField f = random_form_field(n, rng);
    const JetForm u = f.jet(p);
    const double scale = std::max(1.0, value_of(u).norm());
    dd.add(value_of(d_op(geo, d_op(geo, u))).norm() / scale);
    deldel.add(value_of(delta_op(geo, delta_op(geo, u))).norm() / scale);
    for (int k = 0; k <= n; ++k) {
      const JetForm uk = grade_project(u, k);
      const JetForm rhs = hodge_star_inverse(d_op(geo, hodge_star(uk, *geo.table)), *geo.table);
      const Complex sign = k % 2 == 0 ? 1.0 : -1.0;
      star.add(max_abs_diff(value_of(delta_op(geo, uk)), value_of(rhs) * sign) / scale);
    }
    const FormField phi = random_form_field(n, rng, 1u);
    const JetForm pj = phi.jet(p);
    lap.add(std::abs(value_of(laplace(geo, pj))[0] - scalar_laplace_formula(geo, pj[0])) / scale);
    JetForm wedge_form(n);
    for (int k = 0; k < n; ++k) wedge_form += wedge(jet_generator(n, k), partial(u, k));
    partials.add(max_abs_diff(value_of(d_op(geo, u)), value_of(wedge_form)) / scale);
  }
  return {make_case("manifold.d_squared", dd, tol), make_case("manifold.delta_squared", deldel, tol),
          make_case("manifold.delta_star", star, tol), make_case("manifold.scalar_laplace", lap, tol),
          make_case("manifold.d_partials", partials, tol)};
}

/// Upsilon commutes with Tr and * , obeys Leibniz on the scalar product, kills
/// the volume form, and Gamma^k_{kl} = d_l ln sqrt|g|.
inline CaseResult check_upsilon_properties(Rng& rng, int count, double tol = 1e-8) {
  Defect d;
  for (int trial = 0; trial < count; ++trial) {
    const int n = 2 + trial % 3;
    const Chart c = random_chart(n, rng);
    const auto p = random_point(c, rng);
    const PointGeometry geo = geometry_at(c, p);
    const JetTable& t = *geo.table;
    const JetForm u = random_form_field(n, rng).jet(p), v = random_form_field(n, rng).jet(p);
    const double scale = std::max(1.0, value_of(u).norm() * value_of(v).norm());
    auto sp = [&](const JetForm& a, const JetForm& b) { return trace(clifford_mul(a, conjugate_star(b), t)); };
    const JetForm vol = volume_form<ComplexJet>(t);
    for (int j = 0; j < n; ++j) {
      const JetForm uj = upsilon(geo, u, j);
      d.add(std::abs(trace(uj).value() - trace(u).partial(j).value()) / scale);
      d.add(max_abs_diff(value_of(upsilon(geo, hodge_star(u, t), j)), value_of(hodge_star(uj, t))) / scale);
      const Complex lhs = sp(u, v).partial(j).value();
      const Complex rhs = sp(uj, v).value() + sp(u, upsilon(geo, v, j)).value();
      d.add(std::abs(lhs - rhs) / scale);
      d.add(value_of(upsilon(geo, vol, j)).norm());
      double tr = 0.0;
      for (int k = 0; k < n; ++k) tr += geo.christoffel(k, k, j).value();
      d.add(std::abs(tr - geo.sqrt_abs_det.d(j) / geo.sqrt_abs_det.value()));
    }
  }
  return make_case("manifold.upsilon_properties", d, tol);
}

/// Upsilon_j on the new chart equals q^i_j times the old Upsilon_i, pushed through the
/// outermorphism, for an affine change of coordinates.
inline CaseResult check_affine_chain_rule(Rng& rng, int count, double tol = 1e-8) {
  Defect d;
  for (int trial = 0; trial < count; ++trial) {
    const int n = 2 + trial % 3;
    const Chart c = random_chart(n, rng);
    Matrix q = Matrix::Identity(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) q(i, j) += 0.2 * rng.uniform(-1, 1);
    std::vector<double> shift(n);
    std::vector<Expr> xs;
    for (int i = 0; i < n; ++i) {
      shift[i] = 0.05 * rng.uniform(-1, 1);
      Expr e(shift[i]);
      for (int a = 0; a < n; ++a) e = e + Expr(q(i, a)) * Expr::var(a);
      xs.push_back(e);
    }
    const CoordinateChange ch = CoordinateChange::make(xs);
    const Chart moved = transform_chart(c, ch, std::vector<Interval>(n, Interval{-0.2, 0.2}));
    const FormField u = random_form_field(n, rng);
    const FormField ut = pullback(u, ch);
    std::vector<double> pn(n);
    for (double& x : pn) x = rng.uniform(-0.1, 0.1);
    const auto po = ch.map_point(pn);
    for (int j = 0; j < n; ++j) {
      Multivector rhs(n);
      for (int i = 0; i < n; ++i) rhs += outermorphism(upsilon_k(c, u, i, po), q) * Complex(q(i, j));
      const Multivector lhs = upsilon_k(moved, ut, j, pn);
      d.add(max_abs_diff(lhs, rhs) / std::max(1.0, rhs.norm()));
    }
  }
  return make_case("manifold.affine_chain_rule", d, tol);
}

/// parse(print(parse(s))) prints identically; d/dx is linear and obeys the product rule.
inline std::vector<CaseResult> check_expressions(Rng& rng, int count) {
  Defect print, rules;
  for (int trial = 0; trial < count; ++trial) {
    const int n = rng.integer(1, 4);
    const Expr a = random_smooth_expr(n, rng), b = random_smooth_expr(n, rng);
    const std::string s = to_string(a);
    const Expr back = parse(s, n);
    print.add(to_string(back) == s && to_string(parse(to_string(back), n)) == s ? 0.0 : 1.0);
    std::vector<double> x(n);
    for (double& v : x) v = rng.uniform(-1, 1);
    print.add(std::abs(eval(back, x) - eval(a, x)));
    const int k = rng.integer(0, n - 1);
    const double alpha = rng.uniform(-2, 2);
    const double lin = eval(diff(Expr(alpha) * a + b, k), x) - (alpha * eval(diff(a, k), x) + eval(diff(b, k), x));
    const double prod = eval(diff(a * b, k), x) - (eval(diff(a, k), x) * eval(b, x) + eval(a, x) * eval(diff(b, k), x));
    rules.add(std::abs(lin));
    rules.add(std::abs(prod));
    // central difference as a coarse oracle
    std::vector<double> xp = x, xm = x;
    xp[k] += 1e-5;
    xm[k] -= 1e-5;
    rules.add(std::abs((eval(a, xp) - eval(a, xm)) / 2e-5 - eval(diff(a, k), x)) * 1e-3);
  }
  return {make_case("manifold.expr_print_parse", print, 1e-12), make_case("manifold.expr_derivative", rules, 1e-9)};
}

// =============================================================================
// field
// =============================================================================

namespace detail {

inline Chart flat_box(int n) {
  std::vector<Expr> g(static_cast<std::size_t>(n) * n, Expr(0.0));
  for (int i = 0; i < n; ++i) g[i * n + i] = i == n - 1 ? 1.0 : -1.0;
  return Chart::make(n, std::move(g), std::vector<Interval>(n, Interval{-1.0, 1.0}));
}

/// Chart with the given constant metric on [-1, 1]^n.
inline Chart constant_chart(const Metric& m) {
  const int n = m.dim();
  std::vector<Expr> g;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g.push_back(Expr(m.lower(i, j)));
  return Chart::make(n, std::move(g), std::vector<Interval>(n, Interval{-1.0, 1.0}));
}

inline std::vector<FormField> random_a(int n, Rng& rng) {
  std::vector<FormField> a;
  for (int k = 0; k < n; ++k) a.push_back(FormField::scalar(n, Expr(), Expr(0.5) * random_smooth_expr(n, rng, 2)));
  return a;
}

inline std::vector<FormField> random_b(int n, Rng& rng) {
  std::vector<FormField> b;
  for (int k = 0; k < n; ++k) b.push_back(scale(random_form_field(n, rng, 1u << 2, false, 1), Expr(0.5)));
  return b;
}

/// Flat Minkowski-type configuration with B = 0 and H = dx^n, so H solves its equations.
inline FieldConfig solved_h_config(int n, Rng& rng) {
  FormField h(n);
  h.add(Blade{1} << (n - 1), 1.0);
  return FieldConfig::make(flat_box(n), random_form_field(n, rng), random_a(n, rng),
                           std::vector<FormField>(n, FormField(n)), h, rng.uniform(0.1, 1.0));
}

}  // namespace detail

/// Gauge transforms with random U = exp(X(x)), v = exp(i phi(x)). On curved charts the main
/// residual maps to R U v and L1 is unchanged. f' = f always; G' = U^-1 G U and the
/// invariance of L0 and L need a flat chart (constant random metric). On curved charts
/// G + 1/2 D transforms by conjugation instead, since [Upsilon_i, Upsilon_j] U = 1/2 (D_ij U - U D_ij).
inline std::vector<CaseResult> check_gauge(Rng& rng, int points, double tol = 1e-9) {
  Defect main, l1, l0, total, strengths, curved;
  for (int trial = 0; trial < points; ++trial) {
    const int n = 2 + trial % 3;
    for (const bool flat : {true, false}) {
      const Chart c = flat ? detail::constant_chart(random_metric(n, rng)) : random_chart(n, rng);
      const FieldConfig cfg = FieldConfig::make(c, random_form_field(n, rng), detail::random_a(n, rng),
                                                detail::random_b(n, rng), random_form_field(n, rng, 1u << 1, false),
                                                rng.uniform(0.1, 1.0));
      const auto p = random_point(c, rng);
      const PointFields pf = evaluate(cfg, p);
      const GaugeJets gj = gauge_jets(*pf.geo, scale(random_form_field(n, rng, 1u << 2, false, 1), Expr(0.5)),
                                      random_smooth_expr(n, rng));
      const PointFields pg = gauge_transform(pf, gj.u, gj.v);
      const Table& vt = *pf.geo->value_table;
      const Multivector u = value_of(gj.u), ui = conjugate_star(u);
      const Multivector r0 = value_of(main_residual(pf)), r1 = value_of(main_residual(pg));
      main.add(max_abs_diff(r1, clifford_mul(r0, u * gj.v.value(), vt)) / std::max(1.0, r0.norm()));
      auto rel = [](Complex a, Complex b) { return std::abs(a - b) / std::max(1.0, std::abs(a)); };
      l1.add(rel(lagrangian_L1(pf), lagrangian_L1(pg)));
      const StrengthData s0 = field_strengths(pf), s1 = field_strengths(pg);
      const CurvatureData cd = curvature(*pf.geo);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          strengths.add(std::abs(s1.f(i, j) - s0.f(i, j)));
          const Multivector half_d = cd.D(i, j) * Complex(0.5);
          const double scale_g = std::max(1.0, s0.G(i, j).norm());
          if (flat)
            strengths.add(max_abs_diff(s1.G(i, j), clifford_mul(clifford_mul(ui, s0.G(i, j), vt), u, vt)) / scale_g);
          else
            curved.add(max_abs_diff(s1.G(i, j) + half_d, clifford_mul(clifford_mul(ui, s0.G(i, j) + half_d, vt), u, vt)) /
                       scale_g);
        }
      if (flat) {
        l0.add(rel(lagrangian_L0(pf), lagrangian_L0(pg)));
        total.add(rel(lagrangian_total(pf), lagrangian_total(pg)));
      }
    }
  }
  return {make_case("field.gauge_main_residual", main, tol), make_case("field.gauge_L1", l1, tol),
          make_case("field.gauge_L0", l0, tol), make_case("field.gauge_L", total, tol),
          make_case("field.gauge_strengths", strengths, tol), make_case("field.gauge_strengths_curved", curved, tol)};
}

/// Tr(H(C + C*)) and Tr(iH(C - C*)) are real for complex C and real 1-forms H.
inline CaseResult check_lemma1(Rng& rng, int count, double tol = 1e-10) {
  Defect d;
  for (int trial = 0; trial < count; ++trial) {
    const int n = rng.integer(1, 6);
    const Table t = build_product_table(random_metric(n, rng));
    const Multivector c = random_multivector(n, rng), h = random_homogeneous(n, 1, rng, false);
    d.add(std::abs(trace(clifford_mul(h, c + conjugate_star(c), t)).imag()));
    d.add(std::abs(trace(clifford_mul(h, c - conjugate_star(c), t) * kI).imag()));
  }
  return make_case("field.lemma1_real", d, tol);
}

/// With H solving its equations: the Psi-bar form of L1 equals Tr(H(C + C*)), L is real,
/// gauge transforms keep H a solution, and the conservation identity holds for arbitrary Psi.
inline std::vector<CaseResult> check_h_solutions(Rng& rng, int count) {
  Defect lemma2, real, h_gauge, conservation, current_real;
  for (int trial = 0; trial < count; ++trial) {
    const int n = 2 + trial % 3;
    const FieldConfig cfg = detail::solved_h_config(n, rng);
    const auto p = random_point(cfg.chart, rng);
    const PointFields pf = evaluate(cfg, p);
    const Complex l1 = lagrangian_L1(pf);
    lemma2.add(std::abs(lagrangian_L1_bar(pf) - l1) / std::max(1.0, std::abs(l1)));
    real.add(std::abs(lagrangian_total(pf).imag()) / std::max(1.0, std::abs(l1)));
    conservation.add(conservation_defect(pf));
    current_real.add(current_imaginary_part(pf));
    const GaugeJets gj =
        gauge_jets(*pf.geo, scale(random_form_field(n, rng, 1u << 2, false, 1), Expr(0.5)), random_smooth_expr(n, rng));
    h_gauge.add(h_residual(gauge_transform(pf, gj.u, gj.v)).max_norm());
  }
  return {make_case("field.lemma2_identity", lemma2, 1e-9), make_case("field.lagrangian_real", real, 1e-9),
          make_case("field.h_gauge_invariance", h_gauge, 1e-9),
          make_case("field.conservation_identity", conservation, 1e-7),
          make_case("field.current_real", current_real, 1e-9)};
}

/// Column-embedded Dirac plane wave: main residual vanishes and so does the current divergence.
inline CaseResult check_plane_wave_current(Rng& rng, int count, double tol = 1e-7) {
  Defect d;
  const GammaRep gr = gamma_matrices();
  const Chart c = minkowski_chart(std::vector<Interval>(4, Interval{-1.0, 1.0}));
  FormField h(4);
  h.add(Blade{8}, 1.0);
  for (int trial = 0; trial < count; ++trial) {
    const double m = rng.uniform(0.2, 1.5);
    const PlaneWave w = plane_wave({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)}, m, gr);
    const FieldConfig cfg = FieldConfig::make(c, column_embed_field(plane_wave_spinor(w), gr),
                                              std::vector<FormField>(4, FormField(4)),
                                              std::vector<FormField>(4, FormField(4)), h, m);
    const PointFields pf = evaluate(cfg, random_point(c, rng));
    d.add(value_of(main_residual(pf)).norm());
    d.add(std::abs(current_divergence(pf)));
  }
  return make_case("field.plane_wave_current", d, tol);
}

/// B built so that G_ij = -1/2 D_ij at p on curved 4-charts: the link defect and the
/// compatibility identity (Upsilon_i Upsilon_j - Upsilon_j Upsilon_i) H = H G_ij - G_ij H.
inline CaseResult check_curvature_link(Rng& rng, int count, double tol = 1e-8) {
  Defect d;
  for (int trial = 0; trial < count; ++trial) {
    const Chart c = random_chart(4, rng, 0, 0.3);
    const auto p = random_point(c, rng);
    const FieldConfig cfg =
        FieldConfig::make(c, random_form_field(4, rng), detail::random_a(4, rng), curvature_matched_b(c, p),
                          random_form_field(4, rng, 1u << 1, false), 0.5);
    const PointFields pf = evaluate(cfg, p);
    d.add(curvature_link_defect(pf));
    d.add(curvature_compatibility_defect(pf));
    // b_{ij,kl} = -1/2 R_{ij,kl}: G_ij components against the lowered curvature.
    const CurvatureData cd = curvature(*pf.geo);
    const StrengthData s = field_strengths(pf);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k)
          for (int l = k + 1; l < 4; ++l)
            d.add(std::abs(s.G(i, j)[(Blade{1} << k) | (Blade{1} << l)].real() + 0.5 * cd.R_lower(k, l, i, j)));
  }
  return make_case("field.curvature_link", d, tol);
}

/// Zero fields on a flat chart give zero residuals and Lagrangian; the current
/// projections split off the imaginary scalar and real 2-form parts exactly.
inline CaseResult check_field_basics(Rng& rng, int count) {
  Defect d;
  for (int n = 2; n <= 4; ++n) {
    FormField h(n);
    h.add(Blade{1} << (n - 1), 1.0);
    const FieldConfig zero = FieldConfig::make(detail::flat_box(n), FormField(n), std::vector<FormField>(n, FormField(n)),
                                               std::vector<FormField>(n, FormField(n)), h, 0.7);
    const auto p = random_point(zero.chart, rng);
    const SystemResiduals r = system_residuals(zero, p);
    d.add(r.main_norm());
    d.add(r.maxwell_norm());
    d.add(r.yang_mills_norm());
    d.add(r.h.max_norm());
    d.add(r.curvature_link);
    d.add(std::abs(lagrangian_total(evaluate(zero, p))));
  }
  for (int trial = 0; trial < count; ++trial) {
    const int n = rng.integer(1, 6);
    const Multivector j = random_multivector(n, rng);
    const Multivector p0 = project_imaginary_scalar(j), p2 = project_real_2form(j);
    const Multivector rest = j - p0 - p2;
    d.add(std::abs(rest[0].imag()));
    for (Blade b : blades_of_grade(n, 2)) d.add(std::abs(rest[b].real()));
    d.add(std::abs(p0[0] - Complex(0.0, j[0].imag())) + off_grade_norm(p0, 0));
    d.add(off_grade_norm(p2, 2) + (p2 - map_coeffs<Complex>(p2, [](Complex z) { return Complex(z.real()); })).norm());
  }
  return make_case("field.basics", d, 1e-12);
}

/// Covariance of the main equation under analytic and affine isometric changes, and the
/// spinor law Psi -> F Psi-breve for Si-changes from Lorentz boosts and rotations.
inline std::vector<CaseResult> check_covariance(Rng& rng, int count, double tol = 1e-9) {
  Defect tensor, isometric, spinor;
  const Chart flat = detail::flat_box(4);
  const auto tp = detail::shared_table(minkowski_metric());
  const std::vector<Interval> small(4, Interval{-0.3, 0.3});
  for (int trial = 0; trial < count; ++trial) {
    FormField h(4);
    h.add(Blade{8}, 1.0);
    const FieldConfig cfg = FieldConfig::make(flat, random_form_field(4, rng), detail::random_a(4, rng),
                                              detail::random_b(4, rng), h, 0.6);
    std::vector<std::vector<double>> pts;
    for (int k = 0; k < 2; ++k) {
      std::vector<double> x(4);
      for (double& v : x) v = rng.uniform(-0.2, 0.2);
      pts.push_back(x);
    }
    // analytic change close to the identity
    std::vector<Expr> xs;
    for (int i = 0; i < 4; ++i) {
      Expr e = Expr::var(i);
      e = e + Expr(0.1) * random_smooth_expr(4, rng, 1);
      xs.push_back(e);
    }
    const CovarianceReport rep = covariance_check(cfg, CoordinateChange::make(xs), small, pts);
    tensor.add(rep.tensor_defect / std::max(1.0, rep.residual_norm_old));
    // affine isometry from a spin element: residual norms agree
    const SpinElement f = random_spin(tp, rng, 0.4);
    const Matrix q = isometry_of(f);
    const CovarianceReport iso = covariance_check(cfg, CoordinateChange::linear(q), small, pts);
    isometric.add(iso.tensor_defect / std::max(1.0, iso.residual_norm_old));
    const SpinorCovarianceReport sp = spinor_covariance_check(cfg, f, small, pts);
    spinor.add(std::max(sp.spinor_defect, sp.residual_defect));
    const SpinorCovarianceReport sm = spinor_covariance_check(cfg, -f, small, pts);
    spinor.add(std::max(sm.spinor_defect, sm.residual_defect));
  }
  return {make_case("field.covariance_analytic", tensor, tol), make_case("field.covariance_isometric", isometric, tol),
          make_case("field.covariance_spinor", spinor, tol)};
}

/// Configuration on flat Minkowski space solving the main, Maxwell-type and
/// Yang-Mills-type equations: Psi = 0, a plane electromagnetic wave in a_2 and
/// commuting plane waves in B_1, B_3, H = dx^4.
inline FieldConfig radiation_config() {
  const Chart c = minkowski_chart(std::vector<Interval>(4, Interval{-1.0, 1.0}));
  const std::string phase = "(0.6*x1 + 0.8*x3 + x4)";
  std::vector<FormField> a(4, FormField(4));
  a[1] = FormField::scalar(4, Expr(), parse("0.5*cos" + phase));
  std::vector<FormField> b(4, FormField(4));
  b[0].add(Blade{3}, parse("0.4*sin" + phase));
  b[2].add(Blade{3}, parse("-0.3*sin" + phase));
  FormField h(4);
  h.add(Blade{8}, 1.0);
  return FieldConfig::make(c, FormField(4), std::move(a), std::move(b), std::move(h), 0.5);
}

/// Finite-difference Euler-Lagrange expressions of Re L on a configuration whose
/// main-system residuals vanish.
inline CaseResult check_variational(Rng& rng, int points, double tol = 1e-5, double residual_tol = 1e-10) {
  Defect d;
  const FieldConfig cfg = radiation_config();
  for (int trial = 0; trial < points; ++trial) {
    const auto p = random_point(cfg.chart, rng);
    const SystemResiduals r = system_residuals(cfg, p);
    const double res = std::max({r.main_norm(), r.maxwell_norm(), r.yang_mills_norm(), r.h.max_norm()});
    d.add(res > residual_tol ? INFINITY : variational_check(cfg, p).relative());
  }
  return make_case("field.variational", d, tol);
}

// =============================================================================
// dirac
// =============================================================================

inline std::vector<CaseResult> check_dirac(Rng& rng, int count) {
  const GammaRep gr = gamma_matrices();
  const Metric mk = minkowski_metric();
  const Table t = build_product_table(mk);
  Defect anti, hom, unit, embed, residual, wave;
  for (int k = 0; k < 4; ++k)
    for (int l = 0; l < 4; ++l) {
      const Matrix4c a = gr.g[k] * gr.g[l] + gr.g[l] * gr.g[k] - 2.0 * mk.upper(k, l) * Matrix4c::Identity();
      anti.add(a.cwiseAbs().maxCoeff());
    }
  unit.add((rep_map(Multivector::scalar(4, 1.0), gr) - Matrix4c::Identity()).cwiseAbs().maxCoeff());
  for (int trial = 0; trial < count; ++trial) {
    const Multivector u = random_multivector(4, rng), v = random_multivector(4, rng);
    hom.add((rep_map(clifford_mul(u, v, t), gr) - rep_map(u, gr) * rep_map(v, gr)).cwiseAbs().maxCoeff());
    hom.add(max_abs_diff(rep_inverse(rep_map(u, gr), gr), u));
    Vector4c theta;
    for (int r = 0; r < 4; ++r) theta(r) = Complex(rng.uniform(-1, 1), rng.uniform(-1, 1));
    Matrix4c expect = Matrix4c::Zero();
    expect.col(0) = theta;
    embed.add((rep_map(column_embed(theta, gr), gr) - expect).cwiseAbs().maxCoeff());
  }
  // Main residual of a column-embedded field against the 4-column Dirac residual.
  const Chart c = minkowski_chart(std::vector<Interval>(4, Interval{-1.0, 1.0}));
  FormField h(4);
  h.add(Blade{8}, 1.0);
  for (int trial = 0; trial < std::max(1, count / 25); ++trial) {
    SpinorField s;
    for (int r = 0; r < 4; ++r) {
      s.re[r] = random_smooth_expr(4, rng, 2);
      s.im[r] = random_smooth_expr(4, rng, 2);
    }
    std::vector<FormField> a;
    std::vector<Expr> a_im;
    for (int k = 0; k < 4; ++k) {
      a_im.push_back(Expr(0.5) * random_smooth_expr(4, rng, 1));
      a.push_back(FormField::scalar(4, Expr(), a_im.back()));
    }
    const double m = rng.uniform(0.1, 1.0);
    const FieldConfig cfg = FieldConfig::make(c, column_embed_field(s, gr), a, std::vector<FormField>(4, FormField(4)), h, m);
    const auto p = random_point(c, rng);
    const Matrix4c rm = rep_map(main_residual(cfg, p), gr);
    std::array<ComplexJet, 4> aj;
    for (int k = 0; k < 4; ++k) aj[k] = make_complex(RealJet::constant(4, 0.0), SmoothFunction(a_im[k], 4).jet(p));
    const Vector4c dr = dirac_residual(s.jet(p), aj, m, gr);
    Matrix4c expect = Matrix4c::Zero();
    expect.col(0) = dr;
    residual.add((rm - expect).cwiseAbs().maxCoeff() / std::max(1.0, dr.cwiseAbs().maxCoeff()));
  }
  for (int trial = 0; trial < std::max(1, count / 25); ++trial) {
    const double m = rng.uniform(0.2, 1.5);
    const PlaneWave w = plane_wave({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)}, m, gr);
    Matrix4c op = -m * Matrix4c::Identity();
    for (int j = 0; j < 4; ++j) op += w.k[j] * gr.g[j];
    wave.add((op * w.u).cwiseAbs().maxCoeff());
    double shell = w.k[3] * w.k[3];
    for (int j = 0; j < 3; ++j) shell -= w.k[j] * w.k[j];
    wave.add(std::abs(shell - m * m));
  }
  return {make_case("dirac.anticommutators", anti, 1e-15), make_case("dirac.homomorphism", hom, 1e-12),
          make_case("dirac.identity", unit, 1e-15), make_case("dirac.column_embed", embed, 1e-12),
          make_case("dirac.embedded_residual", residual, 1e-12), make_case("dirac.plane_wave", wave, 1e-12)};
}

// =============================================================================
// suites
// =============================================================================

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"algebra", "hodge", "spin", "manifold", "field", "dirac"};
  return names;
}

inline bool is_suite(const std::string& name) {
  const auto& n = suite_names();
  return std::find(n.begin(), n.end(), name) != n.end();
}

/// Suggested trial count per suite, sized for a few seconds of work.
inline int default_count(const std::string& suite) {
  if (suite == "algebra" || suite == "hodge" || suite == "dirac") return 200;
  if (suite == "spin") return 50;
  return 10;
}

/// Runs one suite. Every case draws from its own generator seeded by (seed, case id),
/// so a case's outcome does not depend on the others. Cases are sorted by id.
inline RunReport run_suite(const std::string& suite, std::uint64_t seed, int count) {
  if (!is_suite(suite)) throw ArgumentError("unknown suite \"" + suite + "\"");
  if (count < 1) throw ArgumentError("count must be positive");
  RunReport rep{suite, seed, count, {}, std::nullopt};
  auto run = [&](const std::string& id, const std::function<void(Rng&)>& fn) {
    Rng rng(case_seed(seed, id));
    fn(rng);
  };
  auto one = [&](const std::string& id, const std::function<CaseResult(Rng&)>& fn) {
    run(id, [&](Rng& r) { rep.cases.push_back(fn(r)); });
  };
  auto many = [&](const std::string& id, const std::function<std::vector<CaseResult>(Rng&)>& fn) {
    run(id, [&](Rng& r) {
      for (auto& c : fn(r)) rep.cases.push_back(std::move(c));
    });
  };
  const int small = std::max(1, count / 10);
  if (suite == "algebra") {
    one("algebra.worked_examples", [&](Rng& r) { return check_worked_examples(r, count); });
    one("algebra.small_algebras", [&](Rng& r) { return check_small_algebras(r, count); });
    one("algebra.associativity", [&](Rng& r) { return check_associativity(r, count); });
    one("algebra.anticommutativity", [&](Rng& r) { return check_anticommutativity(r, count); });
    one("algebra.generator_relations", [&](Rng& r) { return check_generator_relations(r, count); });
    one("algebra.generator_route", [&](Rng& r) { return check_generator_route(r, count); });
    one("algebra.basis_round_trip", [&](Rng& r) { return check_basis_round_trip(r, small); });
    one("algebra.even_subalgebra", [&](Rng& r) { return check_even_subalgebra(r, count); });
    one("algebra.metric_identities", [&](Rng& r) { return check_metric_identities(r, count); });
  } else if (suite == "hodge") {
    one("hodge.star_formulas", [&](Rng& r) { return check_star_formulas(r, small); });
    one("hodge.volume_form", [&](Rng& r) { return check_volume_form(r, small); });
    one("hodge.exterior_metric_blocks", [&](Rng& r) { return check_exterior_metric_blocks(r, small); });
    one("hodge.clifford_via_star", [&](Rng& r) { return check_clifford_via_star(r, small); });
    one("hodge.commutator", [&](Rng& r) { return check_commutator(r, count); });
    one("hodge.trace_commutator", [&](Rng& r) { return check_trace(r, count); });
  } else if (suite == "spin") {
    many("spin", [&](Rng& r) { return check_spin(r, count); });
  } else if (suite == "manifold") {
    one("manifold.flat_curvature", [&](Rng& r) { return check_flat_curvature(r, count); });
    one("manifold.curvature_commutator", [&](Rng& r) { return check_curvature_commutator(r, count); });
    many("manifold.operators", [&](Rng& r) { return check_operators(r, count); });
    one("manifold.upsilon_properties", [&](Rng& r) { return check_upsilon_properties(r, count); });
    one("manifold.affine_chain_rule", [&](Rng& r) { return check_affine_chain_rule(r, count); });
    many("manifold.expressions", [&](Rng& r) { return check_expressions(r, 10 * count); });
  } else if (suite == "field") {
    many("field.gauge", [&](Rng& r) { return check_gauge(r, count); });
    one("field.lemma1_real", [&](Rng& r) { return check_lemma1(r, 10 * count); });
    many("field.h_solutions", [&](Rng& r) { return check_h_solutions(r, count); });
    one("field.plane_wave_current", [&](Rng& r) { return check_plane_wave_current(r, count); });
    one("field.curvature_link", [&](Rng& r) { return check_curvature_link(r, small); });
    one("field.basics", [&](Rng& r) { return check_field_basics(r, count); });
    many("field.covariance", [&](Rng& r) { return check_covariance(r, small); });
    one("field.variational", [&](Rng& r) { return check_variational(r, 1); });
  } else {
    many("dirac", [&](Rng& r) { return check_dirac(r, count); });
  }
  std::sort(rep.cases.begin(), rep.cases.end(), [](const CaseResult& a, const CaseResult& b) { return a.id < b.id; });
  return rep;
}

// =============================================================================
// reports
// =============================================================================

inline std::string report_json(const RunReport& r) {
  std::string s = "{\"suite\":" + json_string(r.suite) + ",\"seed\":" + std::to_string(r.seed) +
                  ",\"count\":" + std::to_string(r.count) + ",\"passed\":" + (r.passed() ? "true" : "false") +
                  ",\"cases\":[";
  for (std::size_t i = 0; i < r.cases.size(); ++i) {
    const auto& c = r.cases[i];
    s += (i ? ",\n" : "\n") + std::string("{\"id\":") + json_string(c.id) + ",\"status\":" +
         (c.passed ? "\"pass\"" : "\"fail\"") + ",\"max_defect\":" + json_number(c.max_defect) +
         ",\"tolerance\":" + json_number(c.tolerance);
    if (!c.point.empty()) {
      s += ",\"point\":[";
      for (std::size_t k = 0; k < c.point.size(); ++k) s += (k ? "," : "") + json_number(c.point[k]);
      s += "]";
    }
    s += "}";
  }
  s += "\n]";
  if (r.wall_time) s += ",\"wall_time\":" + json_number(*r.wall_time);
  return s + "}\n";
}

/// Points, when present, go in a last column with coordinates separated by spaces.
inline std::string report_csv(const RunReport& r) {
  const bool points = std::any_of(r.cases.begin(), r.cases.end(), [](const CaseResult& c) { return !c.point.empty(); });
  std::string s = points ? "suite,id,status,max_defect,tolerance,point\n" : "suite,id,status,max_defect,tolerance\n";
  for (const auto& c : r.cases) {
    s += r.suite + "," + c.id + "," + (c.passed ? "pass" : "fail") + "," + json_number(c.max_defect) + "," +
         json_number(c.tolerance);
    if (points) {
      s += ",";
      for (std::size_t k = 0; k < c.point.size(); ++k) s += (k ? " " : "") + json_number(c.point[k]);
    }
    s += "\n";
  }
  if (r.wall_time) s += r.suite + ",wall_time,," + json_number(*r.wall_time) + (points ? ",,\n" : ",\n");
  return s;
}

}  // namespace extalg

#endif  // EXTALG_VERIFY_HPP
