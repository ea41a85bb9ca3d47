#ifndef EXTALG_HODGE_HPP
#define EXTALG_HODGE_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "extalg/error.hpp"
#include "extalg/metric.hpp"
#include "extalg/multivector.hpp"
#include "extalg/product_table.hpp"

namespace extalg {

/// I = sqrt|g| e^1 ^ ... ^ e^n.
template <class S = Complex, class R>
BasicMultivector<S> volume_form(const ProductTable<R>& t) {
  const Blade top = static_cast<Blade>(t.size() - 1);
  return BasicMultivector<S>::blade(t.dim(), top, t.sqrt_abs_det() * S(1.0));
}

/// Hodge star through the volume form: *U = U^rev I.
template <class S, class R>
BasicMultivector<S> hodge_star(const BasicMultivector<S>& u, const ProductTable<R>& t) {
  if (u.dim() != t.dim()) throw DimensionError("hodge_star: dimension mismatch");
  const Blade top = static_cast<Blade>(t.size() - 1);
  BasicMultivector<S> r(u.dim());
  for (Blade b = 0; b < u.size(); ++b) {
    if (is_exact_zero(u[b])) continue;
    const S c = reversion_sign(grade_of(b)) > 0 ? u[b] : -u[b];
    for (const auto& term : t.product(b, top)) r[term.blade] = r[term.blade] + (term.coeff * t.sqrt_abs_det()) * c;
  }
  return r;
}

/// Inverse star in closed form: (-1)^{k(n+1)} sgn(g) * on each grade k.
template <class S, class R>
BasicMultivector<S> hodge_star_inverse(const BasicMultivector<S>& u, const ProductTable<R>& t) {
  BasicMultivector<S> s = hodge_star(u, t);
  const int n = t.dim();
  for (Blade b = 0; b < s.size(); ++b) {
    const int k = n - grade_of(b);  // grade of the preimage
    const int sign = ((k * (n + 1)) % 2 == 0 ? 1 : -1) * t.sign();
    if (sign < 0) s[b] = -s[b];
  }
  return s;
}

/// Star from the component formula:
/// *U = sqrt|g| sum_I eps(I, I^c) (sum_K M^I_K u_K) e^{I^c}, with M the minors of g^{ij}.
inline Multivector hodge_star_components(const Multivector& u, const Metric& m) {
  if (u.dim() != m.dim()) throw DimensionError("hodge_star_components: dimension mismatch");
  const int n = m.dim();
  const double root = std::sqrt(m.abs_det());
  const Blade full = static_cast<Blade>(u.size() - 1);
  Multivector r(n);
  for (int k = 0; k <= n; ++k) {
    const auto blades = blades_of_grade(n, k);
    for (Blade bi : blades) {
      const auto I = blade_indices(bi);
      Complex raised{};
      for (Blade bk : blades) {
        if (u[bk] == Complex{}) continue;
        raised += minor(m, I, blade_indices(bk)) * u[bk];
      }
      if (raised == Complex{}) continue;
      std::vector<int> perm = I;
      const Blade comp = full & ~bi;
      for (int j : blade_indices(comp)) perm.push_back(j);
      r[comp] += root * permutation_sign(perm) * raised;
    }
  }
  return r;
}

template <class S, class R>
S scalar_product(const BasicMultivector<S>& u, const BasicMultivector<S>& v, const ProductTable<R>& t) {
  return trace(clifford_mul(u, conjugate_star(v), t));
}

/// k-associated block: Gram matrix (t^a, t^b) over grade-k blades in lexicographic order.
inline Matrix exterior_metric_block(const Table& t, int k) {
  if (k < 0 || k > t.dim()) throw ArgumentError("exterior_metric_block: grade out of range");
  const auto blades = blades_of_grade(t.dim(), k);
  const auto N = static_cast<Eigen::Index>(blades.size());
  Matrix out(N, N);
  for (Eigen::Index a = 0; a < N; ++a)
    for (Eigen::Index b = 0; b < N; ++b)
      out(a, b) = scalar_product(Multivector::blade(t.dim(), blades[a]), Multivector::blade(t.dim(), blades[b]), t).real();
  return out;
}

/// Matrix of k x k minors of g^{ij}, same ordering as exterior_metric_block.
inline Matrix minor_matrix(const Metric& m, int k) {
  if (k < 0 || k > m.dim()) throw ArgumentError("minor_matrix: grade out of range");
  const auto blades = blades_of_grade(m.dim(), k);
  const auto N = static_cast<Eigen::Index>(blades.size());
  Matrix out(N, N);
  for (Eigen::Index a = 0; a < N; ++a)
    for (Eigen::Index b = 0; b < N; ++b) out(a, b) = minor(m, blade_indices(blades[a]), blade_indices(blades[b]));
  return out;
}

template <class S, class R>
BasicMultivector<S> commutator(const BasicMultivector<S>& u, const BasicMultivector<S>& v, const ProductTable<R>& t) {
  return clifford_mul(u, v, t) - clifford_mul(v, u, t);
}

/// com(U, V) = UV - VU restricted to 2-forms. Operands may carry round-off
/// outside grade 2; the result is projected onto grade 2, where it lies exactly.
template <class S, class R>
BasicMultivector<S> commutator_2forms(const BasicMultivector<S>& u, const BasicMultivector<S>& v,
                                      const ProductTable<R>& t) {
  auto is_2form = [](const BasicMultivector<S>& x) { return off_grade_norm(x, 2) <= 1e-12 * std::max(1.0, x.norm()); };
  if (!is_2form(u) || !is_2form(v)) throw ArgumentError("commutator_2forms: operands must be 2-forms");
  if (u.dim() < 2) return BasicMultivector<S>(u.dim());
  return grade_project(commutator(u, v, t), 2);
}

/// Clifford product evaluated from wedge, star, sgn(g) and com only, using
/// the explicit grade-pair formulas for n = 2, 3, 4.
inline Multivector clifford_via_star(const Multivector& u, const Multivector& v, const Table& t) {
  const int n = t.dim();
  if (n > 4) throw ArgumentError("clifford_via_star: only n <= 4 is supported");
  if (u.dim() != n || v.dim() != n) throw DimensionError("clifford_via_star: dimension mismatch");
  const int k = homogeneous_grade(u), l = homogeneous_grade(v);
  if ((k < 0 && u.norm() > 0) || (l < 0 && v.norm() > 0))
    throw ArgumentError("clifford_via_star: operands must be homogeneous");
  if (k < 0 || l < 0) return Multivector(n);
  if (k == 0 || l == 0) return wedge(u, v);

  const double s = t.sign();
  auto st = [&](const Multivector& x) { return hodge_star(x, t); };
  const Multivector w = wedge(u, v);
  // Shorthands for the recurring shapes.
  auto ss = [&] { return wedge(st(u), st(v)) * s; };        // *U ^ *V sgn
  auto s_u_sv = [&] { return st(wedge(u, st(v))) * s; };    // *(U ^ *V) sgn
  auto s_su_v = [&] { return st(wedge(st(u), v)) * s; };    // *(*U ^ V) sgn

  if (n == 1) return w + s_u_sv();  // 1-form rule with k = 1
  if (n == 2) {
    if (k == 1 && l == 1) return w + s_u_sv();
    if (k == 1 && l == 2) return ss();
    return -ss();  // (2,1), (2,2)
  }
  if (n == 3) {
    switch (k * 10 + l) {
      case 11: return w + s_u_sv();
      case 12: return w - s_u_sv();
      case 13: return ss();
      case 21: return w - s_su_v();
      case 22: return -ss() - s_u_sv();
      case 23: return -ss();  // both operands starred
      case 31: return ss();
      default: return -ss();  // (3,2), (3,3)
    }
  }
  switch (k * 10 + l) {
    case 11:
    case 12:
    case 13: return w + s_u_sv();
    case 14: return ss();
    case 21: return w - s_su_v();
    case 22: return w - s_u_sv() + commutator(u, v, t) * 0.5;
    case 23: return -ss() + s_u_sv();
    case 24: return -ss();
    case 31: return w - s_su_v();
    case 32: return ss() + s_su_v();
    case 33: return -ss() - s_u_sv();
    case 34: return -ss();
    case 41:
    case 42: return -ss();
    default: return ss();  // (4,3), (4,4)
  }
}

/// Clifford exponential by its power series.
template <class S, class R>
BasicMultivector<S> exp(const BasicMultivector<S>& u, const ProductTable<R>& t) {
  BasicMultivector<S> sum = BasicMultivector<S>::scalar(u.dim(), S(1.0));
  BasicMultivector<S> term = sum;
  for (int m = 1; m <= 200; ++m) {
    term = clifford_mul(term, u, t) * (1.0 / m);
    sum += term;
    if (term.norm() < 1e-16 * sum.norm()) return sum;
  }
  throw NumericError("exp: series did not converge within 200 terms");
}

}  // namespace extalg

#endif  // EXTALG_HODGE_HPP
