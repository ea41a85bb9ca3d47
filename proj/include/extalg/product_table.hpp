#ifndef EXTALG_PRODUCT_TABLE_HPP
#define EXTALG_PRODUCT_TABLE_HPP

#include <algorithm>
#include <bit>
#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "extalg/error.hpp"
#include "extalg/metric.hpp"
#include "extalg/multivector.hpp"

namespace extalg {

/// Which basis a coefficient vector refers to on input/output. Storage is
/// always Grassmann.
enum class Basis { Grassmann, Clifford };

/// Clifford structure constants c^{ab}_g of the Grassmann basis:
/// t^a t^b = sum_g c^{ab}_g t^g. R is the real scalar of the metric entries
/// (double, or RealJet on a manifold).
template <class R>
class ProductTable {
 public:
  struct Term {
    Blade blade;
    R coeff;
  };

  /// `g_upper` is row-major n x n and assumed symmetric and nondegenerate.
  static ProductTable build(int n, std::vector<R> g_upper) {
    if (n < 0 || n > kMaxDim) throw ArgumentError("ProductTable: dimension out of range");
    if (g_upper.size() != static_cast<std::size_t>(n) * n)
      throw ArgumentError("ProductTable: metric has wrong size");
    ProductTable t;
    t.n_ = n;
    t.g_ = std::move(g_upper);
    t.finish_metric_data();
    t.fill();
    return t;
  }

  int dim() const { return n_; }
  std::size_t size() const { return std::size_t{1} << n_; }
  const R& g(int i, int j) const { return g_[i * n_ + j]; }
  std::span<const R> g_upper() const { return g_; }
  /// det of the covariant metric is sign() * abs_det().
  int sign() const { return sign_; }
  const R& sqrt_abs_det() const { return sqrt_abs_det_; }

  std::span<const Term> product(Blade a, Blade b) const {
    const std::size_t k = (static_cast<std::size_t>(a) << n_) | b;
    return {terms_.data() + offsets_[k], terms_.data() + offsets_[k + 1]};
  }

  /// Left contraction e^i _| W of a Grassmann blade W, as (blade, sign * g) terms.
  std::vector<Term> contract(int i, Blade w) const {
    std::vector<Term> out;
    int p = 0;
    for (int j = 0; j < n_; ++j) {
      if (!(w & (Blade{1} << j))) continue;
      const R& gij = g(i, j);
      if (!is_exact_zero(gij)) out.push_back({w & ~(Blade{1} << j), p % 2 == 0 ? gij : -gij});
      ++p;
    }
    return out;
  }

 private:
  void finish_metric_data() {
    using std::abs;
    using std::sqrt;
    if (n_ == 0) {
      sign_ = 1;
      sqrt_abs_det_ = R(1.0);
      return;
    }
    const R det_upper = generic_determinant(g_, n_);
    if (magnitude(det_upper) == 0.0) throw ConstructionError("ProductTable: metric is singular");
    sign_ = real_value(det_upper) > 0 ? 1 : -1;
    sqrt_abs_det_ = sqrt(R(1.0) / abs(det_upper));
  }

  static double real_value(const R& r) {
    if constexpr (std::is_same_v<R, double>) return r;
    else return r.value();
  }

  // Row a is built from rows of strictly smaller masks:
  //   a = e^i ^ a'  (i lowest bit)  =>  a b = e^i (a' b) - (e^i _| a') b.
  // Rows are appended in key order, so dependencies are already stored.
  void fill() {
    const std::size_t N = size();
    std::vector<std::vector<Term>> ctr(static_cast<std::size_t>(n_) * N);
    for (int i = 0; i < n_; ++i)
      for (Blade w = 0; w < N; ++w) ctr[i * N + w] = contract(i, w);
    offsets_.assign(N * N + 1, 0);
    std::vector<R> out(N);
    auto emit = [&](std::size_t key) {
      for (Blade w = 0; w < N; ++w)
        if (!is_exact_zero(out[w])) terms_.push_back({w, out[w]});
      offsets_[key + 1] = terms_.size();
    };
    for (Blade b = 0; b < N; ++b) {
      std::fill(out.begin(), out.end(), R(0.0));
      out[b] = R(1.0);
      emit(b);
    }
    for (Blade a = 1; a < N; ++a) {
      const int i = std::countr_zero(a);
      const Blade gi = Blade{1} << i;
      const auto& ca = ctr[i * N + (a & (a - 1))];
      for (Blade b = 0; b < N; ++b) {
        std::fill(out.begin(), out.end(), R(0.0));
        for (const auto& t : product(a & (a - 1), b)) {
          if (!(t.blade & gi)) {
            const Blade m = t.blade | gi;
            out[m] = reorder_sign(gi, t.blade) > 0 ? out[m] + t.coeff : out[m] - t.coeff;
          }
          for (const auto& c : ctr[i * N + t.blade]) out[c.blade] = out[c.blade] + c.coeff * t.coeff;
        }
        for (const auto& c : ca)
          for (const auto& t : product(c.blade, b)) out[t.blade] = out[t.blade] - c.coeff * t.coeff;
        emit((static_cast<std::size_t>(a) << n_) | b);
      }
    }
  }

  int n_ = 0;
  std::vector<R> g_;
  int sign_ = 1;
  R sqrt_abs_det_{1.0};
  std::vector<Term> terms_;
  std::vector<std::size_t> offsets_;
};

using Table = ProductTable<double>;

inline Table build_product_table(const Metric& m) {
  return Table::build(m.dim(), to_row_major(m.upper()));
}

/// Clifford product through the cached structure constants.
template <class S, class R>
BasicMultivector<S> clifford_mul(const BasicMultivector<S>& u, const BasicMultivector<S>& v, const ProductTable<R>& t) {
  u.check_same(v);
  if (u.dim() != t.dim()) throw DimensionError("clifford_mul: table built for another dimension");
  BasicMultivector<S> r(u.dim());
  for (Blade a = 0; a < u.size(); ++a) {
    if (is_exact_zero(u[a])) continue;
    for (Blade b = 0; b < v.size(); ++b) {
      if (is_exact_zero(v[b])) continue;
      const S uv = u[a] * v[b];
      for (const auto& term : t.product(a, b)) r[term.blade] = r[term.blade] + term.coeff * uv;
    }
  }
  return r;
}

/// e^i applied from the left to a Grassmann blade without the table:
/// e^i W = e^i ^ W + e^i _| W. Used as an independent route in checks.
template <class R>
BasicMultivector<R> generator_times_blade(const ProductTable<R>& t, int i, Blade w) {
  BasicMultivector<R> r(t.dim());
  if (!(w & (Blade{1} << i))) r[w | (Blade{1} << i)] = R(reorder_sign(Blade{1} << i, w));
  for (const auto& c : t.contract(i, w)) r[c.blade] = r[c.blade] + c.coeff;
  return r;
}

/// The index-pair contraction Q acting on coefficient vectors:
/// Q(e^{i1..ik}) = sum_{p<q} (-1)^{q-p-1} g^{ip iq} e^{i1..(no ip,iq)..ik}.
inline Multivector apply_q(const Multivector& u, const Metric& m) {
  Multivector r(u.dim());
  for (Blade b = 0; b < u.size(); ++b) {
    if (u[b] == Complex{}) continue;
    const auto idx = blade_indices(b);
    for (std::size_t p = 0; p < idx.size(); ++p)
      for (std::size_t q = p + 1; q < idx.size(); ++q) {
        const double sgn = (q - p - 1) % 2 == 0 ? 1.0 : -1.0;
        const Blade rest = b & ~(Blade{1} << idx[p]) & ~(Blade{1} << idx[q]);
        r[rest] += sgn * m.upper(idx[p], idx[q]) * u[b];
      }
  }
  return r;
}

/// Re-expresses coefficients given on one basis in the other:
/// Clifford -> Grassmann applies exp(Q), Grassmann -> Clifford applies exp(-Q).
inline Multivector basis_convert(const Multivector& u, Basis from, Basis to, const Metric& m) {
  if (u.dim() != m.dim()) throw DimensionError("basis_convert: metric dimension mismatch");
  if (from == to) return u;
  const double s = from == Basis::Clifford ? 1.0 : -1.0;
  Multivector sum = u;
  Multivector term = u;
  for (int r = 1; 2 * r <= u.dim(); ++r) {
    term = apply_q(term, m) * Complex(s / r);
    sum += term;
  }
  return sum;
}

}  // namespace extalg

#endif  // EXTALG_PRODUCT_TABLE_HPP
