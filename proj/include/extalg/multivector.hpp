#ifndef EXTALG_MULTIVECTOR_HPP
#define EXTALG_MULTIVECTOR_HPP

#include <algorithm>
#include <bit>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "extalg/error.hpp"
#include "extalg/scalar.hpp"

namespace extalg {

/// Largest algebra dimension the library accepts.
inline constexpr int kMaxDim = 12;

/// Basis blade as a bitmask: bit i set means generator e^{i+1} is present.
/// The Grassmann blade of mask b is e^{i1}^...^e^{ik} with i1 < ... < ik.
using Blade = std::uint32_t;

inline int grade_of(Blade b) { return std::popcount(b); }

/// Sign picked up when e^A ^ e^B (both ascending) is sorted into ascending
/// order: (-1)^{#pairs (i in A, j in B) with i > j}.
inline int reorder_sign(Blade a, Blade b) {
  int swaps = 0;
  a >>= 1;
  while (a != 0) {
    swaps += std::popcount(a & b);
    a >>= 1;
  }
  return (swaps & 1) ? -1 : 1;
}

/// Ascending 0-based generator indices of a blade.
inline std::vector<int> blade_indices(Blade b) {
  std::vector<int> out;
  for (int i = 0; b != 0; ++i, b >>= 1)
    if (b & 1u) out.push_back(i);
  return out;
}

inline Blade blade_of(std::span<const int> ascending) {
  Blade b = 0;
  for (int i : ascending) b |= Blade{1} << i;
  return b;
}

/// Sign of the permutation sorting `idx` (distinct entries), 0 when an index repeats.
inline int permutation_sign(std::vector<int> idx) {
  int sign = 1;
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = i + 1; j < idx.size(); ++j) {
      if (idx[i] == idx[j]) return 0;
      if (idx[i] > idx[j]) sign = -sign;
    }
  return sign;
}

/// All blades of grade k in lexicographic order of their index tuples.
inline std::vector<Blade> blades_of_grade(int n, int k) {
  std::vector<Blade> out;
  if (k < 0 || k > n) return out;
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    out.push_back(blade_of(idx));
    int p = k - 1;
    while (p >= 0 && idx[p] == n - k + p) --p;
    if (p < 0) break;
    ++idx[p];
    for (int q = p + 1; q < k; ++q) idx[q] = idx[q - 1] + 1;
  }
  return out;
}

/// Element of the 2^n-dimensional exterior algebra, stored by its
/// coefficients on the Grassmann basis. The coefficient type S is Complex for
/// ordinary use; jets and expressions reuse the same algorithms.
template <class S>
class BasicMultivector {
 public:
  using scalar_type = S;

  BasicMultivector() = default;
  explicit BasicMultivector(int dim) : dim_(check_dim(dim)), c_(std::size_t{1} << dim, S(0.0)) {}

  static BasicMultivector zero(int dim) { return BasicMultivector(dim); }
  static BasicMultivector scalar(int dim, S s) { return blade(dim, 0, s); }
  static BasicMultivector blade(int dim, Blade b, S s = S(1.0)) {
    BasicMultivector m(dim);
    m[b] = s;
    return m;
  }
  /// Generator e^{i+1} (0-based i).
  static BasicMultivector generator(int dim, int i, S s = S(1.0)) {
    if (i < 0 || i >= dim) throw ArgumentError("generator index out of range");
    return blade(dim, Blade{1} << i, s);
  }

  int dim() const { return dim_; }
  std::size_t size() const { return c_.size(); }
  const S& operator[](Blade b) const { return c_[b]; }
  S& operator[](Blade b) { return c_[b]; }
  std::span<const S> coeffs() const { return c_; }

  BasicMultivector& operator+=(const BasicMultivector& o) {
    check_same(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] = c_[i] + o.c_[i];
    return *this;
  }
  BasicMultivector& operator-=(const BasicMultivector& o) {
    check_same(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] = c_[i] - o.c_[i];
    return *this;
  }
  template <class T>
  BasicMultivector& operator*=(const T& s) {
    for (auto& x : c_) x = x * s;
    return *this;
  }
  BasicMultivector operator-() const {
    BasicMultivector r = *this;
    for (auto& x : r.c_) x = -x;
    return r;
  }

  friend BasicMultivector operator+(BasicMultivector a, const BasicMultivector& b) { return a += b; }
  friend BasicMultivector operator-(BasicMultivector a, const BasicMultivector& b) { return a -= b; }
  template <class T>
  friend BasicMultivector operator*(BasicMultivector a, const T& s)
    requires(!std::is_same_v<T, BasicMultivector>)
  {
    return a *= s;
  }
  template <class T>
  friend BasicMultivector operator*(const T& s, BasicMultivector a)
    requires(!std::is_same_v<T, BasicMultivector>)
  {
    for (auto& x : a.c_) x = s * x;
    return a;
  }

  /// Largest coefficient magnitude.
  double norm() const {
    double m = 0.0;
    for (const auto& x : c_) m = std::max(m, magnitude(x));
    return m;
  }

  void check_same(const BasicMultivector& o) const {
    if (o.dim_ != dim_) throw DimensionError("multivector dimension mismatch");
  }

 private:
  static int check_dim(int dim) {
    if (dim < 0 || dim > kMaxDim) throw ArgumentError("multivector dimension out of range");
    return dim;
  }

  int dim_ = 0;
  std::vector<S> c_{S(0.0)};
};

using Multivector = BasicMultivector<Complex>;

/// Coefficientwise conversion between coefficient types.
template <class To, class From, class F>
BasicMultivector<To> map_coeffs(const BasicMultivector<From>& u, F fn) {
  BasicMultivector<To> r(u.dim());
  for (Blade b = 0; b < u.size(); ++b) r[b] = fn(u[b]);
  return r;
}

/// Exterior product; sign-of-permutation merge, zero on repeated generators.
template <class S>
BasicMultivector<S> wedge(const BasicMultivector<S>& u, const BasicMultivector<S>& v) {
  u.check_same(v);
  BasicMultivector<S> r(u.dim());
  for (Blade a = 0; a < u.size(); ++a) {
    if (is_exact_zero(u[a])) continue;
    for (Blade b = 0; b < v.size(); ++b) {
      if ((a & b) != 0 || is_exact_zero(v[b])) continue;
      const S t = u[a] * v[b];
      r[a | b] = reorder_sign(a, b) > 0 ? r[a | b] + t : r[a | b] - t;
    }
  }
  return r;
}

template <class S>
BasicMultivector<S> grade_project(const BasicMultivector<S>& u, int k) {
  if (k < 0 || k > u.dim()) throw ArgumentError("grade_project: grade out of range");
  BasicMultivector<S> r(u.dim());
  for (Blade b = 0; b < u.size(); ++b)
    if (grade_of(b) == k) r[b] = u[b];
  return r;
}

template <class S>
BasicMultivector<S> even_part(const BasicMultivector<S>& u) {
  BasicMultivector<S> r(u.dim());
  for (Blade b = 0; b < u.size(); ++b)
    if (grade_of(b) % 2 == 0) r[b] = u[b];
  return r;
}

template <class S>
BasicMultivector<S> odd_part(const BasicMultivector<S>& u) {
  return u - even_part(u);
}

/// (-1)^{floor(k/2)} on the grade-k part.
inline int reversion_sign(int k) { return (k / 2) % 2 == 0 ? 1 : -1; }

template <class S>
BasicMultivector<S> reversion(const BasicMultivector<S>& u) {
  BasicMultivector<S> r = u;
  for (Blade b = 0; b < u.size(); ++b)
    if (reversion_sign(grade_of(b)) < 0) r[b] = -u[b];
  return r;
}

/// Conjugation U*: reversion combined with complex conjugation of coefficients.
template <class S>
BasicMultivector<S> conjugate_star(const BasicMultivector<S>& u) {
  BasicMultivector<S> r(u.dim());
  for (Blade b = 0; b < u.size(); ++b) {
    const S c = conj_of(u[b]);
    r[b] = reversion_sign(grade_of(b)) > 0 ? c : -c;
  }
  return r;
}

/// Coefficient of the unit e.
template <class S>
S trace(const BasicMultivector<S>& u) {
  return u[0];
}

/// Largest coefficient magnitude of u - v.
template <class S>
double max_abs_diff(const BasicMultivector<S>& u, const BasicMultivector<S>& v) {
  return (u - v).norm();
}

/// Largest magnitude over coefficients whose grade is not k.
template <class S>
double off_grade_norm(const BasicMultivector<S>& u, int k) {
  double m = 0.0;
  for (Blade b = 0; b < u.size(); ++b)
    if (grade_of(b) != k) m = std::max(m, magnitude(u[b]));
  return m;
}

inline bool is_real(const Multivector& u, double tol) {
  for (Blade b = 0; b < u.size(); ++b)
    if (std::abs(u[b].imag()) > tol) return false;
  return true;
}

template <class S>
bool is_even(const BasicMultivector<S>& u, double tol) {
  for (Blade b = 0; b < u.size(); ++b)
    if (grade_of(b) % 2 == 1 && magnitude(u[b]) > tol) return false;
  return true;
}

template <class S>
bool is_homogeneous(const BasicMultivector<S>& u, int k, double tol) {
  return off_grade_norm(u, k) <= tol;
}

/// The single grade carried by u, or -1 when u is zero or mixed.
template <class S>
int homogeneous_grade(const BasicMultivector<S>& u) {
  int g = -1;
  for (Blade b = 0; b < u.size(); ++b) {
    if (is_exact_zero(u[b])) continue;
    if (g >= 0 && grade_of(b) != g) return -1;
    g = grade_of(b);
  }
  return g;
}

inline Multivector real_multivector(int dim, std::span<const double> coeffs) {
  Multivector m(dim);
  for (Blade b = 0; b < m.size() && b < coeffs.size(); ++b) m[b] = coeffs[b];
  return m;
}

}  // namespace extalg

#endif  // EXTALG_MULTIVECTOR_HPP
