#ifndef EXTALG_JET_HPP
#define EXTALG_JET_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <span>

#include "extalg/error.hpp"
#include "extalg/scalar.hpp"

namespace extalg {

/// Largest chart dimension supported by the pointwise differential layer.
inline constexpr int kMaxJetDim = 4;

/// Highest derivative order carried by a Jet.
inline constexpr int kJetOrder = 2;

/// Second-order jet of a function of `dim` coordinates at a fixed point:
/// the value together with exact first and second partial derivatives.
///
/// Arithmetic propagates derivatives exactly (Leibniz and chain rules), so a
/// quantity assembled from jets seeded by symbolic derivatives carries no
/// finite-difference error. `order()` is the number of derivative levels that
/// are still valid: seeds and constants have order 2, `partial()` lowers it by
/// one, and binary operations keep the minimum.
template <class T>
class Jet {
 public:
  using value_type = T;

  Jet() = default;
  Jet(T v) : v_(v) {}  // NOLINT: constants convert implicitly

  static Jet coordinate(int dim, int k, T at) {
    Jet j = constant(dim, at);
    j.d_[k] = T(1);
    return j;
  }

  static Jet constant(int dim, T v) {
    check_dim(dim);
    Jet j(v);
    j.dim_ = dim;
    return j;
  }

  /// `hess` is row-major dim x dim and is assumed symmetric.
  static Jet seed(int dim, T v, std::span<const T> grad, std::span<const T> hess) {
    Jet j = constant(dim, v);
    for (int i = 0; i < dim; ++i) {
      j.d_[i] = grad[i];
      for (int k = 0; k < dim; ++k) j.dd_[i * kMaxJetDim + k] = hess[i * dim + k];
    }
    return j;
  }

  int dim() const { return dim_; }
  int order() const { return order_; }
  const T& value() const { return v_; }
  const T& d(int i) const { return d_[i]; }
  const T& dd(int i, int k) const { return dd_[i * kMaxJetDim + k]; }

  /// Jet of the partial derivative with respect to coordinate k.
  Jet partial(int k) const {
    if (order_ < 1) throw ArgumentError("Jet::partial: no derivative information left");
    Jet r;
    r.dim_ = dim_;
    r.order_ = order_ - 1;
    if (k >= dim_) return r;
    r.v_ = d_[k];
    for (int i = 0; i < dim_; ++i) r.d_[i] = dd_[k * kMaxJetDim + i];
    return r;
  }

  Jet with_order(int order) const {
    Jet r = *this;
    r.order_ = std::min(order_, order);
    return r;
  }

  Jet& operator+=(const Jet& o) {
    merge_shape(o);
    v_ += o.v_;
    for (int i = 0; i < dim_; ++i) d_[i] += o.d_[i];
    for (int i = 0; i < dim_; ++i)
      for (int k = 0; k < dim_; ++k) dd_[i * kMaxJetDim + k] += o.dd_[i * kMaxJetDim + k];
    return *this;
  }
  Jet& operator-=(const Jet& o) { return *this += -o; }

  Jet operator-() const {
    Jet r = *this;
    r.v_ = -r.v_;
    for (auto& x : r.d_) x = -x;
    for (auto& x : r.dd_) x = -x;
    return r;
  }

  template <class S>
    requires std::is_arithmetic_v<S> || is_complex<S>::value
  Jet& operator*=(S s) {
    v_ *= s;
    for (auto& x : d_) x *= s;
    for (auto& x : dd_) x *= s;
    return *this;
  }

  /// Same jet with every component converted to U.
  template <class U>
  Jet<U> cast() const {
    return map([](const T& x) { return U(x); });
  }

  /// Componentwise image under `fn`; only meaningful for additive maps.
  template <class F>
  auto map(F fn) const -> Jet<decltype(fn(T{}))> {
    Jet<decltype(fn(T{}))> r;
    r.dim_ = dim_;
    r.order_ = order_;
    r.v_ = fn(v_);
    for (std::size_t i = 0; i < d_.size(); ++i) r.d_[i] = fn(d_[i]);
    for (std::size_t i = 0; i < dd_.size(); ++i) r.dd_[i] = fn(dd_[i]);
    return r;
  }

  /// Apply a scalar function given its value, first and second derivative at v.
  template <class U>
  static Jet<U> chain(const Jet<T>& f, U phi, U dphi, U ddphi) {
    Jet<U> r;
    r.dim_ = f.dim_;
    r.order_ = f.order_;
    r.v_ = phi;
    const int n = f.dim_;
    for (int i = 0; i < n; ++i) r.d_[i] = dphi * f.d_[i];
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        r.dd_[i * kMaxJetDim + k] = ddphi * f.d_[i] * f.d_[k] + dphi * f.dd_[i * kMaxJetDim + k];
    return r;
  }

  /// Largest absolute component over the valid derivative levels.
  double size() const {
    double m = magnitude(v_);
    if (order_ >= 1)
      for (int i = 0; i < dim_; ++i) m = std::max(m, magnitude(d_[i]));
    if (order_ >= 2)
      for (int i = 0; i < dim_ * kMaxJetDim; ++i) m = std::max(m, magnitude(dd_[i]));
    return m;
  }

  bool exactly_zero() const {
    if (!is_exact_zero(v_)) return false;
    for (const auto& x : d_)
      if (!is_exact_zero(x)) return false;
    for (const auto& x : dd_)
      if (!is_exact_zero(x)) return false;
    return true;
  }

 private:
  template <class U>
  friend class Jet;

  template <class A, class B>
  friend auto operator*(const Jet<A>& a, const Jet<B>& b) -> Jet<decltype(A{} * B{})>;

  static void check_dim(int dim) {
    if (dim < 0 || dim > kMaxJetDim) throw ArgumentError("Jet: dimension exceeds kMaxJetDim");
  }

  void merge_shape(const Jet& o) {
    dim_ = std::max(dim_, o.dim_);
    order_ = std::min(order_, o.order_);
  }

  int dim_ = 0;
  int order_ = kJetOrder;
  T v_{};
  std::array<T, kMaxJetDim> d_{};
  std::array<T, kMaxJetDim * kMaxJetDim> dd_{};
};

using RealJet = Jet<double>;
using ComplexJet = Jet<Complex>;

template <class T>
Jet<T> operator+(Jet<T> a, const Jet<T>& b) {
  return a += b;
}
template <class T>
Jet<T> operator-(Jet<T> a, const Jet<T>& b) {
  return a -= b;
}

template <class A, class B>
auto operator*(const Jet<A>& a, const Jet<B>& b) -> Jet<decltype(A{} * B{})> {
  using R = decltype(A{} * B{});
  Jet<R> r;
  r.dim_ = std::max(a.dim_, b.dim_);
  r.order_ = std::min(a.order_, b.order_);
  r.v_ = a.v_ * b.v_;
  const int n = r.dim_;
  for (int i = 0; i < n; ++i) r.d_[i] = a.d_[i] * b.v_ + a.v_ * b.d_[i];
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const int ik = i * kMaxJetDim + k;
      r.dd_[ik] = a.dd_[ik] * b.v_ + a.d_[i] * b.d_[k] + a.d_[k] * b.d_[i] + a.v_ * b.dd_[ik];
    }
  return r;
}

template <class T, class S>
  requires std::is_arithmetic_v<S> || is_complex<S>::value
auto operator*(const Jet<T>& a, S s) {
  using R = decltype(T{} * s);
  Jet<R> r = a.template cast<R>();
  r *= R(s);
  return r;
}

template <class T, class S>
  requires std::is_arithmetic_v<S> || is_complex<S>::value
auto operator*(S s, const Jet<T>& a) {
  return a * s;
}

template <class T>
Jet<T> reciprocal(const Jet<T>& f) {
  const T v = f.value();
  if (v == T(0)) throw NumericError("Jet reciprocal of zero");
  const T inv = T(1) / v;
  return Jet<T>::chain(f, inv, -inv * inv, T(2) * inv * inv * inv);
}

template <class T>
Jet<T> operator/(const Jet<T>& a, const Jet<T>& b) {
  return a * reciprocal(b);
}

inline RealJet sqrt(const RealJet& f) {
  const double s = std::sqrt(f.value());
  if (!(s > 0)) throw NumericError("Jet sqrt of non-positive value");
  return RealJet::chain(f, s, 0.5 / s, -0.25 / (s * s * s));
}

inline RealJet log(const RealJet& f) {
  const double v = f.value();
  if (!(v > 0)) throw NumericError("Jet log of non-positive value");
  return RealJet::chain(f, std::log(v), 1.0 / v, -1.0 / (v * v));
}

template <class T>
Jet<T> exp(const Jet<T>& f) {
  const T e = std::exp(f.value());
  return Jet<T>::chain(f, e, e, e);
}

inline RealJet abs(const RealJet& f) { return f.value() < 0 ? -f : f; }

template <class T>
Jet<T> conj_of(const Jet<T>& f) {
  if constexpr (is_complex<T>::value) {
    return f.map([](const T& x) { return std::conj(x); });
  } else {
    return f;
  }
}

template <class T>
Jet<double> real_part(const Jet<T>& f) {
  return f.map([](const T& x) { return std::real(x); });
}

template <class T>
Jet<double> imag_part(const Jet<T>& f) {
  return f.map([](const T& x) { return std::imag(x); });
}

template <class T>
double magnitude(const Jet<T>& f) {
  return f.size();
}

template <class T>
bool is_exact_zero(const Jet<T>& f) {
  return f.exactly_zero();
}

/// Complex jet from real and imaginary jets.
inline ComplexJet make_complex(const RealJet& re, const RealJet& im) {
  return ComplexJet(Complex(1, 0)) * re + ComplexJet(Complex(0, 1)) * im;
}

}  // namespace extalg

#endif  // EXTALG_JET_HPP
