#ifndef EXTALG_SCALAR_HPP
#define EXTALG_SCALAR_HPP

#include <cmath>
#include <complex>
#include <type_traits>

namespace extalg {

using Complex = std::complex<double>;

// Scalar customisation points used by the generic algebra code. Every
// coefficient type (double, Complex, Jet<...>, Expr) provides:
//   conj_of(x)      complex conjugate (identity for real types)
//   magnitude(x)    non-negative size used for tolerances
//   is_exact_zero(x)
// Overloads for Jet and Expr live next to those types.

inline double conj_of(double x) { return x; }
inline Complex conj_of(const Complex& x) { return std::conj(x); }

inline double magnitude(double x) { return std::abs(x); }
inline double magnitude(const Complex& x) { return std::abs(x); }

inline bool is_exact_zero(double x) { return x == 0.0; }
inline bool is_exact_zero(const Complex& x) { return x == Complex{}; }

template <class T>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};

}  // namespace extalg

#endif  // EXTALG_SCALAR_HPP
