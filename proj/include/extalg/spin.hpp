#ifndef EXTALG_SPIN_HPP
#define EXTALG_SPIN_HPP

#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "extalg/error.hpp"
#include "extalg/hodge.hpp"
#include "extalg/metric.hpp"
#include "extalg/multivector.hpp"
#include "extalg/product_table.hpp"

namespace extalg {

/// Tolerance of the FF* = e membership test.
inline constexpr double kSpinTolerance = 1e-9;

/// F* U F.
inline Multivector adjoint_action(const Multivector& f, const Multivector& u, const Table& t) {
  return clifford_mul(clifford_mul(conjugate_star(f), u, t), f, t);
}

/// Largest off-grade-1 coefficient of L_F(e^i) over all generators.
inline double vector_leakage(const Multivector& f, const Table& t) {
  double leak = 0.0;
  for (int i = 0; i < t.dim(); ++i)
    leak = std::max(leak, off_grade_norm(adjoint_action(f, Multivector::generator(t.dim(), i), t), 1));
  return leak;
}

/// Even, real, FF* = e; for n >= 6 also L_F(grade 1) in grade 1. Debug builds
/// check the last condition for every n.
inline bool is_spin_member(const Multivector& f, const Table& t, double tol = kSpinTolerance) {
  if (f.dim() != t.dim()) return false;
  if (!is_even(f, tol) || !is_real(f, tol)) return false;
  const Multivector ff = clifford_mul(f, conjugate_star(f), t);
  if (max_abs_diff(ff, Multivector::scalar(f.dim(), 1.0)) >= tol) return false;
  bool check_vectors = t.dim() >= 6;
#ifndef NDEBUG
  check_vectors = true;
#endif
  if (check_vectors && vector_leakage(f, t) > tol * std::max(1.0, f.norm() * f.norm())) return false;
  return true;
}

/// A validated spin element together with the table of its metric.
class SpinElement {
 public:
  static SpinElement make(Multivector f, std::shared_ptr<const Table> t) {
    if (!t) throw ArgumentError("SpinElement: missing product table");
    if (!is_spin_member(f, *t)) throw ArgumentError("SpinElement: form is not in Spin(E)");
    for (Blade b = 0; b < f.size(); ++b) f[b] = Complex(f[b].real(), 0.0);
    return SpinElement(std::move(f), std::move(t));
  }

  const Multivector& form() const { return f_; }
  const Table& table() const { return *t_; }
  std::shared_ptr<const Table> table_ptr() const { return t_; }

  /// L_F(U) = F* U F.
  Multivector act(const Multivector& u) const { return adjoint_action(f_, u, *t_); }

  SpinElement operator*(const SpinElement& o) const {
    if (o.t_.get() != t_.get() && o.t_->dim() != t_->dim()) throw DimensionError("SpinElement: dimension mismatch");
    return SpinElement(clifford_mul(f_, o.f_, *t_), t_);
  }
  SpinElement operator-() const { return SpinElement(-f_, t_); }
  SpinElement inverse() const { return SpinElement(conjugate_star(f_), t_); }

 private:
  SpinElement(Multivector f, std::shared_ptr<const Table> t) : f_(std::move(f)), t_(std::move(t)) {}
  Multivector f_;
  std::shared_ptr<const Table> t_;
};

inline Multivector adjoint_action(const SpinElement& f, const Multivector& u) { return f.act(u); }

/// Matrix a with L_F(e^i) = a^i_j e^j (row i holds the image of e^i).
inline Matrix isometry_of(const SpinElement& f) {
  const Table& t = f.table();
  const int n = t.dim();
  Matrix a(n, n);
  for (int i = 0; i < n; ++i) {
    const Multivector img = f.act(Multivector::generator(n, i));
    if (off_grade_norm(img, 1) > 1e-8 * std::max(1.0, img.norm()))
      throw ConsistencyError("isometry_of: L_F(e^i) is not a 1-form");
    for (int j = 0; j < n; ++j) a(i, j) = img[Blade{1} << j].real();
  }
  return a;
}

struct NotSpinIsometry {
  std::string reason;
};

using FactorResult = std::variant<SpinElement, NotSpinIsometry>;

/// Recovers F (up to the sign fixed below) with F* e^i F = p^i_j e^j.
/// Multiplying by F on the left turns this into the linear system
/// e^i F - F (p^i_j e^j) = 0 on the even subalgebra.
inline FactorResult factor_isometry(const Matrix& p, std::shared_ptr<const Table> tp) {
  const Table& t = *tp;
  const int n = t.dim();
  if (n > 4) throw ArgumentError("factor_isometry: only n <= 4 is supported");
  Matrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = t.g(i, j);
  const Metric m = Metric::from_upper(g);
  if (!is_isometry(m, p)) throw ArgumentError("factor_isometry: matrix is not an isometry of the metric");

  std::vector<Blade> even;
  for (Blade b = 0; b < t.size(); ++b)
    if (grade_of(b) % 2 == 0) even.push_back(b);
  std::vector<Multivector> images(n);
  for (int i = 0; i < n; ++i) {
    images[i] = Multivector(n);
    for (int j = 0; j < n; ++j) images[i][Blade{1} << j] = p(i, j);
  }
  const auto rows = static_cast<Eigen::Index>(n) * static_cast<Eigen::Index>(t.size());
  Matrix sys(rows, static_cast<Eigen::Index>(even.size()));
  for (std::size_t c = 0; c < even.size(); ++c) {
    const Multivector basis = Multivector::blade(n, even[c]);
    for (int i = 0; i < n; ++i) {
      const Multivector r = clifford_mul(Multivector::generator(n, i), basis, t) - clifford_mul(basis, images[i], t);
      for (Blade b = 0; b < t.size(); ++b) sys(i * static_cast<Eigen::Index>(t.size()) + b, c) = r[b].real();
    }
  }
  Eigen::JacobiSVD<Matrix> svd(sys, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double scale = std::max(1.0, sv(0));
  const Eigen::Index last = sv.size() - 1;
  if (sv(last) > 1e-9 * scale) return NotSpinIsometry{"no even form intertwines the generators"};
  const Eigen::VectorXd x = svd.matrixV().col(last);

  Multivector f(n);
  for (std::size_t c = 0; c < even.size(); ++c) f[even[c]] = x(static_cast<Eigen::Index>(c));
  const Multivector ff = clifford_mul(f, conjugate_star(f), t);
  const double s = ff[0].real();
  if (off_grade_norm(ff, 0) > 1e-8 * std::abs(s) + 1e-12)
    return NotSpinIsometry{"F F* is not a scalar"};
  if (s <= 0) return NotSpinIsometry{"F F* is negative; the isometry is outside the identity component"};
  f *= 1.0 / std::sqrt(s);

  Blade big = 0;
  for (Blade b = 0; b < f.size(); ++b)
    if (std::abs(f[b].real()) > std::abs(f[big].real())) big = b;
  if (f[big].real() < 0) f = -f;

  for (int i = 0; i < n; ++i)
    if (max_abs_diff(adjoint_action(f, Multivector::generator(n, i), t), images[i]) > 1e-8 * std::max(1.0, p.cwiseAbs().maxCoeff()))
      return NotSpinIsometry{"recovered form does not reproduce the isometry"};
  return SpinElement::make(std::move(f), std::move(tp));
}

}  // namespace extalg

#endif  // EXTALG_SPIN_HPP
