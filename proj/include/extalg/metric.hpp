#ifndef EXTALG_METRIC_HPP
#define EXTALG_METRIC_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "extalg/error.hpp"
#include "extalg/scalar.hpp"

namespace extalg {

using Matrix = Eigen::MatrixXd;

/// Relative tolerance of the symmetry gate applied to user metrics.
inline constexpr double kSymmetryTolerance = 1e-9;
/// Scale-free singularity gate: |det| / (max |entry|)^n must exceed this.
inline constexpr double kDegeneracyThreshold = 1e-12;
/// Relative tolerance used by is_isometry.
inline constexpr double kIsometryTolerance = 1e-9;

// -- generic dense helpers ---------------------------------------------------
//
// Row-major square matrices over any field-like scalar (double, jets). Pivoting
// looks at detail::pivot_size so jets pivot on their values.

namespace detail {

/// Pivot size: the magnitude of the value for jets, of the number otherwise.
template <class R>
double pivot_size(const R& x) {
  if constexpr (requires { x.order(); }) return magnitude(x.value());
  else return magnitude(x);
}

}  // namespace detail

template <class R>
R generic_determinant(std::vector<R> a, int n) {
  R det(1.0);
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (detail::pivot_size(a[r * n + col]) > detail::pivot_size(a[piv * n + col])) piv = r;
    if (detail::pivot_size(a[piv * n + col]) == 0.0) return R(0.0);
    if (piv != col) {
      for (int c = 0; c < n; ++c) std::swap(a[piv * n + c], a[col * n + c]);
      det = -det;
    }
    det = det * a[col * n + col];
    const R inv = R(1.0) / a[col * n + col];
    for (int r = col + 1; r < n; ++r) {
      const R f = a[r * n + col] * inv;
      if (is_exact_zero(f)) continue;
      for (int c = col; c < n; ++c) a[r * n + c] = a[r * n + c] - f * a[col * n + c];
    }
  }
  return det;
}

/// Gauss-Jordan inverse; throws ConstructionError when a pivot vanishes.
template <class R>
std::vector<R> generic_inverse(std::vector<R> a, int n) {
  std::vector<R> inv(static_cast<std::size_t>(n) * n, R(0.0));
  for (int i = 0; i < n; ++i) inv[i * n + i] = R(1.0);
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (detail::pivot_size(a[r * n + col]) > detail::pivot_size(a[piv * n + col])) piv = r;
    if (detail::pivot_size(a[piv * n + col]) == 0.0) throw ConstructionError("singular matrix");
    if (piv != col)
      for (int c = 0; c < n; ++c) {
        std::swap(a[piv * n + c], a[col * n + c]);
        std::swap(inv[piv * n + c], inv[col * n + c]);
      }
    const R p = R(1.0) / a[col * n + col];
    for (int c = 0; c < n; ++c) {
      a[col * n + c] = a[col * n + c] * p;
      inv[col * n + c] = inv[col * n + c] * p;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const R f = a[r * n + col];
      if (is_exact_zero(f)) continue;
      for (int c = 0; c < n; ++c) {
        a[r * n + c] = a[r * n + c] - f * a[col * n + c];
        inv[r * n + c] = inv[r * n + c] - f * inv[col * n + c];
      }
    }
  }
  return inv;
}

inline std::vector<double> to_row_major(const Matrix& m) {
  std::vector<double> v(static_cast<std::size_t>(m.rows() * m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) v[i * m.cols() + j] = m(i, j);
  return v;
}

// -- Metric ------------------------------------------------------------------

/// Which index position the matrix handed to Metric::make carries.
enum class Components { Upper, Lower };

/// A symmetric nondegenerate metric with both index positions and the
/// determinant data of the covariant matrix. Immutable after construction.
///
/// Indices are 0-based in the C++ API: generator e^{i+1} is index i.
class Metric {
 public:
  /// Validates symmetry (relative 1e-9), symmetrises exactly, checks the
  /// scale-free degeneracy gate and derives the other index position.
  static Metric make(const Matrix& g, Components which = Components::Upper) {
    if (g.rows() != g.cols()) throw ConstructionError("metric matrix is not square");
    if (g.rows() < 1) throw ConstructionError("metric dimension must be at least 1");
    if (!g.allFinite()) throw ConstructionError("metric has non-finite entries");
    const double scale = g.cwiseAbs().maxCoeff();
    if (scale == 0.0) throw ConstructionError("metric is singular (all entries zero)");
    const double asym = (g - g.transpose()).cwiseAbs().maxCoeff();
    if (asym > kSymmetryTolerance * scale) throw ConstructionError("metric is not symmetric");
    const Matrix sym = 0.5 * (g + g.transpose());
    const int n = static_cast<int>(g.rows());
    const double det = generic_determinant(to_row_major(sym), n);
    if (!(std::abs(det) / std::pow(scale, n) > kDegeneracyThreshold))
      throw ConstructionError("metric is degenerate (determinant below threshold)");
    Matrix other = sym.inverse();
    other = 0.5 * (other + other.transpose());
    Metric m;
    m.n_ = n;
    if (which == Components::Upper) {
      m.upper_ = sym;
      m.lower_ = other;
      m.det_lower_ = 1.0 / det;
    } else {
      m.upper_ = other;
      m.lower_ = sym;
      m.det_lower_ = det;
    }
    return m;
  }

  static Metric from_upper(const Matrix& g) { return make(g, Components::Upper); }
  static Metric from_lower(const Matrix& g) { return make(g, Components::Lower); }

  /// diag(d_1, ..., d_n) as contravariant components (equal to covariant up to inversion).
  static Metric diagonal(std::span<const double> d) {
    Matrix g = Matrix::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i) g(i, i) = d[i];
    return from_upper(g);
  }
  static Metric diagonal(std::initializer_list<double> d) {
    return diagonal(std::span<const double>(d.begin(), d.size()));
  }

  int dim() const { return n_; }
  const Matrix& upper() const { return upper_; }
  const Matrix& lower() const { return lower_; }
  double upper(int i, int j) const { return upper_(i, j); }
  double lower(int i, int j) const { return lower_(i, j); }
  double det_lower() const { return det_lower_; }
  int sign() const { return det_lower_ > 0 ? 1 : -1; }
  double abs_det() const { return std::abs(det_lower_); }

 private:
  Metric() = default;

  int n_ = 0;
  Matrix upper_;
  Matrix lower_;
  double det_lower_ = 1.0;
};

namespace detail {

inline void check_index_list(std::span<const int> idx, int n, const char* what) {
  for (std::size_t p = 0; p < idx.size(); ++p) {
    if (idx[p] < 0 || idx[p] >= n) throw ArgumentError(std::string(what) + " index out of range");
    if (p > 0 && idx[p] <= idx[p - 1])
      throw ArgumentError(std::string(what) + " indices must be strictly increasing");
  }
}

}  // namespace detail

/// Determinant of the submatrix of g^{ij} at the given (strictly increasing,
/// 0-based) rows and columns.
inline double minor(const Metric& m, std::span<const int> rows, std::span<const int> cols) {
  if (rows.size() != cols.size()) throw ArgumentError("minor: row and column lists differ in length");
  detail::check_index_list(rows, m.dim(), "minor: row");
  detail::check_index_list(cols, m.dim(), "minor: column");
  const int k = static_cast<int>(rows.size());
  if (k == 0) return 1.0;
  std::vector<double> sub(static_cast<std::size_t>(k) * k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) sub[a * k + b] = m.upper(rows[a], cols[b]);
  return generic_determinant(std::move(sub), k);
}

inline double minor(const Metric& m, std::initializer_list<int> rows, std::initializer_list<int> cols) {
  return minor(m, std::span<const int>(rows.begin(), rows.size()), std::span<const int>(cols.begin(), cols.size()));
}

/// True when the linear change e~^i = p^i_j e^j preserves the metric:
/// p g^{..} p^T equals g^{..} within a relative 1e-9.
inline bool is_isometry(const Metric& m, const Matrix& p) {
  if (p.rows() != m.dim() || p.cols() != m.dim()) throw ArgumentError("is_isometry: wrong matrix shape");
  Eigen::FullPivLU<Matrix> lu(p);
  if (!lu.isInvertible()) throw ArgumentError("is_isometry: transformation is singular");
  const Matrix moved = p * m.upper() * p.transpose();
  const double scale = std::max(1.0, m.upper().cwiseAbs().maxCoeff());
  return (moved - m.upper()).cwiseAbs().maxCoeff() <= kIsometryTolerance * scale;
}

}  // namespace extalg

#endif  // EXTALG_METRIC_HPP
