#ifndef EXTALG_MANIFOLD_HPP
#define EXTALG_MANIFOLD_HPP

#include <algorithm>
#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "extalg/error.hpp"
#include "extalg/expr.hpp"
#include "extalg/hodge.hpp"
#include "extalg/jet.hpp"
#include "extalg/metric.hpp"
#include "extalg/multivector.hpp"
#include "extalg/product_table.hpp"

namespace extalg {

/// Multivector whose coefficients are second-order jets at a point.
using JetForm = BasicMultivector<ComplexJet>;
/// Product table whose metric entries are jets g^{ij}(x) at a point.
using JetTable = ProductTable<RealJet>;

// -- smooth coefficient functions ---------------------------------------------

/// An expression together with its symbolic first and second partials,
/// differentiated once and evaluated into jets on demand.
class SmoothFunction {
 public:
  SmoothFunction(Expr f, int dim) : dim_(dim), f_(std::move(f)) {
    if (dim < 1 || dim > kMaxJetDim) throw ArgumentError("SmoothFunction: dimension out of range");
    if (max_var(f_) >= dim) throw ArgumentError("SmoothFunction: expression uses a coordinate beyond the dimension");
    grad_.reserve(dim);
    for (int i = 0; i < dim; ++i) grad_.push_back(diff(f_, i));
    hess_.assign(static_cast<std::size_t>(dim) * dim, Expr());
    for (int i = 0; i < dim; ++i)
      for (int k = i; k < dim; ++k) hess_[i * dim + k] = hess_[k * dim + i] = diff(grad_[i], k);
  }

  int dim() const { return dim_; }
  const Expr& expr() const { return f_; }
  const Expr& derivative(int i) const { return grad_[i]; }
  bool is_zero() const { return f_.is_const(0.0); }

  double value(std::span<const double> p) const { return eval(f_, p); }

  RealJet jet(std::span<const double> p) const {
    if (f_.is_const()) return RealJet::constant(dim_, f_.value());
    double g[kMaxJetDim];
    double h[kMaxJetDim * kMaxJetDim];
    for (int i = 0; i < dim_; ++i) g[i] = eval(grad_[i], p);
    for (int i = 0; i < dim_ * dim_; ++i) h[i] = eval(hess_[i], p);
    return RealJet::seed(dim_, eval(f_, p), std::span<const double>(g, dim_),
                         std::span<const double>(h, static_cast<std::size_t>(dim_) * dim_));
  }

 private:
  int dim_;
  Expr f_;
  std::vector<Expr> grad_;
  std::vector<Expr> hess_;
};

// -- charts -------------------------------------------------------------------

struct Interval {
  double lo;
  double hi;
};

/// Coordinate box with covariant metric components g_ij(x) given as expressions.
class Chart {
 public:
  /// `g_lower` is row-major n x n. The metric is validated at the centre and
  /// the corners of the box.
  static Chart make(int n, std::vector<Expr> g_lower, std::vector<Interval> domain) {
    if (n < 1 || n > kMaxJetDim) throw ArgumentError("Chart: dimension must be between 1 and 4");
    if (g_lower.size() != static_cast<std::size_t>(n) * n) throw ArgumentError("Chart: metric has wrong size");
    if (domain.size() != static_cast<std::size_t>(n)) throw ArgumentError("Chart: domain has wrong size");
    for (const auto& iv : domain)
      if (!(iv.lo < iv.hi)) throw ArgumentError("Chart: empty domain interval");
    Chart c;
    c.n_ = n;
    c.domain_ = std::move(domain);
    auto fns = std::make_shared<std::vector<SmoothFunction>>();
    fns->reserve(g_lower.size());
    for (auto& e : g_lower) fns->emplace_back(std::move(e), n);
    c.g_ = std::move(fns);
    c.validate();
    return c;
  }

  int dim() const { return n_; }
  const Expr& g_lower(int i, int j) const { return (*g_)[i * n_ + j].expr(); }
  const SmoothFunction& g_function(int i, int j) const { return (*g_)[i * n_ + j]; }
  const std::vector<Interval>& domain() const { return domain_; }

  bool contains(std::span<const double> p) const {
    if (p.size() != static_cast<std::size_t>(n_)) return false;
    for (int i = 0; i < n_; ++i)
      if (p[i] < domain_[i].lo || p[i] > domain_[i].hi) return false;
    return true;
  }

  std::vector<double> center() const {
    std::vector<double> p(n_);
    for (int i = 0; i < n_; ++i) p[i] = 0.5 * (domain_[i].lo + domain_[i].hi);
    return p;
  }

  Matrix g_lower_at(std::span<const double> p) const {
    Matrix g(n_, n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) g(i, j) = eval(g_lower(i, j), p);
    return g;
  }

 private:
  void validate() const {
    std::vector<std::vector<double>> samples{center()};
    for (unsigned corner = 0; corner < (1u << n_); ++corner) {
      std::vector<double> p(n_);
      for (int i = 0; i < n_; ++i) p[i] = (corner >> i) & 1u ? domain_[i].hi : domain_[i].lo;
      samples.push_back(std::move(p));
    }
    for (const auto& p : samples) {
      try {
        (void)Metric::from_lower(g_lower_at(p));
      } catch (const DomainError& e) {
        throw ConstructionError(std::string("Chart: metric not evaluable on the domain: ") + e.what());
      } catch (const ConstructionError& e) {
        throw ConstructionError(std::string("Chart: invalid metric on the domain: ") + e.what());
      }
    }
  }

  int n_ = 0;
  std::shared_ptr<const std::vector<SmoothFunction>> g_;
  std::vector<Interval> domain_;
};

// -- form fields --------------------------------------------------------------

/// Multivector-valued field: Grassmann-basis coefficients as complex pairs
/// (re, im) of expressions.
class FormField {
 public:
  struct Entry {
    Blade blade;
    std::shared_ptr<const SmoothFunction> re;
    std::shared_ptr<const SmoothFunction> im;
  };

  FormField() = default;
  explicit FormField(int dim) : dim_(dim) {
    if (dim < 1 || dim > kMaxJetDim) throw ArgumentError("FormField: dimension out of range");
  }

  static FormField constant(const Multivector& u) {
    FormField f(u.dim());
    for (Blade b = 0; b < u.size(); ++b)
      if (u[b] != Complex{}) f.add(b, u[b].real(), u[b].imag());
    return f;
  }

  static FormField scalar(int dim, Expr re, Expr im = Expr()) {
    FormField f(dim);
    f.add(0, std::move(re), std::move(im));
    return f;
  }

  /// Adds re + i im to the coefficient of `blade`.
  FormField& add(Blade blade, Expr re, Expr im = Expr()) {
    if (blade >= (Blade{1} << dim_)) throw ArgumentError("FormField: blade outside the dimension");
    for (auto& e : entries_)
      if (e.blade == blade) {
        re = e.re->expr() + re;
        im = e.im->expr() + im;
        e.re = std::make_shared<const SmoothFunction>(std::move(re), dim_);
        e.im = std::make_shared<const SmoothFunction>(std::move(im), dim_);
        return *this;
      }
    entries_.push_back({blade, std::make_shared<const SmoothFunction>(std::move(re), dim_),
                        std::make_shared<const SmoothFunction>(std::move(im), dim_)});
    std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) { return a.blade < b.blade; });
    return *this;
  }

  int dim() const { return dim_; }
  const std::vector<Entry>& entries() const { return entries_; }

  JetForm jet(std::span<const double> p) const {
    check_point(p);
    JetForm r(dim_);
    for (const auto& e : entries_) {
      const RealJet re = e.re->jet(p);
      r[e.blade] = e.im->is_zero() ? re.cast<Complex>() : make_complex(re, e.im->jet(p));
    }
    return r;
  }

  Multivector value(std::span<const double> p) const {
    check_point(p);
    Multivector r(dim_);
    for (const auto& e : entries_) r[e.blade] = Complex(e.re->value(p), e.im->value(p));
    return r;
  }

  /// Every blade carrying a not-identically-zero coefficient has grade k.
  bool has_grade(int k) const {
    for (const auto& e : entries_)
      if (grade_of(e.blade) != k && !(e.re->is_zero() && e.im->is_zero())) return false;
    return true;
  }
  bool imaginary_part_is_zero() const {
    return std::all_of(entries_.begin(), entries_.end(), [](const Entry& e) { return e.im->is_zero(); });
  }
  bool real_part_is_zero() const {
    return std::all_of(entries_.begin(), entries_.end(), [](const Entry& e) { return e.re->is_zero(); });
  }

 private:
  void check_point(std::span<const double> p) const {
    if (p.size() != static_cast<std::size_t>(dim_)) throw DimensionError("FormField: point has wrong dimension");
  }

  int dim_ = 1;
  std::vector<Entry> entries_;
};

inline FormField operator+(const FormField& a, const FormField& b) {
  if (a.dim() != b.dim()) throw DimensionError("FormField: dimension mismatch");
  FormField r = a;
  for (const auto& e : b.entries()) r.add(e.blade, e.re->expr(), e.im->expr());
  return r;
}

/// Multiplies every coefficient by the real expression s.
inline FormField scale(const FormField& a, const Expr& s) {
  FormField r(a.dim());
  for (const auto& e : a.entries()) r.add(e.blade, e.re->expr() * s, e.im->expr() * s);
  return r;
}

// -- pointwise geometry -------------------------------------------------------

/// Metric jets, Christoffel symbols and product tables at one point.
struct PointGeometry {
  int n;
  std::vector<double> point;
  Metric metric;
  std::vector<RealJet> g_lower;  // order 2
  std::vector<RealJet> g_upper;  // order 2
  RealJet sqrt_abs_det;          // sqrt|det g_ij|, order 2
  std::shared_ptr<const JetTable> table;
  std::shared_ptr<const Table> value_table;
  std::vector<RealJet> gamma;  // Gamma^k_{ij} at (k n + i) n + j, order 1

  const RealJet& christoffel(int k, int i, int j) const { return gamma[(k * n + i) * n + j]; }
  const RealJet& upper(int i, int j) const { return g_upper[i * n + j]; }
  const RealJet& lower(int i, int j) const { return g_lower[i * n + j]; }
};

/// Builds the geometry at p; Gamma^k_{ij} = 1/2 g^{kl}(d_i g_lj + d_j g_il - d_l g_ij).
inline PointGeometry geometry_at(const Chart& c, std::span<const double> p) {
  const int n = c.dim();
  if (!c.contains(p)) throw ArgumentError("geometry_at: point outside the chart domain");
  Matrix values = c.g_lower_at(p);
  Metric metric = [&] {
    try {
      return Metric::from_lower(values);
    } catch (const ConstructionError& e) {
      throw NumericError(std::string("geometry_at: singular metric at point: ") + e.what());
    }
  }();
  std::vector<RealJet> lower;
  lower.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) lower.push_back(c.g_function(i, j).jet(p));
  std::vector<RealJet> upper = generic_inverse(lower, n);
  const RealJet det = generic_determinant(lower, n);
  const RealJet root = sqrt(abs(det));

  std::vector<RealJet> dg(static_cast<std::size_t>(n) * n * n);  // d_l g_ij at (l n + i) n + j
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) dg[(l * n + i) * n + j] = lower[i * n + j].partial(l);
  auto d = [&](int l, int i, int j) -> const RealJet& { return dg[(l * n + i) * n + j]; };
  std::vector<RealJet> gamma(static_cast<std::size_t>(n) * n * n, RealJet::constant(n, 0.0).with_order(1));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        RealJet s = RealJet::constant(n, 0.0).with_order(1);
        for (int l = 0; l < n; ++l) s += upper[k * n + l] * (d(i, l, j) + d(j, i, l) - d(l, i, j));
        s *= 0.5;
        gamma[(k * n + i) * n + j] = s;
        gamma[(k * n + j) * n + i] = s;
      }
  auto jt = std::make_shared<const JetTable>(JetTable::build(n, upper));
  auto vt = std::make_shared<const Table>(build_product_table(metric));
  return PointGeometry{n,     std::vector<double>(p.begin(), p.end()),
                       std::move(metric), std::move(lower),
                       std::move(upper),  root,
                       std::move(jt),     std::move(vt),
                       std::move(gamma)};
}

inline PointGeometry geometry_at(const Chart& c, std::initializer_list<double> p) {
  return geometry_at(c, std::span<const double>(p.begin(), p.size()));
}

/// Christoffel symbols Gamma^k_{ij} at p, layout (k n + i) n + j.
inline std::vector<double> christoffel(const Chart& c, std::span<const double> p) {
  const PointGeometry g = geometry_at(c, p);
  std::vector<double> out;
  out.reserve(g.gamma.size());
  for (const auto& x : g.gamma) out.push_back(x.value());
  return out;
}

// -- jet-form helpers -----------------------------------------------------------

inline JetForm to_jet_form(const Multivector& u) {
  JetForm r(u.dim());
  for (Blade b = 0; b < u.size(); ++b)
    if (u[b] != Complex{}) r[b] = ComplexJet::constant(u.dim(), u[b]);
  return r;
}

inline Multivector value_of(const JetForm& u) {
  Multivector r(u.dim());
  for (Blade b = 0; b < u.size(); ++b) r[b] = u[b].value();
  return r;
}

/// Coefficientwise partial derivative d_k.
inline JetForm partial(const JetForm& u, int k) {
  JetForm r(u.dim());
  for (Blade b = 0; b < u.size(); ++b)
    if (!is_exact_zero(u[b])) r[b] = u[b].partial(k);
  return r;
}

/// Generator dx^k as a constant jet form.
inline JetForm jet_generator(int n, int k) { return to_jet_form(Multivector::generator(n, k)); }

// -- Clifford differentiation ----------------------------------------------------

/// Upsilon_k U: partials of the coefficients plus Upsilon_k dx^i = -Gamma^i_{kj} dx^j
/// extended as a derivation of the exterior product.
inline JetForm upsilon(const PointGeometry& g, const JetForm& u, int k) {
  const int n = g.n;
  if (u.dim() != n) throw DimensionError("upsilon: dimension mismatch");
  JetForm r(n);
  for (Blade b = 0; b < u.size(); ++b) {
    if (is_exact_zero(u[b])) continue;
    r[b] = r[b] + u[b].partial(k);
    int pos = 0;
    for (int ip = 0; ip < n; ++ip) {
      if (!(b & (Blade{1} << ip))) continue;
      const Blade rest = b & ~(Blade{1} << ip);
      for (int j = 0; j < n; ++j) {
        if (rest & (Blade{1} << j)) continue;
        const RealJet& c = g.christoffel(ip, k, j);
        if (is_exact_zero(c)) continue;
        const Blade jb = Blade{1} << j;
        const int sign = (pos % 2 == 0 ? 1 : -1) * reorder_sign(jb, rest);
        const ComplexJet t = c * u[b];
        r[rest | jb] = sign > 0 ? r[rest | jb] - t : r[rest | jb] + t;
      }
      ++pos;
    }
  }
  return r;
}

/// dU = dx^k ^ Upsilon_k U.
inline JetForm d_op(const PointGeometry& g, const JetForm& u) {
  JetForm r(g.n);
  for (int k = 0; k < g.n; ++k) r += wedge(jet_generator(g.n, k), upsilon(g, u, k));
  return r;
}

/// Upsilon U = dx^k Upsilon_k U (Clifford product).
inline JetForm upsilon_op(const PointGeometry& g, const JetForm& u) {
  JetForm r(g.n);
  for (int k = 0; k < g.n; ++k) r += clifford_mul(jet_generator(g.n, k), upsilon(g, u, k), *g.table);
  return r;
}

/// delta = d - Upsilon.
inline JetForm delta_op(const PointGeometry& g, const JetForm& u) { return d_op(g, u) - upsilon_op(g, u); }

/// Beltrami-Laplace operator Upsilon^2.
inline JetForm laplace(const PointGeometry& g, const JetForm& u) { return upsilon_op(g, upsilon_op(g, u)); }

/// (Upsilon_i Upsilon_j - Upsilon_j Upsilon_i) U.
inline JetForm upsilon_commutator(const PointGeometry& g, const JetForm& u, int i, int j) {
  return upsilon(g, upsilon(g, u, j), i) - upsilon(g, upsilon(g, u, i), j);
}

// Pointwise values for fields given by expressions.

inline Multivector upsilon_k(const Chart& c, const FormField& u, int k, std::span<const double> p) {
  return value_of(upsilon(geometry_at(c, p), u.jet(p), k));
}
inline Multivector d_op(const Chart& c, const FormField& u, std::span<const double> p) {
  return value_of(d_op(geometry_at(c, p), u.jet(p)));
}
inline Multivector delta_op(const Chart& c, const FormField& u, std::span<const double> p) {
  return value_of(delta_op(geometry_at(c, p), u.jet(p)));
}
inline Multivector upsilon_op(const Chart& c, const FormField& u, std::span<const double> p) {
  return value_of(upsilon_op(geometry_at(c, p), u.jet(p)));
}
inline Multivector laplace(const Chart& c, const FormField& u, std::span<const double> p) {
  return value_of(laplace(geometry_at(c, p), u.jet(p)));
}

/// Scalar Beltrami-Laplace from the divergence formula (1/sqrt g) d_i(sqrt g g^{ij} d_j phi).
inline Complex scalar_laplace_formula(const PointGeometry& g, const ComplexJet& phi) {
  const int n = g.n;
  Complex s{};
  for (int i = 0; i < n; ++i) {
    ComplexJet flux = ComplexJet::constant(n, 0.0).with_order(1);
    for (int j = 0; j < n; ++j) flux += (g.sqrt_abs_det * g.upper(i, j)) * phi.partial(j);
    s += flux.partial(i).value();
  }
  return s / g.sqrt_abs_det.value();
}

// -- curvature ---------------------------------------------------------------------

/// Curvature data at a point. R^k_{ij,r} = -d_i Gamma^k_{jr} + d_j Gamma^k_{ir}
/// - Gamma^k_{si} Gamma^s_{jr} + Gamma^k_{sj} Gamma^s_{ir}; R_{ij,rl} = g_{kl} R^k_{ij,r};
/// D_{rl} = 1/2 R_{ij,rl} dx^i ^ dx^j.
struct CurvatureData {
  int n;
  std::vector<double> point;
  std::vector<double> gamma;    // (k n + i) n + j
  std::vector<double> r_mixed;  // ((k n + i) n + j) n + r
  std::vector<double> r_lower;  // ((i n + j) n + r) n + l
  std::vector<Multivector> d_forms;  // r n + l

  double Gamma(int k, int i, int j) const { return gamma[(k * n + i) * n + j]; }
  double R(int k, int i, int j, int r) const { return r_mixed[((k * n + i) * n + j) * n + r]; }
  double R_lower(int i, int j, int r, int l) const { return r_lower[((i * n + j) * n + r) * n + l]; }
  const Multivector& D(int r, int l) const { return d_forms[r * n + l]; }
};

inline CurvatureData curvature(const PointGeometry& g) {
  const int n = g.n;
  CurvatureData cd{n, g.point, {}, {}, {}, {}};
  for (const auto& x : g.gamma) cd.gamma.push_back(x.value());
  auto G = [&](int k, int i, int j) { return g.christoffel(k, i, j).value(); };
  auto dG = [&](int l, int k, int i, int j) { return g.christoffel(k, i, j).d(l); };
  cd.r_mixed.assign(static_cast<std::size_t>(n) * n * n * n, 0.0);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int r = 0; r < n; ++r) {
          double v = -dG(i, k, j, r) + dG(j, k, i, r);
          for (int s = 0; s < n; ++s) v += -G(k, s, i) * G(s, j, r) + G(k, s, j) * G(s, i, r);
          cd.r_mixed[((k * n + i) * n + j) * n + r] = v;
        }
  cd.r_lower.assign(cd.r_mixed.size(), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int r = 0; r < n; ++r)
        for (int l = 0; l < n; ++l) {
          double v = 0.0;
          for (int k = 0; k < n; ++k) v += g.lower(k, l).value() * cd.R(k, i, j, r);
          cd.r_lower[((i * n + j) * n + r) * n + l] = v;
        }
  for (int r = 0; r < n; ++r)
    for (int l = 0; l < n; ++l) {
      Multivector d(n);
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) d[(Blade{1} << i) | (Blade{1} << j)] = cd.R_lower(i, j, r, l);
      cd.d_forms.push_back(std::move(d));
    }
  return cd;
}

inline CurvatureData curvature(const Chart& c, std::span<const double> p) { return curvature(geometry_at(c, p)); }

// -- tensor fields and covariant differentiation ------------------------------------

/// Real tensor field with expression components; `upper[s]` tells whether slot s
/// is contravariant. Components are row-major over the slots.
struct TensorField {
  int dim;
  std::vector<bool> upper;
  std::vector<Expr> components;

  std::size_t rank() const { return upper.size(); }
};

/// nabla_k T at p, layout: derivative index k first, then the slots of T.
inline std::vector<double> nabla(const Chart& c, const TensorField& t, std::span<const double> p) {
  const int n = c.dim();
  if (t.dim != n) throw DimensionError("nabla: tensor dimension differs from the chart");
  std::size_t count = 1;
  for (std::size_t s = 0; s < t.rank(); ++s) count *= static_cast<std::size_t>(n);
  if (t.components.size() != count) throw ArgumentError("nabla: component count does not match the slot signature");
  const PointGeometry g = geometry_at(c, p);
  std::vector<double> value(count);
  std::vector<std::vector<double>> grad(count, std::vector<double>(n));
  for (std::size_t a = 0; a < count; ++a) {
    value[a] = eval(t.components[a], p);
    for (int k = 0; k < n; ++k) grad[a][k] = eval(diff(t.components[a], k), p);
  }
  const int rank = static_cast<int>(t.rank());
  std::vector<std::size_t> stride(rank, 1);
  for (int s = rank - 2; s >= 0; --s) stride[s] = stride[s + 1] * n;
  std::vector<double> out(count * n);
  for (int k = 0; k < n; ++k)
    for (std::size_t a = 0; a < count; ++a) {
      double v = grad[a][k];
      for (int s = 0; s < rank; ++s) {
        const int idx = static_cast<int>((a / stride[s]) % n);
        for (int m = 0; m < n; ++m) {
          const std::size_t b = a + (static_cast<std::ptrdiff_t>(m) - idx) * static_cast<std::ptrdiff_t>(stride[s]);
          if (t.upper[s]) v += g.christoffel(idx, k, m).value() * value[b];
          else v -= g.christoffel(m, k, idx).value() * value[b];
        }
      }
      out[k * count + a] = v;
    }
  return out;
}

// -- coordinate changes ---------------------------------------------------------------

/// Old coordinates as expressions x^i(x~) of the new ones; q^i_a = dx^i/dx~^a.
class CoordinateChange {
 public:
  static CoordinateChange make(std::vector<Expr> x_of_new) {
    const int n = static_cast<int>(x_of_new.size());
    if (n < 1 || n > kMaxJetDim) throw ArgumentError("CoordinateChange: dimension out of range");
    CoordinateChange c;
    c.n_ = n;
    for (const auto& e : x_of_new)
      if (max_var(e) >= n) throw ArgumentError("CoordinateChange: expression uses a coordinate beyond the dimension");
    c.x_ = std::move(x_of_new);
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < n; ++a) c.q_.push_back(diff(c.x_[i], a));
    return c;
  }

  /// Linear change x^i = q^i_a x~^a.
  static CoordinateChange linear(const Matrix& q) {
    std::vector<Expr> xs;
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
      Expr e;
      for (Eigen::Index a = 0; a < q.cols(); ++a) e = e + Expr(q(i, a)) * Expr::var(static_cast<int>(a));
      xs.push_back(e);
    }
    return make(std::move(xs));
  }

  int dim() const { return n_; }
  const Expr& x(int i) const { return x_[i]; }
  const Expr& jacobian(int i, int a) const { return q_[i * n_ + a]; }
  std::span<const Expr> old_coordinates() const { return x_; }

  std::vector<double> map_point(std::span<const double> p_new) const {
    std::vector<double> p(n_);
    for (int i = 0; i < n_; ++i) p[i] = eval(x_[i], p_new);
    return p;
  }
  Matrix jacobian_at(std::span<const double> p_new) const {
    Matrix q(n_, n_);
    for (int i = 0; i < n_; ++i)
      for (int a = 0; a < n_; ++a) q(i, a) = eval(q_[i * n_ + a], p_new);
    return q;
  }

 private:
  int n_ = 0;
  std::vector<Expr> x_;
  std::vector<Expr> q_;
};

namespace detail {

/// Determinant of a small expression matrix by Laplace expansion along the first row.
inline Expr expr_det(const std::vector<Expr>& m, int k) {
  if (k == 0) return 1.0;
  if (k == 1) return m[0];
  Expr s;
  for (int c = 0; c < k; ++c) {
    if (m[c].is_const(0.0)) continue;
    std::vector<Expr> sub;
    for (int r = 1; r < k; ++r)
      for (int cc = 0; cc < k; ++cc)
        if (cc != c) sub.push_back(m[r * k + cc]);
    const Expr term = m[c] * expr_det(sub, k - 1);
    s = c % 2 == 0 ? s + term : s - term;
  }
  return s;
}

}  // namespace detail

/// Chart in the new coordinates: g~_ab = q^i_a q^j_b g_ij(x(x~)).
inline Chart transform_chart(const Chart& c, const CoordinateChange& ch, std::vector<Interval> new_domain) {
  const int n = c.dim();
  if (ch.dim() != n) throw DimensionError("transform_chart: dimension mismatch");
  std::vector<Expr> g(static_cast<std::size_t>(n) * n);
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      Expr s;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          if (ch.jacobian(i, a).is_const(0.0) || ch.jacobian(j, b).is_const(0.0)) continue;
          s = s + ch.jacobian(i, a) * ch.jacobian(j, b) * substitute(c.g_lower(i, j), ch.old_coordinates());
        }
      g[a * n + b] = s;
      g[b * n + a] = s;
    }
  return Chart::make(n, std::move(g), std::move(new_domain));
}

/// Form in the new coordinates: dx^i = q^i_a dx~^a applied blade by blade
/// (coefficients are Jacobian minors), with coefficients composed with x(x~).
inline FormField pullback(const FormField& u, const CoordinateChange& ch) {
  const int n = u.dim();
  if (ch.dim() != n) throw DimensionError("pullback: dimension mismatch");
  FormField r(n);
  for (const auto& e : u.entries()) {
    const auto rows = blade_indices(e.blade);
    const int k = static_cast<int>(rows.size());
    const Expr re = substitute(e.re->expr(), ch.old_coordinates());
    const Expr im = substitute(e.im->expr(), ch.old_coordinates());
    for (Blade target : blades_of_grade(n, k)) {
      const auto cols = blade_indices(target);
      std::vector<Expr> sub;
      for (int a : rows)
        for (int b : cols) sub.push_back(ch.jacobian(a, b));
      const Expr m = detail::expr_det(sub, k);
      if (m.is_const(0.0)) continue;
      r.add(target, re * m, im * m);
    }
  }
  return r;
}

/// Numeric counterpart of pullback on a single multivector: dx^i -> q(i, a) dx~^a.
inline Multivector outermorphism(const Multivector& u, const Matrix& q) {
  const int n = u.dim();
  if (q.rows() != n || q.cols() != n) throw DimensionError("outermorphism: matrix shape mismatch");
  Multivector r(n);
  for (Blade b = 0; b < u.size(); ++b) {
    if (u[b] == Complex{}) continue;
    const auto rows = blade_indices(b);
    const int k = static_cast<int>(rows.size());
    for (Blade target : blades_of_grade(n, k)) {
      const auto cols = blade_indices(target);
      std::vector<double> sub;
      for (int a : rows)
        for (int c : cols) sub.push_back(q(a, c));
      r[target] += generic_determinant(std::move(sub), k) * u[b];
    }
  }
  return r;
}

}  // namespace extalg

#endif  // EXTALG_MANIFOLD_HPP
