#ifndef EXTALG_FIELD_MODEL_HPP
#define EXTALG_FIELD_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "extalg/error.hpp"
#include "extalg/hodge.hpp"
#include "extalg/jet.hpp"
#include "extalg/manifold.hpp"
#include "extalg/spin.hpp"

namespace extalg {

inline constexpr Complex kI{0.0, 1.0};

/// Tolerance on the H-equation defects below which H counts as a solution.
inline constexpr double kHDefectTolerance = 1e-8;

/// The fields of the model on a chart: Psi (complex, mixed grade), a_k
/// (imaginary scalars), B_k (real 2-forms), H (real 1-form) and the mass m.
struct FieldConfig {
  Chart chart;
  FormField psi;
  std::vector<FormField> a;
  std::vector<FormField> b;
  FormField h;
  double m = 0.0;

  static FieldConfig make(Chart chart, FormField psi, std::vector<FormField> a, std::vector<FormField> b, FormField h,
                          double m) {
    const int n = chart.dim();
    auto dim_ok = [n](const FormField& f) { return f.dim() == n; };
    if (!dim_ok(psi) || !dim_ok(h)) throw DimensionError("FieldConfig: field dimension differs from the chart");
    if (a.size() != static_cast<std::size_t>(n) || b.size() != static_cast<std::size_t>(n))
      throw ArgumentError("FieldConfig: a and B need one component per coordinate");
    for (const auto& ak : a) {
      if (!dim_ok(ak)) throw DimensionError("FieldConfig: a_k dimension differs from the chart");
      if (!ak.has_grade(0) || !ak.real_part_is_zero()) throw ArgumentError("FieldConfig: a_k must be imaginary scalars");
    }
    for (const auto& bk : b) {
      if (!dim_ok(bk)) throw DimensionError("FieldConfig: B_k dimension differs from the chart");
      if (!bk.has_grade(2) || !bk.imaginary_part_is_zero()) throw ArgumentError("FieldConfig: B_k must be real 2-forms");
    }
    if (!h.has_grade(1) || !h.imaginary_part_is_zero()) throw ArgumentError("FieldConfig: H must be a real 1-form");
    if (!std::isfinite(m)) throw ArgumentError("FieldConfig: mass is not finite");
    return FieldConfig{std::move(chart), std::move(psi), std::move(a), std::move(b), std::move(h), m};
  }
};

/// Jets of all fields and of the geometry at one point. Gauge and chart
/// transformations act on this representation.
struct PointFields {
  std::shared_ptr<const PointGeometry> geo;
  JetForm psi;
  std::vector<ComplexJet> a;
  std::vector<JetForm> b;
  JetForm h;
  double m = 0.0;
  /// Independent conjugate form; when empty Psi-bar = H Psi*.
  std::optional<JetForm> psi_bar;

  int dim() const { return geo->n; }
  const JetTable& table() const { return *geo->table; }
};

inline PointFields evaluate(const FieldConfig& cfg, std::span<const double> p) {
  PointFields f;
  f.geo = std::make_shared<const PointGeometry>(geometry_at(cfg.chart, p));
  f.psi = cfg.psi.jet(p);
  for (const auto& ak : cfg.a) f.a.push_back(ak.jet(p)[0]);
  for (const auto& bk : cfg.b) f.b.push_back(bk.jet(p));
  f.h = cfg.h.jet(p);
  f.m = cfg.m;
  return f;
}

inline PointFields evaluate(const FieldConfig& cfg, std::initializer_list<double> p) {
  return evaluate(cfg, std::span<const double>(p.begin(), p.size()));
}

// -- main equation ------------------------------------------------------------------

/// Covariant derivative of Psi in the gauge fields: Upsilon_k Psi - Psi a_k - Psi B_k.
inline JetForm gauge_derivative(const PointFields& f, int k) {
  return upsilon(*f.geo, f.psi, k) - f.psi * f.a[k] - clifford_mul(f.psi, f.b[k], f.table());
}

/// i dx^k (Upsilon_k Psi - Psi a_k - Psi B_k) - m Psi, as jets.
inline JetForm main_residual(const PointFields& f) {
  const int n = f.dim();
  JetForm r(n);
  for (int k = 0; k < n; ++k) r += clifford_mul(jet_generator(n, k), gauge_derivative(f, k), f.table());
  return r * kI - f.psi * f.m;
}

inline Multivector main_residual(const FieldConfig& cfg, std::span<const double> p) {
  return value_of(main_residual(evaluate(cfg, p)));
}

/// C = Psi* (main operator applied to Psi).
inline JetForm c_form(const PointFields& f) {
  return clifford_mul(conjugate_star(f.psi), main_residual(f), f.table());
}

// -- H equation -------------------------------------------------------------------

struct HDefects {
  Multivector square;             // H H - e
  std::vector<Multivector> flow;  // Upsilon_k H - H B_k + B_k H

  double max_norm() const {
    double m = square.norm();
    for (const auto& x : flow) m = std::max(m, x.norm());
    return m;
  }
};

inline HDefects h_residual(const PointFields& f) {
  const int n = f.dim();
  const Multivector hv = value_of(f.h);
  HDefects d{clifford_mul(hv, hv, *f.geo->value_table) - Multivector::scalar(n, 1.0), {}};
  for (int k = 0; k < n; ++k)
    d.flow.push_back(value_of(upsilon(*f.geo, f.h, k) - commutator(f.h, f.b[k], f.table())));
  return d;
}

inline HDefects h_residual(const FieldConfig& cfg, std::span<const double> p) { return h_residual(evaluate(cfg, p)); }

// -- conjugate form, current, conservation ---------------------------------------

inline JetForm bar_psi(const PointFields& f) {
  if (f.psi_bar) return *f.psi_bar;
  return clifford_mul(f.h, conjugate_star(f.psi), f.table());
}

/// j^k = Tr(Psi-bar dx^k Psi) as jets.
inline std::vector<ComplexJet> current_jets(const PointFields& f) {
  const int n = f.dim();
  const JetForm pb = bar_psi(f);
  std::vector<ComplexJet> j;
  for (int k = 0; k < n; ++k)
    j.push_back(trace(clifford_mul(clifford_mul(pb, jet_generator(n, k), f.table()), f.psi, f.table())));
  return j;
}

namespace detail {

inline void require_h_solution(const PointFields& f) {
  double scale = std::max(1.0, value_of(f.h).norm());
  for (const auto& bk : f.b) scale = std::max(scale, value_of(bk).norm());
  const double defect = h_residual(f).max_norm();
  if (defect > kHDefectTolerance * scale)
    throw PreconditionError("H does not satisfy H^2 = 1, Upsilon_k H = H B_k - B_k H (defect " +
                            std::to_string(defect) + ")");
}

}  // namespace detail

/// Real current j^k at the point; H must solve its equations.
inline std::vector<double> current(const PointFields& f) {
  detail::require_h_solution(f);
  std::vector<double> out;
  for (const auto& j : current_jets(f)) out.push_back(j.value().real());
  return out;
}

/// Imaginary parts of j^k, which vanish when H solves its equations.
inline double current_imaginary_part(const PointFields& f) {
  double m = 0.0;
  for (const auto& j : current_jets(f)) m = std::max(m, std::abs(j.value().imag()));
  return m;
}

/// (1/sqrt g) d_k (sqrt g j^k).
inline Complex current_divergence(const PointFields& f) {
  const auto j = current_jets(f);
  Complex s{};
  for (int k = 0; k < f.dim(); ++k) s += (f.geo->sqrt_abs_det * j[k]).partial(k).value();
  return s / f.geo->sqrt_abs_det.value();
}

/// |(1/sqrt g) d_k(sqrt g j^k) - Tr(-i H (C - C*))|; holds for any smooth Psi.
inline double conservation_defect(const PointFields& f) {
  detail::require_h_solution(f);
  const Multivector c = value_of(c_form(f));
  const Multivector diff = c - conjugate_star(c);
  const Complex rhs = trace(clifford_mul(value_of(f.h), diff, *f.geo->value_table)) * (-kI);
  return std::abs(current_divergence(f) - rhs);
}

inline double conservation_defect(const FieldConfig& cfg, std::span<const double> p) {
  return conservation_defect(evaluate(cfg, p));
}

// -- field strengths ----------------------------------------------------------------

struct StrengthData {
  int n;
  std::vector<ComplexJet> f_jets;  // f_ij at i n + j
  std::vector<JetForm> g_jets;     // G_ij at i n + j

  Complex f(int i, int j) const { return f_jets[i * n + j].value(); }
  Multivector G(int i, int j) const { return value_of(g_jets[i * n + j]); }
};

/// f_ij = d_i a_j - d_j a_i; G_ij = Upsilon_i B_j - Upsilon_j B_i + B_i B_j - B_j B_i.
inline StrengthData field_strengths(const PointFields& f) {
  const int n = f.dim();
  StrengthData s{n, std::vector<ComplexJet>(static_cast<std::size_t>(n) * n), std::vector<JetForm>(static_cast<std::size_t>(n) * n, JetForm(n))};
  std::vector<std::vector<JetForm>> ub(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) ub[i].push_back(upsilon(*f.geo, f.b[j], i));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      s.f_jets[i * n + j] = f.a[j].partial(i) - f.a[i].partial(j);
      s.g_jets[i * n + j] = ub[i][j] - ub[j][i] + commutator(f.b[i], f.b[j], f.table());
    }
  return s;
}

/// Index-raised strengths f^{ij} = g^{ia} g^{jb} f_ab and likewise G^{ij}.
inline StrengthData raise(const PointFields& f, const StrengthData& s) {
  const int n = f.dim();
  StrengthData r{n, std::vector<ComplexJet>(static_cast<std::size_t>(n) * n), std::vector<JetForm>(static_cast<std::size_t>(n) * n, JetForm(n))};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      ComplexJet fs = ComplexJet::constant(n, 0.0);
      JetForm gs(n);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          const RealJet w = f.geo->upper(i, a) * f.geo->upper(j, b);
          fs += w * s.f_jets[a * n + b];
          gs += w * s.g_jets[a * n + b];
        }
      r.f_jets[i * n + j] = fs;
      r.g_jets[i * n + j] = gs;
    }
  return r;
}

// -- gauge transformations -----------------------------------------------------------

/// Spin-valued U and unit-modulus v at a point, as jets.
struct GaugeJets {
  JetForm u;
  ComplexJet v;
};

/// U = exp(X) for a real bivector field X and v = exp(i phi).
inline GaugeJets gauge_jets(const PointGeometry& g, const FormField& generator, const Expr& phase) {
  if (!generator.has_grade(2) || !generator.imaginary_part_is_zero())
    throw ArgumentError("gauge_jets: generator must be a real 2-form field");
  const JetForm x = generator.jet(g.point);
  const RealJet phi = SmoothFunction(phase, g.n).jet(g.point);
  return {exp(x, *g.table), exp(make_complex(RealJet::constant(g.n, 0.0), phi))};
}

/// Psi' = Psi U v, a'_k = a_k + v^-1 d_k v, B'_k = U^-1 B_k U + U^-1 Upsilon_k U,
/// H' = U^-1 H U, Psi-bar' = v^-1 U^-1 Psi-bar.
inline PointFields gauge_transform(const PointFields& f, const JetForm& u, const ComplexJet& v) {
  const int n = f.dim();
  const Table& vt = *f.geo->value_table;
  if (std::abs(std::abs(v.value()) - 1.0) > 1e-12) throw ArgumentError("gauge_transform: |v| must be 1");
  if (!is_spin_member(value_of(u), vt)) throw ArgumentError("gauge_transform: U is not spin-valued at the point");
  const JetTable& t = f.table();
  const JetForm u_inv = conjugate_star(u);
  const ComplexJet v_inv = reciprocal(v);
  PointFields r;
  r.geo = f.geo;
  r.m = f.m;
  r.psi = clifford_mul(f.psi, u, t) * v;
  for (int k = 0; k < n; ++k) r.a.push_back(f.a[k] + v_inv * v.partial(k));
  for (int k = 0; k < n; ++k) {
    JetForm bk = clifford_mul(clifford_mul(u_inv, f.b[k], t), u, t) + clifford_mul(u_inv, upsilon(*f.geo, u, k), t);
    const Multivector val = value_of(bk);
    const double tol = 1e-9 * std::max(1.0, val.norm());
    if (off_grade_norm(val, 2) > tol || !is_real(val, tol))
      throw ConsistencyError("gauge_transform: transformed B_k is not a real 2-form");
    r.b.push_back(std::move(bk));
  }
  r.h = clifford_mul(clifford_mul(u_inv, f.h, t), u, t);
  if (f.psi_bar) r.psi_bar = clifford_mul(u_inv, *f.psi_bar, t) * v_inv;
  return r;
}

// -- Lagrangians --------------------------------------------------------------------

/// L1 = Tr(H (C + C*)).
inline Complex lagrangian_L1(const PointFields& f) {
  const Multivector c = value_of(c_form(f));
  return trace(clifford_mul(value_of(f.h), c + conjugate_star(c), *f.geo->value_table));
}

/// L1 written through Psi-bar:
/// Tr{Psi-bar (main) + (-(Upsilon_k Psi-bar + a_k Psi-bar + B_k Psi-bar) i dx^k - m Psi-bar) Psi}.
/// Equals lagrangian_L1 when Psi-bar = H Psi* and H solves its equations.
inline Complex lagrangian_L1_bar(const PointFields& f) {
  const int n = f.dim();
  const JetTable& t = f.table();
  const JetForm pb = bar_psi(f);
  JetForm left = pb * (-f.m);
  for (int k = 0; k < n; ++k) {
    const JetForm dk = upsilon(*f.geo, pb, k) + pb * f.a[k] + clifford_mul(f.b[k], pb, t);
    left -= clifford_mul(dk, jet_generator(n, k), t) * kI;
  }
  const JetForm total = clifford_mul(pb, main_residual(f), t) + clifford_mul(left, f.psi, t);
  return trace(total).value();
}

/// L0 = Tr(c1 sqrt g f_ij f^ij + c2 sqrt g G_ij G^ij).
inline Complex lagrangian_L0(const PointFields& f, double c1 = 1.0, double c2 = 1.0) {
  const int n = f.dim();
  const StrengthData s = field_strengths(f);
  const StrengthData up = raise(f, s);
  const Table& vt = *f.geo->value_table;
  Complex ff{};
  Complex gg{};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      ff += s.f(i, j) * up.f(i, j);
      gg += trace(clifford_mul(s.G(i, j), up.G(i, j), vt));
    }
  return f.geo->sqrt_abs_det.value() * (c1 * ff + c2 * gg);
}

/// L = L0 + L1; the Psi-bar form of L1 is used when an independent Psi-bar is set.
inline Complex lagrangian_total(const PointFields& f, double c1 = 1.0, double c2 = 1.0) {
  return lagrangian_L0(f, c1, c2) + (f.psi_bar ? lagrangian_L1_bar(f) : lagrangian_L1(f));
}

// -- full system ----------------------------------------------------------------------

/// (J)_0: the imaginary scalar part i Im(J_0).
inline Multivector project_imaginary_scalar(const Multivector& j) {
  return Multivector::scalar(j.dim(), Complex(0.0, j[0].imag()));
}

/// (J)_2: the real part of the 2-form component.
inline Multivector project_real_2form(const Multivector& j) {
  Multivector r(j.dim());
  for (Blade b = 0; b < j.size(); ++b)
    if (grade_of(b) == 2) r[b] = j[b].real();
  return r;
}

/// J^j = i Psi-bar dx^j Psi.
inline std::vector<Multivector> gauge_currents(const PointFields& f) {
  const int n = f.dim();
  const Table& vt = *f.geo->value_table;
  const Multivector pb = value_of(bar_psi(f));
  const Multivector ps = value_of(f.psi);
  std::vector<Multivector> out;
  for (int j = 0; j < n; ++j)
    out.push_back(clifford_mul(clifford_mul(pb, Multivector::generator(n, j), vt), ps, vt) * kI);
  return out;
}

struct SystemResiduals {
  Multivector main;
  std::vector<Complex> maxwell;
  std::vector<Multivector> yang_mills;
  HDefects h;
  double curvature_link = 0.0;

  double main_norm() const { return main.norm(); }
  double maxwell_norm() const {
    double m = 0.0;
    for (const auto& x : maxwell) m = std::max(m, std::abs(x));
    return m;
  }
  double yang_mills_norm() const {
    double m = 0.0;
    for (const auto& x : yang_mills) m = std::max(m, x.norm());
    return m;
  }
};

/// max over i, j of |G_ij + 1/2 D_ij|.
inline double curvature_link_defect(const PointFields& f, const StrengthData& s) {
  const CurvatureData cd = curvature(*f.geo);
  double m = 0.0;
  for (int i = 0; i < f.dim(); ++i)
    for (int j = 0; j < f.dim(); ++j) m = std::max(m, (s.G(i, j) + cd.D(i, j) * Complex(0.5)).norm());
  return m;
}

inline double curvature_link_defect(const PointFields& f) { return curvature_link_defect(f, field_strengths(f)); }

inline double curvature_link_check(const FieldConfig& cfg, std::span<const double> p) {
  return curvature_link_defect(evaluate(cfg, p));
}

inline SystemResiduals system_residuals(const PointFields& f, double c1 = 1.0, double c2 = 1.0) {
  if (!(c1 > 0) || !(c2 > 0)) throw ArgumentError("system_residuals: c1 and c2 must be positive");
  const int n = f.dim();
  const JetTable& t = f.table();
  const StrengthData s = field_strengths(f);
  const StrengthData up = raise(f, s);
  const auto J = gauge_currents(f);
  const RealJet& root = f.geo->sqrt_abs_det;
  SystemResiduals r;
  r.main = value_of(main_residual(f));
  for (int j = 0; j < n; ++j) {
    Complex div{};
    JetForm ym(n);
    for (int i = 0; i < n; ++i) {
      div += (root * up.f_jets[i * n + j]).partial(i).value();
      ym += upsilon(*f.geo, root * up.g_jets[i * n + j], i);
    }
    r.maxwell.push_back(div / root.value() - project_imaginary_scalar(J[j])[0] / c1);
    Multivector y = value_of(ym) * Complex(1.0 / root.value());
    for (int i = 0; i < n; ++i) y -= value_of(commutator(up.g_jets[i * n + j], f.b[i], t));
    y -= project_real_2form(J[j]) * Complex(1.0 / c2);
    r.yang_mills.push_back(std::move(y));
  }
  r.h = h_residual(f);
  r.curvature_link = curvature_link_defect(f, s);
  return r;
}

inline SystemResiduals system_residuals(const FieldConfig& cfg, std::span<const double> p, double c1 = 1.0,
                                        double c2 = 1.0) {
  return system_residuals(evaluate(cfg, p), c1, c2);
}

/// (Upsilon_i Upsilon_j - Upsilon_j Upsilon_i) H - (H G_ij - G_ij H), maximised over i, j.
inline double curvature_compatibility_defect(const PointFields& f) {
  const StrengthData s = field_strengths(f);
  const Table& vt = *f.geo->value_table;
  const Multivector hv = value_of(f.h);
  double m = 0.0;
  for (int i = 0; i < f.dim(); ++i)
    for (int j = 0; j < f.dim(); ++j) {
      const Multivector lhs = value_of(upsilon_commutator(*f.geo, f.h, i, j));
      m = std::max(m, (lhs - commutator(hv, s.G(i, j), vt)).norm());
    }
  return m;
}

/// B_j(x) = sum_i c_ij (x^i - p^i) with c_ij = -1/4 D_ij at p, so that G_ij = -1/2 D_ij at p.
inline std::vector<FormField> curvature_matched_b(const Chart& c, std::span<const double> p) {
  const int n = c.dim();
  const CurvatureData cd = curvature(c, p);
  std::vector<FormField> b;
  for (int j = 0; j < n; ++j) {
    FormField bj(n);
    for (int i = 0; i < n; ++i) {
      const Multivector& d = cd.D(i, j);
      const Expr shift = Expr::var(i) - Expr(p[i]);
      for (Blade bl = 0; bl < d.size(); ++bl)
        if (grade_of(bl) == 2 && d[bl].real() != 0.0) bj.add(bl, Expr(-0.25 * d[bl].real()) * shift);
    }
    b.push_back(std::move(bj));
  }
  return b;
}

// -- covariance ---------------------------------------------------------------------------

/// The configuration expressed in new coordinates: Psi and H by pullback,
/// a~_k = q^j_k a_j, B~_k = q^j_k pullback(B_j).
inline FieldConfig transform_config(const FieldConfig& cfg, const CoordinateChange& ch, std::vector<Interval> domain) {
  const int n = cfg.chart.dim();
  Chart chart = transform_chart(cfg.chart, ch, std::move(domain));
  std::vector<FormField> a, b;
  for (int k = 0; k < n; ++k) {
    FormField ak(n), bk(n);
    for (int j = 0; j < n; ++j) {
      const Expr& q = ch.jacobian(j, k);
      if (q.is_const(0.0)) continue;
      ak = ak + scale(pullback(cfg.a[j], ch), q);
      bk = bk + scale(pullback(cfg.b[j], ch), q);
    }
    a.push_back(std::move(ak));
    b.push_back(std::move(bk));
  }
  return FieldConfig::make(std::move(chart), pullback(cfg.psi, ch), std::move(a), std::move(b), pullback(cfg.h, ch),
                           cfg.m);
}

struct CovarianceReport {
  double tensor_defect = 0.0;     // |R~(x~) - q-outermorphism of R(x)|
  double residual_norm_old = 0.0;
  double residual_norm_new = 0.0;
};

/// Compares the main residual in both charts at the given new-chart points.
inline CovarianceReport covariance_check(const FieldConfig& cfg, const CoordinateChange& ch,
                                         std::vector<Interval> new_domain,
                                         const std::vector<std::vector<double>>& new_points) {
  const FieldConfig moved = transform_config(cfg, ch, std::move(new_domain));
  CovarianceReport rep;
  for (const auto& pn : new_points) {
    const Matrix q = ch.jacobian_at(pn);
    Eigen::FullPivLU<Matrix> lu(q);
    if (!lu.isInvertible()) throw ArgumentError("covariance_check: coordinate change is not invertible at a point");
    const std::vector<double> po = ch.map_point(pn);
    const Multivector r_old = main_residual(cfg, po);
    const Multivector r_new = main_residual(moved, pn);
    rep.tensor_defect = std::max(rep.tensor_defect, max_abs_diff(r_new, outermorphism(r_old, q)));
    rep.residual_norm_old = std::max(rep.residual_norm_old, r_old.norm());
    rep.residual_norm_new = std::max(rep.residual_norm_new, r_new.norm());
  }
  return rep;
}

struct SpinorCovarianceReport {
  double spinor_defect = 0.0;    // |Psi~ - F Psi-breve F*|
  double residual_defect = 0.0;  // |R(F Psi-breve, a~, F^-1 B~ F) - R~ F|
};

/// Si-change for a constant spin element F: dx^k = F dx~^k F*, i.e. x^k = q^k_j x~^j
/// with F e^k F* = q^k_j e^j. Psi-breve carries the old coefficients on the new basis.
inline SpinorCovarianceReport spinor_covariance_check(const FieldConfig& cfg, const SpinElement& f,
                                                      std::vector<Interval> new_domain,
                                                      const std::vector<std::vector<double>>& new_points) {
  const int n = cfg.chart.dim();
  const Matrix q = isometry_of(f.inverse());
  const CoordinateChange ch = CoordinateChange::linear(q);
  const FieldConfig moved = transform_config(cfg, ch, std::move(new_domain));
  const JetForm fj = to_jet_form(f.form());
  const ComplexJet one = ComplexJet::constant(n, 1.0);
  SpinorCovarianceReport rep;
  for (const auto& pn : new_points) {
    const PointFields pf = evaluate(moved, pn);
    const Table& vt = *pf.geo->value_table;
    const Multivector breve = cfg.psi.value(ch.map_point(pn));
    const Multivector expected = clifford_mul(clifford_mul(f.form(), breve, vt), conjugate_star(f.form()), vt);
    rep.spinor_defect = std::max(rep.spinor_defect, max_abs_diff(value_of(pf.psi), expected));
    const PointFields gauged = gauge_transform(pf, fj, one);
    const Multivector lhs = value_of(main_residual(gauged));
    const Multivector rhs = clifford_mul(value_of(main_residual(pf)), f.form(), vt);
    rep.residual_defect = std::max(rep.residual_defect, max_abs_diff(lhs, rhs));
    rep.spinor_defect =
        std::max(rep.spinor_defect, max_abs_diff(value_of(gauged.psi), clifford_mul(f.form(), breve, vt)));
  }
  return rep;
}

// -- numeric variational check ------------------------------------------------------------

struct VariationalResult {
  double max_euler_lagrange = 0.0;  // largest |dL/du - d_k dL/d(d_k u)|
  double scale = 0.0;               // largest individual term
  double relative() const { return max_euler_lagrange / std::max(scale, 1e-300); }
};

/// Central-difference Euler-Lagrange expressions of Re L at p. The varied
/// fields are the coefficients of Psi-bar (treated as independent), of a_k and
/// of B_k; with `psi_bar_only` only Psi-bar is varied.
inline VariationalResult variational_check(const FieldConfig& cfg, std::span<const double> p, double c1 = 1.0,
                                           double c2 = 1.0, bool psi_bar_only = false, double h = 1e-3,
                                           double eps = 1e-6) {
  const int n = cfg.chart.dim();
  const std::size_t N = std::size_t{1} << n;
  auto base_at = [&](std::span<const double> x) {
    PointFields f = evaluate(cfg, x);
    f.psi_bar = clifford_mul(f.h, conjugate_star(f.psi), f.table());
    return f;
  };

  // A variable is a real parameter of one coefficient jet; `slot` -1 is the
  // value, otherwise the first derivative along that coordinate.
  struct Var {
    int field;  // 0 Psi-bar, 1 a_k, 2 B_k
    int k;
    Blade blade;
    Complex dir;
  };
  std::vector<Var> vars;
  for (Blade b = 0; b < N; ++b) {
    vars.push_back({0, 0, b, Complex(1, 0)});
    vars.push_back({0, 0, b, Complex(0, 1)});
  }
  if (!psi_bar_only)
    for (int k = 0; k < n; ++k) {
      vars.push_back({1, k, 0, Complex(0, 1)});
      for (Blade b : blades_of_grade(n, 2)) vars.push_back({2, k, b, Complex(1, 0)});
    }

  auto perturbed = [&](const PointFields& f, const Var& v, int slot, double delta) {
    PointFields g = f;
    const ComplexJet bump = slot < 0 ? ComplexJet::constant(n, v.dir * delta)
                                     : ComplexJet::coordinate(n, slot, 0.0) * (v.dir * delta);
    if (v.field == 0) (*g.psi_bar)[v.blade] += bump;
    else if (v.field == 1) g.a[v.k] += bump;
    else g.b[v.k][v.blade] += bump;
    return g;
  };
  auto dL = [&](const PointFields& f, const Var& v, int slot) {
    return (lagrangian_total(perturbed(f, v, slot, eps), c1, c2).real() -
            lagrangian_total(perturbed(f, v, slot, -eps), c1, c2).real()) /
           (2 * eps);
  };

  const PointFields center = base_at(p);
  std::vector<PointFields> plus, minus;
  for (int k = 0; k < n; ++k) {
    std::vector<double> x(p.begin(), p.end());
    x[k] += h;
    plus.push_back(base_at(x));
    x[k] -= 2 * h;
    minus.push_back(base_at(x));
  }
  VariationalResult res;
  for (const auto& v : vars) {
    const double du = dL(center, v, -1);
    double el = du;
    res.scale = std::max(res.scale, std::abs(du));
    for (int k = 0; k < n; ++k) {
      const double pp = dL(plus[k], v, k);
      const double pm = dL(minus[k], v, k);
      res.scale = std::max({res.scale, std::abs(pp), std::abs(pm)});
      el -= (pp - pm) / (2 * h);
    }
    res.max_euler_lagrange = std::max(res.max_euler_lagrange, std::abs(el));
  }
  return res;
}

}  // namespace extalg

#endif  // EXTALG_FIELD_MODEL_HPP
