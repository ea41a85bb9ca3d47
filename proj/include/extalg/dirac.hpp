#ifndef EXTALG_DIRAC_HPP
#define EXTALG_DIRAC_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "extalg/error.hpp"
#include "extalg/expr.hpp"
#include "extalg/jet.hpp"
#include "extalg/manifold.hpp"
#include "extalg/multivector.hpp"

namespace extalg {

using Matrix4c = Eigen::Matrix4cd;
using Vector4c = Eigen::Vector4cd;

/// The four Dirac matrices gamma^1..gamma^4 (index 0..3) for g = diag(-1,-1,-1,1).
struct GammaRep {
  std::array<Matrix4c, 4> g;
};

inline GammaRep gamma_matrices() {
  const Complex i(0, 1);
  GammaRep r;
  r.g[0] << 0, 0, 0, -1,
            0, 0, -1, 0,
            0, 1, 0, 0,
            1, 0, 0, 0;
  r.g[1] << 0, 0, 0, i,
            0, 0, -i, 0,
            0, -i, 0, 0,
            i, 0, 0, 0;
  r.g[2] << 0, 0, -1, 0,
            0, 0, 0, 1,
            1, 0, 0, 0,
            0, -1, 0, 0;
  r.g[3] << 1, 0, 0, 0,
            0, 1, 0, 0,
            0, 0, -1, 0,
            0, 0, 0, -1;
  return r;
}

inline Metric minkowski_metric() { return Metric::diagonal({-1.0, -1.0, -1.0, 1.0}); }

/// Flat chart with g_ij = diag(-1,-1,-1,1) on the given box.
inline Chart minkowski_chart(std::vector<Interval> domain) {
  std::vector<Expr> g(16, Expr(0.0));
  g[0] = g[5] = g[10] = -1.0;
  g[15] = 1.0;
  return Chart::make(4, std::move(g), std::move(domain));
}

/// Image of the Grassmann blade e^{i1}^...^e^{ik}: the antisymmetrised product
/// (1/k!) sum over permutations of sgn * gamma^{i_s1} ... gamma^{i_sk}.
inline Matrix4c rep_blade(Blade b, const GammaRep& gr) {
  std::vector<int> idx = blade_indices(b);
  Matrix4c sum = Matrix4c::Zero();
  int count = 0;
  std::vector<int> perm = idx;
  std::sort(perm.begin(), perm.end());
  do {
    Matrix4c prod = Matrix4c::Identity();
    for (int j : perm) prod = prod * gr.g[j];
    sum += static_cast<double>(permutation_sign(perm)) * prod;
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return sum / static_cast<double>(count);
}

inline Matrix4c rep_map(const Multivector& u, const GammaRep& gr) {
  if (u.dim() != 4) throw DimensionError("rep_map: the Dirac representation needs n = 4");
  Matrix4c m = Matrix4c::Zero();
  for (Blade b = 0; b < u.size(); ++b)
    if (u[b] != Complex{}) m += u[b] * rep_blade(b, gr);
  return m;
}

/// Multivector whose image under rep_map is m (the map is bijective onto 4x4 matrices).
inline Multivector rep_inverse(const Matrix4c& m, const GammaRep& gr) {
  Eigen::Matrix<Complex, 16, 16> a;
  Eigen::Matrix<Complex, 16, 1> rhs;
  for (Blade b = 0; b < 16; ++b) {
    const Matrix4c e = rep_blade(b, gr);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) a(r * 4 + c, b) = e(r, c);
  }
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) rhs(r * 4 + c) = m(r, c);
  const Eigen::Matrix<Complex, 16, 1> x = a.fullPivLu().solve(rhs);
  Multivector u(4);
  for (Blade b = 0; b < 16; ++b) u[b] = x(b);
  return u;
}

/// Form whose matrix carries theta in the first column and zeros elsewhere.
inline Multivector column_embed(const Vector4c& theta, const GammaRep& gr) {
  Matrix4c m = Matrix4c::Zero();
  m.col(0) = theta;
  return rep_inverse(m, gr);
}

/// i gamma^k (d_k theta - a_k theta) - m theta for a column of jets.
inline Vector4c dirac_residual(const std::array<ComplexJet, 4>& theta, const std::array<ComplexJet, 4>& a, double m,
                               const GammaRep& gr) {
  Vector4c out = Vector4c::Zero();
  for (int k = 0; k < 4; ++k) {
    Vector4c dk;
    for (int r = 0; r < 4; ++r) dk(r) = theta[r].d(k) - a[k].value() * theta[r].value();
    out += Complex(0, 1) * (gr.g[k] * dk);
  }
  for (int r = 0; r < 4; ++r) out(r) -= m * theta[r].value();
  return out;
}

/// Column of complex expression pairs theta_r = re_r + i im_r.
struct SpinorField {
  std::array<Expr, 4> re;
  std::array<Expr, 4> im;

  std::array<ComplexJet, 4> jet(std::span<const double> p) const {
    std::array<ComplexJet, 4> out;
    for (int r = 0; r < 4; ++r) out[r] = make_complex(SmoothFunction(re[r], 4).jet(p), SmoothFunction(im[r], 4).jet(p));
    return out;
  }
};

/// FormField Psi(x) = sum_r theta_r(x) column_embed(unit_r).
inline FormField column_embed_field(const SpinorField& theta, const GammaRep& gr) {
  FormField f(4);
  for (int r = 0; r < 4; ++r) {
    const Multivector e = column_embed(Vector4c::Unit(r), gr);
    for (Blade b = 0; b < 16; ++b) {
      const double cr = e[b].real(), ci = e[b].imag();
      if (std::abs(cr) < 1e-15 && std::abs(ci) < 1e-15) continue;
      // (cr + i ci)(re + i im)
      f.add(b, Expr(cr) * theta.re[r] - Expr(ci) * theta.im[r], Expr(cr) * theta.im[r] + Expr(ci) * theta.re[r]);
    }
  }
  return f;
}

/// Free plane wave u exp(-i k_j x^j) with (gamma^k k_k - m) u = 0 and
/// g^{kl} k_k k_l = m^2.
struct PlaneWave {
  std::array<double, 4> k;
  double m;
  Vector4c u;
};

/// Spatial momentum (k_1, k_2, k_3); k_4 is fixed by the mass shell.
inline PlaneWave plane_wave(std::array<double, 3> spatial, double m, const GammaRep& gr) {
  const double k4 = std::sqrt(m * m + spatial[0] * spatial[0] + spatial[1] * spatial[1] + spatial[2] * spatial[2]);
  PlaneWave w{{spatial[0], spatial[1], spatial[2], k4}, m, Vector4c::Zero()};
  Matrix4c op = -m * Matrix4c::Identity();
  for (int j = 0; j < 4; ++j) op += w.k[j] * gr.g[j];
  Eigen::FullPivLU<Matrix4c> lu(op);
  lu.setThreshold(1e-10);
  const auto kernel = lu.kernel();
  if (kernel.cols() == 0 || kernel.col(0).norm() == 0.0) throw NumericError("plane_wave: no spinor on the mass shell");
  w.u = kernel.col(0).normalized();
  return w;
}

inline SpinorField plane_wave_spinor(const PlaneWave& w) {
  Expr phase;
  for (int j = 0; j < 4; ++j) phase = phase + Expr(w.k[j]) * Expr::var(j);
  SpinorField s;
  for (int r = 0; r < 4; ++r) {
    const double ur = w.u(r).real(), ui = w.u(r).imag();
    // (ur + i ui)(cos - i sin)
    s.re[r] = Expr(ur) * cos(phase) + Expr(ui) * sin(phase);
    s.im[r] = Expr(ui) * cos(phase) - Expr(ur) * sin(phase);
  }
  return s;
}

}  // namespace extalg

#endif  // EXTALG_DIRAC_HPP
