#pragma once

#include "aniso/core.hpp"
#include "aniso/harmonics.hpp"
#include "aniso/polynomial.hpp"

#include <utility>
#include <vector>

namespace aniso {

/// Value, gradient and Hessian of the 1-homogeneous ambient extension at a
/// point v != 0. For unit v the gradient is the Wulff map and the Hessian
/// restricted to v^perp is the operator D^2F + F 1 on the sphere.
template <int N>
struct AmbientJet {
  double value;
  Vec<N> gradient;
  Mat<N> hessian;
};

/// A smooth positive function on the unit sphere S^{N-1}, represented through
/// its 1-homogeneous ambient extension Ftilde(v) = |v| F(v/|v|). The ambient
/// extension is the single source of truth for all derivative quantities;
/// every family below provides it in closed form up to third order.
///
/// Families:
///   constant(c)             Ftilde(v) = c |v|
///   quadratic(Q)            Ftilde(v) = sqrt(v^T Q v), Q symmetric positive definite
///   harmonic(base, terms)   Ftilde(v) = base |v| + sum_k a_k P_k(v) |v|^(1-l_k)
/// with P_k harmonic homogeneous polynomials of degree l_k (Fourier modes on
/// S^1, real orthonormal spherical harmonics on S^2).
template <int N>
class SphereFunction {
 public:
  enum class Family { constant, quadratic, harmonic };

  struct HarmonicTerm {
    double coeff;
    int l;  // polynomial degree (Fourier mode order for N == 2)
    int m;  // spherical-harmonic order; for N == 2: 0 = cos, 1 = sin
    HomogeneousPolynomial<N> poly;
  };

  static SphereFunction constant(double c) {
    require(c > 0.0, "SphereFunction::constant: c must be positive");
    SphereFunction f;
    f.family_ = Family::constant;
    f.constant_ = c;
    return f;
  }

  static SphereFunction quadratic(const Mat<N>& q) {
    Mat<N> sym = 0.5 * (q + q.transpose());
    Eigen::SelfAdjointEigenSolver<Mat<N>> es;
    es.computeDirect(sym);
    require(es.eigenvalues().minCoeff() > 0.0,
            "SphereFunction::quadratic: Q must be positive definite");
    SphereFunction f;
    f.family_ = Family::quadratic;
    f.q_ = sym;
    return f;
  }

  /// Circular-mode perturbation 1-homogeneous in the plane (N == 2 only):
  /// F(theta) = base + sum a_k cos(k theta) or sin(k theta), k <= 6.
  static SphereFunction harmonic_circle(
      double base, const std::vector<std::tuple<int, bool, double>>& modes)
    requires(N == 2)
  {
    SphereFunction f;
    f.family_ = Family::harmonic;
    f.constant_ = base;
    for (auto [k, sine, a] : modes)
      f.terms_.push_back({a, k, sine ? 1 : 0, circular_harmonic(k, sine)});
    return f;
  }

  /// Real spherical-harmonic perturbation (N == 3 only):
  /// F(z) = base + sum a_lm Y_l^m(z), l <= 4, orthonormal normalization.
  static SphereFunction harmonic_sphere(
      double base, const std::vector<std::tuple<int, int, double>>& modes)
    requires(N == 3)
  {
    SphereFunction f;
    f.family_ = Family::harmonic;
    f.constant_ = base;
    for (auto [l, m, a] : modes)
      f.terms_.push_back({a, l, m, real_spherical_harmonic(l, m)});
    return f;
  }

  Family family() const { return family_; }
  double constant_part() const { return constant_; }
  const Mat<N>& quadratic_form() const { return q_; }
  const std::vector<HarmonicTerm>& harmonic_terms() const { return terms_; }

  /// The same function scaled by c > 0 (replaces F by c F).
  SphereFunction scaled(double c) const {
    require(c > 0.0, "SphereFunction::scaled: factor must be positive");
    SphereFunction f = *this;
    if (family_ == Family::quadratic) {
      f.q_ *= c * c;
    } else {
      f.constant_ *= c;
      for (auto& t : f.terms_) t.coeff *= c;
    }
    return f;
  }

  /// The antipodal function z -> F(-z). Constant and quadratic families are
  /// even; harmonic terms of odd degree flip sign. The Wulff shape of the
  /// antipodal function is the point reflection of W_F, which is the
  /// inner-oriented umbilical model when F is not antipodally symmetric.
  SphereFunction antipodal() const {
    SphereFunction f = *this;
    for (auto& t : f.terms_)
      if (t.l % 2 == 1) t.coeff = -t.coeff;
    return f;
  }

  bool antipodally_even() const {
    for (const auto& t : terms_)
      if (t.l % 2 == 1 && t.coeff != 0.0) return false;
    return true;
  }

  double value(const Vec<N>& v) const {
    switch (family_) {
      case Family::constant:
        return constant_ * v.norm();
      case Family::quadratic:
        return std::sqrt(v.dot(q_ * v));
      case Family::harmonic: {
        double r = v.norm();
        double s = constant_ * r;
        for (const auto& t : terms_)
          s += t.coeff * t.poly.value(v) * std::pow(r, 1 - t.l);
        return s;
      }
    }
    return 0.0;
  }

  Vec<N> gradient(const Vec<N>& v) const {
    switch (family_) {
      case Family::constant:
        return constant_ * v.normalized();
      case Family::quadratic: {
        Vec<N> w = q_ * v;
        return w / std::sqrt(v.dot(w));
      }
      case Family::harmonic: {
        double r = v.norm();
        Vec<N> g = constant_ * v / r;
        for (const auto& t : terms_) {
          double m = 1.0 - t.l;
          double p = t.poly.value(v);
          g += t.coeff * (std::pow(r, m) * t.poly.gradient(v) +
                          m * p * std::pow(r, m - 2) * v);
        }
        return g;
      }
    }
    return Vec<N>::Zero();
  }

  Mat<N> hessian(const Vec<N>& v) const {
    switch (family_) {
      case Family::constant: {
        double r = v.norm();
        Vec<N> u = v / r;
        return constant_ * (Mat<N>::Identity() - u * u.transpose()) / r;
      }
      case Family::quadratic: {
        Vec<N> w = q_ * v;
        double f = std::sqrt(v.dot(w));
        return q_ / f - w * w.transpose() / (f * f * f);
      }
      case Family::harmonic: {
        double r = v.norm();
        Vec<N> u = v / r;
        Mat<N> h =
            constant_ * (Mat<N>::Identity() - u * u.transpose()) / r;
        for (const auto& t : terms_) {
          double m = 1.0 - t.l;
          double p = t.poly.value(v);
          Vec<N> pg = t.poly.gradient(v);
          double rm2 = std::pow(r, m - 2);
          Mat<N> term = std::pow(r, m) * t.poly.hessian(v);
          term += m * rm2 * (pg * v.transpose() + v * pg.transpose());
          term += m * p * rm2 * Mat<N>::Identity();
          term += m * (m - 2) * p * std::pow(r, m - 4) * v * v.transpose();
          h += t.coeff * term;
        }
        return h;
      }
    }
    return Mat<N>::Zero();
  }

  /// Third derivative tensor of the ambient extension. Needed for the second
  /// chart derivatives of Wulff parametrizations and flowed surfaces.
  Sym3<N> third(const Vec<N>& v) const {
    Sym3<N> t3 = Sym3<N>::Zero();
    double r = v.norm();
    switch (family_) {
      case Family::constant:
        add_norm_third(t3, v, r, constant_);
        break;
      case Family::quadratic: {
        Vec<N> w = q_ * v;
        double f = std::sqrt(v.dot(w));
        double f3 = f * f * f;
        double f5 = f3 * f * f;
        for (int c = 0; c < N; ++c)
          for (int a = 0; a < N; ++a)
            for (int b = 0; b < N; ++b)
              t3.slice[c](a, b) =
                  -(q_(a, b) * w(c) + q_(a, c) * w(b) + q_(b, c) * w(a)) / f3 +
                  3.0 * w(a) * w(b) * w(c) / f5;
        break;
      }
      case Family::harmonic: {
        add_norm_third(t3, v, r, constant_);
        for (const auto& t : terms_) {
          double m = 1.0 - t.l;
          double p = t.poly.value(v);
          Vec<N> pg = t.poly.gradient(v);
          Mat<N> ph = t.poly.hessian(v);
          Sym3<N> pt = t.poly.third(v);
          double rm = std::pow(r, m);
          double rm2 = std::pow(r, m - 2);
          double rm4 = std::pow(r, m - 4);
          double rm6 = std::pow(r, m - 6);
          for (int c = 0; c < N; ++c)
            for (int a = 0; a < N; ++a)
              for (int b = 0; b < N; ++b) {
                double d = (a == b ? 1.0 : 0.0);
                double dac = (a == c ? 1.0 : 0.0);
                double dbc = (b == c ? 1.0 : 0.0);
                double s = rm * pt.slice[c](a, b);
                s += m * rm2 * (ph(a, b) * v(c) + ph(a, c) * v(b) + ph(b, c) * v(a));
                s += m * rm2 * (pg(a) * dbc + pg(b) * dac + pg(c) * d);
                s += m * (m - 2) * rm4 *
                     (pg(a) * v(b) * v(c) + pg(b) * v(a) * v(c) + pg(c) * v(a) * v(b));
                s += m * (m - 2) * rm4 * p * (d * v(c) + dac * v(b) + dbc * v(a));
                s += m * (m - 2) * (m - 4) * rm6 * p * v(a) * v(b) * v(c);
                t3.slice[c](a, b) += t.coeff * s;
              }
        }
        break;
      }
    }
    return t3;
  }

  AmbientJet<N> jet(const Vec<N>& v) const {
    return {value(v), gradient(v), hessian(v)};
  }

 private:
  // third derivative of c |v|
  static void add_norm_third(Sym3<N>& t3, const Vec<N>& v, double r, double c) {
    Vec<N> u = v / r;
    double inv_r2 = 1.0 / (r * r);
    for (int k = 0; k < N; ++k)
      for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) {
          double d = (a == b ? 1.0 : 0.0);
          double dac = (a == k ? 1.0 : 0.0);
          double dbc = (b == k ? 1.0 : 0.0);
          t3.slice[k](a, b) += c * inv_r2 *
                               (3.0 * u(a) * u(b) * u(k) - d * u(k) -
                                dac * u(b) - dbc * u(a));
        }
  }

  Family family_ = Family::constant;
  double constant_ = 1.0;
  Mat<N> q_ = Mat<N>::Identity();
  std::vector<HarmonicTerm> terms_;
};

}  // namespace aniso
