#pragma once

#include "aniso/core.hpp"

#include <vector>

namespace aniso {

/// Homogeneous polynomial on R^N stored as a monomial list. Degrees stay
/// small (<= 6), so evaluation of the polynomial and its partial derivatives
/// up to third order just walks the list.
template <int N>
class HomogeneousPolynomial {
 public:
  struct Monomial {
    double coeff;
    std::array<int, N> exp;
  };

  HomogeneousPolynomial() = default;
  explicit HomogeneousPolynomial(std::vector<Monomial> monomials)
      : monomials_(std::move(monomials)) {
    for (const auto& m : monomials_) {
      int d = 0;
      for (int e : m.exp) d += e;
      degree_ = std::max(degree_, d);
    }
  }

  int degree() const { return degree_; }

  double value(const Vec<N>& v) const {
    double s = 0.0;
    for (const auto& m : monomials_) s += m.coeff * power(v, m.exp);
    return s;
  }

  Vec<N> gradient(const Vec<N>& v) const {
    Vec<N> g = Vec<N>::Zero();
    for (const auto& m : monomials_)
      for (int a = 0; a < N; ++a) g(a) += derive(m, v, {a});
    return g;
  }

  Mat<N> hessian(const Vec<N>& v) const {
    Mat<N> h = Mat<N>::Zero();
    for (const auto& m : monomials_)
      for (int a = 0; a < N; ++a)
        for (int b = a; b < N; ++b) {
          double d = derive(m, v, {a, b});
          h(a, b) += d;
          if (a != b) h(b, a) += d;
        }
    return h;
  }

  Sym3<N> third(const Vec<N>& v) const {
    Sym3<N> t = Sym3<N>::Zero();
    for (const auto& m : monomials_)
      for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b)
          for (int c = 0; c < N; ++c) t.slice[c](a, b) += derive(m, v, {a, b, c});
    return t;
  }

  /// Laplacian as a polynomial value (used by tests to confirm the built-in
  /// harmonic tables really are harmonic).
  double laplacian(const Vec<N>& v) const {
    double s = 0.0;
    for (const auto& m : monomials_)
      for (int a = 0; a < N; ++a) s += derive(m, v, {a, a});
    return s;
  }

 private:
  static double power(const Vec<N>& v, const std::array<int, N>& exp) {
    double p = 1.0;
    for (int a = 0; a < N; ++a)
      for (int k = 0; k < exp[a]; ++k) p *= v(a);
    return p;
  }

  /// Partial derivative of one monomial along the listed axes, evaluated at v.
  static double derive(const Monomial& m, const Vec<N>& v,
                       std::initializer_list<int> axes) {
    double coeff = m.coeff;
    std::array<int, N> exp = m.exp;
    for (int axis : axes) {
      if (exp[axis] == 0) return 0.0;
      coeff *= exp[axis];
      exp[axis] -= 1;
    }
    return coeff * power(v, exp);
  }

  std::vector<Monomial> monomials_;
  int degree_ = 0;
};

}  // namespace aniso
