#pragma once

#include "aniso/core.hpp"
#include "aniso/sphere_function.hpp"

#include <numbers>
#include <optional>
#include <vector>

namespace aniso {

/// Pointwise sphere data of an anisotropy: F, its intrinsic gradient DF and
/// the operator A_F = D^2 F + F 1, expressed in the deterministic tangent
/// frame at the evaluation point.
template <int N>
struct SphereJet {
  Vec<N> point;
  Frame<N> frame;
  double value;
  TVec<N> gradient;  // DF in frame coordinates
  TMat<N> op;        // A_F in frame coordinates
};

/// For a 1-homogeneous extension the ambient gradient is 0-homogeneous, so
/// its Hessian annihilates the radial direction; restricting the ambient
/// Hessian to the tangent space therefore yields exactly D^2 F + F 1.
/// (Second derivative along a great circle gamma: (F o gamma)'' =
/// u^T Hess u - F |u|^2 = D^2F(u,u), rearranged.)
template <int N>
SphereJet<N> sphere_jet(const SphereFunction<N>& f, const Vec<N>& x) {
  require_unit(x.norm(), "sphere_jet");
  double value = f.value(x);
  if (!(value > 0.0))
    throw std::domain_error("sphere_jet: anisotropy is not positive at the "
                            "evaluation point");
  SphereJet<N> jet;
  jet.point = x;
  jet.frame = tangent_frame<N>(x);
  jet.value = value;
  jet.gradient = jet.frame.transpose() * f.gradient(x);
  TMat<N> a = jet.frame.transpose() * f.hessian(x) * jet.frame;
  jet.op = 0.5 * (a + a.transpose());
  return jet;
}

/// Wulff map phi(x) = DF_x + F(x) x, i.e. the ambient gradient of the
/// 1-homogeneous extension at unit x.
template <int N>
Vec<N> wulff_point(const SphereFunction<N>& f, const Vec<N>& x) {
  require_unit(x.norm(), "wulff_point");
  return f.gradient(x);
}

template <int N>
struct ConvexityCertificate {
  int grid_resolution = 0;
  double min_eigenvalue = 0.0;
  Vec<N> argmin_point = Vec<N>::Zero();
  bool passed = false;
};

/// Deterministic sampling grid on S^{N-1}: uniform angles on the circle,
/// interior latitude x longitude product on the 2-sphere (no poles).
template <int N>
std::vector<Vec<N>> sphere_sample_grid(int resolution) {
  const double pi = std::numbers::pi;
  std::vector<Vec<N>> pts;
  if constexpr (N == 2) {
    pts.reserve(resolution);
    for (int k = 0; k < resolution; ++k) {
      double t = 2.0 * pi * k / resolution;
      pts.push_back(Vec<2>(std::cos(t), std::sin(t)));
    }
  } else {
    pts.reserve(static_cast<size_t>(resolution) * 2 * resolution);
    for (int i = 0; i < resolution; ++i) {
      double theta = pi * (i + 0.5) / resolution;
      for (int j = 0; j < 2 * resolution; ++j) {
        double phi = 2.0 * pi * j / (2 * resolution);
        pts.push_back(Vec<3>(std::sin(theta) * std::cos(phi),
                             std::sin(theta) * std::sin(phi),
                             std::cos(theta)));
      }
    }
  }
  return pts;
}

namespace detail {

template <int N>
double min_eigenvalue_af(const SphereFunction<N>& f, const Vec<N>& x) {
  Frame<N> e = tangent_frame<N>(x);
  TMat<N> a = e.transpose() * f.hessian(x) * e;
  a = 0.5 * (a + a.transpose()).eval();
  if constexpr (N == 2) {
    return a(0, 0);
  } else {
    Eigen::SelfAdjointEigenSolver<TMat<3>> es;
    es.computeDirect(a);
    return es.eigenvalues().minCoeff();
  }
}

}  // namespace detail

/// Sampled convexity certification of A_F > 0: full grid scan followed by an
/// iterated local refinement around the grid argmin. A failing certificate is
/// a valid result, not an error.
template <int N>
ConvexityCertificate<N> check_convexity(const SphereFunction<N>& f,
                                        int resolution) {
  require(resolution >= 8, "check_convexity: resolution must be >= 8");
  ConvexityCertificate<N> cert;
  cert.grid_resolution = resolution;

  double best = std::numeric_limits<double>::infinity();
  Vec<N> argmin = Vec<N>::Unit(0);
  for (const Vec<N>& x : sphere_sample_grid<N>(resolution)) {
    double ev = detail::min_eigenvalue_af(f, x);
    if (ev < best) {
      best = ev;
      argmin = x;
    }
  }

  // Local refinement: shrink a tangent-offset stencil around the argmin.
  double delta = std::numbers::pi / resolution;
  for (int iter = 0; iter < 12; ++iter) {
    Frame<N> e = tangent_frame<N>(argmin);
    Vec<N> local_best = argmin;
    double local_val = best;
    auto probe = [&](const Vec<N>& cand) {
      double ev = detail::min_eigenvalue_af(f, cand);
      if (ev < local_val) {
        local_val = ev;
        local_best = cand;
      }
    };
    if constexpr (N == 2) {
      for (int i = -2; i <= 2; ++i) {
        if (i == 0) continue;
        probe((argmin + 0.5 * delta * i * e.col(0)).normalized());
      }
    } else {
      for (int i = -2; i <= 2; ++i)
        for (int j = -2; j <= 2; ++j) {
          if (i == 0 && j == 0) continue;
          probe((argmin + 0.5 * delta * (i * e.col(0) + j * e.col(1)))
                    .normalized());
        }
    }
    argmin = local_best;
    best = local_val;
    delta /= 2.5;
  }

  cert.min_eigenvalue = best;
  cert.argmin_point = argmin;
  cert.passed = best > 0.0;
  return cert;
}

/// Dual norm F*(v) = sup { <v,z> / F(z) : z in S^{N-1} }, evaluated by a
/// full grid scan at the certificate resolution followed by 20 projected
/// ascent steps with a bracketed great-circle line search. Positively
/// 1-homogeneous by construction (the input is normalized first).
template <int N>
double dual_norm(const SphereFunction<N>& f,
                 const ConvexityCertificate<N>& cert, const Vec<N>& v) {
  if (!cert.passed)
    throw PreconditionError(
        "dual_norm: anisotropy failed convexity certification");
  double vn = v.norm();
  if (vn == 0.0) return 0.0;
  Vec<N> dir = v / vn;

  auto objective = [&](const Vec<N>& z) { return dir.dot(z) / f.value(z); };

  Vec<N> z = Vec<N>::Unit(0);
  double best = -std::numeric_limits<double>::infinity();
  for (const Vec<N>& x : sphere_sample_grid<N>(cert.grid_resolution)) {
    double h = objective(x);
    if (h > best) {
      best = h;
      z = x;
    }
  }

  const double spacing = 2.0 * std::numbers::pi / cert.grid_resolution;
  for (int step = 0; step < 20; ++step) {
    double fz = f.value(z);
    Vec<N> grad = dir / fz - dir.dot(z) * f.gradient(z) / (fz * fz);
    Vec<N> w = grad - grad.dot(z) * z;
    double wn = w.norm();
    if (wn < 1e-14) break;
    w /= wn;
    // Golden-section maximization along the great circle through z in
    // direction w; the bracket spans both sides to tolerate a start at or
    // beyond the optimum.
    double lo = -2.0 * spacing, hi = 2.0 * spacing;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double s1 = hi - gr * (hi - lo), s2 = lo + gr * (hi - lo);
    auto at = [&](double s) { return objective(std::cos(s) * z + std::sin(s) * w); };
    double f1 = at(s1), f2 = at(s2);
    for (int it = 0; it < 60; ++it) {
      if (f1 < f2) {
        lo = s1;
        s1 = s2;
        f1 = f2;
        s2 = lo + gr * (hi - lo);
        f2 = at(s2);
      } else {
        hi = s2;
        s2 = s1;
        f2 = f1;
        s1 = hi - gr * (hi - lo);
        f1 = at(s1);
      }
    }
    double s = 0.5 * (lo + hi);
    Vec<N> cand = (std::cos(s) * z + std::sin(s) * w).normalized();
    if (objective(cand) <= best) break;
    z = cand;
    best = objective(z);
  }
  return vn * best;
}

/// F-distance d_F(x, y) = F*(y - x); asymmetric in general.
template <int N>
double f_distance(const SphereFunction<N>& f,
                  const ConvexityCertificate<N>& cert, const Vec<N>& x,
                  const Vec<N>& y) {
  return dual_norm(f, cert, Vec<N>(y - x));
}

}  // namespace aniso
