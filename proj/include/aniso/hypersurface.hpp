#pragma once

#include "aniso/charts.hpp"
#include "aniso/core.hpp"
#include "aniso/quadrature.hpp"
#include "aniso/sphere_function.hpp"

#include <algorithm>
#include <vector>

namespace aniso {

/// Real eigenvalues of the product A * S for symmetric S and symmetric
/// positive definite A, sorted ascending. A * S is similar to the symmetric
/// matrix A^(1/2) S A^(1/2), which guarantees a real spectrum in floating
/// point as well.
template <int N>
TVec<N> aniso_eigenvalues(const TMat<N>& s, const TMat<N>& a) {
  TMat<N> s_sym = 0.5 * (s + s.transpose());
  TMat<N> a_sym = 0.5 * (a + a.transpose());
  if constexpr (N == 2) {
    if (!(a_sym(0, 0) > 0.0))
      throw std::invalid_argument("aniso_eigenvalues: A is not positive definite");
    return TVec<2>(TVec<2>::Constant(a_sym(0, 0) * s_sym(0, 0)));
  } else {
    Eigen::SelfAdjointEigenSolver<TMat<3>> es;
    es.computeDirect(a_sym);
    if (!(es.eigenvalues().minCoeff() > 0.0))
      throw std::invalid_argument("aniso_eigenvalues: A is not positive definite");
    TMat<3> sqrt_a = es.eigenvectors() *
                     es.eigenvalues().cwiseSqrt().asDiagonal() *
                     es.eigenvectors().transpose();
    TMat<3> m = sqrt_a * s_sym * sqrt_a;
    m = 0.5 * (m + m.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<TMat<3>> ms;
    ms.computeDirect(m);
    return ms.eigenvalues();  // ascending
  }
}

/// Normalized elementary symmetric means H_r = sigma_r / C(n, r), H_0 = 1.
template <int N>
std::array<double, N> mean_curvatures(const TVec<N>& lambda) {
  constexpr int n = N - 1;
  std::array<double, N> e{};
  e[0] = 1.0;
  for (int i = 0; i < n; ++i)
    for (int r = i + 1; r >= 1; --r) e[r] += lambda(i) * e[r - 1];
  std::array<double, N> h{};
  for (int r = 0; r <= n; ++r) h[r] = e[r] / binomial(n, r);
  return h;
}

/// Full pointwise anisotropic geometry of a chart point. The shape operator
/// and A_F are expressed in the deterministic orthonormal frame of nu^perp,
/// which identifies the surface tangent plane with the sphere tangent plane.
template <int N>
struct GeometryJet {
  TVec<N> parameter;
  Vec<N> position;
  Vec<N> normal;
  double area_weight = 0.0;
  Frame<N> frame;
  TMat<N> shape_operator;    // S = -d nu
  TMat<N> af;                // A_F(nu)
  TMat<N> aniso_operator;    // S_F = A_F o S
  TVec<N> aniso_curvatures;  // ascending
  std::array<double, N> hr;  // H_0 .. H_n
  double hf = 0.0;           // trace of S_F = n H_1
  double f_value = 0.0;      // F(nu)
  double support = 0.0;      // <x, nu>
  Vec<N> df_ambient = Vec<N>::Zero();  // DF|_nu as an ambient (tangent) vector
  bool has_grad_hf = false;
  Vec<N> grad_hf_ambient = Vec<N>::Zero();
  TVec<N> grad_hf = TVec<N>::Zero();  // frame coordinates

  double trace_sf2() const { return (aniso_operator * aniso_operator).trace(); }
  double trace_af_s2() const {
    return (af * shape_operator * shape_operator).trace();
  }
  double mean_h() const { return shape_operator.trace() / (N - 1); }
};

template <int N>
struct JetOptions {
  bool with_grad_hf = false;
  /// Central-difference step for grad H_F per chart direction; 0 = pick
  /// 1e-2 of the default grid spacing.
  std::array<double, N - 1> fd_step{};
};

namespace detail {

template <int N>
double orientation_sign(const ParametricSurface<N>& surface) {
  double sign = surface.chart->outward_sign();
  return surface.orientation == Orientation::inner ? -sign : sign;
}

template <int N>
Vec<N> raw_normal(const ChartJet2<N>& jet) {
  if constexpr (N == 2)
    return rotate_cw(jet.d1[0]);
  else
    return jet.d1[0].cross(jet.d1[1]);
}

/// Shared core: frame, shape operator, A_F and S_F at one chart point.
template <int N>
struct JetCore {
  ChartJet2<N> chart;
  Vec<N> normal;
  double det_g = 0.0;
  Eigen::Matrix<double, N, N - 1> tangents;  // chart basis, columns
  TMat<N> metric_inv;
  Frame<N> frame;
  TMat<N> s_frame;
  TMat<N> a_frame;
};

template <int N>
JetCore<N> jet_core(const ParametricSurface<N>& surface,
                    const SphereFunction<N>& f, const TVec<N>& u) {
  constexpr int n = N - 1;
  JetCore<N> core;
  core.chart = surface.chart->jet2(u);
  core.chart.x += surface.shift;

  for (int i = 0; i < n; ++i) core.tangents.col(i) = core.chart.d1[i];
  TMat<N> metric = core.tangents.transpose() * core.tangents;
  core.det_g = metric.determinant();
  if (!(core.det_g >= 1e-10))
    throw DegenerateMetricError(surface.chart->describe() +
                                ": degenerate metric (non-immersion point)");
  core.metric_inv = metric.inverse();

  Vec<N> w = raw_normal<N>(core.chart);
  core.normal = orientation_sign(surface) * w.normalized();

  TMat<N> second;  // II_ij = <x_ij, nu>
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      second(i, j) = core.chart.d2[i + j].dot(core.normal);
      second(j, i) = second(i, j);
    }

  core.frame = tangent_frame<N>(core.normal);
  TMat<N> m = core.metric_inv * (core.tangents.transpose() * core.frame);
  // S in the orthonormal frame: E^T X G^-1 II G^-1 X^T E
  core.s_frame = m.transpose() * second * m;
  core.s_frame = 0.5 * (core.s_frame + core.s_frame.transpose()).eval();

  TMat<N> a = core.frame.transpose() * f.hessian(core.normal) * core.frame;
  core.a_frame = 0.5 * (a + a.transpose()).eval();
  return core;
}

template <int N>
double hf_at(const ParametricSurface<N>& surface, const SphereFunction<N>& f,
             const TVec<N>& u) {
  JetCore<N> core = jet_core(surface, f, u);
  return (core.a_frame * core.s_frame).trace();
}

}  // namespace detail

template <int N>
GeometryJet<N> geometry_jet(const ParametricSurface<N>& surface,
                            const SphereFunction<N>& f, const TVec<N>& u,
                            const JetOptions<N>& opts = {}) {
  constexpr int n = N - 1;
  detail::JetCore<N> core = detail::jet_core(surface, f, u);

  GeometryJet<N> jet;
  jet.parameter = u;
  jet.position = core.chart.x;
  jet.normal = core.normal;
  jet.area_weight = std::sqrt(core.det_g);
  jet.frame = core.frame;
  jet.shape_operator = core.s_frame;
  jet.af = core.a_frame;
  jet.aniso_operator = core.a_frame * core.s_frame;
  jet.aniso_curvatures = aniso_eigenvalues<N>(core.s_frame, core.a_frame);
  jet.hr = mean_curvatures<N>(jet.aniso_curvatures);
  jet.hf = jet.aniso_operator.trace();
  jet.f_value = f.value(core.normal);
  jet.support = core.chart.x.dot(core.normal);
  jet.df_ambient = f.gradient(core.normal) - jet.f_value * core.normal;

  if (opts.with_grad_hf) {
    TVec<N> dh;
    for (int i = 0; i < n; ++i) {
      double h = opts.fd_step[i] > 0.0 ? opts.fd_step[i] : 1e-3;
      TVec<N> up = u, dn = u;
      up(i) += h;
      dn(i) -= h;
      dh(i) = (detail::hf_at(surface, f, up) - detail::hf_at(surface, f, dn)) /
              (2.0 * h);
    }
    jet.grad_hf_ambient = core.tangents * (core.metric_inv * dh);
    jet.grad_hf = core.frame.transpose() * jet.grad_hf_ambient;
    jet.has_grad_hf = true;
  }
  return jet;
}

/// Tangential gradient of H_F by central differences in chart coordinates,
/// raised with the inverse metric; returned as an ambient vector.
template <int N>
Vec<N> grad_hf(const ParametricSurface<N>& surface, const SphereFunction<N>& f,
               const TVec<N>& u, const std::array<double, N - 1>& fd_step = {}) {
  JetOptions<N> opts;
  opts.with_grad_hf = true;
  opts.fd_step = fd_step;
  return geometry_jet(surface, f, u, opts).grad_hf_ambient;
}

/// max over the grid of (lambda_max - lambda_min) / max(|lambda_min|, eps).
template <int N>
double umbilicity_defect(const ParametricSurface<N>& surface,
                         const SphereFunction<N>& f,
                         const QuadratureGrid<N>& grid) {
  double worst = 0.0;
  for (const auto& node : grid.nodes) {
    GeometryJet<N> jet = geometry_jet(surface, f, node.u);
    double lo = jet.aniso_curvatures(0);
    double hi = jet.aniso_curvatures(N - 2);
    worst = std::max(worst, (hi - lo) / std::max(std::abs(lo), 1e-12));
  }
  return worst;
}

template <int N>
struct WulffFit {
  Vec<N> center = Vec<N>::Zero();
  double scale = 0.0;
  double rms_residual = 0.0;  // normalized by the sampled diameter
  double raw_rms = 0.0;
  double diameter = 0.0;
};

/// Least-squares fit x(u) ~ center + scale * phi(nu(u)) over the grid; the
/// Gauss map is taken outward, matching the Wulff parametrization. Linear in
/// center and scale.
template <int N>
WulffFit<N> wulff_fit(const ParametricSurface<N>& surface,
                      const SphereFunction<N>& f,
                      const QuadratureGrid<N>& grid) {
  ParametricSurface<N> outer = surface.with_orientation(Orientation::outer);
  const size_t m = grid.nodes.size();
  std::vector<Vec<N>> phis(m), xs(m);
  for (size_t k = 0; k < m; ++k) {
    GeometryJet<N> jet = geometry_jet(outer, f, grid.nodes[k].u);
    phis[k] = f.gradient(jet.normal);
    xs[k] = jet.position;
  }

  Eigen::Matrix<double, N + 1, N + 1> lhs;
  lhs.setZero();
  Eigen::Matrix<double, N + 1, 1> rhs;
  rhs.setZero();
  for (size_t k = 0; k < m; ++k) {
    lhs.template topLeftCorner<N, N>() += Mat<N>::Identity();
    lhs.template block<N, 1>(0, N) += phis[k];
    lhs.template block<1, N>(N, 0) += phis[k].transpose();
    lhs(N, N) += phis[k].squaredNorm();
    rhs.template head<N>() += xs[k];
    rhs(N) += phis[k].dot(xs[k]);
  }
  Eigen::FullPivLU<Eigen::Matrix<double, N + 1, N + 1>> lu(lhs);
  if (!lu.isInvertible())
    throw std::invalid_argument("wulff_fit: degenerate normal field, fit matrix singular");
  Eigen::Matrix<double, N + 1, 1> sol = lu.solve(rhs);

  WulffFit<N> fit;
  fit.center = sol.template head<N>();
  fit.scale = sol(N);

  KahanSum sq;
  for (size_t k = 0; k < m; ++k)
    sq.add((fit.center + fit.scale * phis[k] - xs[k]).squaredNorm());
  fit.raw_rms = std::sqrt(sq.total() / double(m));

  // Diameter of a deterministic subsample (stride so that <= 512 points).
  size_t stride = std::max<size_t>(1, m / 512);
  double diam = 0.0;
  for (size_t a = 0; a < m; a += stride)
    for (size_t b = a + stride; b < m; b += stride)
      diam = std::max(diam, (xs[a] - xs[b]).norm());
  fit.diameter = diam;
  fit.rms_residual = diam > 0.0 ? fit.raw_rms / diam : fit.raw_rms;
  return fit;
}

/// Intrinsic divergence of a tangential field on the surface, computed as the
/// metric-weighted chart divergence with central differences of the field's
/// chart components.
template <int N, class FieldFn>
double chart_divergence(const ParametricSurface<N>& surface,
                        const FieldFn& field, const TVec<N>& u,
                        const std::array<double, N - 1>& fd_step) {
  constexpr int n = N - 1;
  auto weighted_components = [&](const TVec<N>& uu) {
    ChartJet2<N> chart = surface.chart->jet2(uu);
    Eigen::Matrix<double, N, n> tangents;
    for (int i = 0; i < n; ++i) tangents.col(i) = chart.d1[i];
    TMat<N> metric = tangents.transpose() * tangents;
    double root_g = std::sqrt(metric.determinant());
    TVec<N> comps = metric.inverse() * (tangents.transpose() * field(uu));
    return TVec<N>(root_g * comps);
  };
  ChartJet2<N> chart = surface.chart->jet2(u);
  Eigen::Matrix<double, N, n> tangents;
  for (int i = 0; i < n; ++i) tangents.col(i) = chart.d1[i];
  double root_g = std::sqrt((tangents.transpose() * tangents).determinant());

  double div = 0.0;
  for (int i = 0; i < n; ++i) {
    double h = fd_step[i] > 0.0 ? fd_step[i] : 1e-3;
    TVec<N> up = u, dn = u;
    up(i) += h;
    dn(i) -= h;
    div += (weighted_components(up)(i) - weighted_components(dn)(i)) / (2.0 * h);
  }
  return div / root_g;
}

}  // namespace aniso
