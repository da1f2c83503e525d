#pragma once

#include "aniso/charts.hpp"
#include "aniso/core.hpp"

#include <numbers>
#include <vector>

namespace aniso {

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// three-term recurrence.
inline void gauss_legendre(int n, std::vector<double>& x,
                           std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const double pi = std::numbers::pi;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double xi = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = xi;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * xi * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
      double dx = p1 / dp;
      xi -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    x[i] = -xi;
    x[n - 1 - i] = xi;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - xi * xi) * dp * dp);
  }
}

/// Chart-coordinate quadrature nodes with scalar weights. Integrals of a
/// density f over the surface are sums of weight * area_weight * f in fixed
/// node order. Periodic directions use the trapezoid rule (spectral accuracy
/// for smooth closed charts); the polar direction of sphere-type charts uses
/// Gauss-Legendre in cos(theta), which keeps every node away from the
/// coordinate poles.
template <int N>
struct QuadratureGrid {
  struct Node {
    TVec<N> u;
    double weight;
  };
  std::vector<Node> nodes;
  std::array<int, N - 1> resolution{};
  std::array<double, N - 1> spacing{};  // typical chart-coordinate step
  GridKind kind = GridKind::circle;
};

template <int N>
QuadratureGrid<N> make_grid(const ParametricSurface<N>& surface,
                            const std::array<int, N - 1>& resolution) {
  const double pi = std::numbers::pi;
  QuadratureGrid<N> grid;
  grid.kind = surface.chart->grid_kind();
  grid.resolution = resolution;

  if constexpr (N == 2) {
    int n = resolution[0];
    require(n >= 4, "make_grid: need at least 4 nodes");
    grid.spacing = {2.0 * pi / n};
    grid.nodes.reserve(n);
    for (int k = 0; k < n; ++k)
      grid.nodes.push_back({TVec<2>(TVec<2>::Constant(2.0 * pi * k / n)),
                            2.0 * pi / n});
  } else {
    int nu = resolution[0], nv = resolution[1];
    require(nu >= 4 && nv >= 4, "make_grid: need at least 4 nodes per axis");
    grid.nodes.reserve(static_cast<size_t>(nu) * nv);
    if (grid.kind == GridKind::torus) {
      grid.spacing = {2.0 * pi / nu, 2.0 * pi / nv};
      for (int i = 0; i < nu; ++i)
        for (int j = 0; j < nv; ++j)
          grid.nodes.push_back({TVec<3>(2.0 * pi * i / nu, 2.0 * pi * j / nv),
                                (2.0 * pi / nu) * (2.0 * pi / nv)});
    } else {
      std::vector<double> gx, gw;
      gauss_legendre(nu, gx, gw);
      grid.spacing = {pi / nu, 2.0 * pi / nv};
      for (int i = 0; i < nu; ++i) {
        double theta = std::acos(gx[nu - 1 - i]);  // increasing theta
        double wi = gw[nu - 1 - i] / std::sin(theta);
        for (int j = 0; j < nv; ++j)
          grid.nodes.push_back(
              {TVec<3>(theta, 2.0 * pi * j / nv), wi * (2.0 * pi / nv)});
      }
    }
  }
  return grid;
}

template <int N>
QuadratureGrid<N> default_grid(const ParametricSurface<N>& surface) {
  if constexpr (N == 2)
    return make_grid<2>(surface, {512});
  else
    return make_grid<3>(surface, {64, 128});
}

/// The same grid at k times the resolution in every direction.
template <int N>
QuadratureGrid<N> refined_grid(const ParametricSurface<N>& surface,
                               const QuadratureGrid<N>& grid, int factor) {
  std::array<int, N - 1> res = grid.resolution;
  for (auto& r : res) r *= factor;
  return make_grid<N>(surface, res);
}

}  // namespace aniso
