#pragma once

#include "aniso/core.hpp"
#include "aniso/hypersurface.hpp"
#include "aniso/quadrature.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace aniso {

namespace detail {

/// One pass over the grid, accumulating integrand values in fixed node order.
template <int N, class Fn>
double surface_integral(const ParametricSurface<N>& surface,
                        const SphereFunction<N>& f,
                        const QuadratureGrid<N>& grid, bool with_grad_hf,
                        const Fn& integrand) {
  JetOptions<N> opts;
  opts.with_grad_hf = with_grad_hf;
  for (int i = 0; i < N - 1; ++i) opts.fd_step[i] = 1e-2 * grid.spacing[i];
  KahanSum acc;
  for (const auto& node : grid.nodes) {
    GeometryJet<N> jet = geometry_jet(surface, f, node.u, opts);
    acc.add(node.weight * jet.area_weight * integrand(jet));
  }
  return acc.total();
}

}  // namespace detail

/// Anisotropic surface energy: integral of F(nu) dA.
template <int N>
double anisotropic_energy(const ParametricSurface<N>& surface,
                          const SphereFunction<N>& f,
                          const QuadratureGrid<N>& grid) {
  return detail::surface_integral(surface, f, grid, false,
                                  [](const GeometryJet<N>& j) { return j.f_value; });
}

/// Surface area (energy of the constant anisotropy 1).
template <int N>
double surface_area(const ParametricSurface<N>& surface,
                    const QuadratureGrid<N>& grid) {
  return anisotropic_energy(surface, SphereFunction<N>::constant(1.0), grid);
}

/// Enclosed volume (1/(n+1)) integral of <x, nu> dA, evaluated with the
/// outward normal so embedded surfaces get positive volume.
template <int N>
double enclosed_volume(const ParametricSurface<N>& surface,
                       const QuadratureGrid<N>& grid) {
  ParametricSurface<N> outer = surface.with_orientation(Orientation::outer);
  double integral = detail::surface_integral(
      outer, SphereFunction<N>::constant(1.0), grid, false,
      [](const GeometryJet<N>& j) { return j.support; });
  return integral / double(N);
}

template <int N>
struct ResidualValue {
  double raw = 0.0;
  double normalizer = 0.0;  // integral of |integrand|
  double normalized = 0.0;
};

/// Minkowski identity residual: integral of (H_r F(nu) + H_{r+1} <x,nu>) dA,
/// which vanishes on closed hypersurfaces for r = 0..n-1.
template <int N>
ResidualValue<N> minkowski_residual(const ParametricSurface<N>& surface,
                                    const SphereFunction<N>& f,
                                    const QuadratureGrid<N>& grid, int r) {
  require(r >= 0 && r < N - 1, "minkowski_residual: r must be in [0, n-1]");
  KahanSum raw, denom;
  for (const auto& node : grid.nodes) {
    GeometryJet<N> jet = geometry_jet(surface, f, node.u);
    double da = node.weight * jet.area_weight;
    raw.add(da * (jet.hr[r] * jet.f_value + jet.hr[r + 1] * jet.support));
    denom.add(da * std::abs(jet.hr[r] * jet.f_value));
  }
  ResidualValue<N> out;
  out.raw = raw.total();
  out.normalizer = denom.total();
  out.normalized = out.normalizer > 0.0 ? out.raw / out.normalizer : out.raw;
  return out;
}

template <int N>
struct HeintzeKarcherResult {
  double gap = 0.0;         // n * integral(F/H_F) - (n+1) V
  double q_integral = 0.0;  // n * integral(F/H_F) dA
  double volume = 0.0;
  double min_hf = 0.0;
};

/// Heintze-Karcher gap with respect to the inner normal. Throws
/// PreconditionError when H_F is not positive on the whole grid; the theorem
/// does not apply there.
template <int N>
HeintzeKarcherResult<N> hk_gap(const ParametricSurface<N>& surface,
                               const SphereFunction<N>& f,
                               const QuadratureGrid<N>& grid) {
  constexpr int n = N - 1;
  ParametricSurface<N> inner = surface.with_orientation(Orientation::inner);
  HeintzeKarcherResult<N> out;
  out.min_hf = std::numeric_limits<double>::infinity();
  KahanSum q;
  for (const auto& node : grid.nodes) {
    GeometryJet<N> jet = geometry_jet(inner, f, node.u);
    out.min_hf = std::min(out.min_hf, jet.hf);
    if (!(jet.hf > 0.0))
      throw PreconditionError(
          "hk_gap: inner-normal H_F is not positive at chart coordinates (" +
          std::to_string(node.u(0)) +
          (N == 3 ? ", " + std::to_string(node.u(1)) : std::string()) + ")");
    q.add(node.weight * jet.area_weight * jet.f_value / jet.hf);
  }
  out.q_integral = n * q.total();
  out.volume = enclosed_volume(surface, grid);
  out.gap = out.q_integral - double(N) * out.volume;
  return out;
}

template <int N>
struct IdentityResiduals {
  ResidualValue<N> scalar;   // from Delta_F(F o nu) = tr(S_F^2) - ...
  ResidualValue<N> support;  // from Delta_F p + ... = 0
  Vec<N> vector_raw = Vec<N>::Zero();
  double vector_normalizer = 0.0;
  double vector_normalized = 0.0;
};

/// Integrated fundamental identities. Pointwise they involve Delta_F, whose
/// integral over a closed surface vanishes, leaving:
///   scalar:  integral[ tr(S_F^2) - tr(A_F S^2) F(nu) - <grad H_F, DF|_nu> ] = 0
///   vector:  integral[ tr(A_F S^2) nu + grad H_F ] = 0 (componentwise)
///   support: integral[ tr(A_F S^2) p + H_F + <x, grad H_F> ] = 0
template <int N>
IdentityResiduals<N> identity_residuals(const ParametricSurface<N>& surface,
                                        const SphereFunction<N>& f,
                                        const QuadratureGrid<N>& grid) {
  JetOptions<N> opts;
  opts.with_grad_hf = true;
  for (int i = 0; i < N - 1; ++i) opts.fd_step[i] = 1e-2 * grid.spacing[i];

  KahanSum s_raw, s_den, s_mag, p_raw, p_den, p_mag, v_den, v_mag;
  std::array<KahanSum, N> v_raw;
  for (const auto& node : grid.nodes) {
    GeometryJet<N> jet = geometry_jet(surface, f, node.u, opts);
    double da = node.weight * jet.area_weight;
    double tr_af_s2 = jet.trace_af_s2();

    double s_int = jet.trace_sf2() - tr_af_s2 * jet.f_value -
                   jet.grad_hf_ambient.dot(jet.df_ambient);
    s_raw.add(da * s_int);
    s_den.add(da * std::abs(s_int));
    s_mag.add(da * (std::abs(jet.trace_sf2()) +
                    std::abs(tr_af_s2 * jet.f_value) +
                    std::abs(jet.grad_hf_ambient.dot(jet.df_ambient))));

    Vec<N> v_int = tr_af_s2 * jet.normal + jet.grad_hf_ambient;
    for (int c = 0; c < N; ++c) v_raw[c].add(da * v_int(c));
    v_den.add(da * v_int.norm());
    v_mag.add(da * (std::abs(tr_af_s2) + jet.grad_hf_ambient.norm()));

    double p_int = tr_af_s2 * jet.support + jet.hf +
                   jet.position.dot(jet.grad_hf_ambient);
    p_raw.add(da * p_int);
    p_den.add(da * std::abs(p_int));
    p_mag.add(da * (std::abs(tr_af_s2 * jet.support) + std::abs(jet.hf) +
                    std::abs(jet.position.dot(jet.grad_hf_ambient))));
  }

  // When an integrand cancels pointwise to machine precision, the integral
  // of its absolute value is itself roundoff and the quotient degenerates to
  // 0/0. Flooring the normalizer by a small multiple of the summed term
  // magnitudes keeps the reported residual scale-free and finite.
  auto finalize = [](double raw, double den, double mag) {
    double floor = 1e-8 * mag;
    double d = std::max(den, floor);
    return d > 0.0 ? raw / d : raw;
  };

  IdentityResiduals<N> out;
  out.scalar.raw = s_raw.total();
  out.scalar.normalizer = std::max(s_den.total(), 1e-8 * s_mag.total());
  out.scalar.normalized = finalize(out.scalar.raw, s_den.total(), s_mag.total());
  out.support.raw = p_raw.total();
  out.support.normalizer = std::max(p_den.total(), 1e-8 * p_mag.total());
  out.support.normalized = finalize(out.support.raw, p_den.total(), p_mag.total());
  for (int c = 0; c < N; ++c) out.vector_raw(c) = v_raw[c].total();
  out.vector_normalizer = std::max(v_den.total(), 1e-8 * v_mag.total());
  out.vector_normalized = finalize(out.vector_raw.norm(), v_den.total(), v_mag.total());
  return out;
}

struct GardingResult {
  bool all_hold = true;
  double worst_margin = std::numeric_limits<double>::infinity();
  long nodes_checked = 0;  // nodes with all anisotropic curvatures positive
};

/// Maclaurin chain H_{r-1} >= H_r^((r-1)/r) and H_r^(1/r) <= H_1 at every
/// node where all anisotropic principal curvatures are positive. The r = 1
/// rows are identities (1 >= 1 and H_1 <= H_1); they are asserted but kept
/// out of the reported worst margin, which tracks the informative rows only.
template <int N>
GardingResult garding_check(const ParametricSurface<N>& surface,
                            const SphereFunction<N>& f,
                            const QuadratureGrid<N>& grid,
                            double tolerance = 1e-10) {
  constexpr int n = N - 1;
  GardingResult out;
  bool trivial_rows_hold = true;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& node : grid.nodes) {
    GeometryJet<N> jet = geometry_jet(surface, f, node.u);
    if (!(jet.aniso_curvatures(0) > 0.0)) continue;
    ++out.nodes_checked;
    trivial_rows_hold = trivial_rows_hold && jet.hr[0] >= 1.0 - tolerance;
    for (int r = 2; r <= n; ++r) {
      double lhs = jet.hr[r - 1];
      double rhs = std::pow(jet.hr[r], double(r - 1) / double(r));
      worst = std::min(worst, lhs - rhs);
      double root = std::pow(jet.hr[r], 1.0 / double(r));
      worst = std::min(worst, jet.hr[1] - root);
    }
  }
  if (!std::isfinite(worst)) worst = 0.0;  // no informative rows (n = 1)
  out.worst_margin = worst;
  out.all_hold = trivial_rows_hold && worst >= -tolerance;
  return out;
}

/// Aggregated integral quantities of one surface/anisotropy pair.
template <int N>
struct IntegralReport {
  double area = 0.0;
  double energy = 0.0;
  double volume = 0.0;
  std::array<double, N - 1> minkowski_normalized{};
  std::array<double, N - 1> minkowski_raw{};
  IdentityResiduals<N> identities;
  double min_hf = 0.0;
  std::optional<HeintzeKarcherResult<N>> hk;  // absent when H_F <= 0 somewhere
  std::array<int, N - 1> resolution{};
  Orientation orientation = Orientation::inner;
};

template <int N>
IntegralReport<N> compute_integral_report(const ParametricSurface<N>& surface,
                                          const SphereFunction<N>& f,
                                          const QuadratureGrid<N>& grid) {
  IntegralReport<N> rep;
  rep.resolution = grid.resolution;
  rep.orientation = surface.orientation;
  rep.area = surface_area(surface, grid);
  rep.energy = anisotropic_energy(surface, f, grid);
  rep.volume = enclosed_volume(surface, grid);
  for (int r = 0; r < N - 1; ++r) {
    auto m = minkowski_residual(surface, f, grid, r);
    rep.minkowski_raw[r] = m.raw;
    rep.minkowski_normalized[r] = m.normalized;
  }
  rep.identities = identity_residuals(surface, f, grid);

  ParametricSurface<N> inner = surface.with_orientation(Orientation::inner);
  rep.min_hf = std::numeric_limits<double>::infinity();
  for (const auto& node : grid.nodes) {
    GeometryJet<N> jet = geometry_jet(inner, f, node.u);
    rep.min_hf = std::min(rep.min_hf, jet.hf);
  }
  if (rep.min_hf > 0.0) rep.hk = hk_gap(surface, f, grid);
  return rep;
}

}  // namespace aniso
