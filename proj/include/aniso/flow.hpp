#pragma once

#include "aniso/charts.hpp"
#include "aniso/core.hpp"
#include "aniso/hypersurface.hpp"
#include "aniso/integrals.hpp"
#include "aniso/quadrature.hpp"

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace aniso {

/// Chart of the flowed surface Sigma_t: u -> x(u) + t * phi(nu(u)) with the
/// anisotropic normal nu_F = phi o nu frozen on the base surface at t = 0
/// (straight-line foliation). First and second chart derivatives are
/// analytic; they need the base normal jets and the second and third
/// derivatives of the ambient extension of F.
template <int N>
class FlowedChart final : public ChartBase<N> {
 public:
  FlowedChart(std::shared_ptr<const ChartBase<N>> base, SphereFunction<N> f,
              double t)
      : base_(std::move(base)), f_(std::move(f)), t_(t) {}

  ChartJet2<N> jet2(const TVec<N>& u) const override {
    constexpr int n = N - 1;
    ChartJet2<N> jet = base_->jet2(u);
    NormalJet2<N> nrm = outward_normal_jet2(*base_, u);
    // inner normal drives the flow
    nrm.nu = -nrm.nu;
    for (auto& v : nrm.d1) v = -v;
    for (auto& v : nrm.d2) v = -v;

    Mat<N> hess = f_.hessian(nrm.nu);
    Sym3<N> third = f_.third(nrm.nu);
    jet.x += t_ * f_.gradient(nrm.nu);
    for (int i = 0; i < n; ++i) jet.d1[i] += t_ * (hess * nrm.d1[i]);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        jet.d2[i + j] +=
            t_ * (third.contract(nrm.d1[i], nrm.d1[j]) + hess * nrm.d2[i + j]);
    return jet;
  }

  bool has_third_derivatives() const override { return false; }
  double outward_sign() const override { return base_->outward_sign(); }
  GridKind grid_kind() const override { return base_->grid_kind(); }
  std::string describe() const override {
    return "flowed(" + base_->describe() + ", t=" + std::to_string(t_) + ")";
  }

 private:
  std::shared_ptr<const ChartBase<N>> base_;
  SphereFunction<N> f_;
  double t_;
};

enum class FlowTermination { t_max, immersion_failure, hf_nonpositive };

inline std::string to_string(FlowTermination t) {
  switch (t) {
    case FlowTermination::t_max: return "t_max";
    case FlowTermination::immersion_failure: return "immersion_failure";
    case FlowTermination::hf_nonpositive: return "hf_nonpositive";
  }
  return "unknown";
}

/// Snapshot of the foliation at one time. The flowed surface keeps the inner
/// orientation of the base; validity reflects the grid scan of the metric
/// determinant and of H_F.
template <int N>
struct FlowState {
  ParametricSurface<N> base;
  double t = 0.0;
  ParametricSurface<N> surface;  // Sigma_t
  bool valid = false;
  double min_detg = 0.0;
  double min_hf = 0.0;
  double min_jacobian = 1.0;  // signed tangent-map determinant of the flow
};

template <int N>
struct FlowSample {
  double t = 0.0;
  double q = 0.0;
  double q_prime_analytic = 0.0;
  double q_prime_fd = 0.0;
  double min_hf = 0.0;
  double min_detg = 0.0;
  double energy = 0.0;  // integral of F(nu_t) over Sigma_t
};

template <int N>
struct FlowTrace {
  std::vector<FlowSample<N>> samples;
  FlowTermination termination = FlowTermination::t_max;
  double dt = 0.0;
  double base_min_detg = 0.0;
};

namespace detail {

template <int N>
double min_detg_on_grid(const ParametricSurface<N>& surface,
                        const QuadratureGrid<N>& grid) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& node : grid.nodes) {
    ChartJet2<N> jet = surface.chart->jet2(node.u);
    Eigen::Matrix<double, N, N - 1> tangents;
    for (int i = 0; i < N - 1; ++i) tangents.col(i) = jet.d1[i];
    best = std::min(best, (tangents.transpose() * tangents).determinant());
  }
  return best;
}

template <int N>
double min_hf_on_grid(const ParametricSurface<N>& surface,
                      const SphereFunction<N>& f,
                      const QuadratureGrid<N>& grid) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& node : grid.nodes)
    best = std::min(best, hf_at(surface, f, node.u));
  return best;
}

/// Signed determinant of the flow's tangent map at each node: the flowed
/// raw normal projected onto the base one. The metric determinant alone is a
/// square and can step across a pointwise zero between samples without
/// dipping under the threshold; the sign catches exactly those crossings.
template <int N>
double min_signed_jacobian_on_grid(const ParametricSurface<N>& base,
                                   const ParametricSurface<N>& flowed,
                                   const QuadratureGrid<N>& grid) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& node : grid.nodes) {
    Vec<N> w0 = raw_normal<N>(base.chart->jet2(node.u));
    Vec<N> wt = raw_normal<N>(flowed.chart->jet2(node.u));
    best = std::min(best, wt.dot(w0) / w0.squaredNorm());
  }
  return best;
}

}  // namespace detail

/// Builds Sigma_t from the base surface; never throws for immersion failure,
/// which is recorded as valid = false instead.
template <int N>
FlowState<N> flow_surface(const ParametricSurface<N>& surface,
                          const SphereFunction<N>& f, double t,
                          const QuadratureGrid<N>& grid) {
  require(t >= 0.0, "flow_surface: t must be nonnegative");
  FlowState<N> state;
  state.base = surface.with_orientation(Orientation::inner);
  state.t = t;
  state.surface.chart =
      std::make_shared<FlowedChart<N>>(surface.chart, f, t);
  state.surface.orientation = Orientation::inner;
  state.surface.shift = surface.shift;

  double base_detg = detail::min_detg_on_grid(state.base, grid);
  try {
    state.min_detg = detail::min_detg_on_grid(state.surface, grid);
    state.min_jacobian =
        detail::min_signed_jacobian_on_grid(state.base, state.surface, grid);
    state.min_hf = detail::min_hf_on_grid(state.surface, f, grid);
    // the relative fuzz keeps a chart sitting exactly on the threshold valid
    state.valid = state.min_detg >= 1e-8 * base_detg * (1.0 - 1e-6) &&
                  state.min_jacobian > 0.0 && state.min_hf > 0.0;
  } catch (const DegenerateMetricError&) {
    state.min_detg = 0.0;
    state.min_hf = 0.0;
    state.min_jacobian = 0.0;
    state.valid = false;
  }
  return state;
}

/// Q(t) = n * integral of F(nu_t) / H_F over Sigma_t.
template <int N>
double q_value(const FlowState<N>& state, const SphereFunction<N>& f,
               const QuadratureGrid<N>& grid) {
  constexpr int n = N - 1;
  KahanSum acc;
  for (const auto& node : grid.nodes) {
    GeometryJet<N> jet = geometry_jet(state.surface, f, node.u);
    if (!(jet.hf > 0.0))
      throw PreconditionError(
          "q_value: H_F <= 0 at chart coordinates (" +
          std::to_string(node.u(0)) +
          (N == 3 ? ", " + std::to_string(node.u(1)) : std::string()) + ")");
    acc.add(node.weight * jet.area_weight * jet.f_value / jet.hf);
  }
  return n * acc.total();
}

/// Analytic derivative of Q along the foliation:
/// Q'(t) = -n * integral of (tr(S_F^2)/H_F^2 + 1) F(nu_t) dA_t.
template <int N>
double q_prime_analytic(const FlowState<N>& state, const SphereFunction<N>& f,
                        const QuadratureGrid<N>& grid) {
  constexpr int n = N - 1;
  KahanSum acc;
  for (const auto& node : grid.nodes) {
    GeometryJet<N> jet = geometry_jet(state.surface, f, node.u);
    if (!(jet.hf > 0.0))
      throw PreconditionError("q_prime_analytic: H_F <= 0 on the grid");
    acc.add(node.weight * jet.area_weight *
            (jet.trace_sf2() / (jet.hf * jet.hf) + 1.0) * jet.f_value);
  }
  return -n * acc.total();
}

namespace detail {

/// Q at an arbitrary (possibly slightly negative) time, for finite
/// differencing only. NaN when the chart degenerates or H_F crosses zero.
template <int N>
double q_at_unchecked(const ParametricSurface<N>& base,
                      const SphereFunction<N>& f, double t,
                      const QuadratureGrid<N>& grid) {
  FlowState<N> state;
  state.base = base;
  state.t = t;
  state.surface.chart = std::make_shared<FlowedChart<N>>(base.chart, f, t);
  state.surface.orientation = Orientation::inner;
  state.surface.shift = base.shift;
  try {
    return q_value(state, f, grid);
  } catch (const DegenerateMetricError&) {
    return std::numeric_limits<double>::quiet_NaN();
  } catch (const PreconditionError&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace detail

/// Samples the foliation at t = k dt until t_max or breakdown. Q'_fd uses
/// centered differences at steps dt/4 and dt/8 with one Richardson
/// extrapolation level.
template <int N>
FlowTrace<N> run_flow(const ParametricSurface<N>& surface,
                      const SphereFunction<N>& f, double dt, double t_max,
                      const QuadratureGrid<N>& grid) {
  require(dt > 0.0, "run_flow: dt must be positive");
  ParametricSurface<N> base = surface.with_orientation(Orientation::inner);
  FlowTrace<N> trace;
  trace.dt = dt;
  trace.base_min_detg = detail::min_detg_on_grid(base, grid);

  for (int k = 0;; ++k) {
    double t = k * dt;
    if (t > t_max + 1e-12) {
      trace.termination = FlowTermination::t_max;
      break;
    }
    FlowState<N> state = flow_surface(base, f, t, grid);
    if (!state.valid) {
      bool immersion_ok =
          state.min_detg >= 1e-8 * trace.base_min_detg * (1.0 - 1e-6) &&
          state.min_jacobian > 0.0;
      trace.termination = immersion_ok ? FlowTermination::hf_nonpositive
                                       : FlowTermination::immersion_failure;
      break;
    }
    FlowSample<N> sample;
    sample.t = t;
    sample.min_hf = state.min_hf;
    sample.min_detg = state.min_detg;
    sample.q = q_value(state, f, grid);
    sample.q_prime_analytic = q_prime_analytic(state, f, grid);
    sample.energy = anisotropic_energy(state.surface, f, grid);
    double h = dt / 4.0;
    auto qa = [&](double tt) { return detail::q_at_unchecked(base, f, tt, grid); };
    double d1 = (qa(t + h) - qa(t - h)) / (2.0 * h);
    double d2 = (qa(t + h / 2) - qa(t - h / 2)) / h;
    sample.q_prime_fd = (4.0 * d2 - d1) / 3.0;
    trace.samples.push_back(sample);
  }
  return trace;
}

/// Lower-bound proxy for the first breakdown time of the foliation (the
/// minimum of the F-cut function over the base): the last valid sample time
/// plus half a step. Empty when the flow simply reached t_max.
template <int N>
std::optional<double> breakdown_estimate(const FlowTrace<N>& trace) {
  if (trace.termination == FlowTermination::t_max || trace.samples.empty())
    return std::nullopt;
  return trace.samples.back().t + 0.5 * trace.dt;
}

/// Relative residual of the area-element evolution equation
/// d/dt dA_t = (div xi - n H f) dA_t at one chart point, with xi = DF|_nu
/// and f = F(nu) frozen on the base surface. Checks the evolution identity
/// by central differencing the flowed area weight in t.
template <int N>
double area_rate_residual(const ParametricSurface<N>& surface,
                          const SphereFunction<N>& f, double t,
                          const TVec<N>& u, double dt_fd,
                          const std::array<double, N - 1>& div_step) {
  ParametricSurface<N> base = surface.with_orientation(Orientation::inner);
  auto flowed = [&](double tt) {
    ParametricSurface<N> s;
    s.chart = std::make_shared<FlowedChart<N>>(base.chart, f, tt);
    s.orientation = Orientation::inner;
    s.shift = base.shift;
    return s;
  };
  auto area_weight = [&](double tt) {
    ChartJet2<N> jet = flowed(tt).chart->jet2(u);
    Eigen::Matrix<double, N, N - 1> tangents;
    for (int i = 0; i < N - 1; ++i) tangents.col(i) = jet.d1[i];
    return std::sqrt((tangents.transpose() * tangents).determinant());
  };

  double rate_fd = (area_weight(t + dt_fd) - area_weight(t - dt_fd)) /
                   (2.0 * dt_fd * area_weight(t));

  // xi and f frozen on the base; H of Sigma_t
  auto base_normal = [&](const TVec<N>& uu) {
    return Vec<N>(-outward_normal_jet2(*base.chart, uu).nu);
  };
  auto xi_field = [&](const TVec<N>& uu) {
    Vec<N> nu = base_normal(uu);
    return Vec<N>(f.gradient(nu) - f.value(nu) * nu);
  };
  ParametricSurface<N> sigma_t = flowed(t);
  double div_xi = chart_divergence(sigma_t, xi_field, u, div_step);
  GeometryJet<N> jet = geometry_jet(sigma_t, f, u);
  double rate_exact =
      div_xi - (N - 1) * jet.mean_h() * f.value(base_normal(u));
  return std::abs(rate_fd - rate_exact) /
         std::max(std::abs(rate_exact), 1e-12);
}

}  // namespace aniso
