#include "aniso/flow.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <numbers>

using namespace aniso;
using Catch::Approx;

namespace {

const double kPi = std::numbers::pi;

SphereFunction<3> quad_f() {
  return SphereFunction<3>::quadratic(Vec<3>(4.0, 1.0, 1.0).asDiagonal());
}

}  // namespace

TEST_CASE("flow_surface: t = 0 coincides with the base chart exactly") {
  auto f = quad_f();
  auto ell = make_ellipsoid<3>(Vec<3>(1.5, 1.2, 1.0));
  auto grid = make_grid<3>(ell, {12, 24});
  auto state = flow_surface(ell, f, 0.0, grid);
  REQUIRE(state.valid);
  for (size_t k = 0; k < grid.nodes.size(); k += 17) {
    auto base = ell.chart->jet2(grid.nodes[k].u);
    auto flowed = state.surface.chart->jet2(grid.nodes[k].u);
    REQUIRE((base.x - flowed.x).norm() == 0.0);
    REQUIRE((base.d1[0] - flowed.d1[0]).norm() == 0.0);
    REQUIRE((base.d2[2] - flowed.d2[2]).norm() == 0.0);
  }
  REQUIRE_THROWS_AS(flow_surface(ell, f, -0.1, grid), std::invalid_argument);
}

TEST_CASE("flow_surface: spheres contract radially, Wulff shapes homothetically") {
  auto one = SphereFunction<3>::constant(1.0);
  auto sphere = make_unit_sphere<3>();
  auto grid = make_grid<3>(sphere, {12, 24});
  auto state = flow_surface(sphere, one, 0.3, grid);
  REQUIRE(state.valid);
  for (size_t k = 0; k < grid.nodes.size(); k += 13) {
    auto jet = geometry_jet(state.surface, one, grid.nodes[k].u);
    REQUIRE(jet.position.norm() == Approx(0.7).margin(1e-12));
    REQUIRE(jet.hf == Approx(2.0 / 0.7).margin(1e-10));
  }

  // the Wulff foliation stays a Wulff homothety: H_F = n / (1 - t)
  auto f = quad_f();
  auto ws = make_wulff_shape<3>(f, Vec<3>::Zero(), 1.0);
  auto wgrid = make_grid<3>(ws, {12, 24});
  for (double t : {0.2, 0.5, 0.8}) {
    auto wstate = flow_surface(ws, f, t, wgrid);
    REQUIRE(wstate.valid);
    for (size_t k = 0; k < wgrid.nodes.size(); k += 29) {
      auto jet = geometry_jet(wstate.surface, f, wgrid.nodes[k].u);
      REQUIRE(jet.hf == Approx(2.0 / (1.0 - t)).margin(1e-9));
      for (int i = 0; i < 2; ++i)
        REQUIRE(jet.aniso_curvatures(i) == Approx(1.0 / (1.0 - t)).margin(1e-9));
    }
  }
}

TEST_CASE("q_value: closed forms on spheres and circles, Wulff initial value") {
  auto one = SphereFunction<3>::constant(1.0);
  auto sphere = make_unit_sphere<3>();
  auto grid = make_grid<3>(sphere, {16, 32});
  for (double t : {0.0, 0.25, 0.6}) {
    auto state = flow_surface(sphere, one, t, grid);
    REQUIRE(q_value(state, one, grid) ==
            Approx(4 * kPi * std::pow(1.0 - t, 3)).epsilon(1e-12));
  }

  auto one2 = SphereFunction<2>::constant(1.0);
  auto circle = make_unit_sphere<2>();
  auto cgrid = make_grid<2>(circle, {128});
  for (double t : {0.0, 0.4}) {
    auto state = flow_surface(circle, one2, t, cgrid);
    REQUIRE(q_value(state, one2, cgrid) ==
            Approx(2 * kPi * (1.0 - t) * (1.0 - t)).epsilon(1e-12));
  }

  // Q(0) on a Wulff homothety is the equality value (n+1) V
  auto f = quad_f();
  auto ws = make_wulff_shape<3>(f, Vec<3>(0.2, -0.4, 0.1), 1.5);
  auto wgrid = make_grid<3>(ws, {32, 64});
  auto wstate = flow_surface(ws, f, 0.0, wgrid);
  REQUIRE(q_value(wstate, f, wgrid) ==
          Approx(3.0 * enclosed_volume(ws, wgrid)).epsilon(1e-10));

  // H_F <= 0 is a reported precondition violation (fat torus)
  auto torus = make_torus(2.0, 1.2);
  auto tgrid = make_grid<3>(torus, {12, 12});
  auto tstate = flow_surface(torus, one, 0.0, tgrid);
  REQUIRE_FALSE(tstate.valid);
  REQUIRE(tstate.min_hf <= 0.0);
  REQUIRE_THROWS_AS(q_value(tstate, one, tgrid), PreconditionError);
}

TEST_CASE("q_prime_analytic: sphere closed form and the derivative bound") {
  auto one = SphereFunction<3>::constant(1.0);
  auto sphere = make_unit_sphere<3>();
  auto grid = make_grid<3>(sphere, {16, 32});
  for (double t : {0.0, 0.3}) {
    auto state = flow_surface(sphere, one, t, grid);
    REQUIRE(q_prime_analytic(state, one, grid) ==
            Approx(-12 * kPi * (1.0 - t) * (1.0 - t)).epsilon(1e-12));
  }

  // the sharp bound is Q' <= -(n+1) * energy, with equality exactly on
  // Wulff homotheties (the trace ratio hits its minimum 1/n there)
  auto f = quad_f();
  auto ws = make_wulff_shape<3>(f, Vec<3>::Zero(), 1.0);
  auto wgrid = make_grid<3>(ws, {24, 48});
  for (double t : {0.0, 0.4}) {
    auto state = flow_surface(ws, f, t, wgrid);
    double qp = q_prime_analytic(state, f, wgrid);
    double energy = anisotropic_energy(state.surface, f, wgrid);
    REQUIRE(qp == Approx(-3.0 * energy).margin(1e-8));
  }

  // strict inequality away from the umbilical case
  auto ell = make_ellipsoid<3>(Vec<3>(1.5, 1.0, 1.0));
  auto egrid = make_grid<3>(ell, {16, 32});
  auto estate = flow_surface(ell, one, 0.1, egrid);
  double qp = q_prime_analytic(estate, one, egrid);
  double energy = anisotropic_energy(estate.surface, one, egrid);
  REQUIRE(qp < -3.0 * energy - 1e-3);
}

TEST_CASE("run_flow: sphere trace matches the closed form") {
  auto one = SphereFunction<3>::constant(1.0);
  auto sphere = make_unit_sphere<3>();
  auto grid = make_grid<3>(sphere, {16, 32});
  auto trace = run_flow(sphere, one, 0.01, 0.9, grid);
  REQUIRE(trace.termination == FlowTermination::t_max);
  REQUIRE(trace.samples.size() == 91);
  for (const auto& s : trace.samples) {
    double expected = 4 * kPi * std::pow(1.0 - s.t, 3);
    REQUIRE(s.q == Approx(expected).epsilon(1e-6));
    REQUIRE(std::abs(s.q_prime_fd - s.q_prime_analytic) <=
            1e-4 * std::abs(s.q_prime_analytic));
    REQUIRE(s.min_hf > 0.0);
  }
  REQUIRE_FALSE(breakdown_estimate(trace).has_value());
}

TEST_CASE("run_flow: monotone Q and the derivative bound across the catalog") {
  auto check = []<int N>(const ParametricSurface<N>& surf,
                         const SphereFunction<N>& f, double dt, double tmax) {
    std::array<int, N - 1> res{};
    res[0] = N == 2 ? 96 : 16;
    if constexpr (N == 3) res[1] = 32;
    auto grid = make_grid<N>(surf, res);
    auto trace = run_flow(surf, f, dt, tmax, grid);
    REQUIRE(trace.samples.size() >= 3);
    for (size_t k = 0; k + 1 < trace.samples.size(); ++k)
      REQUIRE(trace.samples[k + 1].q < trace.samples[k].q);
    for (const auto& s : trace.samples)
      REQUIRE(s.q_prime_analytic <=
              -double(N) * s.energy + 1e-8 * std::abs(s.q_prime_analytic));
  };
  check(make_ellipsoid<3>(Vec<3>(1.5, 1.0, 1.0)), SphereFunction<3>::constant(1.0),
        0.02, 1.0);
  check(make_ellipsoid<3>(Vec<3>(1.5, 1.2, 1.0)),
        SphereFunction<3>::harmonic_sphere(1.0, {{2, 0, 0.05}}), 0.02, 1.0);
  check(make_radial_graph<3>(SphereFunction<3>::harmonic_sphere(1.0, {{2, 2, 0.1}})),
        quad_f(), 0.02, 1.0);
  check(make_ellipsoid<2>(Vec<2>(1.5, 1.0)),
        SphereFunction<2>::harmonic_circle(1.0, {{2, false, 0.15}}), 0.02, 1.0);
}

TEST_CASE("run_flow: Wulff homothety collapses at the scale time") {
  auto f = quad_f();
  for (double s : {1.0, 0.6}) {
    auto ws = make_wulff_shape<3>(f, Vec<3>::Zero(), s);
    auto grid = make_grid<3>(ws, {12, 24});
    auto trace = run_flow(ws, f, 0.01, 2.0, grid);
    REQUIRE(trace.termination == FlowTermination::immersion_failure);
    auto est = breakdown_estimate(trace);
    REQUIRE(est.has_value());
    REQUIRE(std::abs(*est - s) <= 0.01);

    // swept-volume accounting over the whole foliation
    double v = enclosed_volume(ws, grid);
    REQUIRE(trace.samples.front().q - trace.samples.back().q >=
            3.0 * v * (1.0 - 0.05));
  }
}

TEST_CASE("run_flow: breakdown of the unit sphere near t = 1") {
  auto one = SphereFunction<3>::constant(1.0);
  auto sphere = make_unit_sphere<3>();
  auto grid = make_grid<3>(sphere, {12, 24});
  auto trace = run_flow(sphere, one, 0.01, 1.5, grid);
  REQUIRE(trace.termination == FlowTermination::immersion_failure);
  auto est = breakdown_estimate(trace);
  REQUIRE(est.has_value());
  REQUIRE(std::abs(*est - 1.0) <= 0.01);
}

TEST_CASE("area element evolution matches div xi - n H f") {
  auto fh = SphereFunction<3>::harmonic_sphere(1.0, {{2, 0, 0.05}, {2, 2, 0.04}});
  auto sphere = make_unit_sphere<3>();
  auto ell = make_ellipsoid<3>(Vec<3>(1.4, 1.1, 1.0));
  for (const auto& surf : {sphere, ell}) {
    auto grid = make_grid<3>(surf, {10, 20});
    for (size_t k = 0; k < grid.nodes.size(); k += 41) {
      for (double t : {0.05, 0.2}) {
        double resid = area_rate_residual(surf, fh, t, grid.nodes[k].u, 1e-4,
                                          {1e-4, 1e-4});
        REQUIRE(resid < 1e-3);
      }
    }
  }
}
