#include "aniso/hypersurface.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <numbers>
#include <random>

using namespace aniso;
using Catch::Approx;

namespace {

const double kPi = std::numbers::pi;

template <int N>
std::vector<std::pair<std::string, ParametricSurface<N>>> chart_catalog() {
  std::vector<std::pair<std::string, ParametricSurface<N>>> out;
  out.emplace_back("sphere", make_unit_sphere<N>());
  if constexpr (N == 2) {
    out.emplace_back("ellipse", make_ellipsoid<2>(Vec<2>(2.0, 1.0)));
    out.emplace_back("radial", make_radial_graph<2>(SphereFunction<2>::harmonic_circle(
                                   1.0, {{3, false, 0.1}})));
    out.emplace_back("wulff", make_wulff_shape<2>(
                                  SphereFunction<2>::quadratic(
                                      Vec<2>(4.0, 1.0).asDiagonal()),
                                  Vec<2>(0.2, -0.1), 1.5));
  } else {
    out.emplace_back("ellipsoid", make_ellipsoid<3>(Vec<3>(2.0, 1.5, 1.0)));
    out.emplace_back("radial", make_radial_graph<3>(SphereFunction<3>::harmonic_sphere(
                                   1.0, {{2, 2, 0.1}})));
    out.emplace_back("torus", make_torus(2.0, 0.5));
    out.emplace_back("wulff", make_wulff_shape<3>(
                                  SphereFunction<3>::quadratic(
                                      Vec<3>(4.0, 1.0, 1.0).asDiagonal()),
                                  Vec<3>(0.3, -0.2, 0.5), 2.0));
  }
  return out;
}

/// Subset-enumeration oracle for elementary symmetric functions.
double sigma_r_bruteforce(const std::vector<double>& lambda, int r) {
  int n = (int)lambda.size();
  double total = 0.0;
  for (int mask = 0; mask < (1 << n); ++mask) {
    if (__builtin_popcount(mask) != r) continue;
    double prod = 1.0;
    for (int i = 0; i < n; ++i)
      if (mask & (1 << i)) prod *= lambda[i];
    total += prod;
  }
  return total;
}

TMat<3> random_spd(std::mt19937& rng) {
  std::normal_distribution<double> gauss;
  TMat<3> m;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m(i, j) = gauss(rng);
  return m.transpose() * m + 0.1 * TMat<3>::Identity();
}

TMat<3> random_sym(std::mt19937& rng) {
  std::normal_distribution<double> gauss;
  TMat<3> m;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m(i, j) = gauss(rng);
  return 0.5 * (m + m.transpose());
}

}  // namespace

TEST_CASE("aniso_eigenvalues: identity weight and diagonal product") {
  TMat<3> s = Vec<2>(3.0, 4.0).asDiagonal();
  TVec<3> classical = aniso_eigenvalues<3>(s, TMat<3>(TMat<3>::Identity()));
  REQUIRE(classical(0) == Approx(3.0));
  REQUIRE(classical(1) == Approx(4.0));

  TMat<3> a = Vec<2>(2.0, 1.0).asDiagonal();
  TVec<3> lam = aniso_eigenvalues<3>(s, a);
  REQUIRE(lam(0) == Approx(4.0));
  REQUIRE(lam(1) == Approx(6.0));
}

TEST_CASE("aniso_eigenvalues: matches a general nonsymmetric eigensolver") {
  for (unsigned seed : {101u, 202u, 303u}) {
    std::mt19937 rng(seed);
    TMat<3> a = random_spd(rng);
    TMat<3> s = random_sym(rng);
    TVec<3> lam = aniso_eigenvalues<3>(s, a);

    Eigen::EigenSolver<TMat<3>> es(TMat<3>(a * s));
    std::vector<double> expected{es.eigenvalues()(0).real(),
                                 es.eigenvalues()(1).real()};
    REQUIRE(std::abs(es.eigenvalues()(0).imag()) < 1e-12);
    REQUIRE(std::abs(es.eigenvalues()(1).imag()) < 1e-12);
    std::sort(expected.begin(), expected.end());
    REQUIRE(lam(0) == Approx(expected[0]).margin(1e-10));
    REQUIRE(lam(1) == Approx(expected[1]).margin(1e-10));
  }
  // non-SPD weight is rejected
  TMat<3> bad;
  bad << 1.0, 0.0, 0.0, -1.0;
  REQUIRE_THROWS_AS(aniso_eigenvalues<3>(TMat<3>(TMat<3>::Identity()), bad),
                    std::invalid_argument);
}

TEST_CASE("aniso_eigenvalues: spectrum is rotation invariant") {
  std::mt19937 rng(404);
  std::uniform_real_distribution<double> angle(0.0, 2 * kPi);
  for (int trial = 0; trial < 10; ++trial) {
    TMat<3> a = random_spd(rng);
    TMat<3> s = random_sym(rng);
    double t = angle(rng);
    TMat<3> rot;
    rot << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
    TVec<3> lam = aniso_eigenvalues<3>(s, a);
    TVec<3> lam_rot = aniso_eigenvalues<3>(
        TMat<3>(rot * s * rot.transpose()), TMat<3>(rot * a * rot.transpose()));
    REQUIRE((lam - lam_rot).norm() < 1e-10);
  }
}

TEST_CASE("mean_curvatures: normalized symmetric means") {
  TVec<3> equal(1.0, 1.0);
  auto h2 = mean_curvatures<3>(equal);
  REQUIRE(h2[0] == 1.0);
  REQUIRE(h2[1] == Approx(1.0));
  REQUIRE(h2[2] == Approx(1.0));

  auto h23 = mean_curvatures<3>(TVec<3>(2.0, 3.0));
  REQUIRE(h23[1] == Approx(2.5));
  REQUIRE(h23[2] == Approx(6.0));

  TVec<4> l3(1.0, 2.0, 3.0);
  auto h3 = mean_curvatures<4>(l3);
  REQUIRE(h3[1] == Approx(2.0));
  REQUIRE(h3[2] == Approx(11.0 / 3.0));
  REQUIRE(h3[3] == Approx(6.0));
  // brute-force subset enumeration oracle
  for (int r = 0; r <= 3; ++r)
    REQUIRE(h3[r] ==
            Approx(sigma_r_bruteforce({1.0, 2.0, 3.0}, r) / binomial(3, r)));
}

TEST_CASE("geometry_jet: unit sphere with inner normal") {
  auto one = SphereFunction<3>::constant(1.0);
  auto sphere = make_unit_sphere<3>();
  auto grid = make_grid<3>(sphere, {8, 16});
  for (const auto& node : grid.nodes) {
    auto jet = geometry_jet(sphere, one, node.u);
    REQUIRE(jet.aniso_curvatures(0) == Approx(1.0).margin(1e-12));
    REQUIRE(jet.aniso_curvatures(1) == Approx(1.0).margin(1e-12));
    REQUIRE(jet.hf == Approx(2.0).margin(1e-12));
    REQUIRE(jet.support == Approx(-1.0).margin(1e-12));
    REQUIRE(jet.f_value == Approx(1.0));
    REQUIRE((jet.normal + jet.position).norm() < 1e-12);
  }
}

TEST_CASE("geometry_jet: Wulff homotheties are anisotropic umbilical") {
  auto check = []<int N>(const SphereFunction<N>& f, double scale) {
    auto surf = make_wulff_shape<N>(f, Vec<N>::Zero(), scale);
    std::array<int, N - 1> res{};
    res[0] = 12;
    if constexpr (N == 3) res[1] = 24;
    auto grid = make_grid<N>(surf, res);
    for (const auto& node : grid.nodes) {
      auto jet = geometry_jet(surf, f, node.u);
      for (int i = 0; i < N - 1; ++i)
        REQUIRE(jet.aniso_curvatures(i) == Approx(1.0 / scale).margin(1e-9));
      REQUIRE(jet.hf == Approx((N - 1) / scale).margin(1e-9));
    }
  };
  check(SphereFunction<3>::quadratic(Vec<3>(4.0, 1.0, 1.0).asDiagonal()), 1.0);
  check(SphereFunction<3>::quadratic(Vec<3>(4.0, 1.0, 1.0).asDiagonal()), 2.5);
  check(SphereFunction<3>::harmonic_sphere(1.0, {{2, 0, 0.05}, {4, 1, 0.02}}), 1.7);
  check(SphereFunction<2>::harmonic_circle(1.0, {{2, false, 0.2}}), 0.8);
}

TEST_CASE("geometry_jet: odd anisotropies are umbilical on the reflected Wulff shape") {
  // With the inner normal, S_F on a Wulff chart is A_F(-omega) A_F(omega)^-1 / s.
  // For antipodally even F that is Id/s; for odd modes the umbilical model is
  // the Wulff shape of the antipodal function (the point-reflected body).
  auto f = SphereFunction<3>::harmonic_sphere(1.0, {{2, 0, 0.05}, {3, 1, 0.04}});
  REQUIRE_FALSE(f.antipodally_even());
  REQUIRE(check_convexity(f, 32).passed);

  auto direct = make_wulff_shape<3>(f, Vec<3>::Zero(), 1.0);
  auto reflected = make_wulff_shape<3>(f.antipodal(), Vec<3>::Zero(), 1.0);
  auto grid = make_grid<3>(direct, {12, 24});
  REQUIRE(umbilicity_defect(reflected, f, grid) < 1e-8);
  REQUIRE(umbilicity_defect(direct, f, grid) > 1e-3);
}

TEST_CASE("geometry_jet: Gauss map of the Wulff shape inverts the Wulff map") {
  auto f = SphereFunction<3>::harmonic_sphere(1.0, {{2, 2, 0.06}, {4, 0, 0.01}});
  REQUIRE(check_convexity(f, 32).passed);
  auto surf = make_wulff_shape<3>(f, Vec<3>(1.0, -2.0, 0.5), 1.3,
                                  Orientation::outer);
  auto grid = make_grid<3>(surf, {16, 32});
  for (const auto& node : grid.nodes) {
    // the chart normal comes from the cross product of tangents, so this is
    // an independent check of nu(phi(omega)) == omega
    auto jet = geometry_jet(surf, f, node.u);
    Vec<3> omega = sphere_param_deriv<3>(node.u, 0, 0);
    REQUIRE((jet.normal - omega).norm() < 1e-8);
  }
}

TEST_CASE("geometry_jet: F == 1 reduction and orientation flip") {
  auto one3 = SphereFunction<3>::constant(1.0);
  auto one2 = SphereFunction<2>::constant(1.0);
  auto fh = SphereFunction<3>::harmonic_sphere(1.0, {{2, 0, 0.05}});

  for (auto& [name, surf] : chart_catalog<3>()) {
    auto grid = make_grid<3>(surf, {10, 20});
    for (size_t k = 0; k < grid.nodes.size(); k += 7) {
      const auto& node = grid.nodes[k];
      auto jet = geometry_jet(surf, one3, node.u);
      REQUIRE((jet.aniso_operator - jet.shape_operator).norm() < 1e-12);
      REQUIRE(jet.hf == Approx(2.0 * jet.mean_h()).margin(1e-12));

      // flipping the orientation negates the spectrum and the support
      auto flipped = geometry_jet(
          surf.with_orientation(surf.orientation == Orientation::inner
                                    ? Orientation::outer
                                    : Orientation::inner),
          fh, node.u);
      auto jet_h = geometry_jet(surf, fh, node.u);
      REQUIRE(flipped.support == Approx(-jet_h.support).margin(1e-12));
      REQUIRE((flipped.normal + jet_h.normal).norm() < 1e-14);
      for (int i = 0; i < 2; ++i)
        REQUIRE(flipped.aniso_curvatures(i) ==
                Approx(-jet_h.aniso_curvatures(1 - i)).margin(1e-9));
    }
  }
  for (auto& [name, surf] : chart_catalog<2>()) {
    auto grid = make_grid<2>(surf, {32});
    for (size_t k = 0; k < grid.nodes.size(); k += 5) {
      auto jet = geometry_jet(surf, one2, grid.nodes[k].u);
      REQUIRE((jet.aniso_operator - jet.shape_operator).norm() < 1e-12);
      REQUIRE(jet.hf == Approx(jet.mean_h()).margin(1e-12));
    }
  }
}

TEST_CASE("geometry_jet: pointwise Maclaurin chain and trace bound") {
  auto fh = SphereFunction<3>::harmonic_sphere(1.0, {{2, 0, 0.05}});
  auto ell = make_ellipsoid<3>(Vec<3>(2.0, 1.5, 1.0));
  auto grid = make_grid<3>(ell, {16, 32});
  for (const auto& node : grid.nodes) {
    auto jet = geometry_jet(ell, fh, node.u);
    REQUIRE(jet.aniso_curvatures(0) > 0.0);  // convex surface, inner normal
    REQUIRE(jet.hr[0] >= std::pow(jet.hr[1], 0.0) - 1e-12);
    REQUIRE(jet.hr[1] >= std::sqrt(jet.hr[2]) - 1e-12);
    REQUIRE(jet.trace_sf2() / (jet.hf * jet.hf) >= 0.5 - 1e-12);
  }
  // equality of the trace bound exactly on umbilical samples
  auto ws = make_wulff_shape<3>(fh, Vec<3>::Zero(), 1.0);
  auto wgrid = make_grid<3>(ws, {8, 16});
  for (const auto& node : wgrid.nodes) {
    auto jet = geometry_jet(ws, fh, node.u);
    REQUIRE(jet.trace_sf2() / (jet.hf * jet.hf) == Approx(0.5).margin(1e-10));
  }
}

TEST_CASE("geometry_jet: curvature definition cross-check H_F = -div DF + nHF") {
  auto fh = SphereFunction<3>::harmonic_sphere(1.0, {{2, 1, 0.07}, {3, -2, 0.03}});
  auto ell = make_ellipsoid<3>(Vec<3>(1.6, 1.2, 1.0));
  auto field = [&](const TVec<3>& u) {
    auto jet = geometry_jet(ell, fh, u);
    return jet.df_ambient;
  };
  auto grid = make_grid<3>(ell, {12, 24});
  for (size_t k = 0; k < grid.nodes.size(); k += 29) {
    const TVec<3>& u = grid.nodes[k].u;
    auto jet = geometry_jet(ell, fh, u);
    double div = chart_divergence(ell, field, u, {1e-4, 1e-4});
    double rhs = -div + 2.0 * jet.mean_h() * jet.f_value;
    REQUIRE(jet.hf == Approx(rhs).margin(1e-6));
  }
}

TEST_CASE("grad_hf: vanishes on spheres and Wulff shapes, matches oracle") {
  auto one = SphereFunction<3>::constant(1.0);
  auto sphere = make_unit_sphere<3>();
  auto grid = make_grid<3>(sphere, {8, 16});
  for (size_t k = 0; k < grid.nodes.size(); k += 11)
    REQUIRE(grad_hf(sphere, one, grid.nodes[k].u).norm() < 1e-6);

  auto fq = SphereFunction<3>::quadratic(Vec<3>(4.0, 1.0, 1.0).asDiagonal());
  auto ws = make_wulff_shape<3>(fq, Vec<3>::Zero(), 1.0);
  auto wgrid = make_grid<3>(ws, {8, 16});
  for (size_t k = 0; k < wgrid.nodes.size(); k += 11)
    REQUIRE(grad_hf(ws, fq, wgrid.nodes[k].u).norm() < 1e-6);

  // symmetry zeros on the ellipsoid axes
  auto ell = make_ellipsoid<3>(Vec<3>(2.0, 1.0, 1.0));
  for (double phi : {0.0, kPi / 2, kPi, 3 * kPi / 2}) {
    REQUIRE(grad_hf(ell, one, TVec<3>(kPi / 2, phi)).norm() < 1e-6);
  }

  // Richardson-extrapolated finer-step oracle at a generic point
  TVec<3> u(1.1, 0.7);
  Vec<3> coarse = grad_hf(ell, one, u, {1e-3, 1e-3});
  Vec<3> d1 = grad_hf(ell, one, u, {2e-5, 2e-5});
  Vec<3> d2 = grad_hf(ell, one, u, {1e-5, 1e-5});
  Vec<3> oracle = (4.0 * d2 - d1) / 3.0;
  REQUIRE((coarse - oracle).norm() / oracle.norm() < 1e-4);
}

TEST_CASE("umbilicity_defect: Wulff shapes vs ellipsoid") {
  auto one = SphereFunction<3>::constant(1.0);
  auto sphere = make_unit_sphere<3>();
  REQUIRE(umbilicity_defect(sphere, one, make_grid<3>(sphere, {8, 16})) < 1e-12);

  auto fh = SphereFunction<3>::harmonic_sphere(1.0, {{2, 0, 0.05}, {2, 2, 0.08}});
  auto ws = make_wulff_shape<3>(fh, Vec<3>(0.4, 0.1, -0.3), 1.9);
  REQUIRE(umbilicity_defect(ws, fh, make_grid<3>(ws, {16, 32})) < 1e-8);

  auto ell = make_ellipsoid<3>(Vec<3>(2.0, 1.0, 1.0));
  REQUIRE(umbilicity_defect(ell, one, make_grid<3>(ell, {16, 32})) > 0.5);
}

TEST_CASE("wulff_fit: exact recovery, unit sphere, ellipsoid misfit") {
  auto fq = SphereFunction<3>::quadratic(Vec<3>(4.0, 1.0, 1.0).asDiagonal());
  auto ws = make_wulff_shape<3>(fq, Vec<3>(0.3, -0.2, 0.5), 2.0);
  auto fit = wulff_fit(ws, fq, make_grid<3>(ws, {24, 48}));
  REQUIRE((fit.center - Vec<3>(0.3, -0.2, 0.5)).norm() < 1e-6);
  REQUIRE(fit.scale == Approx(2.0).margin(1e-6));
  REQUIRE(fit.rms_residual < 1e-8);

  auto one = SphereFunction<3>::constant(1.0);
  auto sphere = make_unit_sphere<3>();
  auto sfit = wulff_fit(sphere, one, make_grid<3>(sphere, {16, 32}));
  REQUIRE(sfit.center.norm() < 1e-10);
  REQUIRE(sfit.scale == Approx(1.0).margin(1e-10));

  auto ell = make_ellipsoid<3>(Vec<3>(2.0, 1.0, 1.0));
  auto efit = wulff_fit(ell, one, make_grid<3>(ell, {16, 32}));
  REQUIRE(efit.rms_residual > 0.1);
}

TEST_CASE("charts: torus geometry and translated surfaces") {
  auto one = SphereFunction<3>::constant(1.0);
  auto torus = make_torus(2.0, 0.5);
  // outer equator: outward normal is radial in the xy-plane
  auto jet = geometry_jet(torus.with_orientation(Orientation::outer), one,
                          TVec<3>(0.0, 0.3));
  Vec<3> radial(std::cos(0.3), std::sin(0.3), 0.0);
  REQUIRE((jet.normal - radial).norm() < 1e-12);

  // translation moves positions, not the geometry
  auto ell = make_ellipsoid<3>(Vec<3>(2.0, 1.5, 1.0));
  auto moved = ell.translated(Vec<3>(1.0, -2.0, 0.5));
  TVec<3> u(1.2, 2.3);
  auto a = geometry_jet(ell, one, u);
  auto b = geometry_jet(moved, one, u);
  REQUIRE((b.position - a.position - Vec<3>(1.0, -2.0, 0.5)).norm() < 1e-14);
  REQUIRE((b.shape_operator - a.shape_operator).norm() < 1e-14);
  REQUIRE(b.area_weight == Approx(a.area_weight));
}

TEST_CASE("charts: invalid construction is rejected") {
  REQUIRE_THROWS_AS(make_ellipsoid<3>(Vec<3>(1.0, -1.0, 1.0)),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(make_torus(0.5, 2.0), std::invalid_argument);
  REQUIRE_THROWS_AS(
      make_radial_graph<2>(SphereFunction<2>::harmonic_circle(1.0, {{2, false, 1.4}})),
      std::invalid_argument);
}
