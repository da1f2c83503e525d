#pragma once

#include "aniso/anisotropy.hpp"
#include "aniso/core.hpp"
#include "aniso/sphere_function.hpp"

#include <memory>
#include <numbers>
#include <sstream>
#include <string>

namespace aniso {

/// k-th derivative of sin / cos (shifted by k right angles).
inline double dsin(int k, double x) {
  return std::sin(x + k * std::numbers::pi / 2.0);
}
inline double dcos(int k, double x) {
  return std::cos(x + k * std::numbers::pi / 2.0);
}

/// Chart position and derivatives. Symmetric derivative slots are indexed by
/// the sum of the (0/1-valued) coordinate indices: d2[i+j], d3[i+j+k].
template <int N>
struct ChartJet2 {
  Vec<N> x;
  std::array<Vec<N>, N - 1> d1;
  std::array<Vec<N>, 2 * N - 3> d2;
};

template <int N>
struct ChartJet3 : ChartJet2<N> {
  std::array<Vec<N>, 3 * N - 5> d3;
};

/// Unit normal with first and second chart derivatives.
template <int N>
struct NormalJet2 {
  Vec<N> nu;
  std::array<Vec<N>, N - 1> d1;
  std::array<Vec<N>, 2 * N - 3> d2;
};

enum class GridKind { circle, sphere, torus };
enum class Orientation { inner, outer };

/// Unit-sphere parametrization with derivatives: omega(t) = (cos t, sin t)
/// on S^1, omega(theta, phi) in spherical coordinates on S^2. order <= 3.
template <int N>
Vec<N> sphere_param_deriv(const TVec<N>& u, int du, int dv) {
  if constexpr (N == 2) {
    (void)dv;
    return Vec<2>(dcos(du, u(0)), dsin(du, u(0)));
  } else {
    double theta = u(0), phi = u(1);
    return Vec<3>(dsin(du, theta) * dcos(dv, phi),
                  dsin(du, theta) * dsin(dv, phi),
                  dv == 0 ? dcos(du, theta) : 0.0);
  }
}

template <int N>
class ChartBase {
 public:
  static constexpr int n = N - 1;
  virtual ~ChartBase() = default;

  virtual ChartJet2<N> jet2(const TVec<N>& u) const {
    return jet3(u);  // slicing drops the third-order slot
  }
  virtual ChartJet3<N> jet3(const TVec<N>& u) const {
    (void)u;
    throw std::logic_error(describe() + ": third chart derivatives unavailable");
  }
  virtual bool has_third_derivatives() const { return true; }
  virtual bool has_analytic_normal() const { return false; }
  /// Outward unit normal with derivatives, for charts that know it exactly.
  virtual NormalJet2<N> analytic_outward_normal(const TVec<N>& u) const {
    (void)u;
    throw std::logic_error(describe() + ": no analytic normal");
  }
  /// Sign making the raw chart normal (cross product of tangents for N=3,
  /// clockwise rotation of the tangent for N=2) point outward.
  virtual double outward_sign() const { return 1.0; }
  virtual GridKind grid_kind() const = 0;
  virtual std::string describe() const = 0;
};

namespace detail {

// x_i -> (x_i(1), -x_i(0)), the outward normal direction of a
// counterclockwise plane curve before normalization.
inline Vec<2> rotate_cw(const Vec<2>& a) { return Vec<2>(a(1), -a(0)); }

/// Normalize a vector field given with two derivative orders.
template <int N>
NormalJet2<N> normalize_jet2(const Vec<N>& w,
                             const std::array<Vec<N>, N - 1>& wd1,
                             const std::array<Vec<N>, 2 * N - 3>& wd2) {
  constexpr int n = N - 1;
  NormalJet2<N> out;
  double rho = w.norm();
  std::array<double, n> rho1;
  for (int i = 0; i < n; ++i) rho1[i] = w.dot(wd1[i]) / rho;
  out.nu = w / rho;
  for (int i = 0; i < n; ++i)
    out.d1[i] = wd1[i] / rho - w * (rho1[i] / (rho * rho));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double rho2 = (wd1[i].dot(wd1[j]) + w.dot(wd2[i + j]) - rho1[i] * rho1[j]) / rho;
      out.d2[i + j] = wd2[i + j] / rho - wd1[i] * (rho1[j] / (rho * rho)) -
                      wd1[j] * (rho1[i] / (rho * rho)) -
                      w * (rho2 / (rho * rho)) +
                      w * (2.0 * rho1[i] * rho1[j] / (rho * rho * rho));
    }
  return out;
}

/// Outward normal jets from third-order chart data.
template <int N>
NormalJet2<N> normal_jet2_from_jet3(const ChartJet3<N>& jet, double sign) {
  if constexpr (N == 2) {
    Vec<2> w = sign * rotate_cw(jet.d1[0]);
    std::array<Vec<2>, 1> w1{sign * rotate_cw(jet.d2[0])};
    std::array<Vec<2>, 1> w2{sign * rotate_cw(jet.d3[0])};
    return normalize_jet2<2>(w, w1, w2);
  } else {
    const Vec<3>&xu = jet.d1[0], &xv = jet.d1[1];
    const Vec<3>&xuu = jet.d2[0], &xuv = jet.d2[1], &xvv = jet.d2[2];
    Vec<3> w = sign * xu.cross(xv);
    std::array<Vec<3>, 2> w1{sign * (xuu.cross(xv) + xu.cross(xuv)),
                             sign * (xuv.cross(xv) + xu.cross(xvv))};
    std::array<Vec<3>, 3> w2{
        sign * (jet.d3[0].cross(xv) + 2.0 * xuu.cross(xuv) + xu.cross(jet.d3[1])),
        sign * (jet.d3[1].cross(xv) + xuu.cross(xvv) + xuv.cross(xuv) +
                xu.cross(jet.d3[2])),
        sign * (jet.d3[2].cross(xv) + 2.0 * xuv.cross(xvv) + xu.cross(jet.d3[3]))};
    return normalize_jet2<3>(w, w1, w2);
  }
}

}  // namespace detail

/// Outward unit normal with derivatives for any chart.
template <int N>
NormalJet2<N> outward_normal_jet2(const ChartBase<N>& chart, const TVec<N>& u) {
  if (chart.has_analytic_normal()) return chart.analytic_outward_normal(u);
  return detail::normal_jet2_from_jet3(chart.jet3(u), chart.outward_sign());
}

// ---------------------------------------------------------------------------
// Built-in chart families
// ---------------------------------------------------------------------------

/// x(u) = diag(radii) . omega(u). Unit sphere/circle for equal radii.
template <int N>
class EllipsoidChart final : public ChartBase<N> {
 public:
  explicit EllipsoidChart(const Vec<N>& radii) : radii_(radii) {
    require(radii.minCoeff() > 0.0, "ellipsoid: radii must be positive");
  }

  ChartJet3<N> jet3(const TVec<N>& u) const override {
    ChartJet3<N> jet;
    jet.x = scale(sphere_param_deriv<N>(u, 0, 0));
    if constexpr (N == 2) {
      jet.d1[0] = scale(sphere_param_deriv<N>(u, 1, 0));
      jet.d2[0] = scale(sphere_param_deriv<N>(u, 2, 0));
      jet.d3[0] = scale(sphere_param_deriv<N>(u, 3, 0));
    } else {
      for (int i = 0; i <= 1; ++i)
        jet.d1[i] = scale(sphere_param_deriv<N>(u, 1 - i, i));
      for (int s = 0; s <= 2; ++s)
        jet.d2[s] = scale(sphere_param_deriv<N>(u, 2 - s, s));
      for (int s = 0; s <= 3; ++s)
        jet.d3[s] = scale(sphere_param_deriv<N>(u, 3 - s, s));
    }
    return jet;
  }

  GridKind grid_kind() const override {
    return N == 2 ? GridKind::circle : GridKind::sphere;
  }
  std::string describe() const override {
    std::ostringstream os;
    os << "ellipsoid(";
    for (int i = 0; i < N; ++i) os << (i ? "," : "") << radii_(i);
    os << ")";
    return os.str();
  }
  const Vec<N>& radii() const { return radii_; }

 private:
  Vec<N> scale(const Vec<N>& v) const { return radii_.cwiseProduct(v); }
  Vec<N> radii_;
};

/// Star-shaped graph x(u) = r(omega(u)) omega(u) with a positive profile r
/// given as a harmonic-perturbation sphere function.
template <int N>
class RadialGraphChart final : public ChartBase<N> {
 public:
  explicit RadialGraphChart(SphereFunction<N> profile)
      : profile_(std::move(profile)) {
    for (const Vec<N>& x : sphere_sample_grid<N>(32)) {
      require(profile_.value(x) > 0.0,
              "radial_graph: profile must be positive everywhere");
    }
  }

  ChartJet3<N> jet3(const TVec<N>& u) const override {
    constexpr int n = N - 1;
    auto om = [&](int du, int dv) { return sphere_param_deriv<N>(u, du, dv); };
    Vec<N> omega = om(0, 0);
    std::array<Vec<N>, n> o1;
    std::array<Vec<N>, 2 * N - 3> o2;
    std::array<Vec<N>, 3 * N - 5> o3;
    if constexpr (N == 2) {
      o1[0] = om(1, 0);
      o2[0] = om(2, 0);
      o3[0] = om(3, 0);
    } else {
      for (int i = 0; i <= 1; ++i) o1[i] = om(1 - i, i);
      for (int s = 0; s <= 2; ++s) o2[s] = om(2 - s, s);
      for (int s = 0; s <= 3; ++s) o3[s] = om(3 - s, s);
    }

    // rho(u) = r(omega(u)) via the 1-homogeneous extension (omega is unit)
    double rho = profile_.value(omega);
    Vec<N> g = profile_.gradient(omega);
    Mat<N> h = profile_.hessian(omega);
    Sym3<N> t3 = profile_.third(omega);

    std::array<double, n> r1;
    std::array<double, 2 * N - 3> r2;
    std::array<double, 3 * N - 5> r3;
    for (int i = 0; i < n; ++i) r1[i] = g.dot(o1[i]);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        r2[i + j] = o1[i].dot(h * o1[j]) + g.dot(o2[i + j]);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        for (int k = j; k < n; ++k) {
          double s = o1[i].dot(t3.contract(o1[j], o1[k]));
          s += o2[i + j].dot(h * o1[k]) + o2[i + k].dot(h * o1[j]) +
               o2[j + k].dot(h * o1[i]);
          s += g.dot(o3[i + j + k]);
          r3[i + j + k] = s;
        }

    ChartJet3<N> jet;
    jet.x = rho * omega;
    for (int i = 0; i < n; ++i) jet.d1[i] = r1[i] * omega + rho * o1[i];
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        jet.d2[i + j] = r2[i + j] * omega + r1[i] * o1[j] + r1[j] * o1[i] +
                        rho * o2[i + j];
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        for (int k = j; k < n; ++k)
          jet.d3[i + j + k] = r3[i + j + k] * omega + r2[i + j] * o1[k] +
                              r2[i + k] * o1[j] + r2[j + k] * o1[i] +
                              r1[i] * o2[j + k] + r1[j] * o2[i + k] +
                              r1[k] * o2[i + j] + rho * o3[i + j + k];
    return jet;
  }

  GridKind grid_kind() const override {
    return N == 2 ? GridKind::circle : GridKind::sphere;
  }
  std::string describe() const override { return "radial_graph"; }
  const SphereFunction<N>& profile() const { return profile_; }

 private:
  SphereFunction<N> profile_;
};

/// Torus of revolution (N == 3 only): tube radius rho around a circle of
/// radius R in the xy-plane. The raw cross product x_theta x x_phi points
/// into the tube, hence outward_sign = -1.
class TorusChart final : public ChartBase<3> {
 public:
  TorusChart(double major, double minor) : major_(major), minor_(minor) {
    require(major > minor && minor > 0.0,
            "torus: need R > rho > 0 for an embedded torus");
  }

  ChartJet3<3> jet3(const TVec<3>& u) const override {
    double th = u(0), ph = u(1);
    auto comp = [&](int a, int b) -> Vec<3> {
      return Vec<3>((a == 0 ? major_ * dcos(b, ph) : 0.0) +
                        minor_ * dcos(a, th) * dcos(b, ph),
                    (a == 0 ? major_ * dsin(b, ph) : 0.0) +
                        minor_ * dcos(a, th) * dsin(b, ph),
                    b == 0 ? minor_ * dsin(a, th) : 0.0);
    };
    ChartJet3<3> jet;
    jet.x = comp(0, 0);
    for (int i = 0; i <= 1; ++i) jet.d1[i] = comp(1 - i, i);
    for (int s = 0; s <= 2; ++s) jet.d2[s] = comp(2 - s, s);
    for (int s = 0; s <= 3; ++s) jet.d3[s] = comp(3 - s, s);
    return jet;
  }

  double outward_sign() const override { return -1.0; }
  GridKind grid_kind() const override { return GridKind::torus; }
  std::string describe() const override {
    std::ostringstream os;
    os << "torus(" << major_ << "," << minor_ << ")";
    return os.str();
  }

 private:
  double major_, minor_;
};

/// Homothety of the Wulff shape: x(u) = center + scale * phi(omega(u)) with
/// phi the Wulff map of F. The Gauss map of a convex body parametrized by
/// its support gradient is the spherical parameter itself, which gives this
/// chart an exact outward normal omega(u); second chart derivatives come
/// from the third derivatives of the ambient extension.
template <int N>
class WulffChart final : public ChartBase<N> {
 public:
  WulffChart(SphereFunction<N> f, const Vec<N>& center, double scale)
      : f_(std::move(f)), center_(center), scale_(scale) {
    require(scale > 0.0, "wulff chart: scale must be positive");
  }

  ChartJet2<N> jet2(const TVec<N>& u) const override {
    constexpr int n = N - 1;
    auto om = [&](int du, int dv) { return sphere_param_deriv<N>(u, du, dv); };
    Vec<N> omega = om(0, 0);
    std::array<Vec<N>, n> o1;
    std::array<Vec<N>, 2 * N - 3> o2;
    if constexpr (N == 2) {
      o1[0] = om(1, 0);
      o2[0] = om(2, 0);
    } else {
      for (int i = 0; i <= 1; ++i) o1[i] = om(1 - i, i);
      for (int s = 0; s <= 2; ++s) o2[s] = om(2 - s, s);
    }
    Mat<N> h = f_.hessian(omega);
    Sym3<N> t3 = f_.third(omega);

    ChartJet2<N> jet;
    jet.x = center_ + scale_ * f_.gradient(omega);
    for (int i = 0; i < n; ++i) jet.d1[i] = scale_ * (h * o1[i]);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        jet.d2[i + j] = scale_ * (t3.contract(o1[i], o1[j]) + h * o2[i + j]);
    return jet;
  }

  bool has_third_derivatives() const override { return false; }
  bool has_analytic_normal() const override { return true; }
  NormalJet2<N> analytic_outward_normal(const TVec<N>& u) const override {
    NormalJet2<N> out;
    out.nu = sphere_param_deriv<N>(u, 0, 0);
    if constexpr (N == 2) {
      out.d1[0] = sphere_param_deriv<N>(u, 1, 0);
      out.d2[0] = sphere_param_deriv<N>(u, 2, 0);
    } else {
      for (int i = 0; i <= 1; ++i) out.d1[i] = sphere_param_deriv<N>(u, 1 - i, i);
      for (int s = 0; s <= 2; ++s) out.d2[s] = sphere_param_deriv<N>(u, 2 - s, s);
    }
    return out;
  }

  GridKind grid_kind() const override {
    return N == 2 ? GridKind::circle : GridKind::sphere;
  }
  std::string describe() const override {
    std::ostringstream os;
    os << "wulff_homothety(center=(";
    for (int i = 0; i < N; ++i) os << (i ? "," : "") << center_(i);
    os << "),scale=" << scale_ << ")";
    return os.str();
  }

  const SphereFunction<N>& anisotropy() const { return f_; }
  const Vec<N>& center() const { return center_; }
  double scale() const { return scale_; }

 private:
  SphereFunction<N> f_;
  Vec<N> center_;
  double scale_;
};

/// A closed oriented hypersurface: a chart plus the orientation choice and an
/// optional rigid translation.
template <int N>
struct ParametricSurface {
  std::shared_ptr<const ChartBase<N>> chart;
  Orientation orientation = Orientation::inner;
  Vec<N> shift = Vec<N>::Zero();

  ParametricSurface with_orientation(Orientation o) const {
    ParametricSurface s = *this;
    s.orientation = o;
    return s;
  }
  ParametricSurface translated(const Vec<N>& offset) const {
    ParametricSurface s = *this;
    s.shift += offset;
    return s;
  }
};

template <int N>
ParametricSurface<N> make_ellipsoid(const Vec<N>& radii,
                                    Orientation o = Orientation::inner) {
  return {std::make_shared<EllipsoidChart<N>>(radii), o, Vec<N>::Zero()};
}

template <int N>
ParametricSurface<N> make_unit_sphere(Orientation o = Orientation::inner) {
  return make_ellipsoid<N>(Vec<N>::Ones(), o);
}

template <int N>
ParametricSurface<N> make_radial_graph(SphereFunction<N> profile,
                                       Orientation o = Orientation::inner) {
  return {std::make_shared<RadialGraphChart<N>>(std::move(profile)), o,
          Vec<N>::Zero()};
}

inline ParametricSurface<3> make_torus(double major, double minor,
                                       Orientation o = Orientation::inner) {
  return {std::make_shared<TorusChart>(major, minor), o, Vec<3>::Zero()};
}

template <int N>
ParametricSurface<N> make_wulff_shape(SphereFunction<N> f, const Vec<N>& center,
                                      double scale,
                                      Orientation o = Orientation::inner) {
  return {std::make_shared<WulffChart<N>>(std::move(f), center, scale), o,
          Vec<N>::Zero()};
}

}  // namespace aniso
