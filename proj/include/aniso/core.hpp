#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace aniso {

/// Ambient dimension N is the dimension of the surrounding Euclidean space
/// (2 for closed curves, 3 for closed surfaces). Tangent objects live in
/// dimension N-1.
template <int N>
using Vec = Eigen::Matrix<double, N, 1>;

template <int N>
using Mat = Eigen::Matrix<double, N, N>;

template <int N>
using TVec = Eigen::Matrix<double, N - 1, 1>;

template <int N>
using TMat = Eigen::Matrix<double, N - 1, N - 1>;

/// Orthonormal basis of the hyperplane orthogonal to a unit vector,
/// stored column-wise.
template <int N>
using Frame = Eigen::Matrix<double, N, N - 1>;

struct DegenerateMetricError : std::runtime_error {
  explicit DegenerateMetricError(const std::string& what)
      : std::runtime_error(what) {}
};

/// A theorem precondition does not hold for the given inputs (non-convex
/// anisotropy where convexity is required, nonpositive H_F for the
/// Heintze-Karcher check). The CLI maps this to exit code 2.
struct PreconditionError : std::runtime_error {
  explicit PreconditionError(const std::string& what)
      : std::runtime_error(what) {}
};

/// Deterministic orthonormal basis of x^perp for unit x.
///
/// N=2: the 90-degree counterclockwise rotation of x.
/// N=3: Gram-Schmidt of the coordinate axis least aligned with x
///      (ties resolved by smallest index), completed right-handed so that
///      (x, E1, E2) is positively oriented.
template <int N>
Frame<N> tangent_frame(const Vec<N>& x) {
  static_assert(N == 2 || N == 3, "reference scope covers curves and surfaces");
  Frame<N> frame;
  if constexpr (N == 2) {
    frame(0, 0) = -x(1);
    frame(1, 0) = x(0);
  } else {
    int axis = 0;
    double best = std::abs(x(0));
    for (int i = 1; i < 3; ++i) {
      if (std::abs(x(i)) < best) {
        best = std::abs(x(i));
        axis = i;
      }
    }
    Vec<3> e1 = Vec<3>::Unit(axis) - x(axis) * x;
    e1.normalize();
    frame.col(0) = e1;
    frame.col(1) = x.cross(e1);
  }
  return frame;
}

/// Fully symmetric third-order tensor T_{abc}, stored as N matrix slices
/// T.slice[c](a,b).
template <int N>
struct Sym3 {
  std::array<Mat<N>, N> slice;

  static Sym3 Zero() {
    Sym3 t;
    for (auto& s : t.slice) s.setZero();
    return t;
  }

  double operator()(int a, int b, int c) const { return slice[c](a, b); }

  /// Contraction over two indices: result_e = sum_{cd} T_{cde} u_c v_d.
  Vec<N> contract(const Vec<N>& u, const Vec<N>& v) const {
    Vec<N> out;
    for (int e = 0; e < N; ++e) out(e) = u.dot(slice[e] * v);
    return out;
  }

  Sym3& operator+=(const Sym3& o) {
    for (int c = 0; c < N; ++c) slice[c] += o.slice[c];
    return *this;
  }

  Sym3 operator*(double s) const {
    Sym3 t = *this;
    for (auto& m : t.slice) m *= s;
    return t;
  }
};

/// Compensated (Kahan) accumulator. All grid reductions in this library run
/// through it in a fixed node order, which keeps results bit-reproducible.
class KahanSum {
 public:
  void add(double x) {
    double y = x - comp_;
    double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  double total() const { return sum_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double binomial(int n, int r) {
  double v = 1.0;
  for (int i = 0; i < r; ++i) v = v * double(n - i) / double(i + 1);
  return v;
}

inline void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

inline void require_unit(double norm, const std::string& who,
                         double tol = 1e-10) {
  if (std::abs(norm - 1.0) > tol)
    throw std::invalid_argument(who + ": input direction is not a unit vector");
}

}  // namespace aniso
