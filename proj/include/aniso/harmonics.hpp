#pragma once

#include "aniso/core.hpp"
#include "aniso/polynomial.hpp"

#include <numbers>

namespace aniso {

/// Circular harmonic on S^1: cos(k theta) = Re((x+iy)^k) / r^k and
/// sin(k theta) = Im((x+iy)^k) / r^k. Returns the degree-k numerator
/// polynomial (harmonic by construction).
inline HomogeneousPolynomial<2> circular_harmonic(int k, bool sine) {
  require(k >= 0 && k <= 6, "circular_harmonic: mode order must be in [0, 6]");
  using Poly = HomogeneousPolynomial<2>;
  std::vector<Poly::Monomial> ms;
  for (int j = sine ? 1 : 0; j <= k; j += 2) {
    // i^j = (-1)^(j/2) for even j, i*(-1)^((j-1)/2) for odd j
    double sign = ((sine ? (j - 1) / 2 : j / 2) % 2 == 0) ? 1.0 : -1.0;
    ms.push_back({sign * binomial(k, j), {k - j, j}});
  }
  if (ms.empty()) ms.push_back({0.0, {0, 0}});
  return Poly(std::move(ms));
}

/// Real orthonormal spherical harmonic Y_l^m as a solid harmonic: the
/// returned polynomial P satisfies Y_l^m(z) = P(z) / |z|^l and
/// integral of Y^2 over S^2 equals 1.
inline HomogeneousPolynomial<3> real_spherical_harmonic(int l, int m) {
  require(l >= 0 && l <= 4 && std::abs(m) <= l,
          "real_spherical_harmonic: need 0 <= l <= 4 and |m| <= l");
  using Poly = HomogeneousPolynomial<3>;
  using M = Poly::Monomial;
  const double pi = std::numbers::pi;
  auto poly = [](std::vector<M> ms) { return Poly(std::move(ms)); };

  switch (l * 10 + (m + l)) {
    case 0:  // l=0
      return poly({{0.5 * std::sqrt(1.0 / pi), {0, 0, 0}}});
    case 10:  // l=1, m=-1
      return poly({{std::sqrt(3.0 / (4 * pi)), {0, 1, 0}}});
    case 11:  // l=1, m=0
      return poly({{std::sqrt(3.0 / (4 * pi)), {0, 0, 1}}});
    case 12:  // l=1, m=1
      return poly({{std::sqrt(3.0 / (4 * pi)), {1, 0, 0}}});
    case 20:  // l=2, m=-2
      return poly({{0.5 * std::sqrt(15.0 / pi), {1, 1, 0}}});
    case 21:  // l=2, m=-1
      return poly({{0.5 * std::sqrt(15.0 / pi), {0, 1, 1}}});
    case 22: {  // l=2, m=0
      double c = 0.25 * std::sqrt(5.0 / pi);
      return poly({{2 * c, {0, 0, 2}}, {-c, {2, 0, 0}}, {-c, {0, 2, 0}}});
    }
    case 23:  // l=2, m=1
      return poly({{0.5 * std::sqrt(15.0 / pi), {1, 0, 1}}});
    case 24: {  // l=2, m=2
      double c = 0.25 * std::sqrt(15.0 / pi);
      return poly({{c, {2, 0, 0}}, {-c, {0, 2, 0}}});
    }
    case 30: {  // l=3, m=-3: y(3x^2 - y^2)
      double c = 0.25 * std::sqrt(35.0 / (2 * pi));
      return poly({{3 * c, {2, 1, 0}}, {-c, {0, 3, 0}}});
    }
    case 31:  // l=3, m=-2: xyz
      return poly({{0.5 * std::sqrt(105.0 / pi), {1, 1, 1}}});
    case 32: {  // l=3, m=-1: y(4z^2 - x^2 - y^2)
      double c = 0.25 * std::sqrt(21.0 / (2 * pi));
      return poly({{4 * c, {0, 1, 2}}, {-c, {2, 1, 0}}, {-c, {0, 3, 0}}});
    }
    case 33: {  // l=3, m=0: z(2z^2 - 3x^2 - 3y^2)
      double c = 0.25 * std::sqrt(7.0 / pi);
      return poly({{2 * c, {0, 0, 3}}, {-3 * c, {2, 0, 1}}, {-3 * c, {0, 2, 1}}});
    }
    case 34: {  // l=3, m=1: x(4z^2 - x^2 - y^2)
      double c = 0.25 * std::sqrt(21.0 / (2 * pi));
      return poly({{4 * c, {1, 0, 2}}, {-c, {3, 0, 0}}, {-c, {1, 2, 0}}});
    }
    case 35: {  // l=3, m=2: z(x^2 - y^2)
      double c = 0.25 * std::sqrt(105.0 / pi);
      return poly({{c, {2, 0, 1}}, {-c, {0, 2, 1}}});
    }
    case 36: {  // l=3, m=3: x(x^2 - 3y^2)
      double c = 0.25 * std::sqrt(35.0 / (2 * pi));
      return poly({{c, {3, 0, 0}}, {-3 * c, {1, 2, 0}}});
    }
    case 40: {  // l=4, m=-4: xy(x^2 - y^2)
      double c = 0.75 * std::sqrt(35.0 / pi);
      return poly({{c, {3, 1, 0}}, {-c, {1, 3, 0}}});
    }
    case 41: {  // l=4, m=-3: yz(3x^2 - y^2)
      double c = 0.75 * std::sqrt(35.0 / (2 * pi));
      return poly({{3 * c, {2, 1, 1}}, {-c, {0, 3, 1}}});
    }
    case 42: {  // l=4, m=-2: xy(6z^2 - x^2 - y^2)
      double c = 0.75 * std::sqrt(5.0 / pi);
      return poly({{6 * c, {1, 1, 2}}, {-c, {3, 1, 0}}, {-c, {1, 3, 0}}});
    }
    case 43: {  // l=4, m=-1: yz(4z^2 - 3x^2 - 3y^2)
      double c = 0.75 * std::sqrt(5.0 / (2 * pi));
      return poly({{4 * c, {0, 1, 3}}, {-3 * c, {2, 1, 1}}, {-3 * c, {0, 3, 1}}});
    }
    case 44: {  // l=4, m=0: 8z^4 - 24x^2z^2 - 24y^2z^2 + 3x^4 + 3y^4 + 6x^2y^2
      double c = (3.0 / 16.0) * std::sqrt(1.0 / pi);
      return poly({{8 * c, {0, 0, 4}},
                   {-24 * c, {2, 0, 2}},
                   {-24 * c, {0, 2, 2}},
                   {3 * c, {4, 0, 0}},
                   {3 * c, {0, 4, 0}},
                   {6 * c, {2, 2, 0}}});
    }
    case 45: {  // l=4, m=1: xz(4z^2 - 3x^2 - 3y^2)
      double c = 0.75 * std::sqrt(5.0 / (2 * pi));
      return poly({{4 * c, {1, 0, 3}}, {-3 * c, {3, 0, 1}}, {-3 * c, {1, 2, 1}}});
    }
    case 46: {  // l=4, m=2: (x^2 - y^2)(6z^2 - x^2 - y^2)
      double c = (3.0 / 8.0) * std::sqrt(5.0 / pi);
      return poly({{6 * c, {2, 0, 2}},
                   {-6 * c, {0, 2, 2}},
                   {-c, {4, 0, 0}},
                   {c, {0, 4, 0}}});
    }
    case 47: {  // l=4, m=3: xz(x^2 - 3y^2)
      double c = 0.75 * std::sqrt(35.0 / (2 * pi));
      return poly({{c, {3, 0, 1}}, {-3 * c, {1, 2, 1}}});
    }
    case 48: {  // l=4, m=4: x^4 - 6x^2y^2 + y^4
      double c = (3.0 / 16.0) * std::sqrt(35.0 / pi);
      return poly({{c, {4, 0, 0}}, {-6 * c, {2, 2, 0}}, {c, {0, 4, 0}}});
    }
    default:
      throw std::invalid_argument("real_spherical_harmonic: unsupported (l, m)");
  }
}

}  // namespace aniso
