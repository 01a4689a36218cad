#pragma once

#include <cmath>
#include <complex>
#include <utility>

namespace bistable {

/// Row-major 2x2 real matrix [[a, b], [c, d]].
struct Matrix2 {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

  double trace() const { return a + d; }
  double det() const { return a * d - b * c; }
  /// tr^2 - 4 det written as (a - d)^2 + 4bc to avoid cancellation.
  double discriminant() const { return (a - d) * (a - d) + 4.0 * b * c; }

  friend bool operator==(const Matrix2&, const Matrix2&) = default;
};

/// Roots of the characteristic polynomial, larger real part first.
inline std::pair<std::complex<double>, std::complex<double>> eigenvalues(const Matrix2& m) {
  const double half_tr = 0.5 * m.trace();
  const double disc = m.discriminant();
  if (disc >= 0.0) {
    const double s = 0.5 * std::sqrt(disc);
    // Larger-magnitude root first, the other via det / root for accuracy.
    const double r1 = half_tr >= 0.0 ? half_tr + s : half_tr - s;
    const double r2 = r1 != 0.0 ? m.det() / r1 : half_tr - (r1 - half_tr);
    return r1 >= r2 ? std::pair{std::complex<double>(r1), std::complex<double>(r2)}
                    : std::pair{std::complex<double>(r2), std::complex<double>(r1)};
  }
  const double s = 0.5 * std::sqrt(-disc);
  return {{half_tr, s}, {half_tr, -s}};
}

inline double spectral_radius(const Matrix2& m) {
  const auto [l1, l2] = eigenvalues(m);
  return std::max(std::abs(l1), std::abs(l2));
}

}  // namespace bistable
