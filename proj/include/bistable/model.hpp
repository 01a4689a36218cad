#pragma once

// Space-free Ricker competition maps in the original and the monotone
// (transformed) coordinates, their equilibria and local stability.

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "bistable/errors.hpp"
#include "bistable/format.hpp"
#include "bistable/matrix2.hpp"
#include "bistable/report.hpp"

namespace bistable {

/// Growth rates r1, r2 and competition coefficients a1, a2.
struct ModelParams {
  double r1 = 0.5;
  double r2 = 0.5;
  double a1 = 2.0;
  double a2 = 3.0;
};

/// A pair (u, v) of densities.
struct Point {
  double u = 0.0;
  double v = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

/// Original coordinates (U*, V) or the order-preserving ones (U = 1 - U*, V).
enum class Frame { original, transformed };

inline std::string to_string(Frame f) { return f == Frame::original ? "original" : "transformed"; }

inline CheckReport validate_params(const ModelParams& p) {
  CheckReport r;
  auto in_unit = [](double x) { return x > 0.0 && x < 1.0; };
  auto above_one = [](double x) { return x > 1.0 && std::isfinite(x); };
  std::string detail = "r1, r2 in (0,1) and a1, a2 in (1,inf)";
  bool ok = true;
  auto check = [&](bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = "violated clause: " + what;
    }
  };
  check(in_unit(p.r1), "r1 in (0,1), got r1 = " + fmt(p.r1));
  check(in_unit(p.r2), "r2 in (0,1), got r2 = " + fmt(p.r2));
  check(above_one(p.a1), "a1 > 1, got a1 = " + fmt(p.a1));
  check(above_one(p.a2), "a2 > 1, got a2 = " + fmt(p.a2));
  r.add("H1", ok, detail);
  return r;
}

inline Point ricker_map(const ModelParams& p, Point x) {
  return {x.u * std::exp(p.r1 * (1.0 - x.u - p.a1 * x.v)), x.v * std::exp(p.r2 * (1.0 - x.v - p.a2 * x.u))};
}

/// Monotone form of the recursion; maps [0,1]^2 into itself.
inline Point transformed_map(const ModelParams& p, Point x) {
  if (!(x.u >= 0.0 && x.u <= 1.0 && x.v >= 0.0 && x.v <= 1.0))
    throw DomainError("transformed map needs (u, v) in [0,1]^2, got (" + fmt(x.u) + ", " +
                      fmt(x.v) + ")");
  // The exact image lies in [0,1]^2; clamp round-off so the map can be iterated.
  return {std::clamp(1.0 - (1.0 - x.u) * std::exp(p.r1 * (x.u - p.a1 * x.v)), 0.0, 1.0),
          std::clamp(x.v * std::exp(p.r2 * (1.0 - p.a2 - x.v + p.a2 * x.u)), 0.0, 1.0)};
}

inline Point frame_map(const ModelParams& p, Point x, Frame f) {
  return f == Frame::original ? ricker_map(p, x) : transformed_map(p, x);
}

/// U <-> 1 - U, V unchanged. Its own inverse.
inline Point change_coordinates(Point x) { return {1.0 - x.u, x.v}; }

struct EquilibriumSet {
  double k1 = 0.0;
  double k2 = 0.0;
  std::array<Point, 4> original;     // E0 (0,0), E1 (1,0), E2 (0,1), E3 (k1,k2)
  std::array<Point, 4> transformed;  // F0 (0,0), F1 (1,0), F2 (1-k1,k2), F3 (1,1)
};

/// Coexistence coordinates k1 = (1-a1)/(1-a1 a2), k2 = (1-a2)/(1-a1 a2).
/// Evaluated through a_i - 1 so that a1, a2 -> 1 stays well conditioned.
inline EquilibriumSet equilibria(const ModelParams& p) {
  const double e1 = p.a1 - 1.0, e2 = p.a2 - 1.0;
  const double denom = e1 + e2 + e1 * e2;  // a1 a2 - 1
  if (denom == 0.0 || !std::isfinite(denom))
    throw DomainError("a1 a2 = 1: coexistence equilibrium is singular");
  EquilibriumSet s;
  s.k1 = e1 / denom;
  s.k2 = e2 / denom;
  s.original = {Point{0.0, 0.0}, Point{1.0, 0.0}, Point{0.0, 1.0}, Point{s.k1, s.k2}};
  s.transformed = {Point{0.0, 0.0}, Point{1.0, 0.0}, Point{1.0 - s.k1, s.k2}, Point{1.0, 1.0}};
  return s;
}

inline Matrix2 jacobian(const ModelParams& p, Point x, Frame f) {
  if (f == Frame::original) {
    const double eu = std::exp(p.r1 * (1.0 - x.u - p.a1 * x.v));
    const double ev = std::exp(p.r2 * (1.0 - x.v - p.a2 * x.u));
    return {eu * (1.0 - p.r1 * x.u), -p.r1 * p.a1 * x.u * eu, -p.r2 * p.a2 * x.v * ev, ev * (1.0 - p.r2 * x.v)};
  }
  const double eu = std::exp(p.r1 * (x.u - p.a1 * x.v));
  const double ev = std::exp(p.r2 * (1.0 - p.a2 - x.v + p.a2 * x.u));
  return {eu * (1.0 - p.r1 * (1.0 - x.u)), p.r1 * p.a1 * (1.0 - x.u) * eu, p.r2 * p.a2 * x.v * ev,
          ev * (1.0 - p.r2 * x.v)};
}

enum class Stability { stable, unstable, marginal };

inline std::string to_string(Stability s) {
  switch (s) {
    case Stability::stable: return "stable";
    case Stability::unstable: return "unstable";
    case Stability::marginal: return "marginal";
  }
  return "?";
}

struct StabilityResult {
  Stability kind;
  double spectral_radius;
};

inline StabilityResult classify_stability(const ModelParams& p, Point x, Frame f, double margin = 1e-9) {
  const Point y = frame_map(p, x, f);
  const double res = std::max(std::abs(y.u - x.u), std::abs(y.v - x.v));
  if (!(res <= 1e-10))
    throw DomainError("classify_stability: point is not a fixed point (residual " + fmt(res) + ")");
  const double rho = spectral_radius(jacobian(p, x, f));
  Stability k = Stability::marginal;
  if (rho < 1.0 - margin) k = Stability::stable;
  else if (rho > 1.0 + margin) k = Stability::unstable;
  return {k, rho};
}

struct StabilityProbe {
  double eta;
  Point below;  // transformed_map(eta E4) - eta E4, componentwise < 0 required
  Point above;  // transformed_map(1 - eta E5) - (1 - eta E5), > 0 required
  bool holds;
};

/// Evidence that (0,0) and (1,1) are strongly stable from above and below and
/// that the intermediate equilibria F1, F2 are unordered.
struct StabilityCertificate {
  Point e4;
  Point e5;
  double delta = 0.0;
  std::vector<StabilityProbe> probes;  // per-eta table for the accepted delta
  bool intermediates_unordered = false;
};

namespace detail {
inline Point normalized(Point x) {
  const double n = std::hypot(x.u, x.v);
  return {x.u / n, x.v / n};
}
}  // namespace detail

/// E4 ~ (1, 1/(2 a1)), E5 ~ (1/(2 a2), 1); delta is the largest 2^-k,
/// k = 1..20, for which the strict inequalities hold at eta = delta, delta/2,
/// delta/4.
inline StabilityCertificate strong_stability_vectors(const ModelParams& p) {
  StabilityCertificate cert;
  cert.e4 = detail::normalized({1.0, 1.0 / (2.0 * p.a1)});
  cert.e5 = detail::normalized({1.0 / (2.0 * p.a2), 1.0});

  auto probe = [&](double eta) {
    StabilityProbe pr{eta, {}, {}, false};
    const Point lo{eta * cert.e4.u, eta * cert.e4.v};
    const Point hi{1.0 - eta * cert.e5.u, 1.0 - eta * cert.e5.v};
    const Point qlo = transformed_map(p, lo);
    const Point qhi = transformed_map(p, hi);
    pr.below = {qlo.u - lo.u, qlo.v - lo.v};
    pr.above = {qhi.u - hi.u, qhi.v - hi.v};
    pr.holds = pr.below.u < 0.0 && pr.below.v < 0.0 && pr.above.u > 0.0 && pr.above.v > 0.0;
    return pr;
  };

  for (int k = 1; k <= 20 && cert.delta == 0.0; ++k) {
    const double delta = std::ldexp(1.0, -k);
    std::vector<StabilityProbe> table;
    bool ok = true;
    for (double eta : {delta, 0.5 * delta, 0.25 * delta}) {
      table.push_back(probe(eta));
      ok = ok && table.back().holds;
    }
    if (ok) {
      cert.delta = delta;
      cert.probes = std::move(table);
    }
  }
  if (cert.delta == 0.0)
    throw DomainError("no admissible delta in {2^-1, ..., 2^-20}: bistability certificate fails");

  const auto eq = equilibria(p);
  const Point f1 = eq.transformed[1], f2 = eq.transformed[2];
  const bool le = f1.u <= f2.u && f1.v <= f2.v;
  const bool ge = f1.u >= f2.u && f1.v >= f2.v;
  cert.intermediates_unordered = !le && !ge;
  return cert;
}

}  // namespace bistable
