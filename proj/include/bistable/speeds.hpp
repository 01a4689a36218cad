#pragma once

// Spreading speeds of the monostable subsystems around each intermediate
// equilibrium, and empirical front-speed measurement.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "bistable/convolution.hpp"
#include "bistable/errors.hpp"
#include "bistable/format.hpp"
#include "bistable/kernels.hpp"
#include "bistable/matrix2.hpp"
#include "bistable/minimize.hpp"
#include "bistable/model.hpp"
#include "bistable/operator.hpp"
#include "bistable/report.hpp"

namespace bistable {

/// Which monostable speed: leftward into M from I, or rightward from theta
/// into I, for I = F1 or F2.
enum class SpeedQuery { cminus_F1F3, cplus_F0F1, cminus_F2F3, cplus_F0F2 };
enum class SpeedMethod { scalar_formula, matrix_eigenvalue, empirical };

inline std::string to_string(SpeedQuery q) {
  switch (q) {
    case SpeedQuery::cminus_F1F3: return "cminus_F1F3";
    case SpeedQuery::cplus_F0F1: return "cplus_F0F1";
    case SpeedQuery::cminus_F2F3: return "cminus_F2F3";
    case SpeedQuery::cplus_F0F2: return "cplus_F0F2";
  }
  return "?";
}

inline std::string to_string(SpeedMethod m) {
  switch (m) {
    case SpeedMethod::scalar_formula: return "scalar-formula";
    case SpeedMethod::matrix_eigenvalue: return "matrix-eigenvalue";
    case SpeedMethod::empirical: return "empirical";
  }
  return "?";
}

struct CurveSample {
  double mu;
  double objective;
};

struct SpeedReport {
  double value = 0.0;
  double argmin = 0.0;
  std::vector<CurveSample> curve;
  SpeedMethod method = SpeedMethod::scalar_formula;
  double lambda_at_zero = std::numeric_limits<double>::quiet_NaN();  // matrix method only
};

namespace detail {

template <class F>
std::vector<CurveSample> sample_curve(F&& objective, double argmin, std::size_t count = 200) {
  std::vector<CurveSample> out;
  out.reserve(count);
  const double lo = argmin / 20.0, hi = 4.0 * argmin;
  for (std::size_t i = 0; i < count; ++i) {
    const double mu = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    try {
      out.push_back({mu, objective(mu)});
    } catch (const RangeError&) {
      break;
    }
  }
  return out;
}

inline void require_admissible_kernel(const Kernel& k) {
  const auto h = validate_hypotheses(k);
  if (!h.passed()) {
    const auto f = h.failures().front();
    throw DomainError("kernel " + k.describe() + " fails " + f.clause + ": " + f.detail);
  }
}

inline void require_admissible(const ModelParams& p) {
  const auto h = validate_params(p);
  if (!h.passed()) throw DomainError("parameters fail H1: " + h.checks.front().detail);
}

}  // namespace detail

/// inf over mu > 0 of (r + ln M(mu)) / mu: the spreading speed of the scalar
/// Ricker recursion p -> l * (p e^{r(1-p)}).
inline SpeedReport scalar_speed(double r, const Kernel& k, const MinimizeOptions& opt = {}) {
  if (!(r > 0.0 && r < 1.0)) throw DomainError("scalar_speed needs r in (0,1), got " + fmt(r));
  detail::require_admissible_kernel(k);
  auto objective = [&](double mu) {
    const double lm = k.log_mgf(mu);
    if (lm > detail::kLogMax) k.mgf(mu);  // throws RangeError naming mu
    return (r + lm) / mu;
  };
  const auto m = minimize_positive(objective, opt);
  SpeedReport rep;
  rep.value = m.value;
  rep.argmin = m.argmin;
  rep.method = SpeedMethod::scalar_formula;
  rep.curve = detail::sample_curve(objective, m.argmin);
  return rep;
}

/// Dual-path check that the q-equation q -> 1 - l*((1-q) e^{r1 q}) equals
/// 1 - W(1 - q) with W the scalar Ricker step w -> l*(w e^{r1(1-w)}), on
/// random profiles.
inline CheckReport w_transform_check(const ModelParams& p, const DiscreteKernel& k1, std::uint64_t seed = 1,
                                     int trials = 10) {
  const Grid grid((k1.half_width() + 100) * k1.spacing(), k1.spacing());
  const Convolver conv(k1, grid.size(), ConvolutionMethod::direct);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> q(grid.size());
    if (t == 0) std::fill(q.begin(), q.end(), 1.0);
    else if (t == 1) std::fill(q.begin(), q.end(), 0.0);
    else
      for (auto& x : q) x = unit(rng);
    const auto direct = q_equation_step(conv, p.r1, q);
    std::vector<double> w(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) w[i] = 1.0 - q[i];
    const auto wn = scalar_ricker_step(conv, p.r1, w);
    for (std::size_t i = 0; i < q.size(); ++i) worst = std::max(worst, std::abs(direct[i] - (1.0 - wn[i])));
  }
  CheckReport r;
  r.add("w-transform", worst < 1e-12, "sup |Q(q) - (1 - W(1 - q))| = " + fmt(worst));
  return r;
}

/// Linearization of the shifted system at F2, columns scaled by the MGFs.
inline Matrix2 linearization_matrix(const ModelParams& p, const Kernel& k1, const Kernel& k2, double mu) {
  if (!(mu >= 0.0)) throw DomainError("linearization_matrix needs mu >= 0");
  const auto eq = equilibria(p);
  const double m1 = k1.mgf(mu), m2 = k2.mgf(mu);
  return {(1.0 - p.r1 * eq.k1) * m1, p.a1 * p.r1 * eq.k1 * m2, p.a2 * p.r2 * eq.k2 * m1, (1.0 - p.r2 * eq.k2) * m2};
}

/// Perron root of an entrywise-positive 2x2 matrix.
inline double principal_eigenvalue(const Matrix2& B) {
  if (!(B.a > 0.0 && B.b > 0.0 && B.c > 0.0 && B.d > 0.0))
    throw DomainError("principal_eigenvalue needs an entrywise-positive matrix");
  return 0.5 * (B.trace() + std::sqrt(B.discriminant()));
}

/// Positive eigenvector for the Perron root, unit 1-norm.
inline Point perron_vector(const Matrix2& B) {
  const double lam = principal_eigenvalue(B);
  const Point w{B.b, lam - B.a};
  const double s = w.u + w.v;
  return {w.u / s, w.v / s};
}

/// inf over mu > 0 of ln(lambda(B_mu)) / mu. Both F2 queries share B_mu
/// because symmetric kernels have M(mu) = M(-mu).
inline SpeedReport system_speed_bound(const ModelParams& p, const Kernel& k1, const Kernel& k2, SpeedQuery which,
                                      const MinimizeOptions& opt = {}) {
  if (which != SpeedQuery::cminus_F2F3 && which != SpeedQuery::cplus_F0F2)
    throw DomainError("system_speed_bound answers the F2 queries only, got " + to_string(which));
  detail::require_admissible(p);
  detail::require_admissible_kernel(k1);
  detail::require_admissible_kernel(k2);
  auto objective = [&](double mu) { return std::log(principal_eigenvalue(linearization_matrix(p, k1, k2, mu))) / mu; };
  const auto m = minimize_positive(objective, opt);
  SpeedReport rep;
  rep.value = m.value;
  rep.argmin = m.argmin;
  rep.method = SpeedMethod::matrix_eigenvalue;
  rep.lambda_at_zero = principal_eigenvalue(linearization_matrix(p, k1, k2, 0.0));
  rep.curve = detail::sample_curve(objective, m.argmin);
  return rep;
}

struct CounterPropagationReport {
  SpeedReport cminus_F1F3;
  SpeedReport cplus_F0F1;
  SpeedReport cminus_F2F3;
  SpeedReport cplus_F0F2;
  double sum_F1 = 0.0;  // c-(F1,F3) + c+(F0,F1)
  double sum_F2 = 0.0;  // c-(F2,F3) + c+(F0,F2)
  bool passed() const { return sum_F1 > 0.0 && sum_F2 > 0.0; }
};

inline CounterPropagationReport counter_propagation(const ModelParams& p, const Kernel& k1, const Kernel& k2,
                                                    const MinimizeOptions& opt = {}) {
  detail::require_admissible(p);
  CounterPropagationReport r;
  r.cminus_F1F3 = scalar_speed(p.r2, k2, opt);
  r.cplus_F0F1 = scalar_speed(p.r1, k1, opt);
  r.cminus_F2F3 = system_speed_bound(p, k1, k2, SpeedQuery::cminus_F2F3, opt);
  r.cplus_F0F2 = system_speed_bound(p, k1, k2, SpeedQuery::cplus_F0F2, opt);
  r.sum_F1 = r.cminus_F1F3.value + r.cplus_F0F1.value;
  r.sum_F2 = r.cminus_F2F3.value + r.cplus_F0F2.value;
  return r;
}

inline SpeedReport speed(SpeedQuery q, const ModelParams& p, const Kernel& k1, const Kernel& k2,
                         const MinimizeOptions& opt = {}) {
  switch (q) {
    case SpeedQuery::cminus_F1F3: return scalar_speed(p.r2, k2, opt);
    case SpeedQuery::cplus_F0F1: return scalar_speed(p.r1, k1, opt);
    default: return system_speed_bound(p, k1, k2, q, opt);
  }
}

// ---------------------------------------------------------------------------
// Empirical front speed

struct FieldSnapshot {
  std::size_t step = 0;
  std::vector<double> values;
};

enum class Component { u, v };

inline std::vector<FieldSnapshot> snapshots(std::span<const SpatialState> traj, Component c) {
  std::vector<FieldSnapshot> out;
  out.reserve(traj.size());
  for (const auto& s : traj) out.push_back({s.step, c == Component::u ? s.u : s.v});
  return out;
}

/// Steps [first_step, last_step] used in the fit.
struct FitWindow {
  std::size_t first_step = 0;
  std::size_t last_step = std::numeric_limits<std::size_t>::max();
};

struct FrontSpeedFit {
  double speed = 0.0;       // d(position)/d(step), positive = moving toward +x
  double intercept = 0.0;
  double rms_residual = 0.0;
  std::vector<std::pair<std::size_t, double>> positions;  // (step, crossing x) inside the window
};

/// Leftmost position where the field crosses `level`, linearly interpolated.
inline double level_crossing(const Grid& g, std::span<const double> f, double level) {
  for (std::size_t i = 0; i + 1 < f.size(); ++i) {
    const bool below_i = f[i] < level, below_next = f[i + 1] < level;
    if (below_i != below_next) {
      const double t = (level - f[i]) / (f[i + 1] - f[i]);
      return g.x(i) + t * g.spacing();
    }
  }
  throw MeasurementError("level " + fmt(level) + " is never crossed");
}

/// Least-squares slope of crossing position against step over the window.
inline FrontSpeedFit measure_front_speed(const Grid& g, std::span<const FieldSnapshot> traj, double level = 0.5,
                                         FitWindow window = {}) {
  FrontSpeedFit fit;
  for (const auto& s : traj) {
    if (s.step < window.first_step || s.step > window.last_step) continue;
    fit.positions.emplace_back(s.step, level_crossing(g, s.values, level));
  }
  const auto n = static_cast<double>(fit.positions.size());
  if (fit.positions.size() < 2) throw MeasurementError("front speed fit needs at least two snapshots in the window");
  double sx = 0.0, sy = 0.0;
  for (const auto& [k, x] : fit.positions) {
    sx += static_cast<double>(k);
    sy += x;
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [k, x] : fit.positions) {
    const double dk = static_cast<double>(k) - mx;
    sxx += dk * dk;
    sxy += dk * (x - my);
  }
  if (sxx == 0.0) throw MeasurementError("front speed fit needs snapshots at distinct steps");
  fit.speed = sxy / sxx;
  fit.intercept = my - fit.speed * mx;
  double ss = 0.0;
  for (const auto& [k, x] : fit.positions) {
    const double e = x - (fit.intercept + fit.speed * static_cast<double>(k));
    ss += e * e;
  }
  fit.rms_residual = std::sqrt(ss / n);
  return fit;
}

/// Runs the scalar Ricker recursion from Heaviside data (1 for x <= 0) and
/// fits the speed of the level crossing. The default window is the second
/// half of the run. Zero is unstable here, so the direct convolution is the
/// default: FFT round-off ahead of the front would be amplified.
inline FrontSpeedFit empirical_scalar_speed(double r, const Kernel& k, const Grid& g, std::size_t steps,
                                            double level = 0.5, std::optional<FitWindow> window = std::nullopt,
                                            double trunc_eps = 1e-12,
                                            ConvolutionMethod method = ConvolutionMethod::direct) {
  const auto dk = discretize(k, g.spacing(), trunc_eps);
  const Convolver conv(dk, g.size(), method);
  std::vector<double> p(g.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = g.x(i) <= 0.0 ? 1.0 : 0.0;
  std::vector<FieldSnapshot> traj{{0, p}};
  for (std::size_t n = 1; n <= steps; ++n) {
    p = scalar_ricker_step(conv, r, p);
    traj.push_back({n, p});
  }
  return measure_front_speed(g, traj, level, window.value_or(FitWindow{steps / 2, steps}));
}

}  // namespace bistable
