#pragma once

// Monotone bistable traveling wave from (0,0) to (1,1) in the transformed
// frame, found by iterating Q and recentering the front after every step.
//
// Convention: U_n(x) = phi(x + c n), so a positive speed c means the front
// moves toward -x.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bistable/errors.hpp"
#include "bistable/format.hpp"
#include "bistable/kernels.hpp"
#include "bistable/model.hpp"
#include "bistable/operator.hpp"
#include "bistable/report.hpp"
#include "bistable/speeds.hpp"

namespace bistable {

struct WaveOptions {
  double init_width = 1.0;      // ramp width of the initial data
  double profile_tol = 1e-6;    // sup-norm change between consecutive recentred profiles
  double speed_tol = 1e-4;      // max - min of the trailing per-step speeds
  std::size_t max_steps = 2000;
  std::size_t speed_window = 20;
  double level = 0.5;           // phi level pinned at x = 0
  std::ptrdiff_t initial_shift = 0;  // cells; translates the initial data
  ConvolutionMethod method = ConvolutionMethod::fft;
  bool require_counter_propagation = true;
};

struct WaveStepRecord {
  std::size_t step = 0;
  double displacement = 0.0;    // front displacement removed by recentring (length)
  double profile_change = 0.0;  // sup-norm vs the previous recentred profile
  bool monotone = true;
  bool squeezed = true;         // between (0,0) and (1,1) before any clamping
};

/// Recentring shifts split into whole cells and cell fractions.
struct RecenterLedger {
  long long integer_cells = 0;
  double fractional_cells = 0.0;
  double total_displacement = 0.0;  // sum of per-step displacements (length)
};

struct WaveProfile {
  Grid grid;
  std::vector<double> phi;
  std::vector<double> psi;
  double speed = 0.0;
  double speed_spread = 0.0;
  double residual = 0.0;
  std::size_t steps = 0;
  int kernel_half_width = 0;
  bool converged = false;
  RecenterLedger ledger;
  std::vector<WaveStepRecord> history;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::vector<WaveStepRecord> history)
      : std::runtime_error(what), history_(std::move(history)) {}
  const std::vector<WaveStepRecord>& history() const { return history_; }

 private:
  std::vector<WaveStepRecord> history_;
};

/// Both components equal to 1 / (1 + e^{-x/w}).
inline SpatialState step_initial_data(const Grid& g, double width) {
  if (!(width > 0.0)) throw ParameterError("initial ramp width must be positive");
  auto s = SpatialState::constant(g, Frame::transformed, {0.0, 0.0});
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double y = 1.0 / (1.0 + std::exp(-g.x(i) / width));
    s.u[i] = y;
    s.v[i] = y;
  }
  return s;
}

/// out[k] = f(k + shift) by linear interpolation, edge values continued.
inline std::vector<double> shift_linear(std::span<const double> f, double shift) {
  const auto n = static_cast<std::ptrdiff_t>(f.size());
  const double m = std::floor(shift);
  const double t = shift - m;
  const auto mi = static_cast<std::ptrdiff_t>(m);
  std::vector<double> out(f.size());
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const auto a = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(k + mi, 0, n - 1));
    const auto b = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(k + mi + 1, 0, n - 1));
    out[static_cast<std::size_t>(k)] = t == 0.0 ? f[a] : (1.0 - t) * f[a] + t * f[b];
  }
  return out;
}

inline bool nondecreasing(std::span<const double> f, double slack) {
  for (std::size_t i = 1; i < f.size(); ++i)
    if (f[i] < f[i - 1] - slack) return false;
  return true;
}

/// sup over the boundary-safe window of |Q(phi,psi)(t - c) - (phi,psi)(t)|.
inline double wave_residual(const WaveProfile& wp, const CompetitionOperator& q) {
  const double shift = -wp.speed / wp.grid.spacing();
  const auto margin = static_cast<std::size_t>(q.max_half_width()) + static_cast<std::size_t>(std::ceil(std::abs(shift))) + 1;
  const auto win = interior_window(wp.grid, margin);
  if (win.empty() || 4 * margin >= wp.grid.size())
    throw RangeError("wave_residual: speed " + fmt(wp.speed) + " exceeds the window margin");
  SpatialState s{wp.grid, Frame::transformed, wp.phi, wp.psi, 0, 0, 0.0};
  const auto next = q.apply(s);
  const auto u = shift_linear(next.u, shift);
  const auto v = shift_linear(next.v, shift);
  double worst = 0.0;
  for (std::size_t i = win.first; i <= win.last; ++i)
    worst = std::max({worst, std::abs(u[i] - wp.phi[i]), std::abs(v[i] - wp.psi[i])});
  return worst;
}

inline double wave_residual(const WaveProfile& wp, const ModelParams& p, const DiscreteKernel& k1,
                            const DiscreteKernel& k2, ConvolutionMethod method = ConvolutionMethod::fft) {
  return wave_residual(wp, CompetitionOperator(p, k1, k2, wp.grid, method));
}

inline WaveProfile find_bistable_wave(const ModelParams& p, const DiscreteKernel& k1, const DiscreteKernel& k2,
                                      const Grid& grid, const WaveOptions& opts = {}) {
  detail::require_admissible(p);
  detail::require_admissible_kernel(k1.parent());
  detail::require_admissible_kernel(k2.parent());
  if (opts.require_counter_propagation) {
    const auto cp = counter_propagation(p, k1.parent(), k2.parent());
    if (!cp.passed()) throw DomainError("counter-propagation fails; no bistable wave is guaranteed");
  }
  if (opts.speed_window < 2) throw ParameterError("speed window needs at least 2 steps");

  const CompetitionOperator q(p, k1, k2, grid, opts.method);
  SpatialState s = step_initial_data(grid, opts.init_width);
  if (opts.initial_shift != 0) s = translate(s, opts.initial_shift);

  WaveProfile wp{grid, {}, {}, 0.0, 0.0, 0.0, 0, q.max_half_width(), false, {}, {}};
  const double dx = grid.spacing();
  for (std::size_t n = 1; n <= opts.max_steps; ++n) {
    SpatialState next = q.apply(s);
    WaveStepRecord rec;
    rec.step = n;
    rec.squeezed = next.max_excursion <= 1e-14;
    rec.monotone = nondecreasing(next.u, 1e-10) && nondecreasing(next.v, 1e-10);

    double cross = 0.0;
    try {
      cross = level_crossing(grid, next.u, opts.level);
    } catch (const MeasurementError&) {
      throw MeasurementError("degenerate data: phi never crosses " + fmt(opts.level) + " at step " +
                             std::to_string(n));
    }
    const double cells = cross / dx;
    const double whole = std::floor(cells);
    next.u = shift_linear(next.u, cells);
    next.v = shift_linear(next.v, cells);
    wp.ledger.integer_cells += static_cast<long long>(whole);
    wp.ledger.fractional_cells += cells - whole;
    rec.displacement = cells * dx;
    wp.ledger.total_displacement += rec.displacement;

    double change = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
      change = std::max({change, std::abs(next.u[i] - s.u[i]), std::abs(next.v[i] - s.v[i])});
    rec.profile_change = change;
    wp.history.push_back(rec);
    s = std::move(next);

    if (n >= opts.speed_window) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
      for (std::size_t k = wp.history.size() - opts.speed_window; k < wp.history.size(); ++k) {
        const double d = wp.history[k].displacement;
        lo = std::min(lo, d);
        hi = std::max(hi, d);
        sum += d;
      }
      wp.speed = -sum / static_cast<double>(opts.speed_window);
      wp.speed_spread = hi - lo;
      if (change < opts.profile_tol && wp.speed_spread < opts.speed_tol) {
        wp.converged = true;
        wp.steps = n;
        break;
      }
    }
  }
  if (!wp.converged)
    throw ConvergenceError("bistable wave did not converge within " + std::to_string(opts.max_steps) + " steps",
                           std::move(wp.history));
  wp.phi = std::move(s.u);
  wp.psi = std::move(s.v);
  wp.residual = wave_residual(wp, q);
  return wp;
}

struct WaveTolerances {
  double monotone_slack = 1e-10;
  double tail_tol = 1e-3;
  double tail_fraction = 0.1;  // share of the interior window checked at each end
  double residual_tol = 1e-4;
};

inline CheckReport validate_profile(const WaveProfile& wp, const WaveTolerances& tol = {}) {
  CheckReport r;
  r.add("monotone", nondecreasing(wp.phi, tol.monotone_slack) && nondecreasing(wp.psi, tol.monotone_slack),
        "phi, psi nondecreasing within slack " + fmt(tol.monotone_slack));

  auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  r.add("range", std::all_of(wp.phi.begin(), wp.phi.end(), in_unit) && std::all_of(wp.psi.begin(), wp.psi.end(), in_unit),
        "phi, psi in [0,1]");

  const auto win = interior_window(wp.grid, static_cast<std::size_t>(wp.kernel_half_width));
  const std::size_t len = win.empty() ? 0 : win.last - win.first + 1;
  const std::size_t count = std::max<std::size_t>(1, static_cast<std::size_t>(tol.tail_fraction * static_cast<double>(len)));
  double left = 0.0, right = 0.0;
  for (std::size_t k = 0; k < count && k < len; ++k) {
    const std::size_t i = win.first + k, j = win.last - k;
    left = std::max({left, std::abs(wp.phi[i]), std::abs(wp.psi[i])});
    right = std::max({right, std::abs(1.0 - wp.phi[j]), std::abs(1.0 - wp.psi[j])});
  }
  r.add("left-tail", len > 0 && left <= tol.tail_tol, "max |(phi,psi) - (0,0)| on left tail = " + fmt(left));
  r.add("right-tail", len > 0 && right <= tol.tail_tol,
        "max |(phi,psi) - (1,1)| on right tail = " + fmt(right));
  r.add("residual", wp.residual < tol.residual_tol, "wave equation residual = " + fmt(wp.residual));
  return r;
}

/// Profile in the original coordinates: (1 - phi, psi), from E1 = (1,0) on the
/// left to E2 = (0,1) on the right.
inline std::pair<std::vector<double>, std::vector<double>> to_original_frame(const WaveProfile& wp) {
  std::vector<double> u(wp.phi.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = change_coordinates({wp.phi[i], 0.0}).u;
  return {u, wp.psi};
}

}  // namespace bistable
