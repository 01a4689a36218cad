#pragma once

// The integrodifference evolution operator on a uniform 1-D grid: react at
// each source point, then disperse with the kernel.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "bistable/convolution.hpp"
#include "bistable/errors.hpp"
#include "bistable/format.hpp"
#include "bistable/kernels.hpp"
#include "bistable/model.hpp"

namespace bistable {

/// Points x_i = (i - M) dx, i = 0..2M, with M = floor(L / dx).
class Grid {
 public:
  Grid(double half_length, double dx) : dx_(dx) {
    if (!(dx > 0.0) || !(half_length > 0.0)) throw ParameterError("grid needs L > 0 and dx > 0");
    half_cells_ = static_cast<std::size_t>(std::floor(half_length / dx + 1e-9));
    if (half_cells_ < 1) throw ParameterError("grid needs at least 3 points (L >= dx)");
  }

  std::size_t size() const { return 2 * half_cells_ + 1; }
  std::size_t center() const { return half_cells_; }
  double spacing() const { return dx_; }
  double half_length() const { return static_cast<double>(half_cells_) * dx_; }
  double x(std::size_t i) const {
    return (static_cast<double>(i) - static_cast<double>(half_cells_)) * dx_;
  }
  std::vector<double> points() const {
    std::vector<double> xs(size());
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = x(i);
    return xs;
  }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.half_cells_ == b.half_cells_ && a.dx_ == b.dx_;
  }

 private:
  double dx_;
  std::size_t half_cells_;
};

/// Paired fields (U, V) at generation `step`.
struct SpatialState {
  Grid grid;
  Frame frame = Frame::transformed;
  std::vector<double> u;
  std::vector<double> v;
  std::size_t step = 0;
  std::size_t clamped = 0;    // samples pulled back into range by the last step
  double max_excursion = 0.0; // largest distance outside the range before clamping

  static SpatialState constant(const Grid& g, Frame f, Point value) {
    return {g, f, std::vector<double>(g.size(), value.u), std::vector<double>(g.size(), value.v), 0, 0, 0.0};
  }

  Point at(std::size_t i) const { return {u[i], v[i]}; }

  /// Transformed frame: every sample in [0,1]. Original frame: >= 0.
  bool in_range(double tol = 0.0) const {
    auto ok = [&](double s) {
      return frame == Frame::transformed ? (s >= -tol && s <= 1.0 + tol) : s >= -tol;
    };
    return std::all_of(u.begin(), u.end(), ok) && std::all_of(v.begin(), v.end(), ok);
  }
};

/// Q on the grid, in either frame. Holds one convolver per species.
class CompetitionOperator {
 public:
  CompetitionOperator(const ModelParams& p, const DiscreteKernel& k1, const DiscreteKernel& k2, const Grid& grid,
                      ConvolutionMethod method = ConvolutionMethod::fft)
      : params_(p), grid_(grid), conv1_(check_spacing(k1, grid), grid.size(), method),
        conv2_(check_spacing(k2, grid), grid.size(), method) {}

  const Grid& grid() const { return grid_; }
  const ModelParams& params() const { return params_; }
  int max_half_width() const { return std::max(conv1_.kernel().half_width(), conv2_.kernel().half_width()); }
  const Convolver& dispersal1() const { return conv1_; }
  const Convolver& dispersal2() const { return conv2_; }

  SpatialState apply(const SpatialState& s) const {
    if (!(s.grid == grid_)) throw ConfigurationError("state grid does not match operator grid");
    const std::size_t n = grid_.size();
    const auto& p = params_;
    std::vector<double> g1(n), g2(n);
    if (s.frame == Frame::transformed) {
      for (std::size_t i = 0; i < n; ++i) {
        const double U = s.u[i], V = s.v[i];
        g1[i] = (1.0 - U) * std::exp(p.r1 * (U - p.a1 * V));
        g2[i] = V * std::exp(p.r2 * (1.0 - p.a2 - V + p.a2 * U));
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        const double U = s.u[i], V = s.v[i];
        g1[i] = U * std::exp(p.r1 * (1.0 - U - p.a1 * V));
        g2[i] = V * std::exp(p.r2 * (1.0 - V - p.a2 * U));
      }
    }
    SpatialState out{grid_, s.frame, std::vector<double>(n), std::vector<double>(n), s.step + 1, 0, 0.0};
    conv1_.apply(g1, out.u);
    conv2_.apply(g2, out.v);
    if (s.frame == Frame::transformed)
      for (auto& x : out.u) x = 1.0 - x;

    const double hi = s.frame == Frame::transformed ? 1.0 : std::numeric_limits<double>::infinity();
    for (auto* field : {&out.u, &out.v}) {
      for (auto& x : *field) {
        if (x < 0.0 || x > hi) {
          out.max_excursion = std::max(out.max_excursion, x < 0.0 ? -x : x - hi);
          x = std::clamp(x, 0.0, hi);
          ++out.clamped;
        }
      }
    }
    return out;
  }

  SpatialState operator()(const SpatialState& s) const { return apply(s); }

 private:
  static const DiscreteKernel& check_spacing(const DiscreteKernel& k, const Grid& g) {
    if (std::abs(k.spacing() - g.spacing()) > 1e-12 * g.spacing())
      throw ConfigurationError("kernel spacing " + fmt(k.spacing()) + " does not match grid spacing " +
                               fmt(g.spacing()));
    return k;
  }

  ModelParams params_;
  Grid grid_;
  Convolver conv1_;
  Convolver conv2_;
};

/// One application of Q. Builds the convolvers on every call; reuse a
/// CompetitionOperator when stepping repeatedly.
inline SpatialState apply_Q(const SpatialState& s, const ModelParams& p, const DiscreteKernel& k1,
                            const DiscreteKernel& k2, ConvolutionMethod method = ConvolutionMethod::fft) {
  return CompetitionOperator(p, k1, k2, s.grid, method).apply(s);
}

/// Trajectory of n_steps applications, keeping the initial state, every
/// `thin`-th state and the final one.
inline std::vector<SpatialState> iterate(const SpatialState& s, const CompetitionOperator& q, std::size_t n_steps,
                                         std::size_t thin = 1) {
  if (thin == 0) thin = 1;
  std::vector<SpatialState> traj{s};
  SpatialState cur = s;
  for (std::size_t k = 1; k <= n_steps; ++k) {
    cur = q.apply(cur);
    if (k % thin == 0 || k == n_steps) traj.push_back(cur);
  }
  return traj;
}

/// Shifts both fields by j cells to the right (x -> x + j dx); vacated cells
/// take the nearest edge value.
inline SpatialState translate(const SpatialState& s, std::ptrdiff_t j) {
  const auto n = static_cast<std::ptrdiff_t>(s.grid.size());
  if (j <= -n || j >= n) throw RangeError("translate: |j| = " + std::to_string(std::abs(j)) + " >= N");
  SpatialState out = s;
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto src = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i - j, 0, n - 1));
    out.u[static_cast<std::size_t>(i)] = s.u[src];
    out.v[static_cast<std::size_t>(i)] = s.v[src];
  }
  return out;
}

enum class Ordering { equal, less_equal, greater_equal, unordered };

inline std::string to_string(Ordering o) {
  switch (o) {
    case Ordering::equal: return "equal";
    case Ordering::less_equal: return "<=";
    case Ordering::greater_equal: return ">=";
    case Ordering::unordered: return "unordered";
  }
  return "?";
}

/// Exact componentwise, pointwise comparison.
inline Ordering compare(const SpatialState& a, const SpatialState& b) {
  if (!(a.grid == b.grid) || a.frame != b.frame) throw ConfigurationError("compare: grid or frame mismatch");
  bool le = true, ge = true;
  for (std::size_t i = 0; i < a.u.size(); ++i) {
    le = le && a.u[i] <= b.u[i] && a.v[i] <= b.v[i];
    ge = ge && a.u[i] >= b.u[i] && a.v[i] >= b.v[i];
  }
  if (le && ge) return Ordering::equal;
  if (le) return Ordering::less_equal;
  if (ge) return Ordering::greater_equal;
  return Ordering::unordered;
}

/// Cells at least `margin` away from both edges.
struct IndexWindow {
  std::size_t first = 0;
  std::size_t last = 0;  // inclusive
  bool empty() const { return last < first; }
};

inline IndexWindow interior_window(const Grid& g, std::size_t margin) {
  if (2 * margin >= g.size()) return {1, 0};
  return {margin, g.size() - 1 - margin};
}

/// Scalar Ricker dispersal step p -> l * (p e^{r(1-p)}).
inline std::vector<double> scalar_ricker_step(const Convolver& conv, double r, std::span<const double> p) {
  std::vector<double> g(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) g[i] = p[i] * std::exp(r * (1.0 - p[i]));
  auto out = conv(g);
  for (auto& x : out) x = std::max(x, 0.0);
  return out;
}

/// First-species subsystem on the V = 0 face of the transformed frame:
/// q -> 1 - l * ((1-q) e^{r q}).
inline std::vector<double> q_equation_step(const Convolver& conv, double r, std::span<const double> q) {
  std::vector<double> g(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) g[i] = (1.0 - q[i]) * std::exp(r * q[i]);
  auto out = conv(g);
  for (auto& x : out) x = 1.0 - x;
  return out;
}

}  // namespace bistable
