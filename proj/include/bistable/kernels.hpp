#pragma once

// Dispersal kernels: symmetric probability densities with an everywhere
// finite moment generating function, plus their grid discretization.

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "bistable/errors.hpp"
#include "bistable/format.hpp"
#include "bistable/report.hpp"

namespace bistable {

enum class KernelFamily { gaussian, uniform, table };

/// Declared support of a tabulated kernel. A table that truncates a density
/// with unbounded support cannot certify a finite MGF for every mu.
enum class Support { compact, unbounded };

inline std::string to_string(KernelFamily f) {
  switch (f) {
    case KernelFamily::gaussian: return "gaussian";
    case KernelFamily::uniform: return "uniform";
    case KernelFamily::table: return "table";
  }
  return "?";
}

namespace detail {

inline constexpr double kLogMax = 709.782712893384;  // log(DBL_MAX)

// 5-point Gauss-Legendre on [-1, 1].
inline constexpr std::array<double, 5> kGlNodes = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                                   0.5384693101056831, 0.9061798459386640};
inline constexpr std::array<double, 5> kGlWeights = {0.2369268850561891, 0.4786286704993665,
                                                     0.5688888888888889, 0.4786286704993665,
                                                     0.2369268850561891};

// log(sinh(x)/x) for x >= 0 without overflow or cancellation.
inline double log_sinhc(double x) {
  x = std::abs(x);
  if (x < 1e-3) {
    const double x2 = x * x;
    return x2 / 6.0 - x2 * x2 / 180.0;
  }
  if (x < 20.0) return std::log(std::sinh(x) / x);
  return x + std::log1p(-std::exp(-2.0 * x)) - std::log(2.0 * x);
}

}  // namespace detail

struct GaussianKernel {
  double sigma;
};

struct UniformKernel {
  double halfwidth;
};

/// Piecewise-linear density through (offset, density) samples on a grid
/// symmetric about zero; zero outside the sampled range.
struct TableKernel {
  std::vector<double> offsets;
  std::vector<double> density;
  Support support = Support::compact;
  bool symmetrized = false;      // input samples were not mirror images
  bool raw_nonnegative = true;   // every input sample was >= 0
};

class Kernel {
 public:
  static Kernel gaussian(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
      throw ParameterError("gaussian kernel needs sigma > 0, got " + fmt(sigma));
    return Kernel(GaussianKernel{sigma});
  }

  static Kernel uniform(double halfwidth) {
    if (!(halfwidth > 0.0) || !std::isfinite(halfwidth))
      throw ParameterError("uniform kernel needs half-width > 0, got " + fmt(halfwidth));
    return Kernel(UniformKernel{halfwidth});
  }

  /// Builds a table kernel. Offsets must be strictly increasing and mirror
  /// symmetric; densities are averaged with their mirror image and rescaled
  /// to unit trapezoid mass.
  static Kernel table(std::vector<double> offsets, std::vector<double> density,
                      Support support = Support::compact) {
    const std::size_t n = offsets.size();
    if (n < 3 || density.size() != n)
      throw ParameterError("table kernel needs >= 3 (offset, density) pairs of equal length");
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(offsets[i]) || !std::isfinite(density[i]))
        throw ParameterError("table kernel contains non-finite values");
      if (i > 0 && !(offsets[i] > offsets[i - 1]))
        throw ParameterError("table kernel offsets must be strictly increasing");
      scale = std::max(scale, std::abs(offsets[i]));
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(offsets[i] + offsets[n - 1 - i]) > 1e-12 * scale)
        throw ParameterError("table kernel offsets must lie on a grid symmetric about 0");
    }
    TableKernel t;
    t.support = support;
    t.raw_nonnegative = std::all_of(density.begin(), density.end(), [](double d) { return d >= 0.0; });
    std::vector<double> ys(n);
    for (std::size_t i = 0; i < n; ++i) ys[i] = 0.5 * (offsets[i] - offsets[n - 1 - i]);
    offsets = std::move(ys);
    std::vector<double> sym(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (density[i] != density[n - 1 - i]) t.symmetrized = true;
      sym[i] = 0.5 * (density[i] + density[n - 1 - i]);
    }
    double mass = 0.0;
    for (std::size_t i = 1; i < n; ++i)
      mass += 0.5 * (sym[i] + sym[i - 1]) * (offsets[i] - offsets[i - 1]);
    if (!(mass > 0.0)) throw ParameterError("table kernel has nonpositive total mass");
    for (auto& d : sym) d /= mass;
    t.offsets = std::move(offsets);
    t.density = std::move(sym);
    return Kernel(std::move(t));
  }

  /// Reads a two-column text table: offset, density. '#' starts a comment.
  static Kernel table_from_file(const std::filesystem::path& path, Support support = Support::compact) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot open kernel table " + path.string());
    std::vector<double> ys, ds;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      std::replace(line.begin(), line.end(), ',', ' ');
      std::istringstream ls(line);
      double y = 0.0, d = 0.0;
      if (!(ls >> y)) continue;
      if (!(ls >> d))
        throw ParameterError(path.string() + ":" + std::to_string(lineno) + ": expected two columns");
      ys.push_back(y);
      ds.push_back(d);
    }
    return table(std::move(ys), std::move(ds), support);
  }

  KernelFamily family() const {
    return std::visit(
        [](const auto& k) {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, GaussianKernel>) return KernelFamily::gaussian;
          else if constexpr (std::is_same_v<T, UniformKernel>) return KernelFamily::uniform;
          else return KernelFamily::table;
        },
        impl_);
  }

  const GaussianKernel* as_gaussian() const { return std::get_if<GaussianKernel>(&impl_); }
  const UniformKernel* as_uniform() const { return std::get_if<UniformKernel>(&impl_); }
  const TableKernel* as_table() const { return std::get_if<TableKernel>(&impl_); }

  double density(double y) const {
    return std::visit(
        [y](const auto& k) -> double {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, GaussianKernel>) {
            const double z = y / k.sigma;
            return std::exp(-0.5 * z * z) / (k.sigma * std::sqrt(2.0 * M_PI));
          } else if constexpr (std::is_same_v<T, UniformKernel>) {
            return std::abs(y) <= k.halfwidth ? 0.5 / k.halfwidth : 0.0;
          } else {
            const auto& ys = k.offsets;
            if (y < ys.front() || y > ys.back()) return 0.0;
            auto it = std::upper_bound(ys.begin(), ys.end(), y);
            if (it == ys.end()) return k.density.back();
            const auto i = static_cast<std::size_t>(it - ys.begin());
            const double t = (y - ys[i - 1]) / (ys[i] - ys[i - 1]);
            return (1.0 - t) * k.density[i - 1] + t * k.density[i];
          }
        },
        impl_);
  }

  /// log M(mu); finite for every real mu and every family.
  double log_mgf(double mu) const {
    if (!std::isfinite(mu)) throw DomainError("mgf argument must be finite");
    return std::visit(
        [mu](const auto& k) -> double {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, GaussianKernel>) {
            return 0.5 * k.sigma * k.sigma * mu * mu;
          } else if constexpr (std::is_same_v<T, UniformKernel>) {
            return detail::log_sinhc(k.halfwidth * mu);
          } else {
            // Piecewise-linear density times exp(mu y), integrated per segment
            // with Gauss-Legendre after factoring out exp(|mu| y_max).
            const double shift = std::abs(mu) * k.offsets.back();
            double acc = 0.0;
            for (std::size_t i = 1; i < k.offsets.size(); ++i) {
              const double a = k.offsets[i - 1], b = k.offsets[i];
              const double h = 0.5 * (b - a), m = 0.5 * (a + b);
              for (std::size_t q = 0; q < detail::kGlNodes.size(); ++q) {
                const double y = m + h * detail::kGlNodes[q];
                const double t = (y - a) / (b - a);
                const double d = (1.0 - t) * k.density[i - 1] + t * k.density[i];
                acc += detail::kGlWeights[q] * h * d * std::exp(mu * y - shift);
              }
            }
            return shift + std::log(acc);
          }
        },
        impl_);
  }

  /// M(mu) = integral of exp(mu y) l(y) dy.
  double mgf(double mu) const {
    const double lm = log_mgf(mu);
    if (lm > detail::kLogMax)
      throw RangeError("moment generating function overflows at mu = " + fmt(mu));
    return std::exp(lm);
  }

  /// Mass of the density outside [-x, x], x >= 0.
  double tail_mass(double x) const {
    x = std::abs(x);
    return std::visit(
        [x](const auto& k) -> double {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, GaussianKernel>) {
            return std::erfc(x / (k.sigma * std::sqrt(2.0)));
          } else if constexpr (std::is_same_v<T, UniformKernel>) {
            return x < k.halfwidth ? (k.halfwidth - x) / k.halfwidth : 0.0;
          } else {
            const auto& ys = k.offsets;
            const auto& ds = k.density;
            double inside = 0.0;
            for (std::size_t i = 1; i < ys.size(); ++i) {
              const double a = std::max(ys[i - 1], -x), b = std::min(ys[i], x);
              if (b <= a) continue;
              auto lerp = [&](double y) {
                const double t = (y - ys[i - 1]) / (ys[i] - ys[i - 1]);
                return (1.0 - t) * ds[i - 1] + t * ds[i];
              };
              inside += 0.5 * (lerp(a) + lerp(b)) * (b - a);
            }
            return std::max(0.0, 1.0 - inside);
          }
        },
        impl_);
  }

  /// Mass under the reference quadrature (closed form for built-ins,
  /// trapezoid for tables).
  double total_mass() const {
    if (const auto* t = as_table()) {
      double m = 0.0;
      for (std::size_t i = 1; i < t->offsets.size(); ++i)
        m += 0.5 * (t->density[i] + t->density[i - 1]) * (t->offsets[i] - t->offsets[i - 1]);
      return m;
    }
    return 1.0;
  }

  std::string describe() const {
    std::ostringstream os;
    os.precision(12);
    if (const auto* g = as_gaussian()) os << "gaussian(sigma=" << g->sigma << ")";
    else if (const auto* u = as_uniform()) os << "uniform(halfwidth=" << u->halfwidth << ")";
    else {
      const auto* t = as_table();
      os << "table(n=" << t->offsets.size() << ", support="
         << (t->support == Support::compact ? "compact" : "unbounded") << ")";
    }
    return os.str();
  }

 private:
  using Impl = std::variant<GaussianKernel, UniformKernel, TableKernel>;
  explicit Kernel(Impl impl) : impl_(std::move(impl)) {}
  Impl impl_;
};

/// Family-level description as it appears in config files.
struct KernelSpec {
  KernelFamily family = KernelFamily::gaussian;
  double sigma = 1.0;
  double halfwidth = 1.0;
  std::string table_path;
  Support support = Support::compact;
};

inline Kernel make_kernel(const KernelSpec& spec) {
  switch (spec.family) {
    case KernelFamily::gaussian: return Kernel::gaussian(spec.sigma);
    case KernelFamily::uniform: return Kernel::uniform(spec.halfwidth);
    case KernelFamily::table: return Kernel::table_from_file(spec.table_path, spec.support);
  }
  throw ParameterError("unknown kernel family");
}

/// Checks the dispersal hypotheses: H2 (unit mass, MGF finite for every real
/// mu) and H3 (even and nonnegative).
inline CheckReport validate_hypotheses(const Kernel& k) {
  CheckReport r;
  const double mass = k.total_mass();
  const bool unit_mass = std::abs(mass - 1.0) < 1e-10;
  bool finite_mgf = true;
  std::string h2_detail = "unit mass; mgf finite for all real mu (" + to_string(k.family()) + ")";
  if (const auto* t = k.as_table(); t && t->support == Support::unbounded) {
    finite_mgf = false;
    h2_detail = "table declares unbounded support; mgf finiteness for all mu cannot be certified";
  }
  if (!unit_mass) h2_detail = "total mass " + fmt(mass) + " != 1";
  r.add("H2", unit_mass && finite_mgf, h2_detail);

  bool symmetric = true;
  bool nonnegative = true;
  std::string h3_detail = "l(y) = l(-y) >= 0";
  std::vector<double> probes;
  if (const auto* t = k.as_table()) {
    probes = t->offsets;
    nonnegative = t->raw_nonnegative &&
                  std::all_of(t->density.begin(), t->density.end(), [](double d) { return d >= 0.0; });
    if (t->symmetrized) h3_detail += "; input samples were asymmetric and have been symmetrized";
  } else {
    for (int i = -200; i <= 200; ++i) probes.push_back(0.05 * i);
  }
  for (double y : probes) {
    if (k.density(y) != k.density(-y)) symmetric = false;
    if (k.density(y) < 0.0) nonnegative = false;
  }
  if (!symmetric) h3_detail = "violated clause: l(y) = l(-y)";
  else if (!nonnegative) h3_detail = "violated clause: l(y) >= 0";
  r.add("H3", symmetric && nonnegative, h3_detail);
  return r;
}

/// Kernel sampled on integer offsets j in [-J, J] with spacing dx.
class DiscreteKernel {
 public:
  DiscreteKernel(Kernel parent, double dx, std::vector<double> weights, double truncated_mass)
      : parent_(std::move(parent)), dx_(dx), weights_(std::move(weights)), truncated_mass_(truncated_mass) {}

  int half_width() const { return static_cast<int>(weights_.size() / 2); }
  double spacing() const { return dx_; }
  std::span<const double> weights() const { return weights_; }
  double weight(int j) const {
    const int J = half_width();
    return (j < -J || j > J) ? 0.0 : weights_[static_cast<std::size_t>(j + J)];
  }
  const Kernel& parent() const { return parent_; }
  /// Continuous-kernel mass outside the retained cells, before normalization.
  double truncated_mass() const { return truncated_mass_; }

  /// sum_j w_j exp(mu j dx)
  double mgf(double mu) const {
    const int J = half_width();
    double s = 0.0;
    for (int j = -J; j <= J; ++j) s += weight(j) * std::exp(mu * j * dx_);
    return s;
  }

 private:
  Kernel parent_;
  double dx_;
  std::vector<double> weights_;
  double truncated_mass_;
};

/// Midpoint weights l(j dx) dx over the smallest J whose tail mass beyond
/// (J + 1/2) dx is below trunc_eps, mirrored and normalized to unit sum.
inline DiscreteKernel discretize(const Kernel& k, double dx, double trunc_eps = 1e-12) {
  if (!(dx > 0.0) || !std::isfinite(dx)) throw ParameterError("grid spacing must be positive");
  if (!(trunc_eps > 0.0 && trunc_eps < 1.0)) throw ParameterError("truncation tolerance must lie in (0, 1)");
  constexpr int kMaxHalfWidth = 10'000'000;
  int J = 0;
  while (k.tail_mass((J + 0.5) * dx) >= trunc_eps) {
    if (++J > kMaxHalfWidth) throw ParameterError("kernel support too wide for spacing " + fmt(dx));
  }
  if (J == 0)
    throw ParameterError("degenerate kernel: spacing " + fmt(dx) +
                         " puts all mass in the centre cell");
  const double tail = k.tail_mass((J + 0.5) * dx);

  std::vector<double> half(static_cast<std::size_t>(J) + 1);
  for (int j = 0; j <= J; ++j) {
    const double y = j * dx;
    half[static_cast<std::size_t>(j)] = 0.5 * (k.density(y) + k.density(-y)) * dx;
  }
  std::vector<double> w(2 * static_cast<std::size_t>(J) + 1);
  for (int j = -J; j <= J; ++j) w[static_cast<std::size_t>(j + J)] = half[static_cast<std::size_t>(std::abs(j))];
  const double sum = std::accumulate(w.begin(), w.end(), 0.0);
  if (!(sum > 0.0)) throw ParameterError("degenerate kernel: all sampled weights vanish");
  for (auto& x : w) x /= sum;
  return DiscreteKernel(k, dx, std::move(w), tail);
}

}  // namespace bistable
