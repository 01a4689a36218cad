// Acceptance run: one PASS/FAIL line per criterion, exit status 1 on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "bistable/bistable.hpp"

using namespace bistable;

namespace {

const ModelParams kBase{0.5, 0.5, 2.0, 3.0};

struct Outcome {
  bool passed;
  std::string detail;
};

Outcome equilibria_criterion() {
  const auto e = equilibria(kBase);
  double worst = 0.0;
  for (Frame f : {Frame::original, Frame::transformed})
    for (const Point& x : f == Frame::original ? e.original : e.transformed) {
      const Point y = frame_map(kBase, x, f);
      worst = std::max({worst, std::abs(y.u - x.u), std::abs(y.v - x.v)});
    }
  const bool ok = std::abs(e.k1 - 0.2) < 1e-15 && std::abs(e.k2 - 0.4) < 1e-15 &&
                  std::abs(e.transformed[2].u - 0.8) < 1e-15 && std::abs(e.transformed[2].v - 0.4) < 1e-15 &&
                  worst < 1e-12;
  return {ok, "k1 " + fmt(e.k1) + ", k2 " + fmt(e.k2) + ", F2 (" + fmt(e.transformed[2].u) + ", " +
                  fmt(e.transformed[2].v) + "), max residual over 8 equilibria " + fmt(worst)};
}

Outcome stability_criterion() {
  const auto e = equilibria(kBase);
  const Stability tf[] = {Stability::stable, Stability::unstable, Stability::unstable, Stability::stable};
  const Stability of[] = {Stability::unstable, Stability::stable, Stability::stable, Stability::unstable};
  bool table_ok = true;
  for (int i = 0; i < 4; ++i) {
    table_ok = table_ok && classify_stability(kBase, e.transformed[i], Frame::transformed).kind == tf[i];
    table_ok = table_ok && classify_stability(kBase, e.original[i], Frame::original).kind == of[i];
  }
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Point> probes(e.original.begin(), e.original.end());
  probes.insert(probes.end(), e.transformed.begin(), e.transformed.end());
  for (int i = 0; i < 50; ++i) probes.push_back({unit(rng), unit(rng)});
  // The transformed frame is conjugate to the original one, which extends it off the unit square.
  const auto frame_map = [](const ModelParams& p, Point x, Frame f) {
    return f == Frame::original ? ricker_map(p, x) : change_coordinates(ricker_map(p, change_coordinates(x)));
  };
  const double h = 1e-6;
  double worst = 0.0;
  for (Frame f : {Frame::original, Frame::transformed})
    for (const Point& x : probes) {
      const Point pu = frame_map(kBase, {x.u + h, x.v}, f), mu = frame_map(kBase, {x.u - h, x.v}, f);
      const Point pv = frame_map(kBase, {x.u, x.v + h}, f), mv = frame_map(kBase, {x.u, x.v - h}, f);
      const Matrix2 J = jacobian(kBase, x, f);
      worst = std::max({worst, std::abs(J.a - (pu.u - mu.u) / (2 * h)), std::abs(J.b - (pv.u - mv.u) / (2 * h)),
                        std::abs(J.c - (pu.v - mu.v) / (2 * h)), std::abs(J.d - (pv.v - mv.v) / (2 * h))});
    }
  return {table_ok && worst < 1e-6, std::string("stability table ") + (table_ok ? "matches" : "differs") +
                                        ", max |Jacobian - finite difference| " + fmt(worst)};
}

Outcome scalar_speed_criterion() {
  double worst = 0.0;
  for (double sigma : {1.0, 2.0})
    worst = std::max(worst, std::abs(scalar_speed(0.5, Kernel::gaussian(sigma)).value - sigma));
  return {worst < 1e-6, "max |c* - sigma sqrt(2r)| over sigma in {1,2}: " + fmt(worst)};
}

Outcome empirical_speed_criterion() {
  const auto fit = empirical_scalar_speed(0.5, Kernel::gaussian(1.0), Grid(200.0, 0.1), 150);
  return {std::abs(fit.speed - 1.0) < 0.05,
          "level-0.5 front speed " + fmt(fit.speed) + " vs 1 (relative error " + fmt(std::abs(fit.speed - 1.0)) + ")"};
}

Outcome eigenvalue_criterion() {
  const auto k = Kernel::gaussian(1.0);
  const double lam0 = principal_eigenvalue(linearization_matrix(kBase, k, k, 0.0));
  std::mt19937_64 rng(2023);
  std::uniform_real_distribution<double> r(0.05, 0.95), a(1.05, 5.0), sigma(0.3, 3.0);
  double margin_min = std::numeric_limits<double>::infinity(), margin_one = margin_min;
  for (int t = 0; t < 20; ++t) {
    const ModelParams p{r(rng), r(rng), a(rng), a(rng)};
    const auto k1 = Kernel::gaussian(sigma(rng)), k2 = Kernel::gaussian(sigma(rng));
    for (int i = 0; i <= 6; ++i) {
      const double mu = 0.5 * i;
      const double lam = principal_eigenvalue(linearization_matrix(p, k1, k2, mu));
      margin_min = std::min(margin_min, lam - std::min(k1.mgf(mu), k2.mgf(mu)));
      margin_one = std::min(margin_one, lam - 1.0);
    }
  }
  return {std::abs(lam0 - 1.2) < 1e-12 && margin_min > 0.0 && margin_one > 0.0,
          "lambda(B0) " + fmt(lam0) + ", min lambda - min(M1,M2) " + fmt(margin_min) + ", min lambda - 1 " +
              fmt(margin_one) + " over 20 draws x 7 mu"};
}

Outcome counter_propagation_criterion() {
  const std::vector<double> rates{0.2, 0.5, 0.8}, comps{1.5, 2.0, 3.0}, sigmas{0.5, 1.0, 2.0};
  double min_sum = std::numeric_limits<double>::infinity();
  int cells = 0;
  for (double r1 : rates)
    for (double r2 : rates)
      for (double a1 : comps)
        for (double a2 : comps)
          for (double s : sigmas) {
            const auto k = Kernel::gaussian(s);
            const auto cp = counter_propagation({r1, r2, a1, a2}, k, k);
            min_sum = std::min({min_sum, cp.sum_F1, cp.sum_F2});
            ++cells;
          }
  const auto k = Kernel::gaussian(1.0);
  const double sum1 = counter_propagation(kBase, k, k).sum_F1;
  return {min_sum > 0.0 && std::abs(sum1 - 2.0) < 1e-6,
          "min sum over " + std::to_string(cells) + " lattice cells " + fmt(min_sum) + ", Gaussian sum_F1 " + fmt(sum1)};
}

Outcome axiom_criterion() {
  const Grid grid(200.0, 0.1);
  const auto dk = discretize(Kernel::gaussian(1.0), 0.1);
  const CompetitionOperator q(kBase, dk, dk, grid);
  std::mt19937_64 rng(1);
  double a1 = 0.0;
  for (std::ptrdiff_t j : {-17, 3, 50}) a1 = std::max(a1, translation_defect(q, detail::random_state(grid, rng), j));
  const double a3 = order_defect(q, 1000, 2);
  bool a5 = true;
  for (double r1 : {0.2, 0.5, 0.8})
    for (double r2 : {0.2, 0.5, 0.8})
      for (double x1 : {1.5, 2.0, 3.0})
        for (double x2 : {1.5, 2.0, 3.0}) {
          const ModelParams p{r1, r2, x1, x2};
          try {
            const auto c = strong_stability_vectors(p);
            a5 = a5 && c.delta > 0.0 && c.intermediates_unordered &&
                 std::abs(c.e4.v / c.e4.u - 1.0 / (2.0 * x1)) < 1e-12 &&
                 std::abs(c.e5.u / c.e5.v - 1.0 / (2.0 * x2)) < 1e-12;
          } catch (const DomainError&) {
            a5 = false;
          }
        }
  return {a1 <= 1e-12 && a3 <= 1e-12 && a5,
          "translation defect " + fmt(a1) + ", order violation " + fmt(a3) + " over 1000 pairs, certificate " +
              (a5 ? "found" : "missing") + " on all 81 lattice points"};
}

Outcome wave_criterion() {
  const Grid grid(200.0, 0.1);
  const auto dk = discretize(Kernel::gaussian(1.0), 0.1);
  const auto wp = find_bistable_wave(kBase, dk, dk, grid);
  const auto report = validate_profile(wp);
  const auto sym = find_bistable_wave({0.5, 0.5, 2.0, 2.0}, dk, dk, grid);
  const bool ok = wp.converged && report.passed() && wp.speed_spread < 1e-4 && std::abs(sym.speed) < 1e-3;
  std::string failed;
  for (const auto& f : report.failures()) failed += " " + f.clause;
  return {ok, "c " + fmt(wp.speed) + " after " + std::to_string(wp.steps) + " steps, residual " + fmt(wp.residual) +
                  ", spread " + fmt(wp.speed_spread) + (failed.empty() ? "" : ", failed:" + failed) +
                  "; symmetric c " + fmt(sym.speed)};
}

Outcome convolution_criterion() {
  const auto dk = discretize(Kernel::gaussian(1.0), 0.1);
  const double d = fft_direct_defect(dk, Grid(200.0, 0.1).size(), 100, 42);
  return {d <= 1e-10, "max |fft - direct| over 100 random states " + fmt(d)};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"equilibria", equilibria_criterion},
      {"stability", stability_criterion},
      {"scalar speed", scalar_speed_criterion},
      {"empirical speed", empirical_speed_criterion},
      {"eigenvalue bound", eigenvalue_criterion},
      {"counter-propagation", counter_propagation_criterion},
      {"axioms", axiom_criterion},
      {"bistable wave", wave_criterion},
      {"fast convolution", convolution_criterion},
  };
  int failures = 0, n = 0;
  for (const auto& [name, check] : criteria) {
    ++n;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o{false, ""};
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    std::printf("%s %d %s: %s (%.2f s)\n", o.passed ? "PASS" : "FAIL", n, name, o.detail.c_str(), dt.count());
    failures += o.passed ? 0 : 1;
  }
  std::printf("%d of %d criteria passed\n", n - failures, n);
  return failures == 0 ? 0 : 1;
}
