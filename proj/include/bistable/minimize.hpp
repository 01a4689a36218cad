#pragma once

// Derivative-free minimization of a unimodal objective on (0, inf).

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "bistable/errors.hpp"
#include "bistable/format.hpp"

namespace bistable {

struct ScalarMinimum {
  double argmin = 0.0;
  double value = 0.0;
  int evaluations = 0;
};

struct MinimizeOptions {
  double start = 1e-3;        // first probe; the objective is never evaluated at 0
  double lower_limit = 1e-6;  // give up bracketing below this
  double upper_limit = 1e6;   // and above this
  double x_tol = 1e-8;        // relative width of the final bracket
  double f_tol = 1e-10;       // relative spread of the interior values
  int max_iterations = 500;
};

/// Golden-section search on [a, b] assuming a single interior minimum.
template <class F>
ScalarMinimum golden_section(F&& f, double a, double b, const MinimizeOptions& opt = {}) {
  constexpr double kInvPhi = 0.6180339887498949;  // (sqrt(5) - 1) / 2
  int evals = 2;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < opt.max_iterations; ++it) {
    const double mid = 0.5 * (a + b);
    if (b - a <= opt.x_tol * std::abs(mid)) break;
    if (std::abs(fc - fd) <= opt.f_tol * std::max(1.0, std::abs(fc)) && b - a <= 1e-4 * std::abs(mid)) break;
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
    ++evals;
  }
  return fc < fd ? ScalarMinimum{c, fc, evals} : ScalarMinimum{d, fd, evals};
}

/// Brackets a minimum of f on (0, inf) by doubling from opt.start until the
/// objective increases (halving instead when it already increases at the
/// start), then refines by golden section.
template <class F>
ScalarMinimum minimize_positive(F&& f, const MinimizeOptions& opt = {}) {
  auto eval = [&](double x) {
    double y = 0.0;
    try {
      y = f(x);
    } catch (const RangeError& e) {
      throw SearchError(std::string("bracketing stopped by overflow before a minimum was found: ") + e.what());
    }
    if (std::isnan(y)) throw SearchError("objective is NaN at mu = " + fmt(x));
    return y;
  };

  double x0 = opt.start, x1 = 2.0 * x0;
  double f0 = eval(x0), f1 = eval(x1);
  double lo = 0.0, hi = 0.0;
  if (f1 > f0) {
    // Minimum lies below the start: walk down.
    double xm = 0.5 * x0, fm = eval(xm);
    while (fm < f0) {
      if (xm < opt.lower_limit)
        throw SearchError("no minimum bracketed above mu = " + fmt(opt.lower_limit));
      x1 = x0;
      x0 = xm;
      f0 = fm;
      xm = 0.5 * x0;
      fm = eval(xm);
    }
    lo = xm;
    hi = x1;
  } else {
    double xp = x0;
    while (!(f1 > f0)) {
      if (x1 > opt.upper_limit)
        throw SearchError("no minimum bracketed below mu = " + fmt(opt.upper_limit));
      xp = x0;
      x0 = x1;
      f0 = f1;
      x1 = 2.0 * x0;
      f1 = eval(x1);
    }
    lo = xp;
    hi = x1;
  }
  auto m = golden_section(eval, lo, hi, opt);
  return m;
}

}  // namespace bistable
