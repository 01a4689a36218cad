#include <gtest/gtest.h>

#include <cmath>

#include "bistable/waves.hpp"

using namespace bistable;

namespace {

const ModelParams kBase{0.5, 0.5, 2.0, 3.0};

// Regression baseline for kBase with unit Gaussian kernels, L = 200,
// dx = 0.1, default solver options. The speed is an output, not a theory value.
constexpr double kBaselineSpeed = -0.11898763371;

struct Fixture {
  Grid grid{200.0, 0.1};
  DiscreteKernel k = discretize(Kernel::gaussian(1.0), 0.1);
};

const WaveProfile& baseline() {
  static const WaveProfile wp = [] {
    Fixture f;
    return find_bistable_wave(kBase, f.k, f.k, f.grid);
  }();
  return wp;
}

}  // namespace

TEST(InitialData, SigmoidRamp) {
  const Grid g(10.0, 0.1);
  const auto s = step_initial_data(g, 1.0);
  EXPECT_DOUBLE_EQ(s.u[g.center()], 0.5);
  EXPECT_TRUE(nondecreasing(s.u, 0.0));
  EXPECT_EQ(s.u, s.v);
  const auto sharp = step_initial_data(g, 0.01);
  EXPECT_LT(sharp.u[g.center() - 1], 1e-4);
  EXPECT_GT(sharp.u[g.center() + 1], 1.0 - 1e-4);
  EXPECT_THROW(step_initial_data(g, 0.0), ParameterError);
}

TEST(ShiftLinear, IntegerAndFractionalShifts) {
  const std::vector<double> f{0, 1, 2, 3, 4};
  EXPECT_EQ(shift_linear(f, 1.0), (std::vector<double>{1, 2, 3, 4, 4}));
  EXPECT_EQ(shift_linear(f, -2.0), (std::vector<double>{0, 0, 0, 1, 2}));
  const auto h = shift_linear(f, 0.25);
  EXPECT_DOUBLE_EQ(h[1], 1.25);
  EXPECT_DOUBLE_EQ(h[4], 4.0);
}

TEST(Wave, ConvergesForReferenceParameters) {
  const auto& wp = baseline();
  EXPECT_TRUE(wp.converged);
  EXPECT_LT(wp.speed_spread, 1e-4);
  EXPECT_LT(wp.residual, 1e-4);
  EXPECT_NEAR(wp.speed, kBaselineSpeed, 1e-8);
  EXPECT_EQ(wp.kernel_half_width, 71);
  const auto r = validate_profile(wp);
  for (const auto& c : r.checks) EXPECT_TRUE(c.passed) << c.clause << ": " << c.detail;
}

TEST(Wave, PinnedAtTheOrigin) {
  const auto& wp = baseline();
  EXPECT_NEAR(level_crossing(wp.grid, wp.phi, 0.5), 0.0, 1e-12);
}

TEST(Wave, EveryIterateMonotoneAndSqueezed) {
  for (const auto& rec : baseline().history) {
    EXPECT_TRUE(rec.monotone) << "step " << rec.step;
    EXPECT_TRUE(rec.squeezed) << "step " << rec.step;
  }
}

TEST(Wave, LedgerIsConsistent) {
  const auto& wp = baseline();
  const double dx = wp.grid.spacing();
  double sum = 0.0;
  for (const auto& rec : wp.history) sum += rec.displacement;
  EXPECT_DOUBLE_EQ(wp.ledger.total_displacement, sum);
  EXPECT_NEAR(wp.ledger.total_displacement,
              (static_cast<double>(wp.ledger.integer_cells) + wp.ledger.fractional_cells) * dx, 1e-12);
}

TEST(Wave, TighterTolerancesShrinkTheResidual) {
  Fixture f;
  WaveOptions opts;
  opts.profile_tol = 1e-12;
  opts.speed_tol = 1e-12;
  const auto wp = find_bistable_wave(kBase, f.k, f.k, f.grid, opts);
  EXPECT_LT(wp.residual, 1e-12);
  EXPECT_NEAR(wp.speed, baseline().speed, 1e-4);
}

TEST(Wave, TranslatedInitialDataGivesTheSameWave) {
  Fixture f;
  WaveOptions opts;
  opts.initial_shift = 5;
  const auto wp = find_bistable_wave(kBase, f.k, f.k, f.grid, opts);
  EXPECT_NEAR(wp.speed, baseline().speed, 1e-6);
  double diff = 0.0;
  for (std::size_t i = 0; i < wp.phi.size(); ++i) diff = std::max(diff, std::abs(wp.phi[i] - baseline().phi[i]));
  EXPECT_LT(diff, 1e-5);
}

TEST(Wave, ExchangeSymmetricParametersStandStill) {
  Fixture f;
  const auto wp = find_bistable_wave({0.5, 0.5, 2.0, 2.0}, f.k, f.k, f.grid);
  EXPECT_LT(std::abs(wp.speed), 1e-3);
  EXPECT_TRUE(validate_profile(wp).passed());
}

TEST(Wave, FftAndDirectAgree) {
  Fixture f;
  WaveOptions opts;
  opts.method = ConvolutionMethod::direct;
  const auto wp = find_bistable_wave(kBase, f.k, f.k, f.grid, opts);
  EXPECT_NEAR(wp.speed, baseline().speed, 1e-9);
}

TEST(Wave, IterationCapRaisesWithHistory) {
  Fixture f;
  WaveOptions opts;
  opts.max_steps = 5;
  try {
    (void)find_bistable_wave(kBase, f.k, f.k, f.grid, opts);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_EQ(e.history().size(), 5u);
  }
}

TEST(Wave, InadmissibleParametersRejected) {
  Fixture f;
  EXPECT_THROW(find_bistable_wave({1.5, 0.5, 2.0, 3.0}, f.k, f.k, f.grid), DomainError);
}

TEST(Residual, ConstantEquilibriumIsExact) {
  Fixture f;
  WaveProfile wp{f.grid, std::vector<double>(f.grid.size(), 0.0), std::vector<double>(f.grid.size(), 0.0),
                 0.37, 0.0, 0.0, 0, 71, true, {}, {}};
  EXPECT_EQ(wave_residual(wp, kBase, f.k, f.k), 0.0);
  std::fill(wp.phi.begin(), wp.phi.end(), 1.0);
  std::fill(wp.psi.begin(), wp.psi.end(), 1.0);
  EXPECT_EQ(wave_residual(wp, kBase, f.k, f.k), 0.0);
}

TEST(Residual, BumpIsDetected) {
  Fixture f;
  auto wp = baseline();
  for (std::size_t i = 0; i < wp.phi.size(); ++i) {
    const double x = wp.grid.x(i);
    wp.phi[i] = std::min(1.0, wp.phi[i] + 0.05 * std::exp(-x * x));
  }
  EXPECT_GT(wave_residual(wp, kBase, f.k, f.k), 1e-3);
}

TEST(Residual, SpeedBeyondWindowRejected) {
  Fixture f;
  auto wp = baseline();
  wp.speed = 150.0;
  EXPECT_THROW(wave_residual(wp, kBase, f.k, f.k), RangeError);
}

TEST(ValidateProfile, ConstantHalfFailsTails) {
  const Grid g(20.0, 0.1);
  WaveProfile wp{g, std::vector<double>(g.size(), 0.5), std::vector<double>(g.size(), 0.5), 0.0, 0.0, 0.0, 0, 10,
                 true, {}, {}};
  const auto r = validate_profile(wp);
  EXPECT_FALSE(r.find("left-tail")->passed);
  EXPECT_FALSE(r.find("right-tail")->passed);
  EXPECT_TRUE(r.find("monotone")->passed);
}

TEST(ValidateProfile, DecreasingProfileFailsMonotonicity) {
  auto wp = baseline();
  std::reverse(wp.phi.begin(), wp.phi.end());
  EXPECT_FALSE(validate_profile(wp).find("monotone")->passed);
}

TEST(OriginalFrame, ConnectsE1ToE2) {
  const auto [u, v] = to_original_frame(baseline());
  EXPECT_NEAR(u.front(), 1.0, 1e-3);
  EXPECT_NEAR(v.front(), 0.0, 1e-3);
  EXPECT_NEAR(u.back(), 0.0, 1e-3);
  EXPECT_NEAR(v.back(), 1.0, 1e-3);
}
