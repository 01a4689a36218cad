#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "bistable/kernels.hpp"

using namespace bistable;

namespace {

// Reference values computed with 30-digit arithmetic.
constexpr double kSinh2Over2 = 1.8134302039235093838;   // sinh(2)/2
constexpr double kTriangleMgf1 = 1.0861612696304875570;  // 2(cosh 1 - 1)

std::filesystem::path write_table(const std::string& name, const std::string& body) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << body;
  return p;
}

}  // namespace

TEST(KernelMgf, GaussianClosedForm) {
  const auto k = Kernel::gaussian(1.0);
  EXPECT_NEAR(k.mgf(1.0), std::exp(0.5), 1e-15);
  EXPECT_NEAR(Kernel::gaussian(2.0).mgf(0.5), std::exp(0.5), 1e-15);
  EXPECT_DOUBLE_EQ(k.mgf(0.0), 1.0);
}

TEST(KernelMgf, UniformClosedForm) {
  EXPECT_NEAR(Kernel::uniform(1.0).mgf(2.0), kSinh2Over2, 1e-14);
  EXPECT_DOUBLE_EQ(Kernel::uniform(1.0).mgf(0.0), 1.0);
}

TEST(KernelMgf, UniformSmallArgumentHasNoCancellation) {
  const auto k = Kernel::uniform(1.0);
  const double mu = 1e-9;
  EXPECT_NEAR(k.log_mgf(mu), mu * mu / 6.0, 1e-30);
}

TEST(KernelMgf, EvenInMu) {
  for (const auto& k : {Kernel::gaussian(0.7), Kernel::uniform(1.3)})
    for (double mu : {0.1, 1.0, 3.0}) EXPECT_DOUBLE_EQ(k.log_mgf(mu), k.log_mgf(-mu));
}

TEST(KernelMgf, OverflowNamesMu) {
  const auto k = Kernel::gaussian(1.0);
  EXPECT_NO_THROW(k.log_mgf(50.0));
  try {
    (void)k.mgf(50.0);
    FAIL() << "expected overflow";
  } catch (const RangeError& e) {
    EXPECT_NE(std::string(e.what()).find("mu = 50"), std::string::npos);
  }
}

TEST(KernelMgf, TriangleTable) {
  const auto k = Kernel::table({-1.0, 0.0, 1.0}, {0.0, 1.0, 0.0});
  EXPECT_NEAR(k.mgf(1.0), kTriangleMgf1, 1e-10);
}

TEST(KernelConstruction, RejectsBadShapes) {
  EXPECT_THROW(Kernel::gaussian(0.0), ParameterError);
  EXPECT_THROW(Kernel::gaussian(-1.0), ParameterError);
  EXPECT_THROW(Kernel::uniform(0.0), ParameterError);
  EXPECT_THROW(Kernel::table({-1.0, 1.0}, {1.0, 1.0}), ParameterError);
  EXPECT_THROW(Kernel::table({-1.0, 0.5, 0.0}, {1.0, 1.0, 1.0}), ParameterError);
  EXPECT_THROW(Kernel::table({-1.0, 0.2, 1.0}, {1.0, 1.0, 1.0}), ParameterError);
  EXPECT_THROW(Kernel::table({-1.0, 0.0, 1.0}, {0.0, 0.0, 0.0}), ParameterError);
}

TEST(KernelHypotheses, BuiltinsPass) {
  for (const auto& k : {Kernel::gaussian(1.0), Kernel::uniform(2.0)}) {
    const auto r = validate_hypotheses(k);
    EXPECT_TRUE(r.passed()) << k.describe();
  }
}

TEST(KernelHypotheses, AsymmetricTableIsSymmetrizedAndReported) {
  const auto k = Kernel::table({-1.0, 0.0, 1.0}, {0.2, 1.0, 0.6});
  const auto* t = k.as_table();
  ASSERT_NE(t, nullptr);
  EXPECT_TRUE(t->symmetrized);
  EXPECT_DOUBLE_EQ(k.density(-1.0), k.density(1.0));
  EXPECT_NEAR(k.total_mass(), 1.0, 1e-15);
  const auto r = validate_hypotheses(k);
  ASSERT_NE(r.find("H3"), nullptr);
  EXPECT_TRUE(r.find("H3")->passed);
  EXPECT_NE(r.find("H3")->detail.find("symmetrized"), std::string::npos);
}

TEST(KernelHypotheses, NegativeSampleFailsH3) {
  const auto k = Kernel::table({-2.0, -1.0, 0.0, 1.0, 2.0}, {-0.1, 0.5, 1.0, 0.5, -0.1});
  const auto r = validate_hypotheses(k);
  EXPECT_FALSE(r.find("H3")->passed);
  EXPECT_NE(r.find("H3")->detail.find(">= 0"), std::string::npos);
}

TEST(KernelHypotheses, UnboundedTableFailsH2) {
  const auto k = Kernel::table({-1.0, 0.0, 1.0}, {0.5, 1.0, 0.5}, Support::unbounded);
  const auto r = validate_hypotheses(k);
  EXPECT_FALSE(r.find("H2")->passed);
  EXPECT_TRUE(r.find("H3")->passed);
}

TEST(KernelTable, ReadsTwoColumnFile) {
  const auto p = write_table("bistable_tri.txt", "# offset density\n-1 0\n0, 1\n1 0\n\n");
  const auto k = Kernel::table_from_file(p);
  EXPECT_EQ(k.family(), KernelFamily::table);
  EXPECT_NEAR(k.density(0.5), 0.5, 1e-15);
  EXPECT_NEAR(k.tail_mass(0.5), 0.25, 1e-15);
}

TEST(KernelTable, MissingColumnIsReported) {
  const auto p = write_table("bistable_bad.txt", "-1 0\n0\n1 0\n");
  EXPECT_THROW(Kernel::table_from_file(p), ParameterError);
  EXPECT_THROW(Kernel::table_from_file("/nonexistent/table.txt"), ParameterError);
}

TEST(KernelTail, GaussianAndUniform) {
  EXPECT_NEAR(Kernel::gaussian(1.0).tail_mass(0.0), 1.0, 1e-15);
  EXPECT_NEAR(Kernel::gaussian(1.0).tail_mass(1.959963984540054), 0.05, 1e-12);
  EXPECT_DOUBLE_EQ(Kernel::uniform(2.0).tail_mass(1.0), 0.5);
  EXPECT_DOUBLE_EQ(Kernel::uniform(2.0).tail_mass(3.0), 0.0);
}

TEST(Discretize, GaussianHalfWidthFromTailRule) {
  // erfc((J + 1/2) dx / sqrt 2) < 1e-12 first holds at J = 71 for dx = 0.1.
  const auto dk = discretize(Kernel::gaussian(1.0), 0.1);
  EXPECT_EQ(dk.half_width(), 71);
  EXPECT_LT(dk.truncated_mass(), 1e-12);
  EXPECT_GE(Kernel::gaussian(1.0).tail_mass(70.5 * 0.1), 1e-12);
}

TEST(Discretize, WeightsSumToOneAndAreSymmetric) {
  for (const auto& k : {Kernel::gaussian(0.5), Kernel::uniform(1.0), Kernel::table({-1, 0, 1}, {0, 1, 0})}) {
    const auto dk = discretize(k, 0.1);
    double s = 0.0;
    for (double w : dk.weights()) s += w;
    EXPECT_NEAR(s, 1.0, 1e-14) << k.describe();
    for (int j = 0; j <= dk.half_width(); ++j) EXPECT_EQ(dk.weight(j), dk.weight(-j));
    EXPECT_EQ(dk.weight(dk.half_width() + 1), 0.0);
  }
}

TEST(Discretize, MgfMatchesContinuousForModerateMu) {
  const auto k = Kernel::gaussian(1.0);
  const auto dk = discretize(k, 0.1);
  for (double mu = -2.0; mu <= 2.0; mu += 0.25) EXPECT_NEAR(dk.mgf(mu), k.mgf(mu), 1e-6) << "mu " << mu;
}

TEST(Discretize, MgfDeficitAtMuThreeIsTheTiltedTail) {
  // At mu = 3 the truncated window misses the tilted tail mass
  // e^{mu^2/2} Phi(-((J+1/2)dx - mu)), about 1.5e-3. Adding it back leaves
  // only the midpoint-rule edge error, ~1e-5 absolute and 1e-7 relative.
  const auto k = Kernel::gaussian(1.0);
  const auto dk = discretize(k, 0.1);
  const double mu = 3.0, edge = (dk.half_width() + 0.5) * 0.1;
  const double deficit = std::exp(0.5 * mu * mu) * 0.5 *
                         (std::erfc((edge - mu) / std::sqrt(2.0)) + std::erfc((edge + mu) / std::sqrt(2.0)));
  EXPECT_GT(deficit, 1e-6);
  EXPECT_NEAR(dk.mgf(mu) + deficit, k.mgf(mu), 1e-6 * k.mgf(mu));
}

TEST(Discretize, DegenerateSpacingRejected) {
  EXPECT_THROW(discretize(Kernel::uniform(0.1), 1.0), ParameterError);
  EXPECT_THROW(discretize(Kernel::gaussian(1.0), 0.0), ParameterError);
  EXPECT_THROW(discretize(Kernel::gaussian(1.0), 0.1, 0.0), ParameterError);
}

TEST(KernelSpecs, FactoryDispatch) {
  KernelSpec s;
  s.family = KernelFamily::uniform;
  s.halfwidth = 2.0;
  const auto k = make_kernel(s);
  ASSERT_NE(k.as_uniform(), nullptr);
  EXPECT_EQ(k.as_uniform()->halfwidth, 2.0);
  EXPECT_EQ(k.describe(), "uniform(halfwidth=2)");
}
