#include <cmath>

#include <gtest/gtest.h>

#include "nugh/gh.hpp"

using namespace nugh;

namespace {

const GHParams kNIG{-0.5, 1.0, 0.0, 1.0, 0.0};

std::vector<GHParams> fixtures() {
  return {kNIG, {-0.5, 2.0, 0.5, 1.0, 0.3}, {1.3, 2.0, 0.7, 1.5, 0.8}, {0.5, 1.5, -0.3, 0.7, -0.4}, {-2.2, 3.0, 1.0, 0.5, 0.2}};
}

}  // namespace

TEST(ValidateParams, AcceptsInterior) { EXPECT_NO_THROW(validateParams({1.0, 1.0, 0.0, 1.0, 0.0})); }

TEST(ValidateParams, RejectsBoundaries) {
  EXPECT_THROW(validateParams({1.0, 1.0, 1.5, 1.0, 0.0}), DomainError);
  EXPECT_THROW(validateParams({1.0, 1.0, 1.0, 1.0, 0.0}), DomainError);
  EXPECT_THROW(validateParams({1.0, 1.0, 0.0, 0.0, 0.0}), DomainError);
  EXPECT_THROW(validateParams({1.0, -1.0, 0.0, 1.0, 0.0}), DomainError);
  EXPECT_THROW(validateParams({30.0, 1.0, 0.0, 1.0, 0.0}), DomainError);
  EXPECT_THROW(validateParams({1.0, 1.0, 0.0, 1.0, std::nan("")}), DomainError);
}

TEST(ValidateParams, MessageListsEveryViolation) {
  try {
    validateParams({1.0, 1.0, 2.0, -1.0, 0.0});
    FAIL();
  } catch (const DomainError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("beta"), std::string::npos);
    EXPECT_NE(what.find("delta"), std::string::npos);
  }
}

TEST(GHCF, NIGExample) {
  const auto e = ghCF(kNIG, 1.0);
  EXPECT_NEAR(e.value.real(), std::exp(1.0 - std::sqrt(2.0)), 1e-12);
  EXPECT_NEAR(e.value.real(), 0.6608598, 1e-7);
  EXPECT_NEAR(e.value.imag(), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(std::exp(e.logValue) - e.value), 0.0, 1e-15);
}

TEST(GHCF, SymmetricIsRealAndEven) {
  for (double lambda : {-1.5, 0.3, 2.0}) {
    const GHParams p{lambda, 1.7, 0.0, 0.8, 0.0};
    const cplx a = ghCF(p, 2.0).value, b = ghCF(p, -2.0).value;
    EXPECT_NEAR(a.imag(), 0.0, 1e-14);
    EXPECT_NEAR(a.real(), b.real(), 1e-14);
  }
}

TEST(GHCF, Axioms) {
  for (const auto& p : fixtures()) {
    const GHCharacteristic f(p);
    EXPECT_EQ(f(0.0), cplx(1.0));
    for (int k = -300; k <= 300; ++k) {
      const double t = 0.1 * k;
      const cplx v = f(t);
      EXPECT_LE(std::abs(v), 1.0 + 1e-12);
      EXPECT_LE(std::abs(f(-t) - std::conj(v)), 1e-12);
    }
  }
}

TEST(GHCF, BesselRouteMatchesNIGClosedForm) {
  for (const auto& p : {kNIG, GHParams{-0.5, 2.0, 0.5, 1.0, 0.3}, GHParams{-0.5, 4.0, -3.0, 0.2, -1.0}}) {
    const GHCharacteristic f(p);
    double worst = 0.0;
    for (int k = -300; k <= 300; ++k) worst = std::max(worst, std::abs(f(0.1 * k) - nigClosedFormCF(p, 0.1 * k)));
    EXPECT_LE(worst, 1e-10);
  }
}

TEST(GHLogCF, Examples) {
  const auto track = ghLogCF(kNIG, 1.0);
  EXPECT_NEAR(track.logValues.back().real(), 1.0 - std::sqrt(2.0), 1e-12);
  EXPECT_EQ(track.logValues.front(), cplx(0.0));
}

TEST(GHLogCF, DominantDriftLeavesPrincipalBranch) {
  const GHParams p{-0.5, 1.0, 0.0, 1.0, 5.0};
  const auto track = ghLogCF(p, 10.0);
  const double imag = track.logValues.back().imag();
  EXPECT_NEAR(imag, 50.0, 1e-9);
  EXPECT_GT(imag, kPi);
}

TEST(GHLogCF, HalfPowerSquared) {
  for (const auto& p : fixtures()) {
    const GHCharacteristic f(p);
    const auto track = ghLogCF(f, 20.0);
    for (std::size_t k = 0; k < track.size(); k += 7) {
      const cplx half = std::exp(0.5 * track.logValues[k]);
      EXPECT_LE(std::abs(half * half - f(track.grid[k])), 1e-10);
    }
  }
}

TEST(NIGConvolutionPower, Examples) {
  EXPECT_EQ(nigConvolutionPower(kNIG, 1.0), kNIG);
  EXPECT_NEAR(ghCF(nigConvolutionPower(kNIG, 2.0), 1.0).value.real(), std::exp(2.0 * (1.0 - std::sqrt(2.0))), 1e-12);
  EXPECT_NEAR(ghCF(nigConvolutionPower(kNIG, 0.5), 1.0).value.real(), std::exp(0.5 * (1.0 - std::sqrt(2.0))), 1e-12);
  EXPECT_THROW(nigConvolutionPower({1.0, 1.0, 0.0, 1.0, 0.0}, 2.0), DomainError);
}

TEST(NIGConvolutionPower, MatchesScaledLog) {
  const GHParams p{-0.5, 2.0, 0.5, 1.0, 0.3};
  const GHCharacteristic f(p);
  const auto track = ghLogCF(f, 5.0);
  for (double x : {0.3, 1.7, 4.0}) {
    const GHCharacteristic fx(nigConvolutionPower(p, x));
    for (std::size_t k = 0; k < track.size(); k += 5)
      EXPECT_LE(std::abs(fx(track.grid[k]) - std::exp(x * track.logValues[k])), 1e-10);
  }
}

TEST(MomentsFromCF, Oracles) {
  const auto g = momentsFromCF([](double t) { return cplx(std::exp(-0.5 * t * t)); }, 4);
  EXPECT_NEAR(g[0], 0.0, 1e-8);
  EXPECT_NEAR(g[1], 1.0, 1e-5);
  EXPECT_NEAR(g[3], 3.0, 3e-5);
  const auto shifted = momentsFromCF([](double t) { return std::exp(cplx(-0.5 * t * t, 3.0 * t)); }, 1);
  EXPECT_NEAR(shifted[0], 3.0, 1e-5 * 3.0);
  const GHCharacteristic nig(kNIG);
  const auto m = momentsFromCF([&](double t) { return nig(t); }, 2);
  EXPECT_NEAR(m[0], 0.0, 1e-8);
  EXPECT_NEAR(m[1], 1.0, 1e-4);
}

TEST(MomentsFromCF, AsymmetricNIGAnalytic) {
  const GHParams p{-0.5, 2.0, 0.5, 1.0, 0.3};
  const GHCharacteristic f(p);
  const double g = p.gamma();
  const double mean = p.mu + p.delta * p.beta / g;
  const double variance = p.delta * p.alpha * p.alpha / (g * g * g);
  const auto [m, sd] = meanAndStdFromCF([&](double t) { return f(t); });
  EXPECT_NEAR(m / mean, 1.0, 1e-4);
  EXPECT_NEAR(sd * sd / variance, 1.0, 1e-4);
}
