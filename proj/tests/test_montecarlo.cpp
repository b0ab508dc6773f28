#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "nugh/montecarlo.hpp"

using namespace nugh;

namespace {

const NuFamily kGeo = NuFamily::geometric();
const NuFamily kCheb = NuFamily::chebyshev();
constexpr std::size_t kN = 100000;

double laplaceCdf(double x) { return x < 0 ? 0.5 * std::exp(x) : 1.0 - 0.5 * std::exp(-x); }
double normalCdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

TEST(SampleBase, LaplaceCF) {
  Rng rng(1, 0);
  const auto x = sampleBase(law::Laplace{}, kN, rng);
  EXPECT_TRUE(empiricalCF(x, 1.0).within(cplx(0.5), 4.0));
}

TEST(SampleBase, LinnikTwoIsLaplace) {
  Rng rng(1, 1);
  const auto x = sampleBase(law::Linnik{2.0}, kN, rng);
  EXPECT_TRUE(empiricalCF(x, 1.0).within(cplx(0.5), 4.0));
  EXPECT_TRUE(ksStatistic(x, laplaceCdf).pass);
}

TEST(SampleBase, GeoNIGCF) {
  Rng rng(1, 2);
  const auto x = sampleBase(law::NuGH{kGeo, {-0.5, 1.0, 0.0, 1.0, 0.0}}, kN, rng);
  EXPECT_TRUE(empiricalCF(x, 1.0).within(cplx(1.0 / std::sqrt(2.0)), 4.0));
}

TEST(SampleBase, HSecantAndGaussianMatchCF) {
  Rng rng(1, 3);
  const auto h = sampleBase(law::HSecant{}, kN, rng);
  const auto g = sampleBase(law::Gaussian{2.0}, kN, rng);
  for (double t : {0.5, 1.0, 2.0}) {
    EXPECT_TRUE(empiricalCF(h, t).within(cplx(1.0 / std::cosh(t)), 4.0));
    EXPECT_TRUE(empiricalCF(g, t).within(cplx(std::exp(-2.0 * t * t)), 4.0));
  }
}

TEST(SampleBase, StableAndNIGMatchCF) {
  Rng rng(1, 4);
  const auto s = sampleBase(law::Linnik{1.3}, kN, rng);
  const GHParams nig{-0.5, 2.0, 0.5, 1.0, 0.3};
  const auto n = sampleBase(law::NIG{nig}, kN, rng);
  for (double t : {0.5, 1.0, 2.0}) {
    EXPECT_TRUE(empiricalCF(s, t).within(cplx(1.0 / (1.0 + std::pow(t, 1.3))), 4.0));
    EXPECT_TRUE(empiricalCF(n, t).within(nigClosedFormCF(nig, t), 4.0));
  }
}

TEST(SampleBase, GeneralLambdaUsesInversionGrid) {
  Rng rng(1, 5);
  const GHParams p{1.0, 2.0, 0.3, 1.0, 0.0};
  const auto x = sampleBase(law::NuGH{kCheb, p}, 50000, rng);
  const NuGHChar spec(kCheb, p);
  for (double t : {0.5, 1.0, 2.0}) EXPECT_TRUE(empiricalCF(x, t).within(spec(t), 4.0)) << t;
}

TEST(SampleBase, InvalidLaws) {
  Rng rng;
  EXPECT_THROW(sampleBase(law::Gaussian{0.0}, 10, rng), DomainError);
  EXPECT_THROW(sampleBase(law::Linnik{2.5}, 10, rng), DomainError);
  EXPECT_THROW(sampleBase(law::NIG{{-0.5, 1.0, 1.0, 1.0, 0.0}}, 10, rng), DomainError);
}

TEST(RandomSum, ChebyshevOneIsBase) {
  Rng a(9, 0), b(9, 0);
  const auto base = samplerOf(law::Laplace{});
  const auto sums = randomSumSample({kCheb, 1.0, 1.3}, base, 1000, a);
  for (double v : sums) {
    const long count = sampleNu(kCheb, 1.0, b);
    ASSERT_EQ(count, 1);
    EXPECT_EQ(v, base(b));
  }
}

TEST(RandomSum, InvalidSpec) {
  Rng rng;
  const auto base = samplerOf(law::Laplace{});
  EXPECT_THROW(randomSumSample({kGeo, 1.0, 2.0}, base, 10, rng), DomainError);
  EXPECT_THROW(randomSumSample({kCheb, 0.3, 2.0}, base, 10, rng), DomainError);
  EXPECT_THROW(randomSumSample({kGeo, 0.5, 2.5}, base, 10, rng), DomainError);
  EXPECT_THROW(randomSumSample({kGeo, 0.5, 0.0}, base, 10, rng), DomainError);
}

TEST(KS, GaussianVsLaplaceMatchesExactDistance) {
  double exact = 0.0;
  for (double x = -8.0; x <= 8.0; x += 1e-4) exact = std::max(exact, std::abs(normalCdf(x) - laplaceCdf(x)));
  Rng rng(5, 0);
  const auto r = ksStatistic(sampleBase(law::Gaussian{1.0}, 10000, rng), laplaceCdf);
  EXPECT_FALSE(r.pass);
  EXPECT_NEAR(r.statistic, exact, 2.0 / std::sqrt(10000.0));
  EXPECT_NEAR(r.threshold, 1.628 / 100.0, 1e-15);
}

TEST(KS, NullHypothesisAndRange) {
  Rng rng(5, 1);
  auto r = ksStatistic(sampleBase(law::Laplace{}, kN, rng), laplaceCdf);
  if (!r.pass) r = ksStatistic(sampleBase(law::Laplace{}, kN, rng), laplaceCdf);
  EXPECT_TRUE(r.pass);
  EXPECT_GE(r.statistic, 0.0);
  const std::vector<double> far(200, 1e6);
  const auto worst = ksStatistic(far, laplaceCdf);
  EXPECT_LE(worst.statistic, 1.0);
  EXPECT_GE(worst.statistic, 0.0);
  EXPECT_THROW(ksStatistic(std::vector<double>(99, 0.0), laplaceCdf), DomainError);
}

TEST(LawCdf, AnalyticAndTabulated) {
  const auto hs = lawCdf(law::HSecant{});
  for (double x : {-3.0, 0.0, 1.2}) EXPECT_NEAR(hs(x), (2.0 / std::numbers::pi) * std::atan(std::exp(0.5 * std::numbers::pi * x)), 1e-15);
  // Linnik(1): F(x) = 1/2 + (1/pi) int_0^inf atan(x/w) e^{-w} dw.
  const auto linnik = lawCdf(law::Linnik{1.0});
  for (double x : {-20.0, -1.0, 0.1, 2.0, 50.0, 5000.0}) {
    double sum = 0.0;
    const int n = 200000;
    const double h = 60.0 / n;
    for (int i = 0; i < n; ++i) {
      const double w = (i + 0.5) * h;
      sum += std::atan(x / w) * std::exp(-w);
    }
    EXPECT_NEAR(linnik(x), 0.5 + sum * h / std::numbers::pi, 2e-6) << x;
  }
}

TEST(IdentitySuite, GeometricLaplace) {
  for (double p : {0.5, 0.1, 0.01}) {
    const auto r = identitySuiteRepeatOnce({kGeo, p, 2.0}, law::Laplace{}, kN, 42, 0);
    EXPECT_TRUE(r.ks.pass) << p << " D=" << r.ks.statistic;
    EXPECT_EQ(r.law, "laplace");
    EXPECT_EQ(r.seed, 42u);
    EXPECT_EQ(r.ks.n, kN);
  }
}

TEST(IdentitySuite, ChebyshevHSecant) {
  for (double p : {0.25, 1.0 / 9.0}) {
    const auto r = identitySuiteRepeatOnce({kCheb, p, 2.0}, law::HSecant{}, kN, 42, 10);
    EXPECT_TRUE(r.ks.pass) << p << " D=" << r.ks.statistic;
  }
}

TEST(IdentitySuite, GaussianUnderGeometricFails) {
  const auto r = identitySuiteRepeatOnce({kGeo, 0.5, 2.0}, law::Gaussian{1.0}, kN, 42, 20);
  EXPECT_FALSE(r.ks.pass);
  EXPECT_EQ(r.attempts, 2);
}

TEST(IdentitySuite, LinnikStable) {
  const auto r = identitySuiteRepeatOnce({kGeo, 0.25, 1.0}, law::Linnik{1.0}, kN, 42, 30);
  EXPECT_TRUE(r.ks.pass) << r.ks.statistic;
}

TEST(Mixture, EmpiricalCFMatchesTransform) {
  const GHParams p{-0.5, 2.0, 0.5, 1.0, 0.3};
  for (const auto& family : {kGeo, kCheb}) {
    Rng rng(3, 7);
    const auto x = sampleBase(law::NuGH{family, p}, kN, rng);
    const NuGHChar spec(family, p);
    for (double t : {0.5, 1.0, 2.0}) EXPECT_TRUE(empiricalCF(x, t).within(spec(t), 4.0)) << family.name() << " t=" << t;
  }
}

TEST(Mixing, LaplaceTransforms) {
  for (const auto& family : {kGeo, kCheb}) {
    Rng rng(3, 8);
    std::vector<double> draws(kN);
    for (auto& d : draws) d = sampleMixing(family, rng);
    for (double lambda : {0.5, 1.0, 2.0})
      EXPECT_TRUE(empiricalLaplace(draws, lambda).within(phiEval(family, lambda), 4.0)) << family.name();
  }
}

TEST(Determinism, SameStreamSameDraws) {
  const Law l = law::NuGH{kCheb, {-0.5, 2.0, 0.5, 1.0, 0.3}};
  Rng a(77, 3), b(77, 3), c(77, 4);
  const auto x = sampleBase(l, 5000, a);
  EXPECT_EQ(x, sampleBase(l, 5000, b));
  EXPECT_NE(x, sampleBase(l, 5000, c));
  const auto s = samplerOf(law::Laplace{});
  EXPECT_EQ(sampleParallel(s, 10000, 5, 1, 4), sampleParallel(s, 10000, 5, 1, 4));
}

TEST(Scaling, KSShrinksBySqrtTwo) {
  double small = 0.0, large = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    Rng rng(123, static_cast<std::uint64_t>(trial));
    small += ksStatistic(sampleBase(law::Laplace{}, 2000, rng), laplaceCdf).statistic;
    large += ksStatistic(sampleBase(law::Laplace{}, 4000, rng), laplaceCdf).statistic;
  }
  EXPECT_NEAR(small / large / std::sqrt(2.0), 1.0, 0.2);
}
