#include <gtest/gtest.h>

#include "nugh/nugh.hpp"

using namespace nugh;

TEST(Report, FitResultFields) {
  FitResult r;
  r.family = NuFamily::chebyshev();
  r.params = {-0.5, 2.0, 0.5, 1.0, 0.1};
  r.negLogLik = 123.5;
  r.iterations = 42;
  r.converged = true;
  r.seed = 7;
  const Json j = toJson(r);
  std::vector<std::string> keys;
  for (const auto& [key, value] : j.items()) keys.push_back(key);
  const std::vector<std::string> required = {"family", "lambda", "alpha", "beta", "delta",
                                             "mu", "negLogLik", "converged", "iterations", "seed"};
  ASSERT_GE(keys.size(), required.size());
  EXPECT_TRUE(std::equal(required.begin(), required.end(), keys.begin()));
  EXPECT_EQ(j["family"], "cheb");
  EXPECT_EQ(j["alpha"], 2.0);
  EXPECT_EQ(j["seed"], 7u);
}

TEST(Report, TailReport) {
  const Json j = toJson(TailReport{TailSide::Left, 1.2, 0.9995, {-9.0, -5.0}, 80});
  EXPECT_EQ(j["side"], "left");
  EXPECT_EQ(j["window"][1], -5.0);
  EXPECT_EQ(j["points"], 80u);
}

TEST(Report, EnvelopeCarriesVersionAndConfig) {
  const Json j = reportEnvelope("check", Json{{"seed", 1}}, Json::object());
  EXPECT_EQ(j["version"], kVersion);
  EXPECT_EQ(j["config"]["seed"], 1);
  EXPECT_EQ(j.begin().key(), "library");
}

TEST(Report, DoublesRoundTrip) {
  const double v = 0.1 + 0.2;
  const Json j = Json::parse(Json{{"v", v}}.dump());
  EXPECT_EQ(j["v"].get<double>(), v);
}

TEST(CheckSuite, DeterministicBytesAndFailureAccounting) {
  CheckOptions options;
  options.families = {NuFamily::chebyshev()};
  options.samples = 20000;
  const auto a = toJson(runChecks(options)).dump();
  const auto b = toJson(runChecks(options)).dump();
  EXPECT_EQ(a, b);
  CheckReport report;
  report.items.push_back({"m", "x", "-", 1.0, 0.5, false, ""});
  report.items.push_back({"m", "y", "-", 0.1, 0.5, true, ""});
  EXPECT_FALSE(report.pass());
  EXPECT_EQ(report.failures(), 1u);
  EXPECT_EQ(toJson(report)["failures"], 1u);
}
