#pragma once

// Generalized hyperbolic (GH) laws: parameters, characteristic function,
// its distinguished logarithm, NIG convolution powers and moments from a CF.

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "nugh/errors.hpp"
#include "nugh/special_fn.hpp"

namespace nugh {

/// lambda: index, alpha: shape, beta: skew, delta: scale, mu: location.
struct GHParams {
  double lambda = -0.5;
  double alpha = 1.0;
  double beta = 0.0;
  double delta = 1.0;
  double mu = 0.0;

  double gamma() const { return std::sqrt((alpha - beta) * (alpha + beta)); }
  bool operator==(const GHParams&) const = default;
};

/// Supported index range.
inline constexpr double kMaxGHLambda = 25.0;

inline GHParams validateParams(const GHParams& candidate) {
  std::vector<std::string> violations;
  const auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(candidate.lambda) || !finite(candidate.alpha) || !finite(candidate.beta) ||
      !finite(candidate.delta) || !finite(candidate.mu))
    violations.emplace_back("all parameters must be finite");
  if (!(std::abs(candidate.lambda) <= kMaxGHLambda))
    violations.emplace_back("lambda must lie in [-25, 25]");
  if (!(candidate.alpha > 0.0)) violations.emplace_back("alpha must be > 0");
  if (!(std::abs(candidate.beta) < candidate.alpha)) violations.emplace_back("|beta| must be < alpha");
  if (!(candidate.delta > 0.0)) violations.emplace_back("delta must be > 0");
  if (!violations.empty()) {
    std::string message;
    for (const auto& v : violations) message += (message.empty() ? "" : "; ") + v;
    throw DomainError("gh_core::validateParams", message);
  }
  return candidate;
}

struct CFEvaluation {
  double t = 0.0;
  cplx value;
  cplx logValue;
};

/// GH characteristic function with the t-independent normalizer
/// (sqrt(alpha^2-beta^2) delta)^lambda / K_lambda(sqrt(alpha^2-beta^2) delta)
/// computed once.
class GHCharacteristic {
 public:
  explicit GHCharacteristic(const GHParams& params)
      : params_(validateParams(params)),
        scaledGamma_(params_.gamma() * params_.delta),
        logNormalizer_(params_.lambda * std::log(scaledGamma_) -
                       logBesselK(params_.lambda, scaledGamma_).real()) {}

  const GHParams& params() const { return params_; }

  /// Bessel argument sqrt(alpha^2 - (it+beta)^2) delta, right half-plane root.
  cplx besselArgument(double t) const {
    const cplx shifted(params_.beta, t);
    return principalSqrtRight(params_.alpha * params_.alpha - shifted * shifted) * params_.delta;
  }

  /// log f(t) on the continuous branch through log f(0) = 0.
  cplx logCF(double t) const {
    if (t == 0.0) return 0.0;
    const cplx zeta = besselArgument(t);
    return cplx(0.0, params_.mu * t) + logNormalizer_ - params_.lambda * std::log(zeta) +
           logBesselK(params_.lambda, zeta);
  }

  /// log f(t) with the imaginary part reduced to (-pi, pi].
  cplx logCFPrincipal(double t) const {
    const cplx l = logCF(t);
    return {l.real(), wrapPhase(l.imag())};
  }

  cplx operator()(double t) const { return std::exp(logCF(t)); }

  CFEvaluation evaluate(double t) const {
    const cplx l = logCF(t);
    return {t, std::exp(l), l};
  }

 private:
  GHParams params_;
  double scaledGamma_;
  double logNormalizer_;
};

inline CFEvaluation ghCF(const GHParams& params, double t) {
  return GHCharacteristic(params).evaluate(t);
}

/// exp(delta (gamma - sqrt(alpha^2 - (beta+it)^2)) + i mu t), the NIG CF in
/// closed form (no Bessel function involved).
inline cplx nigClosedFormCF(const GHParams& params, double t) {
  const cplx shifted(params.beta, t);
  const cplx root =
      principalSqrtRight(params.alpha * params.alpha - shifted * shifted);
  return std::exp(params.delta * (params.gamma() - root) + cplx(0.0, params.mu * t));
}

/// Distinguished logarithm of the GH CF on [0, tMax], unwound from
/// principal-branch values.
inline LogTrack ghLogCF(const GHCharacteristic& cf, double tMax, const StepPolicy& policy = {}) {
  if (!(tMax > 0.0)) throw DomainError("gh_core::ghLogCF", "tMax must be > 0");
  return distinguishedLog([&cf](double t) { return cf.logCFPrincipal(t); }, tMax, policy);
}

inline LogTrack ghLogCF(const GHParams& params, double tMax, const StepPolicy& policy = {}) {
  const GHCharacteristic cf(params);
  return ghLogCF(cf, tMax, policy);
}

/// x-fold convolution power of an NIG law: delta -> x delta, mu -> x mu.
inline GHParams nigConvolutionPower(const GHParams& params, double x) {
  validateParams(params);
  if (params.lambda != -0.5)
    throw DomainError("gh_core::nigConvolutionPower", "requires lambda = -1/2 (NIG)");
  if (!(x > 0.0) || !std::isfinite(x))
    throw DomainError("gh_core::nigConvolutionPower", "power must be > 0");
  GHParams result = params;
  result.delta *= x;
  result.mu *= x;
  return result;
}

/// Raw moments E[X^k], k = 1..maxOrder (<= 4), from central finite
/// differences of the CF at 0 with three-level Richardson extrapolation.
inline std::vector<double> momentsFromCF(const CFEvaluator& cf, int maxOrder) {
  constexpr const char* kWhere = "gh_core::momentsFromCF";
  if (maxOrder < 1 || maxOrder > 4) throw DomainError(kWhere, "maxOrder must be in 1..4");
  // Base steps per derivative order; higher orders need larger steps to keep
  // the cancellation error of the stencil below the truncation error.
  constexpr std::array<double, 4> kBaseStep = {1e-3, 1e-3, 2e-2, 5e-2};
  const cplx f0 = cf(0.0);
  std::vector<double> moments;
  for (int order = 1; order <= maxOrder; ++order) {
    const auto stencil = [&](double h) -> cplx {
      switch (order) {
        case 1: return (cf(h) - cf(-h)) / (2.0 * h);
        case 2: return (cf(h) - 2.0 * f0 + cf(-h)) / (h * h);
        case 3: return (cf(2 * h) - 2.0 * cf(h) + 2.0 * cf(-h) - cf(-2 * h)) / (2.0 * h * h * h);
        default:
          return (cf(2 * h) - 4.0 * cf(h) + 6.0 * f0 - 4.0 * cf(-h) + cf(-2 * h)) /
                 (h * h * h * h);
      }
    };
    const double h = kBaseStep[static_cast<std::size_t>(order - 1)];
    std::array<cplx, 3> level0 = {stencil(h), stencil(h / 2), stencil(h / 4)};
    std::array<cplx, 2> level1 = {(4.0 * level0[1] - level0[0]) / 3.0,
                                  (4.0 * level0[2] - level0[1]) / 3.0};
    const cplx derivative = (16.0 * level1[1] - level1[0]) / 15.0;
    // E[X^k] = (-i)^k f^(k)(0)
    cplx factor = 1.0;
    for (int k = 0; k < order; ++k) factor *= cplx(0.0, -1.0);
    const double moment = (factor * derivative).real();
    const double previous = (factor * level1[1]).real();
    if (!std::isfinite(moment) ||
        std::abs(moment - previous) > 1e-3 * std::max(1.0, std::abs(moment)))
      throw ConvergenceError(kWhere, "Richardson extrapolation unstable at order " +
                                         std::to_string(order));
    moments.push_back(moment);
  }
  return moments;
}

/// Mean and standard deviation from momentsFromCF.
inline std::pair<double, double> meanAndStdFromCF(const CFEvaluator& cf) {
  const auto m = momentsFromCF(cf, 2);
  const double variance = m[1] - m[0] * m[0];
  if (!(variance > 0.0))
    throw ConvergenceError("gh_core::momentsFromCF", "non-positive variance estimate");
  return {m[0], std::sqrt(variance)};
}

}  // namespace nugh
