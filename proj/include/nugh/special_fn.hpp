#pragma once

// Complex special functions: modified Bessel K of real order, Chebyshev
// polynomials of the first kind, the right-half-plane square root and the
// distinguished logarithm of a non-vanishing characteristic function.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "nugh/errors.hpp"
#include "nugh/quadrature.hpp"

namespace nugh {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Largest |order| accepted by besselK.
inline constexpr double kMaxBesselOrder = 50.0;

/// Wraps an angle to (-pi, pi].
inline double wrapPhase(double angle) {
  double r = std::remainder(angle, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  return r;
}

/// Square root with re(w) >= 0, and im(w) >= 0 when re(w) == 0.
/// Returns 0 for z == 0; callers needing re(w) > 0 check for that.
inline cplx principalSqrtRight(cplx z) {
  cplx w = std::sqrt(z);
  if (w.real() < 0.0 || (w.real() == 0.0 && w.imag() < 0.0)) w = -w;
  return w;
}

/// T_n(x) by the three-term recurrence.
inline cplx chebyshevT(std::uint64_t n, cplx x) {
  if (n > 1'000'000) throw DomainError("special_fn::chebyshevT", "degree exceeds 1e6");
  if (n == 0) return 1.0;
  cplx previous = 1.0;
  cplx current = x;
  for (std::uint64_t k = 1; k < n; ++k) {
    const cplx next = 2.0 * x * current - previous;
    previous = current;
    current = next;
  }
  if (!std::isfinite(current.real()) || !std::isfinite(current.imag()))
    throw RangeError("special_fn::chebyshevT",
                     "T_" + std::to_string(n) + " overflows at the given argument");
  return current;
}

namespace detail {

inline bool isHalfInteger(double nu) {
  const double twice = 2.0 * nu;
  return std::abs(twice - std::round(twice)) < 1e-14 &&
         static_cast<long>(std::round(twice)) % 2 != 0;
}

// Continuous branch of log(J(z) / Gamma(nu + 1/2)) where
// J(z) = int_0^inf e^{-s} s^{nu-1/2} (1 + s/2z)^{nu-1/2} ds, nu >= 0.
// The factor (1 + sbar/2z)^{nu-1/2} is split off analytically so that the
// remaining integral has a small argument on the whole right half-plane.
inline cplx logScaledBesselIntegral(double nu, cplx z) {
  const double power = nu - 0.5;
  const double sbar = nu + 0.5;
  const cplx anchor = 1.0 + sbar / (2.0 * z);
  const cplx anchorLog = std::log(anchor);

  if (isHalfInteger(nu)) {
    // K_{n+1/2}(z) = sqrt(pi/2z) e^{-z} sum_k (n+k)!/(k!(n-k)!) (2z)^{-k}
    const long n = static_cast<long>(std::round(power));
    cplx sum = 0.0;
    cplx term = 1.0;
    const cplx inv2z = 1.0 / (2.0 * z);
    double coefficient = 1.0;
    for (long k = 0; k <= n; ++k) {
      if (k > 0) {
        coefficient *= static_cast<double>((n + k) * (n - k + 1)) / static_cast<double>(k);
        term *= inv2z;
      }
      sum += coefficient * term;
    }
    return power * anchorLog + std::log(sum * std::exp(-power * anchorLog));
  }

  const double logGamma = std::lgamma(sbar);
  constexpr double kRelTol = 1e-13;
  quad::Result<cplx> residual;
  if (nu >= 0.5) {
    auto integrand = [&](double s) -> cplx {
      if (s <= 0.0) return power == 0.0 ? std::exp(-logGamma) : cplx(0.0);
      const cplx ratioLog = std::log(1.0 + s / (2.0 * z)) - anchorLog;
      return std::exp(cplx(-s + power * std::log(s) - logGamma, 0.0) + power * ratioLog);
    };
    residual = quad::integrateToInfinity(integrand, 0.0, std::max(1.0, sbar), 1e-300, kRelTol);
  } else {
    // s = w^m with m = 1/(nu + 1/2) removes the s^{nu-1/2} endpoint singularity.
    const double m = 1.0 / sbar;
    auto integrand = [&](double w) -> cplx {
      const double s = std::pow(w, m);
      const cplx ratioLog = std::log(1.0 + s / (2.0 * z)) - anchorLog;
      return m * std::exp(cplx(-s - logGamma, 0.0) + power * ratioLog);
    };
    residual = quad::integrateToInfinity(integrand, 0.0, 1.0, 1e-300, kRelTol);
  }
  if (!residual.converged)
    throw ConvergenceError("special_fn::besselK",
                           "quadrature tolerance unmet for order " + std::to_string(nu));
  return power * anchorLog + std::log(residual.value);
}

inline void checkBesselArguments(double order, cplx z) {
  if (!std::isfinite(order) || std::abs(order) > kMaxBesselOrder)
    throw DomainError("special_fn::besselK", "order outside [-50, 50]");
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw DomainError("special_fn::besselK", "non-finite argument");
  if (!(z.real() > 0.0))
    throw DomainError("special_fn::besselK", "requires re(z) > 0");
}

}  // namespace detail

/// log(e^z K_order(z)), continuous on re(z) > 0 and real for real z.
inline cplx logBesselKScaled(double order, cplx z) {
  detail::checkBesselArguments(order, z);
  const double nu = std::abs(order);
  return 0.5 * std::log(kPi / 2.0) - 0.5 * std::log(z) +
         detail::logScaledBesselIntegral(nu, z);
}

/// Continuous branch of log K_order(z) on re(z) > 0.
inline cplx logBesselK(double order, cplx z) { return logBesselKScaled(order, z) - z; }

/// K_order(z) for real order and re(z) > 0.
inline cplx besselK(double order, cplx z) {
  const cplx value = std::exp(logBesselK(order, z));
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
    throw RangeError("special_fn::besselK", "K overflows at the given argument");
  return value;
}

/// e^z K_order(z).
inline cplx besselKScaled(double order, cplx z) {
  const cplx value = std::exp(logBesselKScaled(order, z));
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
    throw RangeError("special_fn::besselK", "scaled K overflows at the given argument");
  return value;
}

/// Continuous logarithm of a characteristic function sampled on 0 = t_0 < t_1 < ...
/// The real part is log|f(t_k)|; the imaginary part is unwound so that
/// consecutive phase increments stay below the refinement cap.
struct LogTrack {
  std::vector<double> grid;
  std::vector<cplx> logValues;
  /// Number of 2*pi turns added to the principal argument at each abscissa.
  std::vector<long> winding;

  double tMax() const { return grid.empty() ? 0.0 : grid.back(); }
  std::size_t size() const { return grid.size(); }

  /// Moves `candidate` (a logarithm of f(t) on any branch) onto the tracked
  /// branch. Negative t uses log f(-t) = conj(log f(t)).
  cplx unwrap(double t, cplx candidate) const {
    if (t < 0.0) return std::conj(unwrap(-t, std::conj(candidate)));
    if (grid.empty() || t > tMax() * (1.0 + 1e-12))
      throw RangeError("special_fn::LogTrack", "t outside the tracked range");
    auto it = std::upper_bound(grid.begin(), grid.end(), t);
    std::size_t k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - grid.begin() - 1));
    if (k + 1 < grid.size() && grid[k + 1] - t < t - grid[k]) ++k;
    const double reference = logValues[k].imag();
    const double turns = std::round((reference - candidate.imag()) / kTwoPi);
    return {candidate.real(), candidate.imag() + turns * kTwoPi};
  }
};

struct StepPolicy {
  double initialStep = 0.05;
  double phaseCap = kPi / 2.0;
  double floorStep = 1e-9;
  /// Steps grow by doubling up to this length while phase increments stay
  /// below a quarter of the cap; 0 keeps them at initialStep.
  double maxStep = 0.0;
  /// Abscissae that must appear in the track (sorted or not).
  std::vector<double> required;
};

/// Evaluator returning a logarithm of f(t) on an arbitrary branch.
using LogEvaluator = std::function<cplx(double)>;
using CFEvaluator = std::function<cplx(double)>;

/// Continues `track` to tMax from its last abscissa, refining by halving
/// where the phase increment exceeds the cap.
inline void extendDistinguishedLog(LogTrack& track, const LogEvaluator& logEval, double tMax,
                                   const StepPolicy& policy = {}) {
  if (track.grid.empty()) throw DomainError("special_fn::distinguishedLog", "track has no starting point");
  std::vector<double> targets;
  targets.reserve(policy.required.size() + 1);
  for (double t : policy.required)
    if (t > track.tMax() && t <= tMax) targets.push_back(t);
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
  if (tMax > track.tMax() && (targets.empty() || targets.back() < tMax)) targets.push_back(tMax);

  double t = track.tMax();
  double step = policy.initialStep;
  cplx current = track.logValues.back();
  std::size_t next = 0;
  while (next < targets.size()) {
    const double target = targets[next];
    const double tn = std::min(t + step, target);
    const cplx candidate = logEval(tn);
    if (!std::isfinite(candidate.real()) || !std::isfinite(candidate.imag()))
      throw BranchError("special_fn::distinguishedLog",
                        "characteristic function vanishes or is non-finite at t=" +
                            std::to_string(tn));
    const double increment = wrapPhase(candidate.imag() - current.imag());
    if (std::abs(increment) > policy.phaseCap) {
      step = 0.5 * (tn - t);
      if (step < policy.floorStep)
        throw BranchError("special_fn::distinguishedLog",
                          "phase increment above cap at refinement floor near t=" +
                              std::to_string(t) + " (near-zero of the CF?)");
      continue;
    }
    current = {candidate.real(), current.imag() + increment};
    track.grid.push_back(tn);
    track.logValues.push_back(current);
    track.winding.push_back(
        std::lround((current.imag() - wrapPhase(candidate.imag())) / kTwoPi));
    t = tn;
    if (tn == target) ++next;
    const double ceiling = std::max(policy.initialStep, policy.maxStep);
    step = std::abs(increment) < 0.25 * policy.phaseCap ? std::min(ceiling, 2.0 * step)
                                                        : std::min(policy.initialStep, 2.0 * step);
  }
}

/// Builds the distinguished logarithm on [0, tMax] from branch-agnostic log
/// values.
inline LogTrack distinguishedLog(const LogEvaluator& logEval, double tMax,
                                 const StepPolicy& policy = {}) {
  if (!(tMax >= 0.0) || !std::isfinite(tMax))
    throw DomainError("special_fn::distinguishedLog", "tMax must be finite and >= 0");
  LogTrack track;
  const cplx first = logEval(0.0);
  track.grid.push_back(0.0);
  track.logValues.push_back({first.real(), wrapPhase(first.imag())});
  track.winding.push_back(0);
  extendDistinguishedLog(track, logEval, tMax, policy);
  return track;
}

/// Distinguished logarithm from characteristic-function values.
inline LogTrack distinguishedLogOfCF(const CFEvaluator& cf, double tMax,
                                     const StepPolicy& policy = {}) {
  return distinguishedLog([&cf](double t) { return std::log(cf(t)); }, tMax, policy);
}

}  // namespace nugh
