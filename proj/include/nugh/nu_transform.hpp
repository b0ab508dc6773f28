#pragma once

// g(t) = phi(-log f(t)): the map from an infinitely divisible CF f to the
// corresponding nu-family CF, specialized to GH bases, together with the
// explicit geo-GH and Chebyshev-GH formulas and the nu-strictly Gaussian
// CFs phi(a t^2).

#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include "nugh/errors.hpp"
#include "nugh/gh.hpp"
#include "nugh/nu_families.hpp"
#include "nugh/special_fn.hpp"

namespace nugh {

/// Step and margin used when building logarithm tracks for nu transforms.
inline constexpr double kTrackStep = 0.05;
inline constexpr int kTrackChunk = 64;
inline constexpr double kTrackMaxStep = 1.0;

/// phi(-log f(t)) for an arbitrary CF given by branch-agnostic log values.
/// The covered track is immutable; lookups beyond it go through a shared
/// copy-on-write track grown in chunks, so readers never see a track change.
class NuTransformed {
 public:
  NuTransformed(NuFamily family, LogEvaluator logEval, double tCover)
      : family_(family),
        logEval_(std::move(logEval)),
        track_(std::make_shared<const LogTrack>(buildTrack(logEval_, tCover, {}))),
        growth_(std::make_shared<Growth>(track_)) {}

  const NuFamily& family() const { return family_; }
  const LogTrack& logTrack() const { return *track_; }
  double coveredT() const { return track_->tMax(); }

  NuTransformed extended(double tMax) const {
    if (std::abs(tMax) <= coveredT()) return *this;
    NuTransformed copy = *this;
    copy.track_ = std::make_shared<const LogTrack>(buildTrack(logEval_, std::abs(tMax), {}));
    copy.growth_ = std::make_shared<Growth>(copy.track_);
    return copy;
  }

  /// Distinguished log f(t); beyond the covered range the shared grown
  /// track is used, extended first if needed.
  cplx baseLog(double t) const {
    if (std::abs(t) <= coveredT()) return track_->unwrap(t, candidate(t));
    return grownTrack(std::abs(t))->unwrap(t, candidate(t));
  }

  cplx operator()(double t) const { return phiEval(family_, -baseLog(t)); }

  /// g on a set of abscissae, tracking the logarithm through all of them.
  std::vector<cplx> evaluateGrid(std::span<const double> ts) const {
    std::vector<double> magnitudes;
    magnitudes.reserve(ts.size());
    double largest = 0.0;
    for (double t : ts) {
      magnitudes.push_back(std::abs(t));
      largest = std::max(largest, std::abs(t));
    }
    const LogTrack track = buildTrack(logEval_, largest, magnitudes);
    std::vector<cplx> values(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const double a = magnitudes[i];
      auto it = std::lower_bound(track.grid.begin(), track.grid.end(), a);
      const cplx logValue = track.logValues[static_cast<std::size_t>(it - track.grid.begin())];
      values[i] = phiEval(family_, -(ts[i] < 0.0 ? std::conj(logValue) : logValue));
    }
    return values;
  }

 private:
  struct Growth {
    explicit Growth(std::shared_ptr<const LogTrack> initial) : track(std::move(initial)) {}
    std::mutex mutex;
    std::shared_ptr<const LogTrack> track;
  };

  std::shared_ptr<const LogTrack> grownTrack(double a) const {
    std::lock_guard lock(growth_->mutex);
    if (growth_->track->tMax() >= a) return growth_->track;
    auto grown = std::make_shared<LogTrack>(*growth_->track);
    StepPolicy policy;
    policy.initialStep = kTrackStep;
    policy.maxStep = kTrackMaxStep;
    const double target = std::max(a + kTrackChunk * kTrackStep, 1.25 * grown->tMax());
    extendDistinguishedLog(*grown, logEval_, target, policy);
    growth_->track = grown;
    return growth_->track;
  }

  cplx candidate(double t) const {
    const cplx l = logEval_(std::abs(t));
    return t < 0.0 ? std::conj(l) : l;
  }

  static LogTrack buildTrack(const LogEvaluator& logEval, double tMax,
                             std::vector<double> required) {
    StepPolicy policy;
    policy.initialStep = kTrackStep;
    policy.maxStep = kTrackMaxStep;
    policy.required = std::move(required);
    return distinguishedLog(logEval, tMax + kTrackChunk * kTrackStep, policy);
  }

  NuFamily family_;
  LogEvaluator logEval_;
  std::shared_ptr<const LogTrack> track_;
  std::shared_ptr<Growth> growth_;
};

/// A nu-GH characteristic function: family + GH base + logarithm track.
class NuGHChar {
 public:
  NuGHChar(NuFamily family, const GHParams& gh, double tCover = 8.0)
      : base_(std::make_shared<const GHCharacteristic>(gh)),
        transformed_(family, principalLogOf(base_), tCover) {}

  const NuFamily& family() const { return transformed_.family(); }
  const GHParams& gh() const { return base_->params(); }
  const GHCharacteristic& base() const { return *base_; }
  const LogTrack& logTrack() const { return transformed_.logTrack(); }
  double coveredT() const { return transformed_.coveredT(); }

  NuGHChar extended(double tMax) const {
    NuGHChar copy = *this;
    copy.transformed_ = transformed_.extended(tMax);
    return copy;
  }

  cplx baseLog(double t) const { return transformed_.baseLog(t); }
  cplx operator()(double t) const { return transformed_(t); }
  std::vector<cplx> evaluateGrid(std::span<const double> ts) const {
    return transformed_.evaluateGrid(ts);
  }

 private:
  static LogEvaluator principalLogOf(const std::shared_ptr<const GHCharacteristic>& base) {
    return [base](double t) { return base->logCFPrincipal(t); };
  }

  std::shared_ptr<const GHCharacteristic> base_;
  NuTransformed transformed_;
};

/// g(t) = phi(-log f(t)) with the tracked logarithm.
inline cplx nuGHCF(const NuGHChar& spec, double t) { return spec(t); }

namespace detail {

// log[e^{it mu} (g d)^lambda K_lambda(z) / (z^lambda K_lambda(g d))] with the
// Bessel argument z and normalizing argument g d supplied by the caller.
inline cplx displayedGHLog(const GHParams& gh, double t, cplx besselArg, double normalArg) {
  if (t == 0.0) return 0.0;
  return cplx(0.0, gh.mu * t) + gh.lambda * std::log(normalArg) - gh.lambda * std::log(besselArg) +
         logBesselK(gh.lambda, besselArg) - logBesselK(gh.lambda, normalArg).real();
}

}  // namespace detail

/// 1 / (1 - log f(t)) with f written out as the GH CF, the log taken on
/// the branch that is continuous along the Bessel argument.
inline cplx geoGHClosedForm(const GHParams& params, double t) {
  const GHParams gh = validateParams(params);
  const cplx shifted(gh.beta, t);
  const cplx z = principalSqrtRight(gh.alpha * gh.alpha - shifted * shifted) * gh.delta;
  const double normal = std::sqrt(gh.alpha * gh.alpha - gh.beta * gh.beta) * gh.delta;
  return 1.0 / (1.0 - detail::displayedGHLog(gh, t, z, normal));
}

/// sec(sqrt(2) log^{1/2} f(t)) with the Bessel argument written as
/// sqrt(alpha^2 + (t - i beta)^2) delta. sec is even, so the choice of square
/// root of the log does not matter; the log itself is the continuous branch.
inline cplx chebGHClosedForm(const GHParams& params, double t) {
  const GHParams gh = validateParams(params);
  const cplx shifted(t, -gh.beta);
  const cplx z = principalSqrtRight(gh.alpha * gh.alpha + shifted * shifted) * gh.delta;
  const double normal = std::sqrt((gh.alpha - gh.beta) * (gh.alpha + gh.beta)) * gh.delta;
  const cplx logF = detail::displayedGHLog(gh, t, z, normal);
  const cplx v = std::sqrt(2.0) * std::sqrt(logF);
  // sec(v) = 1 / cosh(i v)
  return sech(cplx(-v.imag(), v.real()));
}

/// CF phi(a t^2) of the non-degenerate nu-strictly Gaussian law.
struct NuGaussianChar {
  NuFamily family;
  double a = 0.5;
};

inline cplx nuGaussianCF(const NuGaussianChar& spec, double t) {
  if (!(spec.a > 0.0) || !std::isfinite(spec.a))
    throw DomainError("nu_transform::nuGaussianCF", "a must be > 0");
  return phiEval(spec.family, spec.a * t * t);
}

/// Mean of the nu-GH law from finite differences of g at 0.
inline double meanOfNuGH(const NuGHChar& spec) {
  return momentsFromCF([&spec](double t) { return spec(t); }, 1)[0];
}

}  // namespace nugh
