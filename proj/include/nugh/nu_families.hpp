#pragma once

// The geometric and Chebyshev nu-families: the p.g.f. P_p of nu_p, the
// standard solution phi of phi(t) = P_p(phi(pt)), the law of nu_p and the
// mixing law whose Laplace transform is phi.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "nugh/errors.hpp"
#include "nugh/fft.hpp"
#include "nugh/random.hpp"
#include "nugh/special_fn.hpp"

namespace nugh {

enum class FamilyKind { Geometric, Chebyshev };

struct NuFamily {
  FamilyKind kind = FamilyKind::Geometric;

  /// Chebyshev parameters are p = 1/n^2 with n in 1..kMaxChebyshevDegree.
  static constexpr int kMaxChebyshevDegree = 64;

  static NuFamily geometric() { return {FamilyKind::Geometric}; }
  static NuFamily chebyshev() { return {FamilyKind::Chebyshev}; }

  std::string name() const { return kind == FamilyKind::Geometric ? "geo" : "cheb"; }

  /// Chebyshev degree n for p = 1/n^2, or 0 if p is not of that form.
  static int chebyshevDegree(double p) {
    if (!(p > 0.0) || p > 1.0) return 0;
    const double n = std::round(1.0 / std::sqrt(p));
    if (n < 1.0 || n > kMaxChebyshevDegree) return 0;
    return std::abs(p * n * n - 1.0) <= 1e-12 ? static_cast<int>(n) : 0;
  }

  bool contains(double p) const {
    if (kind == FamilyKind::Geometric) return p > 0.0 && p < 1.0;
    return chebyshevDegree(p) != 0;
  }

  bool operator==(const NuFamily&) const = default;
};

inline NuFamily parseFamily(const std::string& text) {
  if (text == "geo" || text == "geometric") return NuFamily::geometric();
  if (text == "cheb" || text == "chebyshev") return NuFamily::chebyshev();
  throw DomainError("nu_families::parseFamily", "unknown family '" + text + "' (geo|cheb)");
}

namespace detail {
inline void requireInDelta(const NuFamily& family, double p, const char* where) {
  if (!family.contains(p))
    throw DomainError(where, "p=" + std::to_string(p) + " is not in the parameter set of the " +
                                 family.name() + " family");
}
}  // namespace detail

/// P_p(z) for |z| <= 1.
inline cplx pgfEval(const NuFamily& family, double p, cplx z) {
  detail::requireInDelta(family, p, "nu_families::pgfEval");
  if (std::abs(z) > 1.0 + 1e-15) throw DomainError("nu_families::pgfEval", "|z| > 1");
  if (family.kind == FamilyKind::Geometric) return p * z / (1.0 - (1.0 - p) * z);
  // 1/T_n(1/z); the limit at z = 0 is 0 since nu_p >= 1.
  if (z == cplx(0.0)) return 0.0;
  const int n = NuFamily::chebyshevDegree(p);
  const cplx denominator = chebyshevT(static_cast<std::uint64_t>(n), 1.0 / z);
  return 1.0 / denominator;
}

/// 1/cosh(u) for re(u) >= 0 without overflow.
inline cplx sech(cplx u) {
  if (u.real() < 0.0) u = -u;
  const cplx decay = std::exp(-u);
  return 2.0 * decay / (1.0 + decay * decay);
}

/// Standard solution phi(w) for re(w) >= 0: 1/(1+w) or 1/cosh(sqrt(2w)).
inline cplx phiEval(const NuFamily& family, cplx w) {
  if (!(w.real() >= -1e-12) || !std::isfinite(w.real()) || !std::isfinite(w.imag()))
    throw DomainError("nu_families::phiEval", "requires re(w) >= 0");
  if (family.kind == FamilyKind::Geometric) return 1.0 / (1.0 + w);
  return sech(principalSqrtRight(2.0 * w));
}

struct PoincareReport {
  NuFamily family;
  std::vector<double> pValues;
  std::vector<double> tGrid;
  double maxResidual = 0.0;
  double worstP = 0.0;
  double worstT = 0.0;
};

/// max |phi(t) - P_p(phi(pt))| over the grid.
inline PoincareReport verifyPoincare(const NuFamily& family, const std::vector<double>& pValues,
                                     const std::vector<double>& tGrid) {
  PoincareReport report{family, pValues, tGrid};
  for (double p : pValues) {
    detail::requireInDelta(family, p, "nu_families::verifyPoincare");
    for (double t : tGrid) {
      if (t < 0.0) throw DomainError("nu_families::verifyPoincare", "t must be >= 0");
      const double residual =
          std::abs(phiEval(family, t) - pgfEval(family, p, phiEval(family, p * t)));
      if (residual >= report.maxResidual) {
        report.maxResidual = residual;
        report.worstP = p;
        report.worstT = t;
      }
    }
  }
  return report;
}

/// P{nu_p = k} for k = 1..cutoff, stored at index k-1.
struct NuProbabilities {
  std::vector<double> probability;
  double tailMass = 0.0;

  long cutoff() const { return static_cast<long>(probability.size()); }
  double at(long k) const {
    return (k >= 1 && k <= cutoff()) ? probability[static_cast<std::size_t>(k - 1)] : 0.0;
  }
  double mean() const {
    double m = 0.0;
    for (std::size_t i = 0; i < probability.size(); ++i)
      m += static_cast<double>(i + 1) * probability[i];
    return m;
  }
};

inline constexpr double kNuTailTolerance = 1e-12;

/// Smallest cutoff whose truncated tail mass is certified below 1e-12.
inline long defaultNuCutoff(const NuFamily& family, double p) {
  detail::requireInDelta(family, p, "nu_families::defaultNuCutoff");
  if (family.kind == FamilyKind::Geometric)
    return std::max(1L, static_cast<long>(std::ceil(std::log(kNuTailTolerance / 4.0) /
                                                    std::log1p(-p))));
  const int n = NuFamily::chebyshevDegree(p);
  if (n == 1) return 1;
  // Coefficients of 1/T_n(1/z) decay like rho^{-k}, rho = 1/cos(pi/2n).
  const double logRho = -std::log(std::cos(kPi / (2.0 * n)));
  const double prefactor = 8.0 * n * n / (kPi * kPi);
  return n + static_cast<long>(
                 std::ceil((std::log(prefactor) - std::log(kNuTailTolerance / 4.0)) / logRho));
}

/// Law of nu_p truncated at `cutoff`. The Chebyshev probabilities are the
/// Taylor coefficients of 1/T_n(1/z), obtained by a Cauchy integral on the
/// unit circle (FFT) which is stable for every supported degree.
inline NuProbabilities nuProbabilities(const NuFamily& family, double p, long cutoff) {
  constexpr const char* kWhere = "nu_families::nuProbabilities";
  detail::requireInDelta(family, p, kWhere);
  if (cutoff < 1) throw RangeError(kWhere, "cutoff must be >= 1");
  NuProbabilities law;
  law.probability.assign(static_cast<std::size_t>(cutoff), 0.0);
  if (family.kind == FamilyKind::Geometric) {
    double mass = p;
    for (long k = 1; k <= cutoff; ++k) {
      law.probability[static_cast<std::size_t>(k - 1)] = mass;
      mass *= 1.0 - p;
    }
    law.tailMass = std::pow(1.0 - p, static_cast<double>(cutoff));
  } else {
    const int n = NuFamily::chebyshevDegree(p);
    if (n == 1) {
      law.probability[0] = 1.0;
      law.tailMass = 0.0;
    } else {
      const long needed = defaultNuCutoff(family, p);
      std::size_t size = 1;
      while (size < static_cast<std::size_t>(2 * std::max(needed, cutoff) + 2)) size <<= 1;
      std::vector<cplx> samples(size);
      for (std::size_t j = 0; j < size; ++j) {
        const double angle = kTwoPi * static_cast<double>(j) / static_cast<double>(size);
        const cplx conjPoint(std::cos(angle), -std::sin(angle));
        samples[j] = 1.0 / chebyshevT(static_cast<std::uint64_t>(n), conjPoint);
      }
      fftForward(samples);
      double sum = 0.0;
      for (long k = 1; k <= cutoff; ++k) {
        double c = samples[static_cast<std::size_t>(k)].real() / static_cast<double>(size);
        if (k < n || (k - n) % 2 != 0 || c < 0.0) c = 0.0;
        law.probability[static_cast<std::size_t>(k - 1)] = c;
        sum += c;
      }
      law.tailMass = std::max(0.0, 1.0 - sum);
    }
  }
  if (law.tailMass >= kNuTailTolerance)
    throw RangeError(kWhere, "cutoff " + std::to_string(cutoff) + " leaves tail mass " +
                                 std::to_string(law.tailMass));
  return law;
}

/// Inverse-CDF sampler for nu_p built once per (family, p).
class NuSampler {
 public:
  NuSampler(const NuFamily& family, double p) : family_(family), p_(p) {
    detail::requireInDelta(family, p, "nu_families::sampleNu");
    if (family.kind == FamilyKind::Chebyshev) {
      degree_ = NuFamily::chebyshevDegree(p);
      if (degree_ > 1) {
        const auto law = nuProbabilities(family, p, defaultNuCutoff(family, p));
        cumulative_.resize(law.probability.size());
        double running = 0.0;
        for (std::size_t i = 0; i < law.probability.size(); ++i) {
          running += law.probability[i];
          cumulative_[i] = running;
        }
      }
    }
  }

  long operator()(Rng& rng) const {
    if (family_.kind == FamilyKind::Geometric) {
      const double u = rng.uniformPositive();
      return 1 + static_cast<long>(std::floor(std::log(u) / std::log1p(-p_)));
    }
    if (degree_ == 1) return 1;
    const double u = rng.uniform() * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return 1 + static_cast<long>(it - cumulative_.begin());
  }

  const NuFamily& family() const { return family_; }
  double p() const { return p_; }

 private:
  NuFamily family_;
  double p_;
  int degree_ = 0;
  std::vector<double> cumulative_;
};

namespace detail {
inline std::shared_ptr<const NuSampler> cachedNuSampler(const NuFamily& family, double p) {
  static std::mutex mutex;
  static std::map<std::pair<int, double>, std::shared_ptr<const NuSampler>> cache;
  const auto key = std::make_pair(static_cast<int>(family.kind), p);
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto sampler = std::make_shared<const NuSampler>(family, p);
  cache.emplace(key, sampler);
  return sampler;
}
}  // namespace detail

inline long sampleNu(const NuFamily& family, double p, Rng& rng) {
  return (*detail::cachedNuSampler(family, p))(rng);
}

namespace detail {

// Terms of the alternating series for the density of the exit time of
// Brownian motion from (-1, 1); `t` is the switch between the two forms.
inline constexpr double kExitTimeSwitch = 0.64;

inline double exitTimeCoefficient(int n, double x) {
  const double k = n + 0.5;
  if (x > kExitTimeSwitch) return kPi * k * std::exp(-k * k * kPi * kPi * x / 2.0);
  return kPi * k * std::pow(2.0 / (kPi * x), 1.5) * std::exp(-2.0 * k * k / x);
}

// Exact sampler for the law with Laplace transform 1/cosh(sqrt(2 lambda)):
// rejection from an inverse-gamma(1/2)/exponential mixture envelope, accepted
// by squeezing the alternating series.
inline double sampleExitTime(Rng& rng) {
  constexpr double t = kExitTimeSwitch;
  const double leftMass = 2.0 * std::erfc(1.0 / std::sqrt(2.0 * t));
  const double rightMass = (4.0 / kPi) * std::exp(-kPi * kPi * t / 8.0);
  const double leftShare = leftMass / (leftMass + rightMass);
  const double z0 = 1.0 / std::sqrt(t);
  constexpr int kMaxTerms = 10000;
  for (int attempt = 0; attempt < 1'000'000; ++attempt) {
    double x;
    if (rng.uniform() < leftShare) {
      // 1/Z^2 with |Z| >= z0 via the exponential tail rejection for Z.
      double e1, e2;
      do {
        e1 = rng.exponential() / z0;
        e2 = rng.exponential();
      } while (2.0 * e2 < e1 * e1);
      const double z = z0 + e1;
      x = 1.0 / (z * z);
    } else {
      x = t + 8.0 * rng.exponential() / (kPi * kPi);
    }
    double s = exitTimeCoefficient(0, x);
    const double y = rng.uniform() * s;
    for (int n = 1; n <= kMaxTerms; ++n) {
      if (n % 2 == 1) {
        s -= exitTimeCoefficient(n, x);
        if (y <= s) return x;
      } else {
        s += exitTimeCoefficient(n, x);
        if (y > s) break;
      }
      if (n == kMaxTerms)
        throw ConvergenceError("nu_families::sampleMixing",
                               "alternating series failed to certify the rejection bound");
    }
  }
  throw ConvergenceError("nu_families::sampleMixing", "rejection sampler did not accept");
}

}  // namespace detail

/// Draw from the mixing law A with Laplace transform phi.
inline double sampleMixing(const NuFamily& family, Rng& rng) {
  if (family.kind == FamilyKind::Geometric) return rng.exponential();
  return detail::sampleExitTime(rng);
}

}  // namespace nugh
