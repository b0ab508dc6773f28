#pragma once

// Samplers and random-sum identity checks: base laws (Gaussian, Laplace,
// hyperbolic secant, Linnik, NIG/GH, nu-GH), p^{1/a} sum_{j<=nu_p} X_j random
// sums, Kolmogorov-Smirnov statistics and empirical transforms.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "nugh/errors.hpp"
#include "nugh/gh.hpp"
#include "nugh/inversion.hpp"
#include "nugh/nu_families.hpp"
#include "nugh/nu_transform.hpp"
#include "nugh/random.hpp"
#include "nugh/special_fn.hpp"

namespace nugh {

namespace law {
struct Gaussian {
  double sigma = 1.0;
};
/// CF 1/(1+t^2).
struct Laplace {};
/// CF 1/cosh(t), density sech(pi x/2)/2.
struct HSecant {};
/// CF 1/(1+|t|^alpha).
struct Linnik {
  double alpha = 1.0;
};
/// GH law; exact sampling when lambda = -1/2.
struct NIG {
  GHParams params;
};
struct NuGH {
  NuFamily family;
  GHParams params;
};
}  // namespace law

using Law = std::variant<law::Gaussian, law::Laplace, law::HSecant, law::Linnik, law::NIG, law::NuGH>;

using BaseSampler = std::function<double(Rng&)>;
using CdfEvaluator = std::function<double(double)>;

inline std::string lawName(const Law& l) {
  struct Visitor {
    std::string operator()(const law::Gaussian& g) const { return "gaussian(" + std::to_string(g.sigma) + ")"; }
    std::string operator()(const law::Laplace&) const { return "laplace"; }
    std::string operator()(const law::HSecant&) const { return "hsecant"; }
    std::string operator()(const law::Linnik& g) const { return "linnik(" + std::to_string(g.alpha) + ")"; }
    std::string operator()(const law::NIG&) const { return "nig"; }
    std::string operator()(const law::NuGH& g) const { return g.family.name() + std::string("-gh"); }
  };
  return std::visit(Visitor{}, l);
}

namespace detail {

inline void validateLaw(const Law& l) {
  constexpr const char* kWhere = "montecarlo::sampleBase";
  if (const auto* g = std::get_if<law::Gaussian>(&l); g && !(g->sigma > 0.0 && std::isfinite(g->sigma)))
    throw DomainError(kWhere, "sigma must be > 0");
  if (const auto* g = std::get_if<law::Linnik>(&l); g && !(g->alpha > 0.0 && g->alpha <= 2.0))
    throw DomainError(kWhere, "Linnik alpha must lie in (0, 2]");
  if (const auto* g = std::get_if<law::NIG>(&l)) validateParams(g->params);
  if (const auto* g = std::get_if<law::NuGH>(&l)) validateParams(g->params);
}

// Michael-Schucany-Haas transformation with one rejection step.
inline double sampleInverseGaussian(double mean, double shape, Rng& rng) {
  const double z = rng.normal();
  const double y = z * z;
  const double my = mean * y;
  const double x = mean + mean * my / (2.0 * shape) -
                   (mean / (2.0 * shape)) * std::sqrt(4.0 * shape * my + my * my);
  if (rng.uniform() * (mean + x) <= mean) return x;
  return mean * mean / x;
}

// Symmetric strictly stable law with CF exp(-|t|^alpha) (Chambers-Mallows-Stuck).
inline double sampleSymmetricStable(double alpha, Rng& rng) {
  const double u = kPi * (rng.uniform() - 0.5);
  if (alpha == 1.0) return std::tan(u);
  const double w = rng.exponential();
  return std::sin(alpha * u) / std::pow(std::cos(u), 1.0 / alpha) *
         std::pow(std::cos((1.0 - alpha) * u) / w, (1.0 - alpha) / alpha);
}

inline double sampleNIG(const GHParams& p, double scale, Rng& rng) {
  const double v = sampleInverseGaussian(scale * p.delta / p.gamma(), scale * scale * p.delta * p.delta, rng);
  return scale * p.mu + p.beta * v + std::sqrt(v) * rng.normal();
}

inline CFEvaluator nuGHEvaluator(const law::NuGH& g) {
  auto spec = std::make_shared<const NuGHChar>(g.family, g.params);
  return [spec](double t) { return (*spec)(t); };
}

inline CFBatch nuGHBatch(const law::NuGH& g) {
  auto spec = std::make_shared<const NuGHChar>(g.family, g.params);
  return [spec](std::span<const double> ts) { return spec->evaluateGrid(ts); };
}

inline constexpr std::size_t kLawGridPoints = 1u << 14;

// Density grid for the grid-based laws, cached by law description.
inline std::shared_ptr<const DensityGrid> lawGrid(const Law& l) {
  static std::mutex mutex;
  static std::map<std::vector<double>, std::shared_ptr<const DensityGrid>> cache;
  std::vector<double> key;
  CFBatch batch;
  CFEvaluator single;
  if (const auto* g = std::get_if<law::NIG>(&l)) {
    const GHParams& p = g->params;
    key = {0.0, p.lambda, p.alpha, p.beta, p.delta, p.mu};
    auto cf = std::make_shared<const GHCharacteristic>(p);
    single = [cf](double t) { return (*cf)(t); };
    batch = batchOf(single);
  } else if (const auto* g = std::get_if<law::NuGH>(&l)) {
    const GHParams& p = g->params;
    key = {1.0 + static_cast<double>(g->family.kind), p.lambda, p.alpha, p.beta, p.delta, p.mu};
    single = nuGHEvaluator(*g);
    batch = nuGHBatch(*g);
  } else {
    throw DomainError("montecarlo::lawGrid", "law has no density grid");
  }
  {
    std::lock_guard<std::mutex> lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto grid = std::make_shared<const DensityGrid>(pdfGrid(batch, defaultXRange(single), kLawGridPoints));
  std::lock_guard<std::mutex> lock(mutex);
  return cache.emplace(key, grid).first->second;
}

// Inverse CDF on the trapezoid cumulative of a grid, linear between nodes.
inline BaseSampler gridSampler(std::shared_ptr<const DensityGrid> grid) {
  auto cumulative = std::make_shared<const std::vector<double>>(grid->cumulative());
  return [grid, cumulative](Rng& rng) {
    const double u = rng.uniform();
    const auto& c = *cumulative;
    auto it = std::upper_bound(c.begin(), c.end(), u);
    if (it == c.begin()) return grid->x.front();
    if (it == c.end()) return grid->x.back();
    const auto i = static_cast<std::size_t>(it - c.begin());
    const double w = (u - c[i - 1]) / (c[i] - c[i - 1]);
    return grid->x[i - 1] + w * grid->dx;
  };
}

inline constexpr double kLinnikTableEdge = 1000.0;

// Linnik CDF table from cdfAt on sinh-spaced nodes of [-1000, 1000], cached
// per alpha.
inline std::shared_ptr<const CdfTable> linnikTable(double alpha) {
  static std::mutex mutex;
  static std::map<double, std::shared_ptr<const CdfTable>> cache;
  {
    std::lock_guard<std::mutex> lock(mutex);
    if (auto it = cache.find(alpha); it != cache.end()) return it->second;
  }
  const CFEvaluator cf = [alpha](double t) { return cplx(1.0 / (1.0 + std::pow(std::abs(t), alpha))); };
  constexpr int kHalfNodes = 600;
  const double vMax = std::asinh(kLinnikTableEdge);
  std::vector<double> x(2 * kHalfNodes + 1), f(x.size());
  for (int i = 0; i <= kHalfNodes; ++i) {
    const double xi = std::sinh(vMax * i / kHalfNodes);
    const double fi = i == 0 ? 0.5 : cdfAt(cf, xi);
    x[static_cast<std::size_t>(kHalfNodes + i)] = xi;
    f[static_cast<std::size_t>(kHalfNodes + i)] = fi;
    x[static_cast<std::size_t>(kHalfNodes - i)] = -xi;
    f[static_cast<std::size_t>(kHalfNodes - i)] = 1.0 - fi;
  }
  auto table = std::make_shared<const CdfTable>(std::move(x), std::move(f));
  std::lock_guard<std::mutex> lock(mutex);
  return cache.emplace(alpha, table).first->second;
}

}  // namespace detail

/// Characteristic function of a base law.
inline CFEvaluator lawCF(const Law& l) {
  detail::validateLaw(l);
  struct Visitor {
    CFEvaluator operator()(const law::Gaussian& g) const {
      return [s = g.sigma](double t) { return cplx(std::exp(-0.5 * s * s * t * t)); };
    }
    CFEvaluator operator()(const law::Laplace&) const {
      return [](double t) { return cplx(1.0 / (1.0 + t * t)); };
    }
    CFEvaluator operator()(const law::HSecant&) const {
      return [](double t) { return cplx(1.0 / std::cosh(t)); };
    }
    CFEvaluator operator()(const law::Linnik& g) const {
      return [a = g.alpha](double t) { return cplx(1.0 / (1.0 + std::pow(std::abs(t), a))); };
    }
    CFEvaluator operator()(const law::NIG& g) const {
      auto cf = std::make_shared<const GHCharacteristic>(g.params);
      return [cf](double t) { return (*cf)(t); };
    }
    CFEvaluator operator()(const law::NuGH& g) const { return detail::nuGHEvaluator(g); }
  };
  return std::visit(Visitor{}, l);
}

/// CDF of a base law: closed form where available, otherwise a table from
/// the Gil-Pelaez integral (Linnik) or the inversion grid (NIG, nu-GH).
inline CdfEvaluator lawCdf(const Law& l) {
  detail::validateLaw(l);
  struct Visitor {
    CdfEvaluator operator()(const law::Gaussian& g) const {
      return [s = g.sigma](double x) { return 0.5 * std::erfc(-x / (s * std::sqrt(2.0))); };
    }
    CdfEvaluator operator()(const law::Laplace&) const {
      return [](double x) { return x < 0.0 ? 0.5 * std::exp(x) : 1.0 - 0.5 * std::exp(-x); };
    }
    CdfEvaluator operator()(const law::HSecant&) const {
      return [](double x) { return (2.0 / kPi) * std::atan(std::exp(0.5 * kPi * x)); };
    }
    CdfEvaluator operator()(const law::Linnik& g) const {
      if (g.alpha == 2.0) return (*this)(law::Laplace{});
      // Beyond the table the tail follows its x^{-alpha} asymptote.
      auto table = detail::linnikTable(g.alpha);
      const double edgeTail = 1.0 - (*table)(detail::kLinnikTableEdge);
      return [table, edgeTail, a = g.alpha](double x) {
        if (std::abs(x) <= detail::kLinnikTableEdge) return (*table)(x);
        const double tail = edgeTail * std::pow(detail::kLinnikTableEdge / std::abs(x), a);
        return x > 0.0 ? 1.0 - tail : tail;
      };
    }
    CdfEvaluator operator()(const law::NIG& g) const { return fromGrid(g); }
    CdfEvaluator operator()(const law::NuGH& g) const { return fromGrid(g); }

    static CdfEvaluator fromGrid(const Law& l) {
      auto table = std::make_shared<const CdfTable>(CdfTable::fromDensity(*detail::lawGrid(l)));
      return [table](double x) { return (*table)(x); };
    }
  };
  return std::visit(Visitor{}, l);
}

/// Single-draw sampler for a base law; precomputed tables are shared by copies.
inline BaseSampler samplerOf(const Law& l) {
  detail::validateLaw(l);
  struct Visitor {
    BaseSampler operator()(const law::Gaussian& g) const {
      return [s = g.sigma](Rng& rng) { return s * rng.normal(); };
    }
    BaseSampler operator()(const law::Laplace&) const {
      return [](Rng& rng) {
        const double e = rng.exponential();
        return rng.uniform() < 0.5 ? -e : e;
      };
    }
    BaseSampler operator()(const law::HSecant&) const {
      return [](Rng& rng) {
        return (2.0 / kPi) * std::log(std::tan(0.5 * kPi * rng.uniformPositive() * (1.0 - 0x1.0p-53)));
      };
    }
    BaseSampler operator()(const law::Linnik& g) const {
      return [a = g.alpha](Rng& rng) {
        const double s = detail::sampleSymmetricStable(a, rng);
        return s * std::pow(rng.exponential(), 1.0 / a);
      };
    }
    BaseSampler operator()(const law::NIG& g) const {
      if (g.params.lambda == -0.5)
        return [p = g.params](Rng& rng) { return detail::sampleNIG(p, 1.0, rng); };
      return detail::gridSampler(detail::lawGrid(g));
    }
    BaseSampler operator()(const law::NuGH& g) const {
      if (g.params.lambda == -0.5)
        return [p = g.params, f = g.family](Rng& rng) {
          const double mixing = sampleMixing(f, rng);
          return detail::sampleNIG(p, mixing, rng);
        };
      return detail::gridSampler(detail::lawGrid(g));
    }
  };
  return std::visit(Visitor{}, l);
}

inline std::vector<double> sampleBase(const Law& l, std::size_t n, Rng& rng) {
  const auto sampler = samplerOf(l);
  std::vector<double> out(n);
  for (auto& v : out) v = sampler(rng);
  return out;
}

/// n draws split into `chunks` substreams Rng(seed, (streamId << 16) + chunk)
/// generated concurrently; the result does not depend on scheduling.
inline std::vector<double> sampleParallel(const BaseSampler& sampler, std::size_t n, std::uint64_t seed,
                                          std::uint64_t streamId, std::size_t chunks) {
  chunks = std::max<std::size_t>(1, std::min(chunks, n));
  std::vector<double> out(n);
  std::vector<std::future<void>> jobs;
  const std::size_t per = (n + chunks - 1) / chunks;
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t begin = c * per, end = std::min(n, begin + per);
    if (begin >= end) break;
    jobs.push_back(std::async(std::launch::async, [&, c, begin, end] {
      Rng rng(seed, (streamId << 16) + c);
      for (std::size_t i = begin; i < end; ++i) out[i] = sampler(rng);
    }));
  }
  for (auto& j : jobs) j.get();
  return out;
}

struct RandomSumSpec {
  NuFamily family;
  double p = 0.5;
  double stabilityIndex = 2.0;
};

inline void validateSpec(const RandomSumSpec& spec) {
  detail::requireInDelta(spec.family, spec.p, "montecarlo::randomSumSample");
  if (!(spec.stabilityIndex > 0.0 && spec.stabilityIndex <= 2.0))
    throw DomainError("montecarlo::randomSumSample", "stability index must lie in (0, 2]");
}

/// n realizations of p^{1/index} sum_{j=1}^{nu_p} X_j.
inline std::vector<double> randomSumSample(const RandomSumSpec& spec, const BaseSampler& base, std::size_t n,
                                           Rng& rng) {
  validateSpec(spec);
  const auto nu = detail::cachedNuSampler(spec.family, spec.p);
  const double scale = std::pow(spec.p, 1.0 / spec.stabilityIndex);
  std::vector<double> out(n);
  for (auto& v : out) {
    const long count = (*nu)(rng);
    double sum = 0.0;
    for (long j = 0; j < count; ++j) sum += base(rng);
    v = scale * sum;
  }
  return out;
}

inline constexpr double kKSCritical01 = 1.628;

struct KSReport {
  std::size_t n = 0;
  double statistic = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

inline KSReport ksStatistic(std::vector<double> samples, const CdfEvaluator& cdf) {
  if (samples.size() < 100) throw DomainError("montecarlo::ksStatistic", "need at least 100 samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = std::clamp(cdf(samples[i]), 0.0, 1.0);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  KSReport report;
  report.n = samples.size();
  report.statistic = std::clamp(d, 0.0, 1.0);
  report.threshold = kKSCritical01 / std::sqrt(n);
  report.pass = report.statistic < report.threshold;
  return report;
}

struct IdentityReport {
  RandomSumSpec spec;
  std::string law;
  KSReport ks;
  std::uint64_t seed = 0;
  std::uint64_t streamId = 0;
  int attempts = 1;
};

/// KS comparison of the random sum of fixedPointLaw draws with fixedPointLaw.
inline IdentityReport identitySuite(const RandomSumSpec& spec, const Law& fixedPointLaw, std::size_t n, Rng& rng) {
  IdentityReport report;
  report.spec = spec;
  report.law = lawName(fixedPointLaw);
  report.seed = rng.seed();
  report.streamId = rng.streamId();
  const auto samples = randomSumSample(spec, samplerOf(fixedPointLaw), n, rng);
  report.ks = ksStatistic(samples, lawCdf(fixedPointLaw));
  return report;
}

/// identitySuite on stream `streamId`, repeated once on stream streamId + 1
/// if the first attempt fails.
inline IdentityReport identitySuiteRepeatOnce(const RandomSumSpec& spec, const Law& fixedPointLaw,
                                              std::size_t n, std::uint64_t seed, std::uint64_t streamId) {
  Rng first(seed, streamId);
  auto report = identitySuite(spec, fixedPointLaw, n, first);
  if (report.ks.pass) return report;
  Rng second(seed, streamId + 1);
  auto retry = identitySuite(spec, fixedPointLaw, n, second);
  retry.attempts = 2;
  return retry;
}

struct EmpiricalTransform {
  cplx value;
  /// Standard errors of the real and imaginary parts.
  double seReal = 0.0;
  double seImag = 0.0;

  bool within(cplx target, double sigmas) const {
    return std::abs(value.real() - target.real()) <= sigmas * seReal &&
           std::abs(value.imag() - target.imag()) <= sigmas * seImag;
  }
};

/// Mean of e^{itX} over the samples.
inline EmpiricalTransform empiricalCF(std::span<const double> samples, double t) {
  double sc = 0, ss = 0, scc = 0, sss = 0;
  for (double x : samples) {
    const double c = std::cos(t * x), s = std::sin(t * x);
    sc += c;
    ss += s;
    scc += c * c;
    sss += s * s;
  }
  const double n = static_cast<double>(samples.size());
  EmpiricalTransform e;
  e.value = cplx(sc / n, ss / n);
  e.seReal = std::sqrt(std::max(0.0, scc / n - (sc / n) * (sc / n)) / n);
  e.seImag = std::sqrt(std::max(0.0, sss / n - (ss / n) * (ss / n)) / n);
  return e;
}

/// Mean of e^{-lambda X} over nonnegative samples.
inline EmpiricalTransform empiricalLaplace(std::span<const double> samples, double lambda) {
  double s = 0, s2 = 0;
  for (double x : samples) {
    const double e = std::exp(-lambda * x);
    s += e;
    s2 += e * e;
  }
  const double n = static_cast<double>(samples.size());
  EmpiricalTransform e;
  e.value = s / n;
  e.seReal = std::sqrt(std::max(0.0, s2 / n - (s / n) * (s / n)) / n);
  return e;
}

}  // namespace nugh
