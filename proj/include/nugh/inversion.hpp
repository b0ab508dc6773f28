#pragma once

// Characteristic-function inversion: density grids by discrete Fourier
// inversion, CDF values by the Gil-Pelaez integral, quantiles, and the
// log-density tail diagnostic.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nugh/errors.hpp"
#include "nugh/fft.hpp"
#include "nugh/gh.hpp"
#include "nugh/quadrature.hpp"
#include "nugh/special_fn.hpp"

namespace nugh {

/// CF evaluated on a batch of abscissae (lets callers track a logarithm
/// through the whole grid in one pass).
using CFBatch = std::function<std::vector<cplx>(std::span<const double>)>;

inline CFBatch batchOf(CFEvaluator cf) {
  return [cf = std::move(cf)](std::span<const double> ts) {
    std::vector<cplx> values(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) values[i] = cf(ts[i]);
    return values;
  };
}

inline constexpr double kCFNegligible = 1e-12;
inline constexpr double kMaxTCutoff = 65536.0;

namespace detail {

struct GaussLaguerre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Nodes and weights for int_0^inf e^{-r} g(r) dr by Newton iteration on L_n.
inline const GaussLaguerre& gaussLaguerre() {
  static const GaussLaguerre rule = [] {
    constexpr int n = 48;
    GaussLaguerre r;
    r.nodes.resize(n);
    r.weights.resize(n);
    double z = 0.0;
    for (int i = 0; i < n; ++i) {
      if (i == 0) {
        z = 3.0 / (1.0 + 2.4 * n);
      } else if (i == 1) {
        z += 15.0 / (1.0 + 2.5 * n);
      } else {
        const double ai = i - 1;
        z += ((1.0 + 2.55 * ai) / (1.9 * ai)) * (z - r.nodes[static_cast<std::size_t>(i - 2)]);
      }
      double p1 = 0.0, p2 = 0.0, derivative = 0.0;
      for (int iteration = 0; iteration < 100; ++iteration) {
        p1 = 1.0;
        p2 = 0.0;
        for (int j = 1; j <= n; ++j) {
          const double p3 = p2;
          p2 = p1;
          p1 = ((2 * j - 1 - z) * p2 - (j - 1) * p3) / j;
        }
        derivative = (n * p1 - n * p2) / z;
        const double previous = z;
        z = previous - p1 / derivative;
        if (std::abs(z - previous) <= 1e-15 * std::max(1.0, z)) break;
      }
      r.nodes[static_cast<std::size_t>(i)] = z;
      r.weights[static_cast<std::size_t>(i)] = -1.0 / (derivative * n * p2);
    }
    return r;
  }();
  return rule;
}

// G_k(theta) = int_1^inf u^{-k} e^{-i theta u} du, evaluated by rotating the
// contour to u = 1 - i s (theta > 0), which turns it into a Laplace integral.
inline cplx powerTailIntegral(double k, double theta) {
  if (theta < 0.0) return std::conj(powerTailIntegral(k, -theta));
  if (theta < 1e-12) {
    if (!(k > 1.0))
      throw TruncationError("inversion::tail", "non-integrable power tail at zero frequency");
    return 1.0 / (k - 1.0);
  }
  cplx laplace;
  if (theta >= 60.0) {
    const auto& rule = gaussLaguerre();
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      laplace += rule.weights[i] * std::pow(cplx(1.0, -rule.nodes[i] / theta), -k);
  } else {
    auto integrand = [&](double r) {
      return std::pow(cplx(1.0, -r / theta), -k) * std::exp(-r);
    };
    auto result = quad::integrateToInfinity(integrand, 0.0, std::min(1.0, theta), 1e-16, 1e-12);
    if (!result.converged)
      throw ConvergenceError("inversion::tail", "tail integral did not converge");
    laplace = result.value;
  }
  return cplx(0.0, -1.0) * std::exp(cplx(0.0, -theta)) * laplace / theta;
}

// sum_{m >= 0} (1 + m/K)^{-k} z^m for |z| = 1, k > 1, from
// (1 + m/K)^{-k} = Gamma(k)^{-1} int_0^inf s^{k-1} e^{-s(1+m/K)} ds with s = u^2.
inline cplx latticePowerTail(double k, double K, cplx z) {
  const cplx gap = 1.0 - z;
  auto integrand = [&](double u) {
    const double s = u * u;
    return std::pow(u, 2.0 * k - 1.0) * std::exp(-s) / (gap - z * std::expm1(-s / K));
  };
  const double scale = K / (k - 1.0);
  auto result = quad::integrate(integrand, 0.0, std::sqrt(k) + 7.0, 1e-15 * scale, 1e-12, 20000);
  if (!result.converged)
    throw ConvergenceError("inversion::tail", "lattice tail sum did not converge");
  return 2.0 * result.value / std::tgamma(k);
}

}  // namespace detail

/// Power-law model cf(t) ~ cf(T) (T/t)^k e^{i omega (t-T)} for t >= T.
struct PowerTail {
  double cutoff = 0.0;
  cplx valueAtCutoff;
  double exponent = 0.0;
  double drift = 0.0;

  /// int_T^inf t^{-extra} cf(t) e^{-itx} dt under the model, for extra >= 0.
  cplx integral(double x, double extra = 0.0) const {
    const double k = exponent + extra;
    return valueAtCutoff * std::exp(cplx(0.0, -drift * cutoff)) *
           std::pow(cutoff, 1.0 - extra) * detail::powerTailIntegral(k, (x - drift) * cutoff);
  }
};

enum class InversionMethod {
  /// CF negligible beyond the cutoff.
  Truncated,
  /// Power-law CF tail added analytically beyond the cutoff.
  PowerTail,
  /// Slowly decaying CF (unbounded density): the grid holds the density of
  /// X + sigma Z with sigma ~ 1.2 grid steps, Z standard normal.
  Smoothed,
};

inline const char* inversionMethodName(InversionMethod m) {
  switch (m) {
    case InversionMethod::Truncated: return "truncated";
    case InversionMethod::PowerTail: return "power-tail";
    case InversionMethod::Smoothed: return "smoothed";
  }
  return "?";
}

struct XRange {
  double lo = -10.0;
  double hi = 10.0;
};

struct DensityGrid {
  std::vector<double> x;
  std::vector<double> pdf;
  double dx = 0.0;
  double totalMass = 0.0;
  /// |cf| at the cutoff for truncated grids; modelled tail magnitude otherwise.
  double truncationBound = 0.0;
  double tCutoff = 0.0;
  double smoothingBandwidth = 0.0;
  double decayExponent = 0.0;
  /// max |cf(-t) - conj cf(t)| over the probe abscissae.
  double imagResidue = 0.0;
  InversionMethod method = InversionMethod::Truncated;

  /// Linear interpolation between nodes; 0 outside the grid.
  double interpolate(double at) const {
    if (x.empty() || at < x.front() || at > x.back()) return 0.0;
    const double position = (at - x.front()) / dx;
    const auto i = std::min(static_cast<std::size_t>(position), x.size() - 2);
    const double w = position - static_cast<double>(i);
    return (1.0 - w) * pdf[i] + w * pdf[i + 1];
  }

  /// Trapezoid CDF at the nodes, normalized to end at 1.
  std::vector<double> cumulative() const {
    std::vector<double> cdf(pdf.size(), 0.0);
    for (std::size_t i = 1; i < pdf.size(); ++i)
      cdf[i] = cdf[i - 1] + 0.5 * dx * (pdf[i - 1] + pdf[i]);
    const double total = cdf.back();
    if (total > 0.0)
      for (double& c : cdf) c /= total;
    return cdf;
  }
};

namespace detail {

inline bool isPowerOfTwo(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t nextPowerOfTwo(double n) {
  std::size_t p = 1;
  while (static_cast<double>(p) < n) p <<= 1;
  return p;
}

inline double localExponent(double nearer, double farther) {
  return std::log2(nearer / farther);
}

struct DecayClass {
  InversionMethod method = InversionMethod::Truncated;
  double cutoff = 0.0;
  double modulus = 0.0;
  double exponent = 0.0;
};

// Walks t = 1, 2, 4, ..., 2^16 and stops at the first decision: |cf| below
// 1e-12 (truncate), or a settled local exponent log2|cf(T/2)/cf(T)|, which
// selects smoothing (<= 1.5) or an analytic power tail once the model error
// |cf(T)| T dk is negligible.
inline DecayClass classifyDecay(const CFBatch& cf) {
  constexpr const char* kWhere = "inversion::pdfGrid";
  std::vector<double> modulus;
  double kNear = std::numeric_limits<double>::quiet_NaN();
  DecayClass result;
  for (int j = 0;; ++j) {
    const double t = std::ldexp(1.0, j);
    const std::array<double, 1> ts = {t};
    modulus.push_back(std::abs(cf(ts)[0]));
    result.cutoff = t;
    result.modulus = modulus.back();
    if (modulus.back() < kCFNegligible) {
      result.method = InversionMethod::Truncated;
      return result;
    }
    if (j == 0) continue;
    const double kFar = localExponent(modulus[modulus.size() - 2], modulus.back());
    const double drift = std::abs(kFar - kNear);
    kNear = kFar;
    result.exponent = kFar;
    const bool last = t >= kMaxTCutoff;
    if (j >= 7 && (drift < 1e-3 || last)) {
      if (!(kFar > 0.0)) throw TruncationError(kWhere, "characteristic function does not decay");
      if (kFar <= 1.5) {
        result.method = InversionMethod::Smoothed;
        return result;
      }
      if (modulus.back() * t * drift < 3e-11) {
        result.method = InversionMethod::PowerTail;
        return result;
      }
    }
    if (last) throw TruncationError(kWhere, "CF tail neither negligible nor a stable power law");
  }
}

// Fits the power-tail model at T from CF values at T - h and T.
inline PowerTail powerTailAt(const CFBatch& cf, double cutoff, double h) {
  const std::array<double, 2> ts = {cutoff - h, cutoff};
  const auto v = cf(ts);
  PowerTail tail;
  tail.cutoff = cutoff;
  tail.valueAtCutoff = v[1];
  tail.exponent = std::log(std::abs(v[0]) / std::abs(v[1])) / std::log(cutoff / (cutoff - h));
  tail.drift = std::arg(v[1] / v[0]) / h;
  return tail;
}

}  // namespace detail

/// Density on nPoints equally spaced abscissae lo + j (hi-lo)/nPoints by
/// discrete Fourier inversion of the CF on the matching t-grid (step
/// 2 pi/(hi-lo)). tCutoff <= 0 selects the cutoff adaptively; an explicit
/// cutoff requires |cf(tCutoff)| < 1e-12.
inline DensityGrid pdfGrid(const CFBatch& cf, XRange range, std::size_t nPoints,
                           double tCutoff = 0.0) {
  constexpr const char* kWhere = "inversion::pdfGrid";
  if (!detail::isPowerOfTwo(nPoints) || nPoints < 1024)
    throw DomainError(kWhere, "nPoints must be a power of two >= 1024");
  if (!(range.hi > range.lo) || !std::isfinite(range.lo) || !std::isfinite(range.hi))
    throw DomainError(kWhere, "invalid x-range");

  const double width = range.hi - range.lo;
  const double h = kTwoPi / width;
  DensityGrid grid;
  grid.dx = width / static_cast<double>(nPoints);

  // Hermitian probe.
  {
    const std::array<double, 6> ts = {0.5, 1.0, 2.0, -0.5, -1.0, -2.0};
    const auto v = cf(ts);
    for (int i = 0; i < 3; ++i)
      grid.imagResidue = std::max(grid.imagResidue, std::abs(v[static_cast<std::size_t>(i + 3)] -
                                                             std::conj(v[static_cast<std::size_t>(i)])));
    if (grid.imagResidue > 1e-8)
      throw DomainError(kWhere, "CF is not Hermitian (imaginary residue " +
                                    std::to_string(grid.imagResidue) + ")");
  }

  double cutoff = 0.0;
  PowerTail tail;
  if (tCutoff > 0.0) {
    const std::array<double, 1> ts = {tCutoff};
    const double modulus = std::abs(cf(ts)[0]);
    if (!(modulus < kCFNegligible))
      throw TruncationError(kWhere, "|cf(tCutoff)| = " + std::to_string(modulus) + " >= 1e-12");
    cutoff = tCutoff;
    grid.method = InversionMethod::Truncated;
    grid.truncationBound = modulus;
  } else {
    const auto decay = detail::classifyDecay(cf);
    grid.method = decay.method;
    grid.decayExponent = decay.exponent;
    cutoff = decay.cutoff;
    if (decay.method == InversionMethod::Truncated) grid.truncationBound = decay.modulus;
  }

  std::size_t fftSize = nPoints;
  std::size_t count = nPoints;
  if (grid.method == InversionMethod::Smoothed) {
    // Gaussian window exp(-sigma^2 t^2 / 2) negligible at t = 2 pi / dx.
    grid.smoothingBandwidth = 7.8 * grid.dx / kTwoPi;
  } else {
    count = static_cast<std::size_t>(std::ceil(cutoff / h));
    fftSize = std::max(nPoints, detail::nextPowerOfTwo(static_cast<double>(count)));
    if (grid.method == InversionMethod::Truncated) ++count;
  }
  count = std::min(count, fftSize);
  // PowerTail: the FFT holds k < K and the lattice tail k >= K is summed
  // from the model.
  const std::size_t tailStart = count;
  grid.tCutoff = h * static_cast<double>(grid.method == InversionMethod::PowerTail ? tailStart : count - 1);

  std::vector<double> ts(count);
  for (std::size_t k = 0; k < count; ++k) ts[k] = h * static_cast<double>(k);
  const auto values = cf(ts);

  if (grid.method == InversionMethod::PowerTail) {
    tail = detail::powerTailAt(cf, grid.tCutoff, h);
    grid.decayExponent = tail.exponent;
    grid.truncationBound = std::abs(tail.valueAtCutoff) * grid.tCutoff / (tail.exponent - 1.0);
  }

  std::vector<cplx> buffer(fftSize, cplx(0.0));
  const double sigma2 = grid.smoothingBandwidth * grid.smoothingBandwidth;
  for (std::size_t k = 0; k < count; ++k) {
    double weight = (k == 0) ? 0.5 : 1.0;
    if (grid.method == InversionMethod::Smoothed) weight *= std::exp(-0.5 * sigma2 * ts[k] * ts[k]);
    buffer[k] = weight * values[k] * std::exp(cplx(0.0, -ts[k] * range.lo));
  }
  fftForward(buffer);

  const std::size_t stride = fftSize / nPoints;
  grid.x.resize(nPoints);
  grid.pdf.resize(nPoints);
  for (std::size_t i = 0; i < nPoints; ++i) {
    const double x = range.lo + grid.dx * static_cast<double>(i);
    cplx sum = buffer[i * stride];
    if (grid.method == InversionMethod::PowerTail) {
      const cplx ratio = std::exp(cplx(0.0, h * (tail.drift - x)));
      sum += tail.valueAtCutoff * std::exp(cplx(0.0, -grid.tCutoff * x)) *
             detail::latticePowerTail(tail.exponent, static_cast<double>(tailStart), ratio);
    }
    grid.x[i] = x;
    grid.pdf[i] = h * sum.real() / kPi;
  }

  const double minimum = *std::min_element(grid.pdf.begin(), grid.pdf.end());
  if (minimum < -1e-10)
    throw AliasError(kWhere, "negative density " + std::to_string(minimum) +
                                 " (x-range too narrow or grid too coarse)");
  for (double& p : grid.pdf) p = std::max(p, 0.0);
  grid.totalMass = grid.dx * std::accumulate(grid.pdf.begin(), grid.pdf.end(), 0.0);
  if (std::abs(grid.totalMass - 1.0) > 1e-6)
    throw AliasError(kWhere, "grid mass " + std::to_string(grid.totalMass) + " differs from 1");
  const std::size_t band = std::max<std::size_t>(1, nPoints / 100);
  const double edgeMass =
      grid.dx * (std::accumulate(grid.pdf.begin(), grid.pdf.begin() + static_cast<std::ptrdiff_t>(band), 0.0) +
                 std::accumulate(grid.pdf.end() - static_cast<std::ptrdiff_t>(band), grid.pdf.end(), 0.0));
  if (edgeMass > 1e-6)
    throw AliasError(kWhere, "mass " + std::to_string(edgeMass) +
                                 " near the range edges; widen the x-range");
  return grid;
}

inline DensityGrid pdfGrid(const CFEvaluator& cf, XRange range, std::size_t nPoints,
                           double tCutoff = 0.0) {
  return pdfGrid(batchOf(cf), range, nPoints, tCutoff);
}

/// mean +/- halfWidthSd standard deviations, moments from the CF.
inline XRange defaultXRange(const CFEvaluator& cf, double halfWidthSd = 40.0) {
  const auto [mean, sd] = meanAndStdFromCF(cf);
  return {mean - halfWidthSd * sd, mean + halfWidthSd * sd};
}

namespace detail {

// int_T^inf cf(t)/t e^{-itx} dt by integration by parts,
// e^{-i theta T} sum_m g^(m)(T) / (i theta)^{m+1} with g(t) = cf(t) e^{-i omega t}/t,
// theta = x - omega and omega the local phase drift of cf. Three terms; the
// last one is returned as the error estimate.
inline std::pair<cplx, double> tailByParts(const CFEvaluator& cf, double x, double cutoff) {
  const double s = 2e-3 * cutoff;
  const cplx previous = cf(cutoff - s);
  const cplx atCutoff = cf(cutoff);
  const double omega = std::abs(previous) > 0.0 ? std::arg(atCutoff / previous) / s : 0.0;
  const double theta = x - omega;
  if (!(std::abs(theta) * cutoff >= 50.0)) return {0.0, std::numeric_limits<double>::infinity()};
  auto g = [&](double t) { return cf(t) * std::exp(cplx(0.0, -omega * t)) / t; };
  const cplx gm2 = g(cutoff - 2 * s), gm1 = g(cutoff - s), g0 = g(cutoff), gp1 = g(cutoff + s),
             gp2 = g(cutoff + 2 * s);
  const cplx d1 = (-gp2 + 8.0 * gp1 - 8.0 * gm1 + gm2) / (12.0 * s);
  const cplx d2 = (-gp2 + 16.0 * gp1 - 30.0 * g0 + 16.0 * gm1 - gm2) / (12.0 * s * s);
  const cplx it(0.0, theta);
  const cplx last = d2 / (it * it * it);
  const cplx value = std::exp(cplx(0.0, -theta * cutoff)) * (g0 / it + d1 / (it * it) + last);
  return {value, std::abs(last)};
}

}  // namespace detail

/// F(x) = 1/2 - (1/pi) int_0^inf im(e^{-itx} cf(t))/t dt, clamped to [0, 1].
/// The integral runs over panels [0,1], [1,2], [2,4], ... until the CF is
/// negligible or the remaining tail is captured by an integration-by-parts
/// expansion (|x - drift| T large) or a power-law model (x near the drift).
/// An explicit tCutoff stops the panels there.
inline double cdfAt(const CFEvaluator& cf, double x, double tCutoff = 0.0) {
  constexpr const char* kWhere = "inversion::cdfAt";
  auto integrand = [&](double t) {
    return (std::exp(cplx(0.0, -t * x)) * cf(t)).imag() / t;
  };
  constexpr double kTailTolerance = 1e-11;
  const double limit = tCutoff > 0.0 ? tCutoff : kMaxTCutoff;
  double integral = 0.0;
  double lo = 0.0;
  double hi = std::min(1.0, limit);
  double previousExponent = std::numeric_limits<double>::quiet_NaN();
  while (true) {
    const double oscillation = std::max(1.0, std::abs(x) * (hi - lo) / kTwoPi);
    auto part = quad::integrate(integrand, lo, hi, 1e-13, 1e-12,
                                static_cast<int>(std::min(2e5, 400.0 + 50.0 * oscillation)));
    if (!part.converged && part.error > 1e-9)
      throw ConvergenceError(kWhere, "Gil-Pelaez quadrature failed near t=" + std::to_string(hi));
    integral += part.value;
    const double modulus = std::abs(cf(hi));
    if (modulus < kCFNegligible) break;
    if (const auto [tail, error] = detail::tailByParts(cf, x, hi); error < kTailTolerance) {
      integral += tail.imag();
      break;
    }
    const double exponent = detail::localExponent(std::abs(cf(0.5 * hi)), modulus);
    const double exponentDrift = std::abs(exponent - previousExponent);
    if (hi >= limit || (hi >= 256.0 && exponentDrift < 1e-3)) {
      if (!(exponent > 0.0)) throw TruncationError(kWhere, "characteristic function does not decay");
      PowerTail tail;
      tail.cutoff = hi;
      tail.valueAtCutoff = cf(hi);
      tail.exponent = exponent;
      const double step = 2e-3 * hi;
      tail.drift = std::arg(tail.valueAtCutoff / cf(hi - step)) / step;
      const double correction = tail.integral(x, 1.0).imag();
      const double error = std::abs(correction) * exponentDrift;
      if (error < kTailTolerance || hi >= limit) {
        if (!(error < 1e-6)) throw TruncationError(kWhere, "CF tail too heavy for the cutoff");
        integral += correction;
        break;
      }
    }
    previousExponent = exponent;
    lo = hi;
    hi = std::min(2.0 * hi, limit);
  }
  return std::clamp(0.5 - integral / kPi, 0.0, 1.0);
}

/// x with |cdfAt(x) - q| <= 1e-6, by bracketing then bisection.
inline double quantile(const CFEvaluator& cf, double q, double tCutoff = 0.0) {
  constexpr const char* kWhere = "inversion::quantile";
  if (!(q > 0.0 && q < 1.0)) throw DomainError(kWhere, "q must lie in (0, 1)");
  double lo = -1.0, hi = 1.0;
  double flo = cdfAt(cf, lo, tCutoff), fhi = cdfAt(cf, hi, tCutoff);
  for (int i = 0; i < 64 && !(flo <= q && q <= fhi); ++i) {
    if (flo > q) {
      hi = lo;
      fhi = flo;
      lo *= 2.0;
      flo = cdfAt(cf, lo, tCutoff);
    } else {
      lo = hi;
      flo = fhi;
      hi *= 2.0;
      fhi = cdfAt(cf, hi, tCutoff);
    }
  }
  if (!(flo <= q && q <= fhi)) throw BracketError(kWhere, "could not bracket the quantile");
  double mid = 0.5 * (lo + hi);
  for (int i = 0; i < 200; ++i) {
    mid = 0.5 * (lo + hi);
    const double fm = cdfAt(cf, mid, tCutoff);
    if (std::abs(fm - q) <= 1e-10 || hi - lo <= 1e-13 * std::max(1.0, std::abs(mid))) break;
    (fm < q ? lo : hi) = mid;
  }
  return mid;
}

/// Monotone cubic (Fritsch-Carlson) interpolation of CDF values on a grid.
class CdfTable {
 public:
  CdfTable(std::vector<double> x, std::vector<double> cdf) : x_(std::move(x)), f_(std::move(cdf)) {
    if (x_.size() < 2 || x_.size() != f_.size())
      throw DomainError("inversion::CdfTable", "need matching abscissae and values");
    for (std::size_t i = 1; i < f_.size(); ++i) f_[i] = std::max(f_[i], f_[i - 1]);
    const std::size_t n = x_.size();
    std::vector<double> secant(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) secant[i] = (f_[i + 1] - f_[i]) / (x_[i + 1] - x_[i]);
    slope_.assign(n, 0.0);
    slope_[0] = secant[0];
    slope_[n - 1] = secant[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i)
      slope_[i] = (secant[i - 1] * secant[i] <= 0.0) ? 0.0 : 0.5 * (secant[i - 1] + secant[i]);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (secant[i] == 0.0) {
        slope_[i] = slope_[i + 1] = 0.0;
        continue;
      }
      const double a = slope_[i] / secant[i];
      const double b = slope_[i + 1] / secant[i];
      const double norm = a * a + b * b;
      if (norm > 9.0) {
        const double tau = 3.0 / std::sqrt(norm);
        slope_[i] = tau * a * secant[i];
        slope_[i + 1] = tau * b * secant[i];
      }
    }
  }

  /// CDF values from cdfAt on n equally spaced nodes of [lo, hi].
  static CdfTable fromCF(const CFEvaluator& cf, double lo, double hi, std::size_t n) {
    std::vector<double> x(n), f(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
      f[i] = cdfAt(cf, x[i]);
    }
    return CdfTable(std::move(x), std::move(f));
  }

  static CdfTable fromDensity(const DensityGrid& grid) { return CdfTable(grid.x, grid.cumulative()); }

  double operator()(double at) const {
    if (at <= x_.front()) return f_.front();
    if (at >= x_.back()) return f_.back();
    const auto it = std::upper_bound(x_.begin(), x_.end(), at);
    const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
    const double span = x_[i + 1] - x_[i];
    const double s = (at - x_[i]) / span;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
    return std::clamp(h00 * f_[i] + h10 * span * slope_[i] + h01 * f_[i + 1] + h11 * span * slope_[i + 1],
                      0.0, 1.0);
  }

  /// Inverse by bisection on the interpolant.
  double inverse(double q) const {
    double lo = x_.front(), hi = x_.back();
    for (int i = 0; i < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++i) {
      const double mid = 0.5 * (lo + hi);
      ((*this)(mid) < q ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

 private:
  std::vector<double> x_;
  std::vector<double> f_;
  std::vector<double> slope_;
};

enum class TailSide { Left, Right };

struct TailReport {
  TailSide side = TailSide::Right;
  double slope = 0.0;
  double r2 = 0.0;
  std::pair<double, double> window;
  std::size_t points = 0;
};

/// Least-squares line through log pdf on the quantile window of one tail.
inline TailReport tailDiagnostic(const DensityGrid& grid, TailSide side,
                                 std::pair<double, double> quantileWindow = {0.995, 0.9999}) {
  constexpr const char* kWhere = "inversion::tailDiagnostic";
  const auto [qLow, qHigh] = quantileWindow;
  if (!(0.5 < qLow && qLow < qHigh && qHigh < 1.0))
    throw DomainError(kWhere, "quantile window must satisfy 0.5 < q1 < q2 < 1");
  const auto cdf = grid.cumulative();
  const auto locate = [&](double q) {
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), q);
    return grid.x[static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cdf.begin(),
                                                                    static_cast<std::ptrdiff_t>(cdf.size()) - 1))];
  };
  TailReport report;
  report.side = side;
  report.window = side == TailSide::Right ? std::make_pair(locate(qLow), locate(qHigh))
                                          : std::make_pair(locate(1.0 - qHigh), locate(1.0 - qLow));
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < grid.x.size(); ++i) {
    const double xi = grid.x[i];
    if (xi < report.window.first || xi > report.window.second || !(grid.pdf[i] > 0.0)) continue;
    const double yi = std::log(grid.pdf[i]);
    sx += xi;
    sy += yi;
    sxx += xi * xi;
    sxy += xi * yi;
    syy += yi * yi;
    ++n;
  }
  report.points = n;
  if (n < 50)
    throw RangeError(kWhere, "tail window resolved by only " + std::to_string(n) + " points (need 50)");
  const double dn = static_cast<double>(n);
  const double covXY = sxy - sx * sy / dn;
  const double varX = sxx - sx * sx / dn;
  const double varY = syy - sy * sy / dn;
  report.slope = covXY / varX;
  report.r2 = varY > 0.0 ? std::clamp(covXY * covXY / (varX * varY), 0.0, 1.0) : 1.0;
  return report;
}

}  // namespace nugh
