#pragma once

// Maximum-likelihood fitting of nu-GH laws (NIG base by default) to return
// series: ingestion, the grid-based likelihood, and a multi-start
// Nelder-Mead search in an unconstrained parametrization.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <deque>
#include <fstream>
#include <future>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "nugh/errors.hpp"
#include "nugh/gh.hpp"
#include "nugh/inversion.hpp"
#include "nugh/nu_families.hpp"
#include "nugh/nu_transform.hpp"
#include "nugh/random.hpp"

namespace nugh {

inline constexpr std::size_t kMinSeriesLength = 100;

struct ReturnSeries {
  std::vector<double> values;
  std::string source;

  std::size_t n() const { return values.size(); }
};

enum class SeriesFormat { Returns, Prices };

inline SeriesFormat parseSeriesFormat(const std::string& text) {
  if (text == "returns") return SeriesFormat::Returns;
  if (text == "prices") return SeriesFormat::Prices;
  throw DomainError("fitting::ingestSeries", "unknown format '" + text + "' (returns|prices)");
}

namespace detail {

inline std::vector<std::string> splitFields(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (char c : line) {
    if (c == ',' || c == ';' || std::isspace(static_cast<unsigned char>(c))) {
      if (!current.empty()) fields.push_back(std::move(current));
      current.clear();
    } else {
      current += c;
    }
  }
  if (!current.empty()) fields.push_back(std::move(current));
  return fields;
}

inline bool parseDouble(const std::string& text, double& value) {
  std::size_t used = 0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    return false;
  }
  return used == text.size();
}

}  // namespace detail

/// Parses one numeric column (optional non-numeric header on the first row)
/// from a stream. Rows are numbered from 1 as physical lines.
inline ReturnSeries parseSeries(std::istream& in, SeriesFormat format, std::string source) {
  constexpr const char* kWhere = "fitting::ingestSeries";
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  while (!lines.empty() && detail::splitFields(lines.back()).empty()) lines.pop_back();
  if (!lines.empty() && lines[0].rfind("\xEF\xBB\xBF", 0) == 0) lines[0].erase(0, 3);

  std::vector<double> raw;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const long row = static_cast<long>(i + 1);
    const auto fields = detail::splitFields(lines[i]);
    if (fields.empty()) throw ParseError(kWhere, row, "blank row");
    if (fields.size() > 1) throw ParseError(kWhere, row, "expected one column, found " + std::to_string(fields.size()));
    double value = 0.0;
    if (!detail::parseDouble(fields[0], value)) {
      if (i == 0) continue;  // header
      throw ParseError(kWhere, row, "not a number: '" + fields[0] + "'");
    }
    if (!std::isfinite(value)) throw ParseError(kWhere, row, "non-finite value");
    if (format == SeriesFormat::Prices && !(value > 0.0)) throw ParseError(kWhere, row, "price must be > 0");
    raw.push_back(value);
  }

  ReturnSeries series;
  series.source = std::move(source);
  if (format == SeriesFormat::Prices) {
    for (std::size_t i = 1; i < raw.size(); ++i) series.values.push_back(std::log(raw[i]) - std::log(raw[i - 1]));
  } else {
    series.values = std::move(raw);
  }
  return series;
}

/// Reads a series file; fewer than 100 values is InsufficientData.
inline ReturnSeries ingestSeries(const std::string& path, SeriesFormat format) {
  std::ifstream in(path);
  if (!in) throw DomainError("fitting::ingestSeries", "cannot open '" + path + "'");
  auto series = parseSeries(in, format, path);
  if (series.n() < kMinSeriesLength)
    throw InsufficientData("fitting::ingestSeries",
                           std::to_string(series.n()) + " values (need at least " + std::to_string(kMinSeriesLength) + ")");
  return series;
}

inline constexpr std::size_t kLikelihoodGridPoints = 1u << 13;
inline constexpr double kDensityFloor = 1e-300;

/// Mean and standard deviation of a nu-GH law: E[A] = 1 and Var A = 1
/// (geometric) or 2/3 (Chebyshev) for the NIG base, finite differences
/// of the CF otherwise.
inline std::pair<double, double> nuGHMeanStd(const NuGHChar& spec) {
  const GHParams& p = spec.gh();
  if (p.lambda == -0.5) {
    const double gamma = p.gamma();
    const double mean = p.mu + p.beta * p.delta / gamma;
    const double variance = p.delta * p.alpha * p.alpha / (gamma * gamma * gamma);
    const double mixingVariance = spec.family().kind == FamilyKind::Geometric ? 1.0 : 2.0 / 3.0;
    return {mean, std::sqrt(variance + mixingVariance * mean * mean)};
  }
  return meanAndStdFromCF([&spec](double t) { return spec(t); });
}

/// Density grid of a nu-GH law over mean +/- 40 sd, widened to cover `cover`.
inline DensityGrid nuGHDensity(const NuFamily& family, const GHParams& params, XRange cover,
                               std::size_t nPoints = kLikelihoodGridPoints) {
  const NuGHChar spec(family, params);
  const auto [mean, sd] = nuGHMeanStd(spec);
  XRange range{mean - 40.0 * sd, mean + 40.0 * sd};
  range.lo = std::min(range.lo, cover.lo - 5.0 * sd);
  range.hi = std::max(range.hi, cover.hi + 5.0 * sd);
  return pdfGrid([&spec](std::span<const double> ts) { return spec.evaluateGrid(ts); }, range, nPoints);
}

inline double negLogLik(const DensityGrid& grid, std::span<const double> data) {
  double total = 0.0;
  for (double x : data) total -= std::log(std::max(grid.interpolate(x), kDensityFloor));
  return total;
}

inline XRange dataRange(std::span<const double> data) {
  const auto [lo, hi] = std::minmax_element(data.begin(), data.end());
  return {*lo, *hi};
}

/// -sum log pdf(x_i) from the inversion grid, linear between nodes.
inline double negLogLik(const NuFamily& family, const GHParams& params, const ReturnSeries& data) {
  validateParams(params);
  if (data.values.empty()) return 0.0;
  return negLogLik(nuGHDensity(family, params, dataRange(data.values)), data.values);
}

/// Unconstrained coordinates: beta = b, alpha = |b| + e^a, delta = e^d, mu,
/// and optionally lambda = 25 tanh(l).
struct Reparametrization {
  bool freeLambda = false;
  double fixedLambda = -0.5;

  std::size_t dimension() const { return freeLambda ? 5 : 4; }

  GHParams toParams(std::span<const double> v) const {
    GHParams p;
    p.beta = v[0];
    p.alpha = std::abs(v[0]) + std::exp(v[1]);
    p.delta = std::exp(v[2]);
    p.mu = v[3];
    p.lambda = freeLambda ? kMaxGHLambda * std::tanh(v[4]) : fixedLambda;
    return p;
  }

  std::vector<double> fromParams(const GHParams& p) const {
    std::vector<double> v = {p.beta, std::log(p.alpha - std::abs(p.beta)), std::log(p.delta), p.mu};
    if (freeLambda) v.push_back(std::atanh(p.lambda / kMaxGHLambda));
    return v;
  }
};

struct NelderMeadOptions {
  double diameterTolerance = 1e-6;
  int maxIterations = 3000;
};

struct NelderMeadResult {
  std::vector<double> point;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Nelder-Mead with standard coefficients; converged when every vertex lies
/// within diameterTolerance (max-norm) of the best one.
template <class F>
NelderMeadResult nelderMead(F&& objective, std::vector<double> start, std::vector<double> steps,
                            const NelderMeadOptions& options = {}) {
  const std::size_t n = start.size();
  std::vector<std::vector<double>> simplex(n + 1, start);
  std::vector<double> values(n + 1);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += steps[i];
  for (std::size_t i = 0; i <= n; ++i) values[i] = objective(simplex[i]);

  auto combine = [&](const std::vector<double>& a, const std::vector<double>& b, double w) {
    std::vector<double> r(n);
    for (std::size_t k = 0; k < n; ++k) r[k] = a[k] + w * (b[k] - a[k]);
    return r;
  };

  NelderMeadResult result;
  std::vector<std::size_t> order(n + 1);
  for (result.iterations = 0; result.iterations < options.maxIterations; ++result.iterations) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const auto& best = simplex[order[0]];
    double diameter = 0.0;
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t k = 0; k < n; ++k) diameter = std::max(diameter, std::abs(simplex[order[i]][k] - best[k]));
    if (diameter < options.diameterTolerance) {
      result.converged = true;
      break;
    }
    const std::size_t worst = order[n], second = order[n - 1];
    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[order[i]][k] / static_cast<double>(n);

    const auto reflected = combine(centroid, simplex[worst], -1.0);
    const double fr = objective(reflected);
    if (fr < values[order[0]]) {
      const auto expanded = combine(centroid, simplex[worst], -2.0);
      const double fe = objective(expanded);
      if (fe < fr) {
        simplex[worst] = expanded;
        values[worst] = fe;
      } else {
        simplex[worst] = reflected;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second]) {
      simplex[worst] = reflected;
      values[worst] = fr;
      continue;
    }
    const bool outside = fr < values[worst];
    const auto contracted = outside ? combine(centroid, reflected, 0.5) : combine(centroid, simplex[worst], 0.5);
    const double fc = objective(contracted);
    if (fc < (outside ? fr : values[worst])) {
      simplex[worst] = contracted;
      values[worst] = fc;
      continue;
    }
    for (std::size_t i = 1; i <= n; ++i) {
      simplex[order[i]] = combine(simplex[order[0]], simplex[order[i]], 0.5);
      values[order[i]] = objective(simplex[order[i]]);
    }
  }
  const auto bestIndex = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
  result.point = simplex[bestIndex];
  result.value = values[bestIndex];
  return result;
}

/// Likelihood in the unconstrained coordinates with a per-instance density
/// cache keyed by the coordinates rounded to 1e-8. Failing inversions
/// (extreme candidates) score +inf.
class LikelihoodObjective {
 public:
  LikelihoodObjective(NuFamily family, std::shared_ptr<const std::vector<double>> data, Reparametrization map)
      : family_(family), data_(std::move(data)), map_(map), cover_(dataRange(*data_)) {}

  double operator()(std::span<const double> v) {
    ++evaluations_;
    const GHParams params = map_.toParams(v);
    if (!(params.alpha > std::abs(params.beta)) || !(params.delta > 0.0) || !std::isfinite(params.mu))
      return std::numeric_limits<double>::infinity();
    validateParams(params);
    std::vector<std::int64_t> key;
    for (double x : v) key.push_back(static_cast<std::int64_t>(std::llround(x * 1e8)));
    if (auto it = cache_.find(key); it != cache_.end()) return negLogLik(*it->second, *data_);
    std::shared_ptr<const DensityGrid> grid;
    try {
      grid = std::make_shared<const DensityGrid>(nuGHDensity(family_, params, cover_));
    } catch (const Error& e) {
      if (e.isValidation()) throw;
      return std::numeric_limits<double>::infinity();
    }
    cache_.emplace(key, grid);
    order_.push_back(key);
    if (order_.size() > kCacheSize) {
      cache_.erase(order_.front());
      order_.pop_front();
    }
    return negLogLik(*grid, *data_);
  }

  long evaluations() const { return evaluations_; }

 private:
  static constexpr std::size_t kCacheSize = 32;
  NuFamily family_;
  std::shared_ptr<const std::vector<double>> data_;
  Reparametrization map_;
  XRange cover_;
  std::map<std::vector<std::int64_t>, std::shared_ptr<const DensityGrid>> cache_;
  std::deque<std::vector<std::int64_t>> order_;
  long evaluations_ = 0;
};

struct FitOptions {
  int starts = 5;
  std::uint64_t seed = Rng::kDefaultSeed;
  bool freeLambda = false;
  double lambda = -0.5;
  NelderMeadOptions optimizer;
};

struct FitResult {
  NuFamily family;
  GHParams params;
  double negLogLik = 0.0;
  int iterations = 0;
  bool converged = false;
  std::uint64_t seed = 0;
  int starts = 0;
  int bestStart = 0;
  /// Description of the start points.
  std::string seedGrid;
};

namespace detail {

inline double median(std::vector<double> v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

// Symmetric moment-matched start: NIG(alpha = 1/sd, beta = 0, delta = sd) has
// variance sd^2, location at the sample median.
inline GHParams momentStart(const std::vector<double>& data, double lambda) {
  const double n = static_cast<double>(data.size());
  const double mean = std::accumulate(data.begin(), data.end(), 0.0) / n;
  double m2 = 0.0;
  for (double x : data) m2 += (x - mean) * (x - mean);
  const double sd = std::sqrt(m2 / n);
  const auto [lo, hi] = std::minmax_element(data.begin(), data.end());
  if (*lo == *hi || !(sd > 1e-12 * std::abs(mean))) throw DomainError("fitting::fitMLE", "degenerate series (zero variance)");
  GHParams p;
  p.lambda = lambda;
  p.alpha = 1.0 / sd;
  p.beta = 0.0;
  p.delta = sd;
  p.mu = median(data);
  return p;
}

inline std::vector<double> startSteps(const std::vector<double>& origin, double sd) {
  std::vector<double> steps = {0.2 / sd, 0.3, 0.3, 0.2 * sd};
  if (origin.size() == 5) steps.push_back(0.02);
  return steps;
}

}  // namespace detail

/// Multi-start maximum likelihood; start 0 is moment-matched and start i > 0
/// perturbs it with Rng(seed, i). Starts run concurrently and the smallest
/// negLogLik wins, ties going to the lowest start index.
inline FitResult fitMLE(const NuFamily& family, const ReturnSeries& data, const FitOptions& options = {}) {
  constexpr const char* kWhere = "fitting::fitMLE";
  if (data.n() < kMinSeriesLength)
    throw InsufficientData(kWhere, std::to_string(data.n()) + " values (need at least 100)");
  for (double x : data.values)
    if (!std::isfinite(x)) throw DomainError(kWhere, "series contains non-finite values");
  if (options.starts < 1) throw DomainError(kWhere, "starts must be >= 1");

  const Reparametrization map{options.freeLambda, options.lambda};
  const GHParams origin = detail::momentStart(data.values, options.freeLambda ? -0.5 : options.lambda);
  validateParams(origin);
  const double sd = origin.delta;
  const auto originPoint = map.fromParams(origin);
  auto shared = std::make_shared<const std::vector<double>>(data.values);

  std::vector<std::future<NelderMeadResult>> jobs;
  for (int s = 0; s < options.starts; ++s) {
    std::vector<double> start = originPoint;
    if (s > 0) {
      Rng rng(options.seed, static_cast<std::uint64_t>(s));
      start[0] += 0.5 * rng.normal() / sd;
      start[1] += 0.5 * rng.normal();
      start[2] += 0.5 * rng.normal();
      start[3] += 0.25 * sd * rng.normal();
      if (start.size() == 5) start[4] += 0.02 * rng.normal();
    }
    jobs.push_back(std::async(std::launch::async, [=, &options] {
      LikelihoodObjective objective(family, shared, map);
      return nelderMead([&objective](std::span<const double> v) { return objective(v); }, start,
                        detail::startSteps(start, sd), options.optimizer);
    }));
  }

  std::vector<NelderMeadResult> results;
  for (auto& j : jobs) results.push_back(j.get());
  std::size_t best = 0;
  for (std::size_t s = 1; s < results.size(); ++s)
    if (results[s].value < results[best].value) best = s;

  FitResult fit;
  fit.family = family;
  fit.params = map.toParams(results[best].point);
  fit.negLogLik = results[best].value;
  fit.iterations = results[best].iterations;
  fit.converged = results[best].converged && std::isfinite(fit.negLogLik);
  fit.seed = options.seed;
  fit.starts = options.starts;
  fit.bestStart = static_cast<int>(best);
  fit.seedGrid = "start 0 moment-matched NIG(alpha=1/sd, beta=0, delta=sd, mu=median); starts 1.." +
                 std::to_string(options.starts - 1) + " perturbed with Rng(seed, start)";
  return fit;
}

/// Parameter indices for profileNegLogLik.
enum class FitParameter { Alpha, Beta, Delta, Mu };

/// Minimum of negLogLik with one of (alpha, beta, delta, mu) held at `value`,
/// lambda fixed, started from `start`.
inline double profileNegLogLik(const NuFamily& family, const ReturnSeries& data, FitParameter which, double value,
                               const GHParams& start, const NelderMeadOptions& optimizer = {1e-5, 2000}) {
  auto shared = std::make_shared<const std::vector<double>>(data.values);
  const Reparametrization map{false, start.lambda};
  LikelihoodObjective objective(family, shared, map);
  // Free coordinates are the remaining three of (alpha, beta, delta, mu),
  // with alpha parametrized by its excess over |beta|.
  auto assemble = [&](std::span<const double> free) {
    GHParams p = start;
    std::size_t i = 0;
    auto next = [&] { return free[i++]; };
    p.beta = which == FitParameter::Beta ? value : next();
    if (which == FitParameter::Alpha) {
      p.alpha = value;
    } else {
      p.alpha = std::abs(p.beta) + std::exp(next());
    }
    p.delta = which == FitParameter::Delta ? value : std::exp(next());
    p.mu = which == FitParameter::Mu ? value : next();
    return p;
  };
  std::vector<double> origin;
  if (which != FitParameter::Beta) origin.push_back(start.beta);
  if (which != FitParameter::Alpha) origin.push_back(std::log(start.alpha - std::abs(start.beta)));
  if (which != FitParameter::Delta) origin.push_back(std::log(start.delta));
  if (which != FitParameter::Mu) origin.push_back(start.mu);
  std::vector<double> steps(origin.size(), 0.1);
  auto result = nelderMead(
      [&](std::span<const double> free) {
        const GHParams p = assemble(free);
        if (!(p.alpha > std::abs(p.beta))) return std::numeric_limits<double>::infinity();
        return objective(map.fromParams(p));
      },
      origin, steps, optimizer);
  return result.value;
}

}  // namespace nugh
