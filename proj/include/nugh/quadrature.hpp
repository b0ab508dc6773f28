#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature for real- or
// complex-valued integrands, plus a panel-doubling driver for [a, inf).

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <queue>
#include <type_traits>
#include <vector>

namespace nugh::quad {

template <class T>
struct Result {
  T value{};
  double error = 0.0;
  int evaluations = 0;
  bool converged = false;
};

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
struct Segment {
  double a;
  double b;
  T value;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

template <class F>
auto kronrod15(F& f, double a, double b) {
  using T = std::decay_t<decltype(f(a))>;
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const T fc = f(center);
  T kronrod = fc * kKronrodWeights[7];
  T gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const T f1 = f(center - dx);
    const T f2 = f(center + dx);
    kronrod += (f1 + f2) * kKronrodWeights[j];
    if (j % 2 == 1) gauss += (f1 + f2) * kGaussWeights[j / 2];
  }
  kronrod *= half;
  gauss *= half;
  return Segment<T>{a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace detail

/// Adaptive integration of f over [a, b]. Stops when the summed error
/// estimate is below max(absTol, relTol * |I|) or maxSegments is reached.
template <class F>
auto integrate(F&& f, double a, double b, double absTol, double relTol,
               int maxSegments = 4000) {
  using T = std::decay_t<decltype(f(a))>;
  Result<T> result;
  if (a == b) {
    result.converged = true;
    return result;
  }
  std::priority_queue<detail::Segment<T>> heap;
  heap.push(detail::kronrod15(f, a, b));
  result.evaluations = 15;
  T total = heap.top().value;
  double error = heap.top().error;
  int segments = 1;
  while (true) {
    const double target = std::max(absTol, relTol * std::abs(total));
    if (error <= target) {
      result.converged = true;
      break;
    }
    if (segments >= maxSegments) break;
    auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Interval cannot be split further in double precision.
      heap.push(worst);
      break;
    }
    auto left = detail::kronrod15(f, worst.a, mid);
    auto right = detail::kronrod15(f, mid, worst.b);
    result.evaluations += 30;
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++segments;
  }
  // Re-sum to shed the drift of the incremental updates.
  T sum{};
  double err = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  result.value = sum;
  result.error = err;
  return result;
}

/// Integral over [a, inf) by panels [a, a+w], [a+w, a+3w], ... of doubling
/// width. Stops after two consecutive panels contribute below the tolerance.
template <class F>
auto integrateToInfinity(F&& f, double a, double firstWidth, double absTol,
                         double relTol, int maxPanels = 80) {
  using T = std::decay_t<decltype(f(a))>;
  Result<T> result;
  double lo = a;
  double width = firstWidth;
  int quiet = 0;
  for (int panel = 0; panel < maxPanels; ++panel) {
    const double hi = lo + width;
    auto part = integrate(f, lo, hi, 0.25 * absTol, relTol);
    result.value += part.value;
    result.error += part.error;
    result.evaluations += part.evaluations;
    if (!part.converged) return result;
    const double scale = std::max(absTol, relTol * std::abs(result.value));
    quiet = std::abs(part.value) <= scale ? quiet + 1 : 0;
    if (quiet >= 2) {
      result.converged = true;
      return result;
    }
    lo = hi;
    width *= 2.0;
  }
  return result;
}

}  // namespace nugh::quad
