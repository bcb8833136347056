#pragma once

// Global-adaptive quadrature: Gauss-Kronrod (21 points) in one dimension and
// the degree-7 Genz-Malik rule on boxes in several dimensions. Both keep a
// priority queue of subregions keyed by error estimate and refine the worst
// one until the summed error meets the tolerance or the budget runs out.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <queue>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fourbody/errors.hpp"

namespace fourbody::quad {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

struct Tolerance {
  double abs = 1e-12;
  double rel = 1e-9;
  std::size_t max_evaluations = 2'000'000;

  bool satisfied(double value, double error) const {
    return error <= std::max(abs, rel * std::abs(value));
  }
};

namespace detail {

struct Segment {
  double lo, hi, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gk21(F& f, double lo, double hi) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
  using G = boost::math::quadrature::gauss<double, 10>;
  const auto& xk = GK::abscissa();
  const auto& wk = GK::weights();
  const auto& wg = G::weights();
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = f(mid);
  double kronrod = wk[0] * fc;
  double gauss = 0.0;  // the 10-point Gauss rule has no centre node
  for (std::size_t i = 1; i < xk.size(); ++i) {
    const double fsum = f(mid - half * xk[i]) + f(mid + half * xk[i]);
    kronrod += wk[i] * fsum;
    if (i % 2 == 1) gauss += wg[i / 2] * fsum;
  }
  return {lo, hi, kronrod * half, std::abs(kronrod - gauss) * half};
}

}  // namespace detail

/// Integrates f over [lo, hi]. `breaks` are interior points where f has kinks
/// or integrable singularities; they seed the initial partition.
template <class F>
QuadResult integrate(F&& f, double lo, double hi, const Tolerance& tol = {},
                     std::vector<double> breaks = {}) {
  QuadResult out;
  if (!(hi > lo)) return out;
  std::vector<double> cuts{lo};
  std::sort(breaks.begin(), breaks.end());
  for (double b : breaks) {
    if (b > cuts.back() && b < hi) cuts.push_back(b);
  }
  cuts.push_back(hi);

  std::priority_queue<detail::Segment> heap;
  double value = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    auto s = detail::gk21(f, cuts[i], cuts[i + 1]);
    out.evaluations += 21;
    value += s.value;
    error += s.error;
    heap.push(s);
  }
  while (!tol.satisfied(value, error) && out.evaluations + 42 <= tol.max_evaluations) {
    auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) break;  // interval exhausted
    auto left = detail::gk21(f, worst.lo, mid);
    auto right = detail::gk21(f, mid, worst.hi);
    out.evaluations += 42;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Recompute from the leaves to shed accumulated round-off.
  value = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  out.value = value;
  out.error = error;
  out.converged = tol.satisfied(value, error);
  return out;
}

/// Fixed-order Gauss-Legendre rule on [lo, hi] (30 nodes).
template <class F>
double gauss_legendre_30(F&& f, double lo, double hi) {
  using G = boost::math::quadrature::gauss<double, 30>;
  const auto& x = G::abscissa();
  const auto& w = G::weights();
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sum += w[i] * (f(mid - half * x[i]) + f(mid + half * x[i]));
  }
  return sum * half;
}

template <int Dim>
using Point = Eigen::Matrix<double, Dim, 1>;

template <int Dim>
struct Box {
  Point<Dim> lower;
  Point<Dim> upper;
};

namespace detail {

template <int Dim>
struct Region {
  Point<Dim> center;
  Point<Dim> half;
  double value;
  double error;
  int split_axis;
  bool operator<(const Region& o) const { return error < o.error; }
};

template <int Dim, class F>
Region<Dim> genz_malik(F& f, const Point<Dim>& center, const Point<Dim>& half) {
  constexpr double n = Dim;
  static const double l2 = std::sqrt(9.0 / 70.0);
  static const double l4 = std::sqrt(9.0 / 10.0);
  static const double l5 = std::sqrt(9.0 / 19.0);
  constexpr double w1 = (12824.0 - 9120.0 * n + 400.0 * n * n) / 19683.0;
  constexpr double w2 = 980.0 / 6561.0;
  constexpr double w3 = (1820.0 - 400.0 * n) / 19683.0;
  constexpr double w4 = 200.0 / 19683.0;
  constexpr double w5 = 6859.0 / 19683.0 / double(1 << Dim);
  constexpr double e1 = (729.0 - 950.0 * n + 50.0 * n * n) / 729.0;
  constexpr double e2 = 245.0 / 486.0;
  constexpr double e3 = (265.0 - 100.0 * n) / 1458.0;
  constexpr double e4 = 25.0 / 729.0;

  double volume = 1.0;
  for (int i = 0; i < Dim; ++i) volume *= 2.0 * half[i];

  const double f1 = f(center);
  double f2 = 0.0, f3 = 0.0, f4 = 0.0, f5 = 0.0;
  int axis = 0;
  double worst_diff = -1.0;
  for (int i = 0; i < Dim; ++i) {
    Point<Dim> p = center;
    p[i] = center[i] - l2 * half[i];
    const double a2m = f(p);
    p[i] = center[i] + l2 * half[i];
    const double a2p = f(p);
    p[i] = center[i] - l4 * half[i];
    const double a4m = f(p);
    p[i] = center[i] + l4 * half[i];
    const double a4p = f(p);
    f2 += a2m + a2p;
    f3 += a4m + a4p;
    const double diff =
        std::abs(a2m + a2p - 2.0 * f1 - (l2 * l2 / (l4 * l4)) * (a4m + a4p - 2.0 * f1));
    // Prefer the wider axis when fourth differences tie (e.g. flat integrands).
    if (diff > worst_diff * (1.0 + 1e-12) ||
        (std::abs(diff - worst_diff) <= 1e-12 * worst_diff && half[i] > half[axis])) {
      worst_diff = diff;
      axis = i;
    }
  }
  for (int i = 0; i < Dim; ++i) {
    for (int j = i + 1; j < Dim; ++j) {
      for (int si = -1; si <= 1; si += 2) {
        for (int sj = -1; sj <= 1; sj += 2) {
          Point<Dim> p = center;
          p[i] += si * l4 * half[i];
          p[j] += sj * l4 * half[j];
          f4 += f(p);
        }
      }
    }
  }
  for (int mask = 0; mask < (1 << Dim); ++mask) {
    Point<Dim> p = center;
    for (int i = 0; i < Dim; ++i) p[i] += ((mask >> i) & 1 ? 1.0 : -1.0) * l5 * half[i];
    f5 += f(p);
  }
  const double i7 = volume * (w1 * f1 + w2 * f2 + w3 * f3 + w4 * f4 + w5 * f5);
  const double i5 = volume * (e1 * f1 + e2 * f2 + e3 * f3 + e4 * f4);
  return {center, half, i7, std::abs(i7 - i5), axis};
}

}  // namespace detail

/// Points per Genz-Malik application in Dim dimensions.
template <int Dim>
constexpr std::size_t genz_malik_points() {
  return 1 + 4 * Dim + 2 * Dim * (Dim - 1) + (std::size_t{1} << Dim);
}

/// Adaptive cubature of f over the union of `boxes` (disjoint).
template <int Dim, class F>
QuadResult cubature(F&& f, const std::vector<Box<Dim>>& boxes, const Tolerance& tol = {}) {
  static_assert(Dim >= 2, "use integrate() in one dimension");
  constexpr std::size_t per_rule = genz_malik_points<Dim>();
  QuadResult out;
  std::priority_queue<detail::Region<Dim>> heap;
  double value = 0.0;
  double error = 0.0;
  for (const auto& box : boxes) {
    const Point<Dim> c = 0.5 * (box.lower + box.upper);
    const Point<Dim> h = 0.5 * (box.upper - box.lower);
    if ((h.array() <= 0.0).any()) continue;
    auto r = detail::genz_malik<Dim>(f, c, h);
    out.evaluations += per_rule;
    value += r.value;
    error += r.error;
    heap.push(r);
  }
  if (heap.empty()) {
    out.converged = true;
    return out;
  }
  while (!tol.satisfied(value, error) && out.evaluations + 2 * per_rule <= tol.max_evaluations) {
    auto worst = heap.top();
    heap.pop();
    Point<Dim> h = worst.half;
    h[worst.split_axis] *= 0.5;
    Point<Dim> c_lo = worst.center;
    Point<Dim> c_hi = worst.center;
    c_lo[worst.split_axis] -= h[worst.split_axis];
    c_hi[worst.split_axis] += h[worst.split_axis];
    auto lo = detail::genz_malik<Dim>(f, c_lo, h);
    auto hi = detail::genz_malik<Dim>(f, c_hi, h);
    out.evaluations += 2 * per_rule;
    value += lo.value + hi.value - worst.value;
    error += lo.error + hi.error - worst.error;
    heap.push(lo);
    heap.push(hi);
  }
  value = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  out.value = value;
  out.error = error;
  out.converged = tol.satisfied(value, error);
  return out;
}

template <int Dim, class F>
QuadResult cubature(F&& f, const Box<Dim>& box, const Tolerance& tol = {}) {
  return cubature<Dim>(std::forward<F>(f), std::vector<Box<Dim>>{box}, tol);
}

/// Integrates g(x) over the ball |x| < r_max in spherical coordinates whose
/// polar axis is `axis` (unit vector). `radial_breaks` split the radial range
/// at radii where g is singular or kinked.
template <class G>
QuadResult integrate_ball(G&& g, const Eigen::Vector3d& axis, double r_max, const Tolerance& tol,
                          std::vector<double> radial_breaks = {}) {
  // Orthonormal frame (e1, e2, axis).
  Eigen::Vector3d e3 = axis.normalized();
  Eigen::Vector3d helper =
      std::abs(e3.x()) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
  Eigen::Vector3d e1 = (helper - helper.dot(e3) * e3).normalized();
  Eigen::Vector3d e2 = e3.cross(e1);

  auto integrand = [&](const Point<3>& p) {
    const double r = p[0], c = p[1], phi = p[2];
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    const Eigen::Vector3d x = r * (c * e3 + s * (std::cos(phi) * e1 + std::sin(phi) * e2));
    return r * r * g(x);
  };
  std::sort(radial_breaks.begin(), radial_breaks.end());
  std::vector<Box<3>> boxes;
  double r_lo = 0.0;
  radial_breaks.push_back(r_max);
  for (double rb : radial_breaks) {
    const double r_hi = std::min(rb, r_max);
    if (r_hi > r_lo) {
      for (int q = 0; q < 4; ++q) {  // quarter the azimuth so each box is well shaped
        boxes.push_back({Point<3>(r_lo, -1.0, q * std::numbers::pi / 2),
                         Point<3>(r_hi, 1.0, (q + 1) * std::numbers::pi / 2)});
      }
      r_lo = r_hi;
    }
  }
  return cubature<3>(integrand, boxes, tol);
}

}  // namespace fourbody::quad
