#pragma once

// Inter-pair interaction in the Jacobi frame (x, y, R) and the effective
// potentials obtained by averaging its attractive part over the ground state
// of the tight pair, phi0(x) = sqrt(8/pi) exp(-2x) (mu_x = 2 units).

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "fourbody/core.hpp"
#include "fourbody/criterion.hpp"
#include "fourbody/errors.hpp"
#include "fourbody/hardy.hpp"
#include "fourbody/quadrature.hpp"
#include "fourbody/random.hpp"

namespace fourbody::effpot {

using Vec3 = Eigen::Vector3d;

struct JacobiPoint {
  Vec3 x = Vec3::Zero();
  Vec3 y = Vec3::Zero();
  Vec3 R = Vec3::Zero();
};

inline double phi0(double r) { return std::sqrt(8.0 / std::numbers::pi) * std::exp(-2.0 * r); }
inline double phi0_density(double r) { return 8.0 / std::numbers::pi * std::exp(-4.0 * r); }

inline double negative_part(double v) { return v < 0.0 ? -v : 0.0; }
inline double positive_part(double v) { return v > 0.0 ? v : 0.0; }

class InteractionDecomposition {
 public:
  InteractionDecomposition(double a, double b) : a_(a), b_(b) {
    if (!(a > 0.0 && a < 1.0) || !(b > 0.0 && b < 1.0)) {
      throw DomainError("mass parameters a, b must lie in (0, 1)");
    }
  }
  explicit InteractionDecomposition(const JacobiFrame& f) : InteractionDecomposition(f.a, f.b) {}

  double a() const { return a_; }
  double b() const { return b_; }

  Vec3 z1(const JacobiPoint& p) const { return -a_ * p.x - (1.0 - b_) * p.y; }
  Vec3 z2(const JacobiPoint& p) const { return (1.0 - a_) * p.x + b_ * p.y; }

  double v13(const JacobiPoint& p) const { return 1.0 / (p.R + a_ * p.x - b_ * p.y).norm(); }
  double v14(const JacobiPoint& p) const { return -1.0 / (p.R - z1(p)).norm(); }
  double v23(const JacobiPoint& p) const { return -1.0 / (p.R - z2(p)).norm(); }
  double v24(const JacobiPoint& p) const {
    return 1.0 / (p.R - (1.0 - a_) * p.x + (1.0 - b_) * p.y).norm();
  }

  double w(const JacobiPoint& p) const { return v13(p) + v14(p) + v23(p) + v24(p); }
  /// Particle 4 against the tight pair.
  double w1(const JacobiPoint& p) const { return v14(p) + v24(p); }
  /// Particle 3 against the tight pair.
  double w2(const JacobiPoint& p) const { return v13(p) + v23(p); }
  double w_plus(const JacobiPoint& p) const { return positive_part(w(p)); }
  double w_minus(const JacobiPoint& p) const { return negative_part(w(p)); }

 private:
  double a_;
  double b_;
};

struct PairDistances {
  double r12, r13, r14, r23, r24, r34;
};

/// Rebuilds the four positions (centre of mass at the origin) from the ordered
/// masses and the Jacobi vectors, then measures every pair directly.
inline PairDistances pair_distance_oracle(const std::array<double, 4>& m, const JacobiPoint& p) {
  const double m12 = m[0] + m[1];
  const double m34 = m[2] + m[3];
  const double total = m12 + m34;
  const Vec3 c12 = -(m34 / total) * p.R;
  const Vec3 c34 = (m12 / total) * p.R;
  const Vec3 r1 = c12 - (m[1] / m12) * p.x;
  const Vec3 r2 = c12 + (m[0] / m12) * p.x;
  const Vec3 r3 = c34 - (m[3] / m34) * p.y;
  const Vec3 r4 = c34 + (m[2] / m34) * p.y;
  return {(r1 - r2).norm(), (r1 - r3).norm(), (r1 - r4).norm(),
          (r2 - r3).norm(), (r2 - r4).norm(), (r3 - r4).norm()};
}

enum class Split { Total, W1, W2 };

inline const char* to_string(Split s) {
  switch (s) {
    case Split::Total: return "total";
    case Split::W1: return "W1";
    case Split::W2: return "W2";
  }
  return "?";
}

namespace detail {

// Angular integral over c = cos(x, u) of (W1)_- = (1/|u + a x| - 1/|u - (1-a) x|)_+
// at fixed |x| = r. The bracket is positive exactly for c < (1 - 2a) r / (2u),
// and each term integrates in closed form; differences of square roots are
// rewritten to avoid cancellation at small r.
inline double split_angular(double r, double u, double a) {
  const double cm = std::min(1.0, (1.0 - 2.0 * a) * r / (2.0 * u));
  if (cm <= -1.0) return 0.0;
  const double span = cm + 1.0;
  const double p_att = u * u + a * a * r * r + 2.0 * a * r * u * cm;
  const double q_att = std::abs(u - a * r);
  const double p_rep = u * u + (1.0 - a) * (1.0 - a) * r * r - 2.0 * (1.0 - a) * r * u * cm;
  const double q_rep = u + (1.0 - a) * r;
  return 2.0 * span *
         (1.0 / (std::sqrt(std::max(0.0, p_att)) + q_att) -
          1.0 / (std::sqrt(std::max(0.0, p_rep)) + q_rep));
}

inline constexpr double kPairRadius = 12.0;  // phi0^2 r^2 < 1e-15 beyond

}  // namespace detail

/// int |phi0|^2 (-1/|u + a x| + 1/|u - (1-a) x|)_- d^3x as a function of
/// |u| only. V_eff^(1) uses u = R + (1-b) y with parameter a; V_eff^(2) is
/// the same function at v = R - b y with a replaced by 1 - a.
inline quad::QuadResult split_veff(double u, double a, const quad::Tolerance& tol = {1e-15, 1e-11}) {
  if (!(u > 0.0) || !std::isfinite(u)) throw DomainError("split_veff: |u| must be positive");
  auto f = [&](double r) {
    return 2.0 * std::numbers::pi * r * r * phi0_density(r) * detail::split_angular(r, u, a);
  };
  std::vector<double> breaks{u / a};
  if (a != 0.5) breaks.push_back(2.0 * u / std::abs(1.0 - 2.0 * a));
  return quad::integrate(f, 0.0, detail::kPairRadius, tol, breaks);
}

struct VeffOptions {
  quad::Tolerance split_tol{1e-15, 1e-11, 2'000'000};
  quad::Tolerance total_tol{1e-12, 1e-6, 20'000'000};
};

/// V_eff(y, R) for the full W or one of its two halves. Throws NumericalError
/// if the requested accuracy is not met.
inline quad::QuadResult veff(const InteractionDecomposition& d, const Vec3& y, const Vec3& R,
                             Split which, const VeffOptions& opt = {}) {
  const Vec3 u = R + (1.0 - d.b()) * y;
  const Vec3 v = R - d.b() * y;
  quad::QuadResult res;
  switch (which) {
    case Split::W1:
      if (u.norm() == 0.0) throw DomainError("V_eff^(1) singular at R = -(1-b) y");
      res = split_veff(u.norm(), d.a(), opt.split_tol);
      break;
    case Split::W2:
      if (v.norm() == 0.0) throw DomainError("V_eff^(2) singular at R = b y");
      res = split_veff(v.norm(), 1.0 - d.a(), opt.split_tol);
      break;
    case Split::Total: {
      auto g = [&](const Vec3& x) {
        return phi0_density(x.norm()) * d.w_minus(JacobiPoint{x, y, R});
      };
      const Vec3 axis = u.norm() > 0.0 ? u : (v.norm() > 0.0 ? v : Vec3::UnitZ());
      std::vector<double> breaks;
      for (double r : {u.norm() / d.a(), u.norm() / (1.0 - d.a()), v.norm() / d.a(),
                       v.norm() / (1.0 - d.a())}) {
        if (r > 0.0 && r < detail::kPairRadius) breaks.push_back(r);
      }
      res = quad::integrate_ball(g, axis, detail::kPairRadius, opt.total_tol, breaks);
      break;
    }
  }
  if (!res.converged) {
    throw NumericalError(std::string("V_eff quadrature did not converge (") + to_string(which) +
                             ")",
                         res.error);
  }
  return res;
}

/// (3/16) |w|^-2
/// (3/16) |w|^-2
inline double envelope(const Vec3& w) {
  const double n2 = w.squaredNorm();
  if (!(n2 > 0.0)) throw DomainError("envelope singular at zero argument");
  return 3.0 / 16.0 / n2;
}

struct BoundCheck {
  double value1 = 0.0, error1 = 0.0, envelope1 = 0.0, residual1 = 0.0;
  double value2 = 0.0, error2 = 0.0, envelope2 = 0.0, residual2 = 0.0;
};

/// envelope - V_eff for each half of W; both residuals should be >= 0.
inline BoundCheck veff_bound_check(const InteractionDecomposition& d, const Vec3& y, const Vec3& R,
                                   const VeffOptions& opt = {}) {
  BoundCheck out;
  const Vec3 u = R + (1.0 - d.b()) * y;
  const Vec3 v = R - d.b() * y;
  out.envelope1 = envelope(u);
  out.envelope2 = envelope(v);
  auto r1 = veff(d, y, R, Split::W1, opt);
  auto r2 = veff(d, y, R, Split::W2, opt);
  out.value1 = r1.value;
  out.error1 = r1.error;
  out.value2 = r2.value;
  out.error2 = r2.error;
  out.residual1 = out.envelope1 - out.value1;
  out.residual2 = out.envelope2 - out.value2;
  return out;
}

struct Sample {
  Vec3 y;
  Vec3 R;
  int stratum;
};

/// Stratified (y, R) draws. Strata cycle through: generic directions, R
/// parallel to y, R antiparallel to y, R near the W1 singular point
/// -(1-b) y, and R near the W2 singular point b y.
inline std::vector<Sample> stratified_samples(std::size_t count, std::uint64_t seed, double b,
                                              double min_norm = 0.02, double max_norm = 50.0) {
  std::vector<Sample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::mt19937_64 rng(mix_seed(seed, i));
    const int stratum = static_cast<int>(i % 5);
    const double ny = log_uniform(rng, min_norm, max_norm);
    const Vec3 y = ny * random_direction(rng);
    Vec3 R;
    switch (stratum) {
      case 0: R = log_uniform(rng, min_norm, max_norm) * random_direction(rng); break;
      case 1: R = log_uniform(rng, min_norm, max_norm) * y.normalized(); break;
      case 2: R = -log_uniform(rng, min_norm, max_norm) * y.normalized(); break;
      case 3: R = -(1.0 - b) * y + log_uniform(rng, 1e-3, 1.0) * random_direction(rng); break;
      default: R = b * y + log_uniform(rng, 1e-3, 1.0) * random_direction(rng); break;
    }
    out.push_back({y, R, stratum});
  }
  return out;
}

struct FunctionalResult {
  double kinetic = 0.0;      ///< <p^2>/(2 mu_R)
  double potential = 0.0;    ///< C <V_eff>
  double coefficient = 0.0;  ///< C(mu_R)
  double quotient = 0.0;     ///< kinetic - potential
  double error = 0.0;        ///< quadrature error bound on `potential`
};

namespace detail {

// Shell average of a function of |R + shift| against the normalised density
// of f(R) = exp(-R^2/(2 w^2)), written as int V(s) s K(s) ds with the closed
// form kernel K.
template <class V>
quad::QuadResult gaussian_shell_average(V&& value_at, double shift, double width,
                                        const quad::Tolerance& tol) {
  const double w2 = width * width;
  const double norm = std::pow(std::numbers::pi * w2, -1.5);
  auto kernel = [&](double s) {
    if (shift < 1e-9 * width) return 4.0 * std::numbers::pi * s * norm * std::exp(-s * s / w2);
    const double lead = std::exp(-(s - shift) * (s - shift) / w2);
    return -(2.0 * std::numbers::pi / shift) * norm * (w2 / 2.0) * lead *
           std::expm1(-4.0 * s * shift / w2);
  };
  const double lo = std::max(0.0, shift - 9.0 * width);
  const double hi = shift + 9.0 * width;
  auto f = [&](double s) { return s > 0.0 ? value_at(s) * s * kernel(s) : 0.0; };
  std::vector<double> breaks;
  if (shift > lo && shift < hi) breaks.push_back(shift);
  return quad::integrate(f, lo, hi, tol, breaks);
}

}  // namespace detail

/// Rayleigh quotient of p_R^2/(2 mu_R) - C(mu_R) V on the Gaussian trial
/// f(R) = exp(-R^2/(2 w^2)) at fixed y, with mu_R in the mu_x = 2 frame.
///
/// Split::W1/W2 are not meaningful here; Split::Total uses the full V_eff
/// (nested 3-D cubature, slow), anything else uses V_eff^(1) + V_eff^(2),
/// which bounds V_eff from above, so a nonnegative quotient for it implies a
/// nonnegative quotient for the full operator.
inline FunctionalResult stability_functional_check(double mu_R, const Vec3& y, double width,
                                                   const InteractionDecomposition& d,
                                                   bool use_total = false,
                                                   const quad::Tolerance& tol = {1e-12, 1e-7}) {
  if (!(width > 0.0)) throw DomainError("trial width must be positive");
  FunctionalResult out;
  out.coefficient = chain_coefficient(mu_R);
  out.kinetic = 3.0 / (4.0 * mu_R * width * width);
  double average = 0.0;
  double error = 0.0;
  if (!use_total) {
    const quad::Tolerance inner{1e-15, 1e-10};
    const double shift1 = ((1.0 - d.b()) * y).norm();
    const double shift2 = (d.b() * y).norm();
    auto v1 = [&](double s) { return split_veff(s, d.a(), inner).value; };
    auto v2 = [&](double s) { return split_veff(s, 1.0 - d.a(), inner).value; };
    auto r1 = detail::gaussian_shell_average(v1, shift1, width, tol);
    auto r2 = detail::gaussian_shell_average(v2, shift2, width, tol);
    if (!r1.converged || !r2.converged) {
      throw NumericalError("shell average did not converge", r1.error + r2.error);
    }
    average = r1.value + r2.value;
    error = r1.error + r2.error;
  } else {
    VeffOptions opt;
    opt.total_tol = {1e-10, 1e-4, 4'000'000};
    const double w2 = width * width;
    const double norm = std::pow(std::numbers::pi * w2, -1.5);
    auto g = [&](const Vec3& R) {
      return norm * std::exp(-R.squaredNorm() / w2) * veff(d, y, R, Split::Total, opt).value;
    };
    quad::Tolerance outer{tol.abs, std::max(tol.rel, 1e-4), 200'000};
    auto r = quad::integrate_ball(g, y.norm() > 0 ? Vec3(y) : Vec3::UnitZ(), 9.0 * width, outer);
    average = r.value;
    error = r.error;
  }
  out.potential = out.coefficient * average;
  out.error = out.coefficient * error;
  out.quotient = out.kinetic - out.potential;
  return out;
}

/// Half of the kinetic energy against C times one 3/16 envelope:
/// p^2/(4 mu_R) - C (3/16)/|R|^2 on a Hardy trial. Equals
/// hardy_quotient(3 mu_R C / 4) / (4 mu_R), nonnegative iff 3 mu_R C <= 1.
inline double envelope_functional_check(double mu_R, const HardyTrial& trial) {
  const double lambda = 0.75 * mu_R * chain_coefficient(mu_R);
  return hardy_quotient(lambda, trial) / (4.0 * mu_R);
}

}  // namespace fourbody::effpot
