#pragma once

// Scalar verification of the inequality chain that leads from the bound
// state assumption to the instability condition 3 mu_R C(mu_R) <= 1, plus
// the hydrogen spectral facts it rests on. All quantities live in the
// mu_x = 2 frame.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fourbody/criterion.hpp"
#include "fourbody/effpot.hpp"
#include "fourbody/errors.hpp"
#include "fourbody/hardy.hpp"
#include "fourbody/quadrature.hpp"
#include "fourbody/random.hpp"

namespace fourbody::chain {

using fourbody::chain_coefficient;

inline void require_chain_domain(double mu_R) { (void)chain_coefficient(mu_R); }

// ---------------------------------------------------------------------------
// lambda envelope: max over lambda >= -1 of -2 (lambda+1)^2 mu + lambda beta^2

struct LambdaEnvelope {
  double value = 0.0;        ///< objective evaluated at the maximiser
  double lambda_star = 0.0;  ///< beta^2/(4 mu) - 1, always >= -1
  double closed_form = 0.0;  ///< beta^4/(8 mu) - beta^2
};

inline double lambda_objective(double lambda, double beta, double mu_R) {
  return -2.0 * (lambda + 1.0) * (lambda + 1.0) * mu_R + lambda * beta * beta;
}

inline LambdaEnvelope lambda_envelope(double beta, double mu_R) {
  if (!(beta >= 0.0) || !(mu_R > 0.0)) {
    throw DomainError("lambda_envelope needs beta >= 0 and mu_R > 0");
  }
  LambdaEnvelope e;
  const double b2 = beta * beta;
  e.lambda_star = b2 / (4.0 * mu_R) - 1.0;
  e.value = lambda_objective(e.lambda_star, beta, mu_R);
  e.closed_form = b2 * b2 / (8.0 * mu_R) - b2;
  return e;
}

// ---------------------------------------------------------------------------
// beta^4/(8 mu) - beta^2 - 2 alpha beta + 3/4 + alpha^2 / (sqrt(3/(8 mu)) - 1) >= 0

inline double quadratic_lhs(double mu_R, double alpha, double beta) {
  const double k = 1.0 / (std::sqrt(3.0 / (8.0 * mu_R)) - 1.0);
  const double b2 = beta * beta;
  return b2 * b2 / (8.0 * mu_R) - b2 - 2.0 * alpha * beta + 0.75 + k * alpha * alpha;
}

/// Minimiser of quadratic_lhs: beta*^2 = 4 mu s, alpha* = beta* (s - 1),
/// s = sqrt(3/(8 mu)). The minimum value is exactly zero.
inline std::pair<double, double> quadratic_minimiser(double mu_R) {
  require_chain_domain(mu_R);
  const double s = std::sqrt(3.0 / (8.0 * mu_R));
  const double beta = std::sqrt(4.0 * mu_R * s);
  return {beta * (s - 1.0), beta};
}

struct QuadraticReport {
  double grid_min = std::numeric_limits<double>::infinity();
  double grid_alpha = 0.0;
  double grid_beta = 0.0;
  double analytic_alpha = 0.0;
  double analytic_beta = 0.0;
  double analytic_min = 0.0;
};

inline QuadraticReport verify_quadratic_inequality(double mu_R, const std::vector<double>& alphas,
                                                   const std::vector<double>& betas) {
  require_chain_domain(mu_R);
  QuadraticReport r;
  for (double a : alphas) {
    for (double b : betas) {
      const double v = quadratic_lhs(mu_R, a, b);
      if (v < r.grid_min) {
        r.grid_min = v;
        r.grid_alpha = a;
        r.grid_beta = b;
      }
    }
  }
  std::tie(r.analytic_alpha, r.analytic_beta) = quadratic_minimiser(mu_R);
  r.analytic_min = quadratic_lhs(mu_R, r.analytic_alpha, r.analytic_beta);
  return r;
}

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return v;
}

// ---------------------------------------------------------------------------
// Hydrogen spectrum

struct HydrogenLevel {
  double mu;
  int n;
  double energy;
};

inline std::vector<HydrogenLevel> hydrogen_levels(double mu, int n_max) {
  if (!(mu > 0.0) || n_max < 1) throw DomainError("hydrogen_levels needs mu > 0, n_max >= 1");
  std::vector<HydrogenLevel> out;
  for (int n = 1; n <= n_max; ++n) out.push_back({mu, n, -mu / (2.0 * n * n)});
  return out;
}

namespace detail {

// Number of eigenvalues below x of the symmetric tridiagonal (d, e).
inline int sturm_count(const std::vector<double>& d, const std::vector<double>& e, double x) {
  int count = 0;
  double q = 1.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double off = i == 0 ? 0.0 : e[i - 1] * e[i - 1];
    q = d[i] - x - (i == 0 ? 0.0 : off / q);
    if (q == 0.0) q = -std::numeric_limits<double>::epsilon() * (std::abs(d[i]) + std::abs(x) + 1.0);
    if (q < 0.0) ++count;
  }
  return count;
}

inline double tridiagonal_eigenvalue(const std::vector<double>& d, const std::vector<double>& e,
                                     int k, double lo, double hi) {
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (sturm_count(d, e, mid) > k) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Lowest two s-wave levels of p^2/(2 mu) - 1/r by second-order finite
// differences in t = ln r with u(r) = e^{t/2} v(t). The generalised problem
// A v = E B v, B = diag(e^{2t}), is symmetrised to B^{-1/2} A B^{-1/2}.
inline std::pair<double, double> radial_levels(double mu, std::size_t points) {
  const double r_min = 1e-7 / mu;
  const double r_max = 120.0 / mu;
  const double t0 = std::log(r_min);
  const double h = (std::log(r_max) - t0) / static_cast<double>(points + 1);
  const double kin = 1.0 / (2.0 * mu);
  std::vector<double> d(points), e(points > 0 ? points - 1 : 0);
  for (std::size_t i = 0; i < points; ++i) {
    const double t = t0 + h * static_cast<double>(i + 1);
    d[i] = (kin * (2.0 / (h * h) + 0.25) - std::exp(t)) / std::exp(2.0 * t);
    if (i + 1 < points) e[i] = -kin / (h * h) / (std::exp(t) * std::exp(t + h));
  }
  // Levels lie in (-mu, 0); the continuum discretisation is above 0.
  const double e0 = tridiagonal_eigenvalue(d, e, 0, -mu, 0.0);
  const double e1 = tridiagonal_eigenvalue(d, e, 1, -mu, 0.0);
  return {e0, e1};
}

}  // namespace detail

struct GridSpectrum {
  double e0 = 0.0;
  double e1 = 0.0;
  double refinement_change = 0.0;  ///< change of the extrapolated E0 on halving h
};

/// Independent finite-difference check of the two lowest s levels of
/// p^2/(2 mu) - 1/r (h12 = p^2/4 - 1/x is mu = 2). Richardson extrapolation
/// over grids h, h/2, h/4.
inline GridSpectrum grid_spectral_check(double mu, std::size_t base_points = 1200,
                                        double convergence = 1e-7) {
  if (!(mu > 0.0)) throw DomainError("grid_spectral_check needs mu > 0");
  const auto c = detail::radial_levels(mu, base_points);
  const auto m = detail::radial_levels(mu, 2 * base_points + 1);
  const auto f = detail::radial_levels(mu, 4 * base_points + 3);
  const double e0_coarse = (4.0 * m.first - c.first) / 3.0;
  const double e0_fine = (4.0 * f.first - m.first) / 3.0;
  const double e1_fine = (4.0 * f.second - m.second) / 3.0;
  GridSpectrum g{e0_fine, e1_fine, std::abs(e0_fine - e0_coarse)};
  if (g.refinement_change > convergence * std::max(1.0, mu)) {
    throw NumericalError("radial grid not converged", g.refinement_change);
  }
  return g;
}

// ---------------------------------------------------------------------------
// Hardy inequality p^2 - lambda/r^2 >= 0 iff lambda <= 1/4

inline double hardy_check(double lambda, const HardyTrial& trial) {
  return hardy_quotient(lambda, trial);
}

/// The default trial grid: sigma in (1/2, 1.5], scale in [1e-3, 1e3].
inline std::vector<HardyTrial> hardy_trial_family(std::size_t n_sigma = 101,
                                                  std::size_t n_scale = 61) {
  std::vector<HardyTrial> out;
  for (std::size_t i = 0; i < n_sigma; ++i) {
    // Accumulate towards the critical exponent 1/2 geometrically.
    const double t = static_cast<double>(i) / static_cast<double>(n_sigma - 1);
    const double sigma = 0.5 + std::pow(10.0, -8.0 + 8.0 * t);
    if (sigma > 1.5) continue;
    for (std::size_t j = 0; j < n_scale; ++j) {
      const double s = std::pow(10.0, -3.0 + 6.0 * static_cast<double>(j) /
                                                static_cast<double>(n_scale - 1));
      out.push_back({sigma, s});
    }
  }
  for (std::size_t j = 0; j < n_scale; ++j) {
    out.push_back({1.5, std::pow(10.0, -3.0 + 6.0 * static_cast<double>(j) /
                                                   static_cast<double>(n_scale - 1))});
  }
  return out;
}

struct HardyViolation {
  HardyTrial trial;
  double quotient = 0.0;       ///< at scale s
  double quotient_half = 0.0;  ///< at scale s/2
  double scaling_ratio = 0.0;  ///< quotient_half / quotient, 4 for 1/s^2 scaling
};

/// For lambda > 1/4, a trial with negative quotient exists for
/// 1/2 < sigma < 2 lambda; shrinking the scale drives it to -infinity.
inline HardyViolation hardy_violation(double lambda, double scale = 1.0) {
  if (!(lambda > 0.25)) throw DomainError("no Hardy violation for lambda <= 1/4");
  HardyViolation v;
  v.trial = {0.5 * (0.5 + std::min(2.0 * lambda, 1.5)), scale};
  v.quotient = hardy_quotient(lambda, v.trial);
  v.quotient_half = hardy_quotient(lambda, {v.trial.sigma, scale / 2.0});
  v.scaling_ratio = v.quotient_half / v.quotient;
  return v;
}

// ---------------------------------------------------------------------------
// Projector onto phi0 in the x coordinate

struct ProjectorCheck {
  double coefficient = 0.0;   ///< <phi0|f>
  double idempotence = 0.0;   ///< ||P0 (P0 f) - P0 f||
  double orthogonality = 0.0; ///< |<phi0|(1 - P0) f>|
};

inline ProjectorCheck projector_idempotence_check(
    const std::function<double(const Eigen::Vector3d&)>& f,
    const quad::Tolerance& tol = {1e-13, 1e-11, 4'000'000}) {
  using effpot::phi0;
  auto require = [](const quad::QuadResult& r) {
    if (!r.converged) throw NumericalError("projector quadrature did not converge", r.error);
    return r.value;
  };
  const double r_max = 20.0;
  const Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
  ProjectorCheck out;
  out.coefficient =
      require(quad::integrate_ball([&](const Eigen::Vector3d& x) { return phi0(x.norm()) * f(x); },
                                   axis, r_max, tol));
  const double c = out.coefficient;
  // P0 applied to P0 f = c phi0 gives c' phi0 with c' = <phi0|c phi0>.
  const double c_twice = require(quad::integrate_ball(
      [&](const Eigen::Vector3d& x) { return phi0(x.norm()) * c * phi0(x.norm()); }, axis, r_max,
      tol));
  out.idempotence = std::abs(c_twice - c);  // ||phi0|| = 1
  // the remainder integrates to ~0, so its accuracy is measured against c
  quad::Tolerance rest = tol;
  rest.abs = std::max(tol.abs, tol.rel * std::abs(c));
  out.orthogonality = std::abs(require(quad::integrate_ball(
      [&](const Eigen::Vector3d& x) { return phi0(x.norm()) * (f(x) - c * phi0(x.norm())); },
      axis, r_max, rest)));
  return out;
}

// ---------------------------------------------------------------------------
// The full suite

struct CheckRecord {
  std::string name;
  std::vector<std::pair<std::string, double>> parameters;
  double residual = 0.0;   ///< signed margin; >= -tolerance passes
  double tolerance = 0.0;
  bool pass = false;
};

struct ChainConfig {
  std::size_t alpha_points = 201;
  std::size_t beta_points = 201;
  double alpha_max = 10.0;
  double beta_max = 10.0;
  std::size_t envelope_samples = 1000;
  std::uint64_t seed = 42;
  double identity_tol = 1e-9;   ///< closed-form identities (relative)
  double numeric_tol = 1e-6;    ///< grid and quadrature checks
};

struct ChainReport {
  double mu_R = 0.0;
  double coefficient = 0.0;
  bool scalar_condition = false;
  std::vector<CheckRecord> records;

  bool all_pass() const {
    return std::all_of(records.begin(), records.end(), [](const auto& r) { return r.pass; });
  }
};

inline ChainReport run_chain_suite(double mu_R, const ChainConfig& cfg = {}) {
  require_chain_domain(mu_R);
  ChainReport rep;
  rep.mu_R = mu_R;
  rep.coefficient = chain_coefficient(mu_R);
  rep.scalar_condition = solve_scalar_condition(mu_R);

  auto add = [&](std::string name, std::vector<std::pair<std::string, double>> params,
                 double residual, double tol) {
    rep.records.push_back({std::move(name), std::move(params), residual, tol, residual >= -tol});
  };

  add("chain_coefficient", {{"mu_R", mu_R}, {"C", rep.coefficient}}, rep.coefficient - 1.0, 0.0);

  {
    std::mt19937_64 rng(cfg.seed);
    double worst = 0.0;
    for (std::size_t i = 0; i < cfg.envelope_samples; ++i) {
      const double beta = uniform(rng, 0.0, cfg.beta_max);
      const auto e = lambda_envelope(beta, mu_R);
      const double scale = std::max(1.0, std::abs(e.closed_form));
      worst = std::max(worst, std::abs(e.value - e.closed_form) / scale);
      // the stationary point is a maximum
      const double step = 1e-3 * std::max(1.0, std::abs(e.lambda_star));
      const double drop = e.value - std::max(lambda_objective(e.lambda_star + step, beta, mu_R),
                                             lambda_objective(e.lambda_star - step, beta, mu_R));
      if (drop < 0.0) worst = std::max(worst, -drop / scale);
    }
    add("lambda_envelope", {{"samples", double(cfg.envelope_samples)}}, -worst, cfg.identity_tol);
  }

  {
    const auto q = verify_quadratic_inequality(mu_R, linspace(0.0, cfg.alpha_max, cfg.alpha_points),
                                               linspace(0.0, cfg.beta_max, cfg.beta_points));
    add("quadratic_inequality_grid", {{"alpha", q.grid_alpha}, {"beta", q.grid_beta}}, q.grid_min,
        cfg.identity_tol);
    add("quadratic_inequality_tightness",
        {{"alpha_star", q.analytic_alpha}, {"beta_star", q.analytic_beta},
         {"minimum", q.analytic_min}},
        -std::abs(q.analytic_min), 1e-8);
  }

  {
    const auto g = grid_spectral_check(2.0);
    add("h12_ground_level", {{"grid_E0", g.e0}, {"exact", -1.0}}, -std::abs(g.e0 + 1.0),
        cfg.numeric_tol);
    add("h12_excited_bound", {{"grid_E1", g.e1}, {"bound", -0.25}}, g.e1 + 0.25, cfg.numeric_tol);
  }

  {
    double min_q = std::numeric_limits<double>::infinity();
    for (const auto& t : hardy_trial_family()) min_q = std::min(min_q, hardy_check(0.25, t));
    add("hardy_positivity", {{"lambda", 0.25}}, min_q, 1e-8);
    const auto v = hardy_violation(0.26);
    add("hardy_violation_scaling",
        {{"lambda", 0.26}, {"sigma", v.trial.sigma}, {"quotient", v.quotient},
         {"ratio", v.scaling_ratio}},
        v.quotient < 0.0 ? 0.2 - std::abs(v.scaling_ratio - 4.0) : -1.0, 0.0);
  }

  {
    const auto p = projector_idempotence_check(
        [](const Eigen::Vector3d& x) { return std::exp(-x.squaredNorm()); });
    add("projector_idempotence", {{"coefficient", p.coefficient}},
        -std::max(p.idempotence, p.orthogonality), 1e-8);
  }

  {
    const double lhs = 3.0 * mu_R * rep.coefficient;
    add("scalar_condition_consistency",
        {{"three_mu_C", lhs}, {"instability", rep.scalar_condition ? 1.0 : 0.0}},
        (lhs <= 1.0) == (mu_R <= canonical_boundary()) ||
                std::abs(mu_R - canonical_boundary()) < 1e-10
            ? 0.0
            : -1.0,
        0.0);
  }
  return rep;
}

}  // namespace fourbody::chain
