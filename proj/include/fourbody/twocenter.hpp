#pragma once

// Ground state of p^2/(2 mu) - A/|R - c1| - A/|R - c2| in a basis of
// spherical Gaussians on both centres and their midpoint, and the operator
// floor -2 A^2 mu against the true attractive part of W.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "fourbody/effpot.hpp"
#include "fourbody/errors.hpp"
#include "fourbody/linalg.hpp"
#include "fourbody/quadrature.hpp"
#include "fourbody/random.hpp"

namespace fourbody::twocenter {

using Vec3 = Eigen::Vector3d;

/// exp(-exponent |R - center|^2)
struct SGaussian {
  double exponent = 1.0;
  Vec3 center = Vec3::Zero();
};

/// (1/2) sqrt(pi/t) erf(sqrt t), the zeroth Boys function.
inline double boys0(double t) {
  if (t < 1e-8) return 1.0 - t / 3.0;
  const double s = std::sqrt(t);
  return 0.5 * std::sqrt(std::numbers::pi) * std::erf(s) / s;
}

inline double overlap(const SGaussian& g, const SGaussian& h) {
  const double p = g.exponent + h.exponent;
  const double red = g.exponent * h.exponent / p;
  return std::pow(std::numbers::pi / p, 1.5) * std::exp(-red * (g.center - h.center).squaredNorm());
}

/// <g| -nabla^2 |h>
inline double laplacian(const SGaussian& g, const SGaussian& h) {
  const double p = g.exponent + h.exponent;
  const double red = g.exponent * h.exponent / p;
  const double d2 = (g.center - h.center).squaredNorm();
  return red * (6.0 - 4.0 * red * d2) * overlap(g, h);
}

/// <g| 1/|R - c| |h>
inline double coulomb(const SGaussian& g, const SGaussian& h, const Vec3& c) {
  const double p = g.exponent + h.exponent;
  const double red = g.exponent * h.exponent / p;
  const Vec3 P = (g.exponent * g.center + h.exponent * h.center) / p;
  return 2.0 * std::numbers::pi / p * std::exp(-red * (g.center - h.center).squaredNorm()) *
         boys0(p * (P - c).squaredNorm());
}

struct TwoCenterOptions {
  std::size_t widths_per_center = 28;   ///< exponent ladder length
  double ladder_ratio = 2.0;            ///< ratio between consecutive exponents
  double dependency_floor = 1e-11;      ///< canonical orthogonalisation cut
};

struct TwoCenterResult {
  double energy = 0.0;
  std::size_t basis_size = 0;
  Eigen::Index retained = 0;
  double condition = 1.0;
  std::vector<SGaussian> basis;
  Eigen::VectorXd coefficients;
};

/// Nested exponent ladder: element k of the ladder is the k-th closest rung
/// to the natural exponent (A mu)^2, so shorter ladders are prefixes.
inline std::vector<double> exponent_ladder(double A, double mu, const TwoCenterOptions& opt) {
  const double scale = A > 0.0 ? A * mu : mu;
  const double base = scale * scale;
  const std::size_t n = opt.widths_per_center;
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    // 0, +1, -1, +2, -2, ... rungs around the base
    const double step = (k % 2 == 1) ? double((k + 1) / 2) : -double(k / 2);
    out.push_back(base * std::pow(opt.ladder_ratio, step));
  }
  return out;
}

inline std::vector<SGaussian> two_center_basis(double A, double mu, double d,
                                               const TwoCenterOptions& opt = {}) {
  const auto ladder = exponent_ladder(A, mu, opt);
  std::vector<Vec3> centers{Vec3::Zero()};
  const double length = 1.0 / (A > 0.0 ? A * mu : mu);
  if (d > 1e-12 * length) {
    centers.push_back(Vec3(0, 0, -d / 2));
    centers.push_back(Vec3(0, 0, d / 2));
  }
  std::vector<SGaussian> basis;
  for (double e : ladder) {
    for (const auto& c : centers) basis.push_back({e, c});
  }
  return basis;
}

/// Hamiltonian and overlap for p^2/(2 mu) - A sum_c 1/|R - c|.
inline std::pair<Eigen::MatrixXd, Eigen::MatrixXd> hamiltonian(const std::vector<SGaussian>& basis,
                                                               double A, double mu,
                                                               const std::vector<Vec3>& nuclei) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd H(n, n), S(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const auto& g = basis[i];
      const auto& h = basis[j];
      double v = laplacian(g, h) / (2.0 * mu);
      for (const auto& c : nuclei) v -= A * coulomb(g, h, c);
      H(i, j) = H(j, i) = v;
      S(i, j) = S(j, i) = overlap(g, h);
    }
  }
  return {H, S};
}

/// Variational upper bound on the ground energy for centres at distance d.
inline TwoCenterResult two_center_ground(double A, double mu, double d,
                                         const TwoCenterOptions& opt = {}) {
  if (!(A >= 0.0) || !(mu > 0.0) || !(d >= 0.0) || opt.widths_per_center < 1) {
    throw DomainError("two_center_ground needs A >= 0, mu > 0, d >= 0 and a nonempty basis");
  }
  TwoCenterResult out;
  out.basis = two_center_basis(A, mu, d, opt);
  const std::vector<Vec3> nuclei{Vec3(0, 0, -d / 2), Vec3(0, 0, d / 2)};
  auto [H, S] = hamiltonian(out.basis, A, mu, nuclei);
  const auto eig = generalized_lowest_filtered(H, S, opt.dependency_floor);
  out.energy = eig.value;
  out.basis_size = out.basis.size();
  out.retained = eig.retained;
  out.condition = eig.condition;
  out.coefficients = eig.vector;
  return out;
}

// ---------------------------------------------------------------------------
// Floor check: <chi| p^2/(2 mu) - A W_- |chi> >= -2 A^2 mu <chi|chi>

/// A linear combination of spherical Gaussians.
struct Trial {
  std::vector<double> coefficients;
  std::vector<SGaussian> gaussians;

  double operator()(const Vec3& R) const {
    double v = 0.0;
    for (std::size_t i = 0; i < gaussians.size(); ++i) {
      v += coefficients[i] *
           std::exp(-gaussians[i].exponent * (R - gaussians[i].center).squaredNorm());
    }
    return v;
  }
};

inline Trial single_gaussian(double exponent, const Vec3& center) {
  return Trial{{1.0}, {{exponent, center}}};
}

inline Trial from_ground(const TwoCenterResult& r) {
  Trial t;
  t.gaussians = r.basis;
  t.coefficients.assign(r.coefficients.data(), r.coefficients.data() + r.coefficients.size());
  return t;
}

enum class FloorPotential {
  NegativePartW,   ///< -A W_-, the operator of the floor inequality
  AttractivePair,  ///< A (V14 + V23), which lies below it
};

struct FloorRecord {
  double kinetic = 0.0;
  double potential = 0.0;
  double quotient = 0.0;
  double floor = 0.0;     ///< -2 A^2 mu
  double residual = 0.0;  ///< quotient - floor
  double error = 0.0;
};

inline FloorRecord floor_quotient(double A, double mu, const effpot::InteractionDecomposition& dec,
                                  const Vec3& x, const Vec3& y, const Trial& trial,
                                  FloorPotential potential,
                                  const quad::Tolerance& tol = {1e-7, 1e-6, 20'000'000}) {
  const auto n = trial.gaussians.size();
  double norm = 0.0, kin = 0.0, attract = 0.0;
  const effpot::JacobiPoint at{x, y, Vec3::Zero()};
  const Vec3 z1 = dec.z1(at);
  const Vec3 z2 = dec.z2(at);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double cc = trial.coefficients[i] * trial.coefficients[j];
      const auto& g = trial.gaussians[i];
      const auto& h = trial.gaussians[j];
      norm += cc * overlap(g, h);
      kin += cc * laplacian(g, h) / (2.0 * mu);
      attract += cc * (coulomb(g, h, z1) + coulomb(g, h, z2));
    }
  }
  FloorRecord rec;
  rec.kinetic = kin / norm;
  rec.floor = -2.0 * A * A * mu;
  if (potential == FloorPotential::AttractivePair) {
    rec.potential = -A * attract / norm;
  } else if (A > 0.0) {
    // centre the spherical grid on the trial's most diffuse component
    double min_exp = std::numeric_limits<double>::infinity();
    Vec3 centre = Vec3::Zero();
    for (const auto& g : trial.gaussians) {
      if (g.exponent < min_exp) {
        min_exp = g.exponent;
        centre = g.center;
      }
    }
    double reach = 0.0;
    for (const auto& g : trial.gaussians) reach = std::max(reach, (g.center - centre).norm());
    const double r_max = reach + std::sqrt(20.0 / min_exp);
    auto integrand = [&](const Vec3& r) {
      const Vec3 R = centre + r;
      const double chi = trial(R);
      return chi * chi * dec.w_minus(effpot::JacobiPoint{x, y, R});
    };
    std::vector<double> breaks;
    for (const Vec3& z : {z1, z2}) {
      const double rz = (z - centre).norm();
      if (rz > 0.0 && rz < r_max) breaks.push_back(rz);
    }
    const Vec3 axis = (z1 - centre).norm() > 0.0 ? Vec3(z1 - centre) : Vec3::UnitZ();
    // tol.abs bounds the error of the quotient, not of the raw integral
    quad::Tolerance ball = tol;
    ball.abs = tol.abs * norm / A;
    const auto res = quad::integrate_ball(integrand, axis, r_max, ball, breaks);
    if (!res.converged) throw NumericalError("floor quadrature did not converge", res.error);
    rec.potential = -A * res.value / norm;
    rec.error = A * res.error / norm;
  }
  rec.quotient = rec.kinetic + rec.potential;
  rec.residual = rec.quotient - rec.floor;
  return rec;
}

struct FloorReport {
  double floor = 0.0;
  double min_quotient = std::numeric_limits<double>::infinity();
  double min_residual = std::numeric_limits<double>::infinity();
  std::vector<FloorRecord> records;

  bool pass(double tol) const { return min_residual >= -tol; }
};

/// Random configurations (x, y, a, b) and Gaussian trials placed near the
/// attractive centres, with widths spanning 1e-1..1e1 Bohr radii 1/(A mu).
inline FloorReport floor_check(double A, double mu, std::size_t samples, std::uint64_t seed,
                               FloorPotential potential = FloorPotential::NegativePartW) {
  FloorReport rep;
  rep.floor = -2.0 * A * A * mu;
  const double bohr = 1.0 / (A > 0.0 ? A * mu : mu);
  for (std::size_t i = 0; i < samples; ++i) {
    std::mt19937_64 rng(mix_seed(seed, i));
    const double a = uniform(rng, 0.05, 0.95);
    const double b = uniform(rng, 0.05, 0.95);
    const effpot::InteractionDecomposition dec(a, b);
    const Vec3 x = log_uniform(rng, 0.01, 10.0) * bohr * random_direction(rng);
    const Vec3 y = log_uniform(rng, 0.01, 10.0) * bohr * random_direction(rng);
    const effpot::JacobiPoint at{x, y, Vec3::Zero()};
    const double t = uniform01(rng);
    const Vec3 anchor = t < 0.4 ? dec.z1(at) : (t < 0.8 ? dec.z2(at) : Vec3(0.5 * (dec.z1(at) + dec.z2(at))));
    const double width = log_uniform(rng, 0.1, 10.0) * bohr;
    const Vec3 center = anchor + uniform(rng, 0.0, 0.5) * width * random_direction(rng);
    const auto rec = floor_quotient(A, mu, dec, x, y, single_gaussian(1.0 / (width * width), center),
                                    potential);
    rep.min_quotient = std::min(rep.min_quotient, rec.quotient);
    rep.min_residual = std::min(rep.min_residual, rec.residual);
    rep.records.push_back(rec);
  }
  return rep;
}

}  // namespace fourbody::twocenter
