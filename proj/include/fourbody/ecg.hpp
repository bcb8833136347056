#pragma once

// Explicitly correlated Gaussians exp(-x^T A x) over relative (Jacobi)
// coordinates for two to four unit charges, grown by the stochastic
// variational method. Energies are Rayleigh-Ritz upper bounds.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fourbody/core.hpp"
#include "fourbody/criterion.hpp"
#include "fourbody/errors.hpp"
#include "fourbody/random.hpp"

namespace fourbody::ecg {

/// Small dense matrix; never larger than 3x3 (four particles).
using SmallMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;
using SmallVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;

struct ParticleSystem {
  std::vector<double> masses;
  std::vector<int> charges;

  ParticleSystem(std::vector<double> m, std::vector<int> q)
      : masses(std::move(m)), charges(std::move(q)) {
    if (masses.size() < 2 || masses.size() > 4 || masses.size() != charges.size()) {
      throw DomainError("ParticleSystem needs 2 to 4 particles with one charge each");
    }
    for (double v : masses) require_positive_mass(v, "ParticleSystem");
    for (int c : charges) {
      if (c != 1 && c != -1) throw DomainError("ParticleSystem charges must be +1 or -1");
    }
  }

  std::size_t size() const { return masses.size(); }

  ParticleSystem scaled(double c) const {
    auto m = masses;
    for (double& v : m) v *= c;
    return {m, charges};
  }

  /// Four-body system in the ordered labelling of its Jacobi frame.
  static ParticleSystem from_frame(const JacobiFrame& f) {
    return {{f.masses.begin(), f.masses.end()}, {kCharges.begin(), kCharges.end()}};
  }
};

enum class Coordinates {
  Chain,   ///< x_k = r_{k+1} - centre of mass of particles 0..k
  Paired,  ///< x = r2 - r1, y = r4 - r3, R between the pair centres (four bodies)
};

struct PairTerm {
  int i = 0;
  int j = 0;
  double charge_product = 0.0;
  double reduced_mass = 0.0;
  SmallVector w;  ///< r_i - r_j = sum_k w_k x_k
};

class JacobiTransform {
 public:
  JacobiTransform(const ParticleSystem& sys, Coordinates kind) {
    const auto N = static_cast<Eigen::Index>(sys.size());
    if (kind == Coordinates::Paired && N != 4) {
      throw DomainError("paired Jacobi coordinates need four particles");
    }
    const auto& m = sys.masses;
    const double total = std::accumulate(m.begin(), m.end(), 0.0);
    Eigen::MatrixXd U = Eigen::MatrixXd::Zero(N, N);
    if (kind == Coordinates::Paired) {
      const double m12 = m[0] + m[1];
      const double m34 = m[2] + m[3];
      U.row(0) << -1.0, 1.0, 0.0, 0.0;
      U.row(1) << 0.0, 0.0, -1.0, 1.0;
      U.row(2) << -m[0] / m12, -m[1] / m12, m[2] / m34, m[3] / m34;
    } else {
      double partial = 0.0;
      for (Eigen::Index k = 0; k + 1 < N; ++k) {
        partial += m[k];
        for (Eigen::Index i = 0; i <= k; ++i) U(k, i) = -m[i] / partial;
        U(k, k + 1) = 1.0;
      }
    }
    for (Eigen::Index i = 0; i < N; ++i) U(N - 1, i) = m[i] / total;

    n_ = N - 1;
    const Eigen::VectorXd inv_mass =
        Eigen::Map<const Eigen::VectorXd>(m.data(), N).cwiseInverse();
    lambda_ = (U * inv_mass.asDiagonal() * U.transpose()).topLeftCorner(n_, n_);
    const Eigen::MatrixXd Uinv = U.inverse();
    for (int i = 0; i < N; ++i) {
      for (int j = i + 1; j < N; ++j) {
        PairTerm p;
        p.i = i;
        p.j = j;
        p.charge_product = sys.charges[i] * sys.charges[j];
        p.reduced_mass = reduced_mass(m[i], m[j]);
        p.w = (Uinv.row(i) - Uinv.row(j)).head(n_).transpose();
        pairs_.push_back(std::move(p));
      }
    }
  }

  Eigen::Index dimension() const { return n_; }
  /// T = (1/2) sum_kl Lambda_kl p_k . p_l
  const SmallMatrix& kinetic_matrix() const { return lambda_; }
  const std::vector<PairTerm>& pairs() const { return pairs_; }

 private:
  Eigen::Index n_ = 0;
  SmallMatrix lambda_;
  std::vector<PairTerm> pairs_;
};

struct CorrelatedGaussian {
  SmallMatrix A;
  std::uint64_t seed = 0;  ///< stream that generated it (0 when supplied)
  int step = -1;           ///< growth step that accepted it

  CorrelatedGaussian() = default;
  explicit CorrelatedGaussian(SmallMatrix a, std::uint64_t s = 0, int k = -1)
      : A(std::move(a)), seed(s), step(k) {
    if (A.rows() != A.cols() || A.rows() == 0) throw DomainError("correlation matrix must be square");
    if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * A.cwiseAbs().maxCoeff()) {
      throw DomainError("correlation matrix must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<SmallMatrix> eig(A, Eigen::EigenvaluesOnly);
    if (!(eig.eigenvalues().minCoeff() > 0.0)) {
      throw DomainError("correlation matrix must be positive definite");
    }
  }
};

struct MatrixElements {
  double overlap = 0.0;
  double kinetic = 0.0;
  std::vector<double> coulomb;  ///< <1/r_ij> per pair, in JacobiTransform::pairs() order
  double potential = 0.0;       ///< sum q_i q_j coulomb_ij

  double hamiltonian() const { return kinetic + potential; }
};

/// Closed-form elements between exp(-x^T A x) and exp(-x^T A' x):
///   S = (pi^n / det B)^{3/2},  B = A + A'
///   T = 3 tr(Lambda A' B^-1 A) S
///   <1/r_ij> = S * 2 / sqrt(pi w^T B^-1 w)
inline MatrixElements matrix_elements(const CorrelatedGaussian& gi, const CorrelatedGaussian& gj,
                                      const JacobiTransform& jt) {
  const SmallMatrix B = gi.A + gj.A;
  Eigen::LLT<SmallMatrix> llt(B);
  if (llt.info() != Eigen::Success) throw NumericalError("combined correlation matrix is singular");
  const SmallMatrix Binv = llt.solve(SmallMatrix::Identity(B.rows(), B.cols()));
  double det = 1.0;
  for (Eigen::Index k = 0; k < B.rows(); ++k) det *= llt.matrixLLT()(k, k) * llt.matrixLLT()(k, k);
  if (!(det > 0.0) || !std::isfinite(det)) throw NumericalError("combined correlation matrix is singular");
  const double n = static_cast<double>(B.rows());
  MatrixElements e;
  e.overlap = std::pow(std::pow(std::numbers::pi, n) / det, 1.5);
  e.kinetic = 3.0 * (jt.kinetic_matrix() * gj.A * Binv * gi.A).trace() * e.overlap;
  e.coulomb.reserve(jt.pairs().size());
  for (const auto& p : jt.pairs()) {
    const double var = p.w.dot(Binv * p.w);
    const double c = e.overlap * 2.0 / std::sqrt(std::numbers::pi * var);
    e.coulomb.push_back(c);
    e.potential += p.charge_product * c;
  }
  return e;
}

/// A = sum_{i<j} w_ij w_ij^T / b_ij^2, positive definite because the pair
/// vectors span the relative space.
inline SmallMatrix pair_form_matrix(const JacobiTransform& jt, const std::vector<double>& lengths) {
  const auto n = jt.dimension();
  SmallMatrix A = SmallMatrix::Zero(n, n);
  for (std::size_t p = 0; p < jt.pairs().size(); ++p) {
    const auto& w = jt.pairs()[p].w;
    A += (w * w.transpose()) / (lengths[p] * lengths[p]);
  }
  return A;
}

struct SvmOptions {
  std::size_t target = 100;       ///< basis size to reach
  std::size_t pool = 200;         ///< random candidates per step
  std::uint64_t seed = 42;
  double condition_cap = 1e12;    ///< of the unit-diagonal overlap
  double scale_lo = 1e-2;         ///< candidate pair lengths, in pair Bohr radii 1/mu_ij
  double scale_hi = 1e2;
  Coordinates coordinates = Coordinates::Chain;
};

struct SpectralResult {
  double e0 = 0.0;
  std::size_t basis_size = 0;
  double condition = 1.0;
  double threshold = std::numeric_limits<double>::quiet_NaN();
  double margin = std::numeric_limits<double>::quiet_NaN();  ///< threshold - e0
};

struct SvmResult {
  std::vector<CorrelatedGaussian> basis;
  std::vector<double> trace;  ///< E0 after each accepted element
  SpectralResult spectrum;
  std::vector<std::string> warnings;
  std::size_t rejected = 0;   ///< candidates dropped for conditioning
};

/// Random candidate for growth step `step`, index `index` in the pool. Each
/// candidate has its own stream so the pool can be evaluated in any order.
inline CorrelatedGaussian random_candidate(const JacobiTransform& jt, const SvmOptions& opt,
                                           std::size_t step, std::size_t index) {
  const std::uint64_t s = mix_seed(opt.seed, step * 1'000'003ull + index);
  std::mt19937_64 rng(s);
  std::vector<double> lengths;
  lengths.reserve(jt.pairs().size());
  for (const auto& p : jt.pairs()) {
    lengths.push_back(log_uniform(rng, opt.scale_lo, opt.scale_hi) / p.reduced_mass);
  }
  return CorrelatedGaussian(pair_form_matrix(jt, lengths), s, static_cast<int>(step));
}

/// Generalised eigenproblem bookkeeping for a growing basis of unit-norm
/// functions: H, S and the full set of Ritz pairs C^T S C = 1, C^T H C = E.
class RitzState {
 public:
  explicit RitzState(const JacobiTransform& jt) : jt_(&jt) {}

  std::size_t size() const { return basis_.size(); }
  const std::vector<CorrelatedGaussian>& basis() const { return basis_; }
  double lowest() const { return energies_.size() ? energies_[0] : std::numeric_limits<double>::infinity(); }
  double condition() const { return condition_; }

  struct Probe {
    double energy = std::numeric_limits<double>::infinity();
    double residual_norm = 0.0;  ///< squared norm of the part orthogonal to the basis
    Eigen::VectorXd h, s;
    double h0 = 0.0;
  };

  /// Lowest Ritz value after adding g, from the arrow-matrix secular
  /// equation in the current Ritz basis; O(k^2).
  Probe probe(const CorrelatedGaussian& g) const {
    Probe pr;
    const auto k = static_cast<Eigen::Index>(basis_.size());
    const auto self = matrix_elements(g, g, *jt_);
    const double inv_self = 1.0 / self.overlap;
    pr.h0 = self.hamiltonian() * inv_self;
    pr.h.resize(k);
    pr.s.resize(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      const auto e = matrix_elements(basis_[i], g, *jt_);
      const double norm = std::sqrt(inv_self * inv_norms_[i]);
      pr.h[i] = e.hamiltonian() * norm;
      pr.s[i] = e.overlap * norm;
    }
    if (k == 0) {
      pr.energy = pr.h0;
      pr.residual_norm = 1.0;
      return pr;
    }
    const Eigen::VectorXd st = ritz_.transpose() * pr.s;
    const Eigen::VectorXd ht = ritz_.transpose() * pr.h;
    pr.residual_norm = 1.0 - st.squaredNorm();
    if (!(pr.residual_norm > 0.0)) {
      pr.residual_norm = 0.0;
      return pr;
    }
    const double inv = 1.0 / std::sqrt(pr.residual_norm);
    const Eigen::VectorXd border = (ht - energies_.cwiseProduct(st)) * inv;
    const double corner =
        (pr.h0 - 2.0 * st.dot(ht) + st.cwiseAbs2().dot(energies_)) / pr.residual_norm;
    pr.energy = arrow_lowest(corner, border);
    return pr;
  }

  /// Appends g and refreshes all Ritz pairs. Returns false (state unchanged)
  /// if the new overlap breaches the condition cap.
  bool append(const CorrelatedGaussian& g, const Probe& pr, double condition_cap) {
    const auto k = static_cast<Eigen::Index>(basis_.size());
    Eigen::MatrixXd H(k + 1, k + 1), S(k + 1, k + 1);
    H.topLeftCorner(k, k) = H_;
    S.topLeftCorner(k, k) = S_;
    H.block(0, k, k, 1) = pr.h;
    H.block(k, 0, 1, k) = pr.h.transpose();
    S.block(0, k, k, 1) = pr.s;
    S.block(k, 0, 1, k) = pr.s.transpose();
    H(k, k) = pr.h0;
    S(k, k) = 1.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> overlap(S);
    const auto& sigma = overlap.eigenvalues();
    if (!(sigma[0] > 0.0)) return false;
    const double cond = sigma[k] / sigma[0];
    if (cond > condition_cap) return false;
    Eigen::MatrixXd X = overlap.eigenvectors();
    for (Eigen::Index j = 0; j <= k; ++j) X.col(j) /= std::sqrt(sigma[j]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(X.transpose() * H * X);
    H_ = std::move(H);
    S_ = std::move(S);
    energies_ = solver.eigenvalues();
    ritz_ = X * solver.eigenvectors();
    condition_ = cond;
    basis_.push_back(g);
    inv_norms_.push_back(1.0 / matrix_elements(g, g, *jt_).overlap);
    return true;
  }

 private:
  // Lowest eigenvalue of [[diag(E), b], [b^T, d]]: the root below
  // min(E_0, d) of d - x - sum b_i^2 / (E_i - x), which is decreasing there.
  double arrow_lowest(double corner, const Eigen::VectorXd& border) const {
    double hi = std::min(energies_[0], corner);
    double lo = hi - border.norm() - 1e-300;
    lo -= 1e-12 * std::abs(lo);
    auto f = [&](double x) {
      return corner - x - (border.cwiseAbs2().array() / (energies_.array() - x)).sum();
    };
    for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * std::abs(hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      if (f(mid) > 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  }

  const JacobiTransform* jt_;
  std::vector<CorrelatedGaussian> basis_;
  std::vector<double> inv_norms_;
  Eigen::MatrixXd H_, S_, ritz_;
  Eigen::VectorXd energies_;
  double condition_ = 1.0;
};

/// Greedy growth: each step draws `pool` candidates, ranks them by the
/// secular-equation estimate and accepts the best one that passes the
/// condition cap and lowers E0 after the full re-diagonalisation.
/// `initial` seeds the basis (e.g. a loaded one); it is accepted as is.
inline SvmResult svm_grow(const ParticleSystem& sys, const SvmOptions& opt,
                          const std::vector<CorrelatedGaussian>& initial = {}) {
  if (opt.target < 1) throw DomainError("svm_grow target must be at least 1");
  if (opt.pool < 1) throw DomainError("svm_grow pool must be at least 1");
  const JacobiTransform jt(sys, opt.coordinates);
  RitzState state(jt);
  SvmResult out;
  for (const auto& g : initial) {
    if (g.A.rows() != jt.dimension()) throw DomainError("loaded basis does not match the system size");
    auto pr = state.probe(g);
    if (!state.append(g, pr, opt.condition_cap)) {
      throw ConditionError("loaded basis breaches the condition cap", state.condition());
    }
    out.trace.push_back(state.lowest());
  }

  constexpr int kMaxEmptyPools = 8;
  std::size_t draw = state.size();
  int empty_pools = 0;
  std::vector<std::pair<double, std::size_t>> ranked;
  std::vector<CorrelatedGaussian> pool;
  std::vector<RitzState::Probe> probes;
  while (state.size() < opt.target) {
    pool.clear();
    probes.clear();
    ranked.clear();
    for (std::size_t c = 0; c < opt.pool; ++c) {
      pool.push_back(random_candidate(jt, opt, draw, c));
      probes.push_back(state.probe(pool.back()));
      const auto& pr = probes.back();
      if (state.size() > 0 && pr.residual_norm * opt.condition_cap < 1.0) {
        ++out.rejected;
        continue;
      }
      if (std::isfinite(pr.energy)) ranked.emplace_back(pr.energy, c);
    }
    ++draw;
    std::sort(ranked.begin(), ranked.end());
    const double before = state.lowest();
    bool accepted = false;
    for (const auto& [estimate, c] : ranked) {
      if (!(estimate < before)) break;
      RitzState trial = state;
      if (!trial.append(pool[c], probes[c], opt.condition_cap)) {
        ++out.rejected;
        continue;
      }
      if (!(trial.lowest() < before)) continue;
      state = std::move(trial);
      accepted = true;
      break;
    }
    if (accepted) {
      out.trace.push_back(state.lowest());
      empty_pools = 0;
    } else if (++empty_pools >= kMaxEmptyPools) {
      out.warnings.push_back("growth stalled at basis size " + std::to_string(state.size()) +
                             ": no admissible candidate in " + std::to_string(kMaxEmptyPools) +
                             " consecutive pools");
      break;
    }
  }
  out.basis = state.basis();
  out.spectrum.e0 = state.lowest();
  out.spectrum.basis_size = state.size();
  out.spectrum.condition = state.condition();
  return out;
}

/// Lowest energy of a fixed basis, by the same canonical solve svm_grow uses.
inline SpectralResult evaluate_basis(const ParticleSystem& sys, const std::vector<CorrelatedGaussian>& basis,
                                     double condition_cap = 1e12,
                                     Coordinates coordinates = Coordinates::Chain) {
  SvmOptions opt;
  opt.target = basis.size();
  opt.condition_cap = condition_cap;
  opt.coordinates = coordinates;
  return svm_grow(sys, opt, basis).spectrum;
}

struct ProbeBudget {
  std::size_t basis = 200;
  std::size_t pool = 200;
  std::uint64_t seed = 42;
  double condition_cap = 1e12;
};

struct ProbeResult {
  double e0 = 0.0;
  double threshold = 0.0;
  double eps_cert = 0.0;
  bool certified_bound = false;
  double margin = 0.0;  ///< threshold - e0
  Verdict verdict;
  SpectralResult spectrum;
  std::vector<double> trace;
  std::vector<std::string> warnings;
  std::vector<CorrelatedGaussian> basis;
};

inline double certification_margin(double threshold) {
  return std::max(1e-6 * std::abs(threshold), 5e-5);
}

/// Variational probe against the lowest two-cluster threshold of the frame.
/// A certificate for a proven-unstable system is a bug somewhere and throws.
/// `initial` continues from a saved basis of the same system.
inline ProbeResult stability_probe(const FourBodySystem& system, const ProbeBudget& budget,
                                   const std::vector<CorrelatedGaussian>& initial = {}) {
  ProbeResult r;
  r.verdict = classify(system);
  r.threshold = threshold_energy(r.verdict.frame, false);
  r.eps_cert = certification_margin(r.threshold);
  const ParticleSystem ps({system.masses().begin(), system.masses().end()},
                          {kCharges.begin(), kCharges.end()});
  SvmOptions opt;
  opt.target = budget.basis;
  opt.pool = budget.pool;
  opt.seed = budget.seed;
  opt.condition_cap = budget.condition_cap;
  auto grown = svm_grow(ps, opt, initial);
  r.basis = grown.basis;
  r.spectrum = grown.spectrum;
  r.spectrum.threshold = r.threshold;
  r.spectrum.margin = r.threshold - grown.spectrum.e0;
  r.e0 = grown.spectrum.e0;
  r.margin = r.spectrum.margin;
  r.certified_bound = r.e0 < r.threshold - r.eps_cert;
  r.trace = std::move(grown.trace);
  r.warnings = std::move(grown.warnings);
  if (r.certified_bound && r.verdict.classification == Classification::ProvenUnstable) {
    throw InconsistencyError("solver certified binding for a system the criterion proves unstable");
  }
  return r;
}

enum class Family {
  EqualPairs,  ///< (m, m, 1, 1)
  TwoMasses,   ///< (m1, 1, m3, 1)
};

inline const char* to_string(Family f) { return f == Family::EqualPairs ? "equal_pairs" : "two_masses"; }

struct GridPoint {
  double m1 = 1.0;
  double m3 = 1.0;  ///< unused for EqualPairs
};

inline FourBodySystem family_member(Family f, const GridPoint& p) {
  if (f == Family::EqualPairs) return FourBodySystem({p.m1, p.m1, 1.0, 1.0});
  return FourBodySystem({p.m1, 1.0, p.m3, 1.0});
}

struct ScanRow {
  GridPoint point;
  double ratio = std::numeric_limits<double>::quiet_NaN();
  std::optional<Classification> verdict;
  std::optional<ProbeResult> probe;
  std::string error;
};

/// Criterion verdict and solver margin per grid point. Failures are recorded
/// per row and the scan continues. `solve` false skips the solver.
inline std::vector<ScanRow> mass_ratio_scan(Family family, const std::vector<GridPoint>& grid,
                                            const ProbeBudget& budget, bool solve = true) {
  std::vector<ScanRow> rows;
  rows.reserve(grid.size());
  for (const auto& p : grid) {
    ScanRow row;
    row.point = p;
    try {
      const auto sys = family_member(family, p);
      const auto v = classify(sys);
      row.ratio = v.ratio;
      row.verdict = v.classification;
      if (solve) row.probe = stability_probe(sys, budget);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace fourbody::ecg
