#pragma once

// Lowest eigenpair of the symmetric-definite pencil (H, S).

#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "fourbody/errors.hpp"

namespace fourbody {

struct LowestEigenpair {
  double value = 0.0;
  Eigen::VectorXd vector;  ///< S-normalised
  double condition = 1.0;  ///< of the unit-diagonal overlap, restricted to the kept space
  Eigen::Index retained = 0;
};

namespace detail {

inline Eigen::VectorXd unit_diagonal_scaling(const Eigen::MatrixXd& S) {
  Eigen::VectorXd d(S.rows());
  for (Eigen::Index i = 0; i < S.rows(); ++i) {
    if (!(S(i, i) > 0.0)) throw NumericalError("overlap matrix has a nonpositive diagonal");
    d[i] = 1.0 / std::sqrt(S(i, i));
  }
  return d;
}

// Canonical orthogonalisation keeping overlap eigenvalues >= floor * max.
inline LowestEigenpair canonical_lowest(const Eigen::MatrixXd& H, const Eigen::MatrixXd& S,
                                        double floor, double condition_cap) {
  if (H.rows() != S.rows() || H.cols() != S.cols() || H.rows() != H.cols() || H.rows() == 0) {
    throw DomainError("generalized_lowest: H and S must be square, equal and nonempty");
  }
  const Eigen::VectorXd d = unit_diagonal_scaling(S);
  const Eigen::MatrixXd Sn = d.asDiagonal() * S * d.asDiagonal();
  const Eigen::MatrixXd Hn = d.asDiagonal() * H * d.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> overlap(Sn);
  const Eigen::VectorXd& sigma = overlap.eigenvalues();  // ascending
  const double top = sigma[sigma.size() - 1];
  if (floor == 0.0 && !(sigma[0] > 0.0)) {
    throw ConditionError("overlap matrix is singular", std::numeric_limits<double>::infinity());
  }
  Eigen::Index first = 0;
  while (first < sigma.size() && !(sigma[first] > floor * top)) ++first;
  if (first == sigma.size()) throw ConditionError("overlap matrix is numerically zero", std::numeric_limits<double>::infinity());
  const double condition = top / sigma[first];
  if (condition > condition_cap) {
    throw ConditionError("overlap condition number exceeds cap", condition);
  }
  const Eigen::Index kept = sigma.size() - first;
  Eigen::MatrixXd X = overlap.eigenvectors().rightCols(kept);
  for (Eigen::Index j = 0; j < kept; ++j) X.col(j) /= std::sqrt(sigma[first + j]);
  const Eigen::MatrixXd Hp = X.transpose() * Hn * X;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(Hp);
  LowestEigenpair out;
  out.value = solver.eigenvalues()[0];
  out.vector = d.asDiagonal() * (X * solver.eigenvectors().col(0));
  out.condition = condition;
  out.retained = kept;
  return out;
}

}  // namespace detail

/// Rayleigh-Ritz on the full space. Throws ConditionError when the
/// unit-diagonal overlap has condition number above `condition_cap`.
inline LowestEigenpair generalized_lowest(const Eigen::MatrixXd& H, const Eigen::MatrixXd& S,
                                          double condition_cap = 1e12) {
  return detail::canonical_lowest(H, S, 0.0, condition_cap);
}

/// Rayleigh-Ritz after discarding overlap directions below
/// `relative_floor` times the largest; the result is still a variational
/// bound, over a subspace.
inline LowestEigenpair generalized_lowest_filtered(const Eigen::MatrixXd& H,
                                                   const Eigen::MatrixXd& S,
                                                   double relative_floor = 1e-11) {
  return detail::canonical_lowest(H, S, relative_floor, std::numeric_limits<double>::infinity());
}

}  // namespace fourbody
