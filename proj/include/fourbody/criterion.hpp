#pragma once

// Sufficient condition for instability: mu_R / mu_x <= (13 - 2 sqrt 22) / 54.

#include <cmath>

#include "fourbody/core.hpp"
#include "fourbody/errors.hpp"

namespace fourbody {

enum class Classification { ProvenUnstable, Indeterminate };

inline const char* to_string(Classification c) {
  return c == Classification::ProvenUnstable ? "ProvenUnstable" : "Indeterminate";
}

struct Verdict {
  Classification classification = Classification::Indeterminate;
  double ratio = 0.0;     ///< mu_R / mu_x
  double critical = 0.0;  ///< critical_ratio()
  double margin = 0.0;    ///< critical - ratio; >= 0 iff ProvenUnstable
  JacobiFrame frame;
};

/// (13 - 2 sqrt 22) / 54 = 0.0670216...
inline double critical_ratio() { return (13.0 - 2.0 * std::sqrt(22.0)) / 54.0; }

/// The same boundary expressed as mu_R in the mu_x = 2 frame.
inline double canonical_boundary() { return (13.0 - 2.0 * std::sqrt(22.0)) / 27.0; }

/// C(mu) = 1 + 1 / (sqrt(3 / (8 mu)) - 1), defined on 0 < mu < 3/8.
inline double chain_coefficient(double mu_R) {
  if (!std::isfinite(mu_R) || !(mu_R > 0.0) || !(mu_R < 3.0 / 8.0)) {
    throw DomainError("chain coefficient undefined: mu_R must lie in (0, 3/8)");
  }
  return 1.0 + 1.0 / (std::sqrt(3.0 / (8.0 * mu_R)) - 1.0);
}

/// 3 mu C(mu) <= 1, with mu_R in the mu_x = 2 frame.
inline bool solve_scalar_condition(double mu_R_canonical) {
  return 3.0 * mu_R_canonical * chain_coefficient(mu_R_canonical) <= 1.0;
}

inline Verdict classify(const FourBodySystem& system) {
  Verdict v;
  v.frame = build_jacobi(system);
  v.ratio = v.frame.ratio();
  v.critical = critical_ratio();
  v.margin = v.critical - v.ratio;
  v.classification =
      v.ratio <= v.critical ? Classification::ProvenUnstable : Classification::Indeterminate;
  return v;
}

}  // namespace fourbody
