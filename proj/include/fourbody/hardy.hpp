#pragma once

// Trial family for p^2 - lambda / r^2 in three dimensions.
//
// Radial reduced functions u(r) = r^sigma exp(-r/s), chi = u/r, sigma > 1/2.
// With g = Gamma(2 sigma - 1) (s/2)^(2 sigma - 1):
//   int u'^2 dr    = g sigma / 2
//   int u^2/r^2 dr = g
//   int u^2 dr     = g sigma (2 sigma - 1) s^2 / 2
// so the Rayleigh quotient is (sigma - 2 lambda) / (sigma (2 sigma - 1) s^2).
// It is positive for every sigma iff lambda <= 1/4, and scales as 1/s^2.

#include <cmath>

#include "fourbody/errors.hpp"

namespace fourbody {

struct HardyTrial {
  double sigma = 1.0;  ///< power at the origin, > 1/2
  double scale = 1.0;  ///< decay length s
};

inline void require_valid(const HardyTrial& t) {
  if (!(t.sigma > 0.5) || !std::isfinite(t.sigma) || !(t.scale > 0.0) ||
      !std::isfinite(t.scale)) {
    throw DomainError("Hardy trial needs sigma > 1/2 and a positive finite scale");
  }
}

inline double hardy_quotient(double lambda, const HardyTrial& t) {
  require_valid(t);
  return (t.sigma - 2.0 * lambda) / (t.sigma * (2.0 * t.sigma - 1.0) * t.scale * t.scale);
}

}  // namespace fourbody
