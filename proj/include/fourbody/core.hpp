#pragma once

// Four unit charges (+,-,+,-): pairing selection, Jacobi masses and
// dissociation thresholds.

#include <array>
#include <charconv>
#include <cmath>
#include <string>
#include <string_view>
#include <utility>

#include "fourbody/errors.hpp"

namespace fourbody {

/// Charges are fixed: particles 0 and 2 carry +1, particles 1 and 3 carry -1.
inline constexpr std::array<int, 4> kCharges{+1, -1, +1, -1};

inline void require_positive_mass(double m, const char* what) {
  if (!std::isfinite(m) || !(m > 0.0)) {
    throw DomainError(std::string(what) + ": mass must be finite and positive");
  }
}

inline double reduced_mass(double m, double mp) {
  require_positive_mass(m, "reduced_mass");
  require_positive_mass(mp, "reduced_mass");
  return m * mp / (m + mp);
}

/// Parses a decimal mass string. Trailing garbage is rejected.
inline double parse_mass(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (text.empty() || ec != std::errc{} || ptr != last) {
    throw DomainError("cannot parse mass '" + std::string(text) + "'");
  }
  require_positive_mass(value, "parse_mass");
  return value;
}

class FourBodySystem {
 public:
  FourBodySystem(std::array<double, 4> masses, std::array<std::string, 4> labels = {})
      : masses_(masses), labels_(std::move(labels)) {
    for (double m : masses_) require_positive_mass(m, "FourBodySystem");
  }

  const std::array<double, 4>& masses() const noexcept { return masses_; }
  double mass(int i) const { return masses_.at(i); }
  const std::array<std::string, 4>& labels() const noexcept { return labels_; }
  static constexpr int charge(int i) { return kCharges[i]; }

  FourBodySystem scaled(double c) const {
    require_positive_mass(c, "FourBodySystem::scaled");
    auto m = masses_;
    for (double& v : m) v *= c;
    return FourBodySystem(m, labels_);
  }

 private:
  std::array<double, 4> masses_;
  std::array<std::string, 4> labels_;
};

/// The two ways to split (+,-,+,-) into neutral pairs.
/// A: (1,2)+(3,4); B: (1,4)+(3,2), in 1-based particle numbering.
enum class Pairing { A, B };

inline const char* to_string(Pairing p) { return p == Pairing::A ? "A" : "B"; }

struct JacobiFrame {
  double mu_x = 0.0;
  double mu_y = 0.0;
  double mu_R = 0.0;
  double a = 0.0;  ///< m2/(m1+m2) after relabeling
  double b = 0.0;  ///< m4/(m3+m4) after relabeling
  Pairing pairing = Pairing::A;
  double scale = 1.0;  ///< factor applied to the input masses
  /// relabel[i] is the ordered index of original particle i.
  std::array<int, 4> relabel{0, 1, 2, 3};
  /// Masses in ordered labelling (+,-,+,-), already multiplied by `scale`.
  std::array<double, 4> masses{};

  double ratio() const { return mu_R / mu_x; }
};

namespace detail {

struct PairChoice {
  int positive;
  int negative;
  double mu;
};

inline std::array<PairChoice, 2> pairs_for(const std::array<double, 4>& m, Pairing p) {
  const int neg_first = p == Pairing::A ? 1 : 3;
  const int neg_second = p == Pairing::A ? 3 : 1;
  return {PairChoice{0, neg_first, reduced_mass(m[0], m[neg_first])},
          PairChoice{2, neg_second, reduced_mass(m[2], m[neg_second])}};
}

// Pair ordering key: larger reduced mass first; exact ties broken by the
// (positive, negative) masses so the frame does not depend on input order.
inline bool pair_precedes(const PairChoice& lhs, const PairChoice& rhs,
                          const std::array<double, 4>& m) {
  if (lhs.mu != rhs.mu) return lhs.mu > rhs.mu;
  if (m[lhs.positive] != m[rhs.positive]) return m[lhs.positive] > m[rhs.positive];
  return m[lhs.negative] >= m[rhs.negative];
}

inline JacobiFrame frame_from_masses(const std::array<double, 4>& m, Pairing pairing) {
  auto pairs = pairs_for(m, pairing);
  if (!pair_precedes(pairs[0], pairs[1], m)) std::swap(pairs[0], pairs[1]);

  JacobiFrame f;
  f.pairing = pairing;
  const std::array<int, 4> order{pairs[0].positive, pairs[0].negative, pairs[1].positive,
                                 pairs[1].negative};
  for (int k = 0; k < 4; ++k) {
    f.relabel[order[k]] = k;
    f.masses[k] = m[order[k]];
  }
  const auto& q = f.masses;
  f.mu_x = reduced_mass(q[0], q[1]);
  f.mu_y = reduced_mass(q[2], q[3]);
  f.mu_R = (q[0] + q[1]) * (q[2] + q[3]) / (q[0] + q[1] + q[2] + q[3]);
  f.a = q[1] / (q[0] + q[1]);
  f.b = q[3] / (q[2] + q[3]);
  return f;
}

}  // namespace detail

/// Sum of the two pair reduced masses for a pairing; the two-pair
/// dissociation threshold is minus half of it.
inline double pairing_binding(const FourBodySystem& s, Pairing p) {
  auto pairs = detail::pairs_for(s.masses(), p);
  return pairs[0].mu + pairs[1].mu;
}

/// Picks the pairing with the lowest two-pair threshold (ties go to A) and
/// orders the pairs so that mu_x >= mu_y.
inline JacobiFrame build_jacobi(const FourBodySystem& system) {
  const double bind_a = pairing_binding(system, Pairing::A);
  const double bind_b = pairing_binding(system, Pairing::B);
  const Pairing chosen = bind_b > bind_a ? Pairing::B : Pairing::A;
  return detail::frame_from_masses(system.masses(), chosen);
}

/// Multiplies all masses so that mu_x = 2. Ratios and a, b are unchanged.
inline JacobiFrame rescale_to_canonical(const JacobiFrame& frame) {
  const double c = 2.0 / frame.mu_x;
  if (c == 1.0) return frame;
  JacobiFrame f = frame;
  f.scale = frame.scale * c;
  for (double& m : f.masses) m *= c;
  f.mu_x = 2.0;
  f.mu_y = frame.mu_y * c;
  f.mu_R = frame.mu_R * c;
  return f;
}

/// Two-pair threshold in units hbar = |q| = 1. The canonical form is
/// -1 - mu_y'/2 evaluated in the mu_x = 2 frame.
inline double threshold_energy(const JacobiFrame& frame, bool canonical) {
  if (canonical) {
    const JacobiFrame c = rescale_to_canonical(frame);
    return -1.0 - c.mu_y / 2.0;
  }
  return -(frame.mu_x + frame.mu_y) / 2.0;
}

/// Sharp lower bound on mu_R implied by m1+m2 >= 4 mu_x and m3+m4 >= 4 mu_y.
/// Equality at equal masses.
inline double mu_R_lower_bound(const JacobiFrame& frame) {
  return 4.0 * frame.mu_x * frame.mu_y / (frame.mu_x + frame.mu_y);
}

}  // namespace fourbody
