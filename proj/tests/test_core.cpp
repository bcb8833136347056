#include <catch_amalgamated.hpp>

#include <random>

#include "fourbody/core.hpp"
#include "fourbody/ecg.hpp"

using namespace fourbody;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double kProton = 1836.152672;

std::array<double, 4> random_masses(std::mt19937_64& rng) {
  std::array<double, 4> m{};
  for (double& v : m) v = log_uniform(rng, 1e-2, 1e4);
  return m;
}

// Reduced masses of the chosen frame from the inverse mass matrix of the
// paired Jacobi transform, an independent route to mu_x, mu_y, mu_R.
std::array<double, 3> kinetic_matrix_masses(const JacobiFrame& f) {
  const ecg::ParticleSystem ps({f.masses.begin(), f.masses.end()}, {1, -1, 1, -1});
  const ecg::JacobiTransform jt(ps, ecg::Coordinates::Paired);
  const auto& L = jt.kinetic_matrix();
  return {1.0 / L(0, 0), 1.0 / L(1, 1), 1.0 / L(2, 2)};
}

}  // namespace

TEST_CASE("parse_mass keeps decimal text and rejects bad input") {
  CHECK(parse_mass("1836.152672") == 1836.152672);
  CHECK(parse_mass("  +2.5 ") == 2.5);
  CHECK(parse_mass("1e3") == 1000.0);
  for (const char* bad : {"", "abc", "-1", "0", "1.5x", "nan", "inf"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_mass(bad), DomainError);
  }
}

TEST_CASE("FourBodySystem validates masses") {
  CHECK_THROWS_AS(FourBodySystem({1, 1, 0, 1}), DomainError);
  CHECK_THROWS_AS(FourBodySystem({1, -1, 1, 1}), DomainError);
  CHECK_NOTHROW(FourBodySystem({1, 1, 1, 1}));
  CHECK(FourBodySystem::charge(0) == 1);
  CHECK(FourBodySystem::charge(3) == -1);
}

TEST_CASE("equal masses give the symmetric frame") {
  const auto f = build_jacobi(FourBodySystem({1, 1, 1, 1}));
  CHECK(f.pairing == Pairing::A);
  CHECK(f.mu_x == 0.5);
  CHECK(f.mu_y == 0.5);
  CHECK(f.mu_R == 1.0);
  CHECK(f.a == 0.5);
  CHECK(f.b == 0.5);
  CHECK(f.ratio() == 2.0);
  CHECK(threshold_energy(f, false) == -0.5);
  CHECK(threshold_energy(f, true) == -2.0);  // scale 4: mu_y -> 2
}

TEST_CASE("hydrogen-antihydrogen picks protonium plus positronium") {
  const auto f = build_jacobi(FourBodySystem({kProton, kProton, 1, 1}));
  CHECK(f.pairing == Pairing::A);
  CHECK_THAT(f.mu_x, WithinRel(kProton / 2, 1e-15));
  CHECK_THAT(f.mu_y, WithinRel(0.5, 1e-15));
  CHECK_THAT(f.ratio(), WithinRel(4.0 / (kProton + 1.0), 1e-12));

  // Same system with the antiproton in the other negative slot: pairing B.
  const auto g = build_jacobi(FourBodySystem({kProton, 1, 1, kProton}));
  CHECK(g.pairing == Pairing::B);
  CHECK_THAT(g.ratio(), WithinRel(f.ratio(), 1e-14));
}

TEST_CASE("family (m, m, 1, 1) has ratio 4/(m+1)") {
  for (double m : {1.0, 2.0, 5.0, 10.0, 100.0, kProton}) {
    CAPTURE(m);
    CHECK_THAT(build_jacobi(FourBodySystem({m, m, 1, 1})).ratio(), WithinRel(4.0 / (m + 1.0), 1e-13));
  }
}

TEST_CASE("frame masses agree with the Jacobi kinetic matrix") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    const auto m = random_masses(rng);
    const auto f = build_jacobi(FourBodySystem(m));
    const auto k = kinetic_matrix_masses(f);
    CAPTURE(m[0], m[1], m[2], m[3]);
    CHECK_THAT(f.mu_x, WithinRel(k[0], 1e-12));
    CHECK_THAT(f.mu_y, WithinRel(k[1], 1e-12));
    CHECK_THAT(f.mu_R, WithinRel(k[2], 1e-12));
  }
}

TEST_CASE("frame invariants on random masses") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 5000; ++i) {
    const auto m = random_masses(rng);
    const FourBodySystem sys(m);
    const auto f = build_jacobi(sys);
    CAPTURE(m[0], m[1], m[2], m[3]);
    // larger binding pairing, tight pair first
    CHECK(f.mu_x + f.mu_y >= pairing_binding(sys, Pairing::A) * (1 - 1e-15));
    CHECK(f.mu_x + f.mu_y >= pairing_binding(sys, Pairing::B) * (1 - 1e-15));
    CHECK(f.mu_x >= f.mu_y);
    CHECK(f.a > 0.0);
    CHECK(f.a < 1.0);
    CHECK(f.b > 0.0);
    CHECK(f.b < 1.0);
    CHECK(f.mu_R >= mu_R_lower_bound(f) * (1 - 1e-13));

    // relabelled masses reproduce the original ones
    for (int p = 0; p < 4; ++p) CHECK(f.masses[f.relabel[p]] == m[p]);

    // Coulomb scaling leaves the ratio and pairing unchanged
    const double c = log_uniform(rng, 1e-3, 1e3);
    const auto g = build_jacobi(sys.scaled(c));
    CHECK(g.pairing == f.pairing);
    CHECK_THAT(g.ratio(), WithinRel(f.ratio(), 1e-12));

    // swapping the roles of the two neutral pairs changes nothing
    const auto h = build_jacobi(FourBodySystem({m[2], m[3], m[0], m[1]}));
    CHECK_THAT(h.ratio(), WithinRel(f.ratio(), 1e-12));
  }
}

TEST_CASE("canonical rescaling sets mu_x = 2") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto f = build_jacobi(FourBodySystem(random_masses(rng)));
    const auto c = rescale_to_canonical(f);
    CHECK_THAT(c.mu_x, WithinRel(2.0, 1e-14));
    CHECK_THAT(c.ratio(), WithinRel(f.ratio(), 1e-13));
    CHECK_THAT(threshold_energy(f, true), WithinRel(-1.0 - c.mu_y / 2.0, 1e-14));
    CHECK_THAT(threshold_energy(f, false) * c.scale, WithinRel(threshold_energy(f, true), 1e-13));
  }
}
