#include <catch_amalgamated.hpp>

#include <random>

#include "fourbody/twocenter.hpp"

using namespace fourbody;
using namespace fourbody::twocenter;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double gauss(const SGaussian& g, const Vec3& R) { return std::exp(-g.exponent * (R - g.center).squaredNorm()); }

// Integrals over a ball centred at c, where 1/|R - c| is the Jacobian-cancelled singularity.
double cubature_coulomb(const SGaussian& g, const SGaussian& h, const Vec3& c) {
  auto f = [&](const Vec3& r) {
    const Vec3 R = c + r;
    return r.norm() > 0.0 ? gauss(g, R) * gauss(h, R) / r.norm() : 0.0;
  };
  const double reach = std::max((g.center - c).norm(), (h.center - c).norm()) +
                       std::sqrt(40.0 / std::min(g.exponent, h.exponent));
  return quad::integrate_ball(f, Vec3::UnitZ(), reach, {1e-13, 1e-10, 4'000'000}).value;
}

double cubature_gradient(const SGaussian& g, const SGaussian& h) {
  auto f = [&](const Vec3& r) {
    const Vec3 gg = -2.0 * g.exponent * (r - g.center) * gauss(g, r);
    const Vec3 gh = -2.0 * h.exponent * (r - h.center) * gauss(h, r);
    return gg.dot(gh);
  };
  const double reach = std::max(g.center.norm(), h.center.norm()) +
                       std::sqrt(40.0 / std::min(g.exponent, h.exponent));
  return quad::integrate_ball(f, Vec3::UnitZ(), reach, {1e-13, 1e-10, 4'000'000}).value;
}

}  // namespace

TEST_CASE("Gaussian matrix elements against cubature") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 8; ++i) {
    const SGaussian g{log_uniform(rng, 0.2, 5.0), uniform(rng, -1.0, 1.0) * Vec3(1, 0.3, -0.5)};
    const SGaussian h{log_uniform(rng, 0.2, 5.0), uniform(rng, -1.0, 1.0) * Vec3(-0.2, 1, 0.4)};
    const Vec3 c(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1));
    CAPTURE(i);
    CHECK_THAT(coulomb(g, h, c), WithinRel(cubature_coulomb(g, h, c), 1e-8));
    CHECK_THAT(laplacian(g, h), WithinRel(cubature_gradient(g, h), 1e-8));
  }
  CHECK_THAT(boys0(1e-10), WithinAbs(1.0, 1e-10));
  CHECK_THAT(boys0(1.0), WithinRel(0.7468241328124270, 1e-14));
}

TEST_CASE("coincident centres reproduce the hydrogen-like floor") {
  for (double mu : {0.1, 0.375, 2.0}) {
    for (double A : {0.5, 1.0, 3.0}) {
      CAPTURE(mu, A);
      const auto r = two_center_ground(A, mu, 0.0);
      const double exact = -2.0 * A * A * mu;
      CHECK(r.energy >= exact);
      CHECK(r.energy - exact <= 1e-4 * A * A * mu);
    }
  }
}

TEST_CASE("E(d) is monotone and tends to the one-centre value") {
  const double A = 1.0, mu = 0.375;
  double prev = -std::numeric_limits<double>::infinity();
  for (double d : {0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 64.0}) {
    const double e = two_center_ground(A, mu, d).energy;
    CAPTURE(d, e);
    CHECK(e >= prev - 1e-4);
    CHECK(e >= -2.0 * A * A * mu);
    prev = e;
  }
  // one centre plus the far centre's -A/d
  const double far = two_center_ground(A, mu, 1e4).energy;
  CHECK_THAT(far, WithinAbs(-A * A * mu / 2.0, 1e-3));
  CHECK_THAT(far, WithinAbs(-A * A * mu / 2.0 - A / 1e4, 1e-5));
}

TEST_CASE("Coulomb scaling of the two-centre energy") {
  for (double A : {0.5, 2.0}) {
    for (double mu : {0.2, 1.5}) {
      for (double d : {0.0, 0.7, 3.0}) {
        CAPTURE(A, mu, d);
        const double lhs = two_center_ground(A, mu, d).energy;
        const double rhs = A * A * mu * two_center_ground(1.0, 1.0, A * mu * d).energy;
        CHECK_THAT(lhs, WithinRel(rhs, 1e-6));
      }
    }
  }
}

TEST_CASE("energy does not rise as the ladder grows") {
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t n = 1; n <= 28; ++n) {
    TwoCenterOptions opt;
    opt.widths_per_center = n;
    opt.dependency_floor = 0.0;
    double e;
    try {
      e = two_center_ground(1.0, 0.375, 1.0, opt).energy;
    } catch (const ConditionError&) {
      break;
    }
    CHECK(e <= prev + 1e-12);
    prev = e;
  }
  CHECK_THROWS_AS(two_center_ground(-1.0, 1.0, 0.0), DomainError);
  CHECK_THROWS_AS(two_center_ground(1.0, 0.0, 0.0), DomainError);
}

TEST_CASE("floor check") {
  SECTION("pure kinetic is nonnegative") {
    const auto rep = floor_check(0.0, 0.3, 20, 5);
    CHECK(rep.min_quotient >= 0.0);
  }
  SECTION("random trials stay above -2 A^2 mu") {
    const auto rep = floor_check(1.0, 0.1, 100, 42);
    CAPTURE(rep.min_quotient);
    CHECK(rep.min_quotient >= -0.2 - 1e-4);
    const auto pair = floor_check(1.0, 0.1, 100, 42, FloorPotential::AttractivePair);
    CHECK(pair.min_quotient >= -0.2 - 1e-4);
  }
  SECTION("coincident pair saturates the floor") {
    const double A = 1.0, mu = 0.375;
    const auto ground = two_center_ground(A, mu, 0.0);
    const effpot::InteractionDecomposition dec(0.5, 0.5);
    const auto rec = floor_quotient(A, mu, dec, Vec3::Zero(), Vec3::Zero(), from_ground(ground),
                                    FloorPotential::AttractivePair);
    CHECK_THAT(rec.quotient, WithinAbs(-2.0 * A * A * mu, 1e-4 * A * A * mu));
    CHECK(rec.quotient >= -2.0 * A * A * mu - 1e-10);
  }
}
