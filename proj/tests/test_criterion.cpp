#include <catch_amalgamated.hpp>

#include <random>

#include <boost/math/tools/roots.hpp>
#include <boost/multiprecision/cpp_dec_float.hpp>

#include "fourbody/criterion.hpp"
#include "fourbody/random.hpp"

using namespace fourbody;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double kProton = 1836.152672;
constexpr double kMuon = 206.768283;

double critical_high_precision() {
  using boost::multiprecision::cpp_dec_float_50;
  const cpp_dec_float_50 v = (cpp_dec_float_50(13) - 2 * sqrt(cpp_dec_float_50(22))) / 54;
  return v.convert_to<double>();
}

// Root of 3 mu C(mu) = 1 in (0, 3/8) by bracketing, without the closed form.
double boundary_by_bisection() {
  auto g = [](double mu) { return 3.0 * mu * chain_coefficient(mu) - 1.0; };
  boost::math::tools::eps_tolerance<double> tol(52);
  std::uintmax_t iters = 200;
  const auto [lo, hi] = boost::math::tools::bisect(g, 1e-6, 0.3, tol, iters);
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("critical ratio matches a 50-digit evaluation") {
  CHECK_THAT(critical_ratio(), WithinAbs(critical_high_precision(), 1e-15));
  CHECK_THAT(critical_ratio(), WithinAbs(0.0670216385250582, 1e-15));
  CHECK(canonical_boundary() == 2.0 * critical_ratio());
}

TEST_CASE("canonical boundary solves 3 mu C(mu) = 1") {
  const double root = boundary_by_bisection();
  CHECK_THAT(root, WithinAbs(canonical_boundary(), 1e-12));
  CHECK(std::abs(3.0 * canonical_boundary() * chain_coefficient(canonical_boundary()) - 1.0) < 1e-10);
}

TEST_CASE("chain coefficient domain and monotonicity") {
  for (double bad : {-1.0, 0.0, 0.375, 0.4, std::nan("")}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(chain_coefficient(bad), DomainError);
  }
  double prev = 1.0;
  for (double mu = 1e-6; mu < 0.375; mu += 0.001) {
    const double c = chain_coefficient(mu);
    CHECK(c > prev);
    prev = c;
  }
  // C = 1 + 1/(sqrt(3/(8 mu)) - 1) written as sqrt(3/(8mu)) / (sqrt(3/(8mu)) - 1)
  std::mt19937_64 rng(5);
  for (int i = 0; i < 1000; ++i) {
    const double mu = uniform(rng, 1e-6, 0.374);
    const double s = std::sqrt(3.0 / (8.0 * mu));
    CHECK_THAT(chain_coefficient(mu), WithinRel(s / (s - 1.0), 1e-12));
  }
  CHECK(chain_coefficient(0.374999) > 1e5);
}

TEST_CASE("scalar condition flips exactly at the canonical boundary") {
  CHECK(solve_scalar_condition(0.1));
  CHECK(solve_scalar_condition(canonical_boundary() * (1 - 1e-9)));
  CHECK_FALSE(solve_scalar_condition(canonical_boundary() * (1 + 1e-9)));
  CHECK_FALSE(solve_scalar_condition(0.3));
}

TEST_CASE("reference verdicts") {
  const auto hh = classify(FourBodySystem({kProton, kProton, 1, 1}));
  CHECK(hh.classification == Classification::ProvenUnstable);
  CHECK_THAT(hh.ratio, WithinAbs(4.0 / (kProton + 1.0), 1e-9));
  CHECK_THAT(hh.ratio, WithinAbs(0.00217729, 1e-8));  // quoted to six figures
  CHECK_THAT(hh.margin, WithinRel(critical_ratio() - hh.ratio, 1e-15));

  const auto pmu = classify(FourBodySystem({kProton, kMuon, 1, 1}));
  CHECK(pmu.classification == Classification::ProvenUnstable);

  const auto ps2 = classify(FourBodySystem({1, 1, 1, 1}));
  CHECK(ps2.classification == Classification::Indeterminate);
  CHECK(ps2.ratio == 2.0);
}

TEST_CASE("the exact constant is used, not a rounded one") {
  // ratio between 0.067 and the exact constant: m with 4/(m+1) = 0.06701
  const double m = 4.0 / 0.06701 - 1.0;
  const auto v = classify(FourBodySystem({m, m, 1, 1}));
  CHECK(v.ratio > 0.067);
  CHECK(v.classification == Classification::ProvenUnstable);

  // just above the exact constant
  const double m2 = 4.0 / (critical_ratio() * (1 + 1e-9)) - 1.0;
  CHECK(classify(FourBodySystem({m2, m2, 1, 1})).classification == Classification::Indeterminate);
}

TEST_CASE("verdicts are invariant under mass scaling") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 2000; ++i) {
    std::array<double, 4> m{};
    for (double& v : m) v = log_uniform(rng, 1e-2, 1e4);
    const FourBodySystem sys(m);
    const auto v = classify(sys);
    const auto w = classify(sys.scaled(log_uniform(rng, 1e-6, 1e6)));
    CHECK(v.classification == w.classification);
    CHECK_THAT(w.ratio, WithinAbs(v.ratio, 1e-12 * std::max(1.0, v.ratio)));
  }
}
