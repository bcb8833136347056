// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/multiprecision/cpp_dec_float.hpp>

#include "fourbody/fourbody.hpp"

using namespace fourbody;

namespace {

constexpr double kProton = 1836.152672;
constexpr double kMuon = 206.768283;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::string g(double x) { return io::format_double(x, 10); }

Outcome exact_constant() {
  Outcome o;
  using boost::multiprecision::cpp_dec_float_50;
  const cpp_dec_float_50 hp = (cpp_dec_float_50(13) - 2 * sqrt(cpp_dec_float_50(22))) / 54;
  const double diff = std::abs(critical_ratio() - hp.convert_to<double>());
  o.require(diff <= 1e-12, "high-precision agreement");

  auto f = [](double mu) { return 3.0 * mu * chain_coefficient(mu) - 1.0; };
  boost::math::tools::eps_tolerance<double> tol(52);
  std::uintmax_t iters = 200;
  const auto [lo, hi] = boost::math::tools::bisect(f, 1e-6, 0.3, tol, iters);
  const double root = 0.5 * (lo + hi);
  const double residual = std::abs(f(2.0 * critical_ratio()));
  o.require(residual < 1e-10, "bisection residual");
  o.require(std::abs(root - 2.0 * critical_ratio()) < 1e-12, "bisection root");
  o.detail << "ratio " << io::format_double(critical_ratio(), 17) << ", |diff| " << g(diff)
           << ", residual " << g(residual);
  return o;
}

Outcome verdicts() {
  Outcome o;
  const auto hh = classify(FourBodySystem({kProton, kProton, 1, 1}));
  o.require(hh.classification == Classification::ProvenUnstable, "H-Hbar verdict");
  o.require(std::abs(hh.ratio - 4.0 / (kProton + 1.0)) <= 1e-9, "H-Hbar ratio");
  const auto pmu = classify(FourBodySystem({kProton, kMuon, 1, 1}));
  o.require(pmu.classification == Classification::ProvenUnstable, "p mu e e verdict");
  const auto eq = classify(FourBodySystem({1, 1, 1, 1}));
  o.require(eq.classification == Classification::Indeterminate, "equal masses verdict");
  o.detail << "H-Hbar " << to_string(hh.classification) << " ratio " << g(hh.ratio) << ", p mu e e "
           << to_string(pmu.classification) << " ratio " << g(pmu.ratio) << ", equal masses "
           << to_string(eq.classification);
  return o;
}

Outcome chain_suite() {
  Outcome o;
  std::mt19937_64 rng(3);
  double worst_identity = 0.0, worst_search = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double mu = uniform(rng, 1e-3, 0.375);
    const double beta = uniform(rng, 0.0, 10.0);
    const auto e = chain::lambda_envelope(beta, mu);
    const double scale = std::max(1.0, std::abs(e.closed_form));
    worst_identity = std::max(worst_identity, std::abs(e.value - e.closed_form) / scale);
    if (i % 10 == 0) {
      auto neg = [&](double l) { return -chain::lambda_objective(l, beta, mu); };
      const double top = std::max(1.0, 2.0 * beta * beta / mu);
      const double found = -boost::math::tools::brent_find_minima(neg, -1.0, top, 60).second;
      worst_search = std::max(worst_search, std::abs(found - e.closed_form) / scale);
    }
  }
  o.require(worst_identity <= 1e-9, "envelope identity");
  o.require(worst_search <= 1e-9, "envelope against direct maximisation");

  double grid_min = std::numeric_limits<double>::infinity(), analytic = 0.0;
  const auto alphas = chain::linspace(0.0, 10.0, 201);
  const auto betas = chain::linspace(0.0, 10.0, 201);
  std::uniform_real_distribution<double> open(0.0, 0.375);
  for (int i = 0; i < 100; ++i) {
    double mu = 0.0;
    while (!(mu > 0.0 && mu < 0.375)) mu = open(rng);
    const auto rep = chain::verify_quadratic_inequality(mu, alphas, betas);
    grid_min = std::min(grid_min, rep.grid_min);
    analytic = std::max(analytic, std::abs(rep.analytic_min));
  }
  o.require(grid_min >= -1e-9, "grid minimum");
  o.require(analytic <= 1e-8, "analytic minimum");
  o.detail << "envelope max rel dev " << g(worst_identity) << " (search " << g(worst_search)
           << "), grid min " << g(grid_min) << ", max |analytic min| " << g(analytic);
  return o;
}

Outcome spectral_inputs() {
  Outcome o;
  const auto h = chain::grid_spectral_check(2.0);
  o.require(std::abs(h.e0 + 1.0) <= 1e-6, "E0 = -1");
  o.require(std::abs(h.e1 + 0.25) <= 1e-6, "E1 = -1/4");
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& t : chain::hardy_trial_family()) worst = std::min(worst, chain::hardy_check(0.25, t));
  o.require(worst >= -1e-8, "Hardy positivity at 1/4");
  const auto v = chain::hardy_violation(0.26);
  o.require(v.quotient < 0.0, "violation at 0.26");
  o.require(std::abs(v.scaling_ratio - 4.0) <= 0.05 * 4.0, "1/s^2 scaling");
  o.detail << "E0 " << g(h.e0) << ", E1 " << g(h.e1) << ", Hardy min " << g(worst) << ", 0.26 quotient "
           << g(v.quotient) << " ratio " << g(v.scaling_ratio);
  return o;
}

Outcome effective_potentials() {
  Outcome o;
  std::mt19937_64 rng(5);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    std::array<double, 4> m{};
    for (double& v : m) v = log_uniform(rng, 1e-2, 1e4);
    const effpot::InteractionDecomposition d(m[1] / (m[0] + m[1]), m[3] / (m[2] + m[3]));
    const effpot::JacobiPoint p{log_uniform(rng, 1e-2, 1e2) * random_direction(rng),
                                log_uniform(rng, 1e-2, 1e2) * random_direction(rng),
                                log_uniform(rng, 1e-2, 1e2) * random_direction(rng)};
    const auto r = effpot::pair_distance_oracle(m, p);
    for (const auto& [v, exact] : {std::pair{d.v13(p), 1.0 / r.r13}, std::pair{d.v14(p), -1.0 / r.r14},
                                   std::pair{d.v23(p), -1.0 / r.r23}, std::pair{d.v24(p), 1.0 / r.r24}}) {
      worst = std::max(worst, std::abs(v - exact) / std::abs(exact));
    }
  }
  o.require(worst <= 1e-12, "pair potentials");

  double min_residual = std::numeric_limits<double>::infinity();
  std::size_t samples = 0;
  for (int k = 0; k < 10; ++k) {
    const effpot::InteractionDecomposition d(uniform(rng, 0.01, 0.99), uniform(rng, 0.01, 0.99));
    for (const auto& s : effpot::stratified_samples(100, 500 + k, d.b())) {
      const auto chk = effpot::veff_bound_check(d, s.y, s.R);
      min_residual = std::min({min_residual, chk.residual1, chk.residual2});
      ++samples;
    }
  }
  o.require(samples == 1000, "sample count");
  o.require(min_residual >= -1e-6, "3/16 envelopes");
  o.detail << "V_ik max rel dev " << g(worst) << ", envelope min residual " << g(min_residual) << " over "
           << samples << " samples";
  return o;
}

Outcome two_center() {
  Outcome o;
  const double A = 1.0, mu = 0.375;
  const double floor = -2.0 * A * A * mu;
  double prev = -std::numeric_limits<double>::infinity(), worst_drop = 0.0, e0 = 0.0;
  for (double d : {0.0, 0.5, 1.0, 2.0, 4.0, 8.0}) {
    const double e = twocenter::two_center_ground(A, mu, d).energy;
    if (d == 0.0) e0 = e;
    worst_drop = std::max(worst_drop, prev - e);
    prev = e;
  }
  const double rel0 = (e0 - floor) / std::abs(floor);
  o.require(rel0 >= 0.0 && rel0 <= 1e-4, "E(0)");
  o.require(worst_drop <= 1e-4, "monotone E(d)");
  const double far = twocenter::two_center_ground(A, mu, 1e4).energy;
  o.require(std::abs(far + A * A * mu / 2.0) <= 1e-3, "large-d limit");
  o.detail << "E(0) " << g(e0) << " (rel " << g(rel0) << "), max drop " << g(worst_drop) << ", E(1e4) "
           << g(far);
  return o;
}

Outcome solver() {
  Outcome o;
  for (double mu : {0.5, 1.0, 2.0, 918.076336}) {
    ecg::SvmOptions opt;
    opt.target = 30;
    opt.pool = 50;
    const auto r = ecg::svm_grow(ecg::ParticleSystem({2.0 * mu, 2.0 * mu}, {1, -1}), opt);
    const double rel = std::abs(r.spectrum.e0 + mu / 2.0) / (mu / 2.0);
    o.require(rel <= 1e-6, "two-body mu = " + g(mu));
    o.detail << "2-body mu " << g(mu) << " rel " << g(rel) << "; ";
  }
  {
    ecg::SvmOptions opt;
    opt.target = 150;
    const auto r = ecg::svm_grow(ecg::ParticleSystem({1, 1, 1}, {-1, 1, -1}), opt);
    o.require(r.spectrum.e0 <= -0.2615, "Ps- at 150");
    o.detail << "Ps- " << g(r.spectrum.e0) << "; ";
  }
  {
    const auto r = ecg::stability_probe(FourBodySystem({1, 1, 1, 1}), {200, 200, 42, 1e12});
    o.require(r.e0 <= -0.51 && r.certified_bound, "Ps2 at 200");
    o.detail << "Ps2 " << g(r.e0) << " certified " << (r.certified_bound ? "yes" : "no") << "; ";
  }
  for (const auto& [name, m] : {std::pair{"H-Hbar", std::array<double, 4>{kProton, kProton, 1, 1}},
                                std::pair{"p mu e e", std::array<double, 4>{kProton, kMuon, 1, 1}}}) {
    try {
      const auto r = ecg::stability_probe(FourBodySystem(m), {200, 200, 42, 1e12});
      bool ever = false;
      for (double e : r.trace) ever = ever || e < r.threshold - r.eps_cert;
      o.require(!ever, std::string(name) + " never certifies");
      o.detail << name << " E0 " << g(r.e0) << " vs E_th " << g(r.threshold) << "; ";
    } catch (const InconsistencyError&) {
      o.require(false, std::string(name) + " certified");
    }
  }
  return o;
}

Outcome global_consistency() {
  Outcome o;
  std::mt19937_64 rng(8);
  int contradictions = 0, certified = 0, unstable = 0;
  for (int i = 0; i < 50; ++i) {
    std::array<double, 4> m{};
    for (double& v : m) v = log_uniform(rng, 1e-1, 1e4);
    const FourBodySystem sys(m);
    try {
      const auto r = ecg::stability_probe(sys, {60, 60, static_cast<std::uint64_t>(i), 1e12});
      const bool proven = r.verdict.classification == Classification::ProvenUnstable;
      unstable += proven;
      certified += r.certified_bound;
      contradictions += proven && r.certified_bound;
    } catch (const InconsistencyError&) {
      ++contradictions;
    }
  }
  o.require(contradictions == 0, "no contradictions");

  double worst = 0.0;
  bool same = true;
  for (int i = 0; i < 2000; ++i) {
    std::array<double, 4> m{};
    for (double& v : m) v = log_uniform(rng, 1e-2, 1e4);
    const FourBodySystem sys(m);
    const auto v = classify(sys);
    const auto w = classify(sys.scaled(log_uniform(rng, 1e-6, 1e6)));
    same = same && v.classification == w.classification;
    worst = std::max(worst, std::abs(v.ratio - w.ratio) / v.ratio);
  }
  o.require(same, "verdicts under rescaling");
  o.require(worst <= 1e-12, "ratio under rescaling");
  o.detail << "50 systems: " << unstable << " proven unstable, " << certified << " certified, "
           << contradictions << " contradictions; rescaling max rel dev " << g(worst);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"exact constant", exact_constant},
      {"verdicts", verdicts},
      {"chain suite", chain_suite},
      {"spectral inputs", spectral_inputs},
      {"effective potentials", effective_potentials},
      {"two-center", two_center},
      {"solver", solver},
      {"global consistency", global_consistency},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    bool pass = false;
    std::string detail;
    try {
      const auto o = criteria[i].second();
      pass = o.pass;
      detail = o.detail.str();
      while (!detail.empty() && (detail.back() == ' ' || detail.back() == ';')) detail.pop_back();
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %zu %-21s %s  (%.1f s) %s\n", i + 1, criteria[i].first, pass ? "PASS" : "FAIL", secs,
                detail.c_str());
    std::fflush(stdout);
    failed += !pass;
  }
  return failed == 0 ? 0 : 1;
}
