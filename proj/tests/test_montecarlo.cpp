#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "fdpc/analytic.hpp"
#include "fdpc/model.hpp"
#include "fdpc/montecarlo.hpp"
#include "fdpc/power_control.hpp"
#include "helpers.hpp"

using namespace fdpc;

namespace {
const NetworkConfig kCfg;

SimulationSpec spec_with(long trials, std::uint64_t seed) {
  SimulationSpec s;
  s.n_trials = trials;
  s.seed = seed;
  return s;
}
}  // namespace

TEST_CASE("simulation spec validation", "[montecarlo]") {
  SimulationSpec s;
  REQUIRE(s.resolved_window(kCfg) == Catch::Approx(10000.0));
  s.window_radius = 5000.0;  // below 10/sqrt(lambda)
  REQUIRE_THROWS_AS(s.validate(kCfg), std::invalid_argument);
  s.window_radius = 0.0;
  s.n_trials = 0;
  REQUIRE_THROWS_AS(s.validate(kCfg), std::invalid_argument);
}

TEST_CASE("deployment statistics", "[montecarlo]") {
  const SimulationSpec spec = spec_with(1, 7);
  Rng root(spec.seed);

  // expected number of active pairs: lambda_b * area; also check the count
  // restricted to a 5000 m subdisk, lambda_b * pi * 25e6 = 77.84
  double count = 0.0, count_sub = 0.0;
  std::vector<double> marks;
  const int n_deps = 400;
  for (int t = 0; t < n_deps; ++t) {
    const Deployment dep = sample_deployment(kCfg, ConstantPower{}, spec, root.fork(t));
    count += static_cast<double>(dep.pairs.size() - 1);
    for (std::size_t i = 1; i < dep.pairs.size(); ++i) {
      const auto& p = dep.pairs[i];
      if (p.bs.x * p.bs.x + p.bs.y * p.bs.y < 5000.0 * 5000.0) count_sub += 1.0;
      const double dx = p.ue.x - p.bs.x, dy = p.ue.y - p.bs.y;
      marks.push_back(std::hypot(dx, dy));
      REQUIRE(p.power <= kCfg.p_max);
      REQUIRE(p.bs_active);
    }
    REQUIRE(dep.pairs[0].ue.x == 0.0);  // the typical UE sits at the origin
    REQUIRE(dep.pairs[0].ue.y == 0.0);
  }
  const double lambda_b = active_density(kCfg).lambda_b;
  const double expect_all = lambda_b * std::numbers::pi * 1e8;
  const double expect_sub = lambda_b * std::numbers::pi * 25e6;
  REQUIRE(expect_sub == Catch::Approx(77.84).margin(0.01));
  REQUIRE(count / n_deps ==
          Catch::Approx(expect_all).margin(3.0 * std::sqrt(expect_all / n_deps)));
  REQUIRE(count_sub / n_deps ==
          Catch::Approx(expect_sub).margin(3.0 * std::sqrt(expect_sub / n_deps)));

  // mark distances follow the link-distance law (KS at 0.01)
  const double d = testutil::ks_statistic(
      marks, [](double r) { return link_distance_cdf(r, kCfg.lambda_bs); });
  REQUIRE(d < testutil::ks_critical_01(marks.size()));
}

TEST_CASE("zero UE density gives an interferer-free deployment", "[montecarlo]") {
  NetworkConfig cfg = kCfg;
  cfg.lambda_ue = 0.0;  // every BS idle
  Rng root(3);
  const Deployment dep = sample_deployment(cfg, ConstantPower{}, spec_with(1, 3), root);
  REQUIRE(dep.pairs.size() == 1);  // only the typical pair
}

TEST_CASE("aggregate interference hand values", "[montecarlo]") {
  Deployment dep;
  dep.window_radius = 10000.0;
  dep.edge = EdgeHandling::guard_zone;
  dep.typical_link_distance = 100.0;
  dep.pairs.push_back({{100.0, 0.0}, {0.0, 0.0}, 2.0, true, true});  // typical

  FadingField fading;
  fading.h_bs = {1.0};
  fading.h_ue = {1.0};
  // empty field
  REQUIRE(aggregate_interference(dep, {0.0, 0.0}, 0, kCfg, fading) == 0.0);

  // one interferer at 1000 m, UE co-located, unit fading:
  // I = (2 + 0.2) * 1000^-4 = 2.2e-12
  dep.pairs.push_back({{1000.0, 0.0}, {1000.0, 0.0}, 2.0, true, true});
  fading.h_bs = {1.0, 1.0};
  fading.h_ue = {1.0, 1.0};
  REQUIRE(aggregate_interference(dep, {0.0, 0.0}, 0, kCfg, fading) ==
          Catch::Approx(2.2e-12).epsilon(1e-12));
  // sleeping BS keeps its UE interfering
  dep.pairs[1].bs_active = false;
  dep.pairs[1].power = 0.0;
  REQUIRE(aggregate_interference(dep, {0.0, 0.0}, 0, kCfg, fading) ==
          Catch::Approx(0.2e-12).epsilon(1e-12));
}

TEST_CASE("torus wraps distances", "[montecarlo]") {
  Deployment dep;
  dep.window_radius = 1000.0;  // half-side
  dep.edge = EdgeHandling::torus;
  dep.pairs.push_back({{0.0, 0.0}, {0.0, 0.0}, 2.0, true, false});  // typical
  dep.pairs.push_back({{1990.0, 0.0}, {1990.0, 0.0}, 2.0, true, false});
  FadingField fading;
  fading.h_bs = {1.0, 1.0};
  fading.h_ue = {1.0, 1.0};
  // min-image distance is 10, not 1990
  REQUIRE(aggregate_interference(dep, {0.0, 0.0}, 0, kCfg, fading) ==
          Catch::Approx(2.0 * std::pow(10.0, -4.0)).epsilon(1e-12));
}

TEST_CASE("empirical laplace transform", "[montecarlo]") {
  // s = 0 is exactly one with zero variance
  const auto at0 = empirical_laplace(0.0, kCfg, ConstantPower{}, spec_with(2000, 11));
  REQUIRE(at0.mean == 1.0);
  REQUIRE(at0.ci_halfwidth_95 == 0.0);

  // spot argument lies between the closed-form bounds (2 CI slack)
  const double s = 3.125e10;
  const auto est = empirical_laplace(s, kCfg, ConstantPower{}, spec_with(20000, 11));
  const double lo = laplace_bound(s, kCfg, ConstantPower{}, BoundKind::lower);
  const double hi = laplace_bound(s, kCfg, ConstantPower{}, BoundKind::upper);
  REQUIRE(est.mean > lo - 2.0 * est.ci_halfwidth_95);
  REQUIRE(est.mean < hi + 2.0 * est.ci_halfwidth_95);

  // denser network, lower transform
  NetworkConfig dense = kCfg;
  dense.lambda_bs = 2e-6;
  dense.lambda_ue = 2e-5;
  SimulationSpec dspec = spec_with(20000, 11);
  const auto denser = empirical_laplace(s, dense, ConstantPower{}, dspec);
  REQUIRE(denser.mean < est.mean);
}

TEST_CASE("coverage estimates against analytic brackets", "[montecarlo]") {
  const auto spec = spec_with(37000, 42);
  const auto dl = estimate_coverage(Direction::dl, kCfg, ConstantPower{}, spec);
  const double lo = coverage_dl(kCfg, ConstantPower{}, BoundKind::lower);
  const double hi = coverage_dl(kCfg, ConstantPower{}, BoundKind::upper);
  REQUIRE(dl.mean > lo - 2.0 * dl.ci_halfwidth_95);
  REQUIRE(dl.mean < hi + 2.0 * dl.ci_halfwidth_95);
  REQUIRE(dl.ci_halfwidth_95 < 0.01);

  const auto ul = estimate_coverage(Direction::ul, kCfg, ConstantPower{}, spec);
  const double ulo = coverage_ul(kCfg, ConstantPower{}, BoundKind::lower);
  const double uhi = coverage_ul(kCfg, ConstantPower{}, BoundKind::upper);
  REQUIRE(ul.mean > ulo - 2.0 * ul.ci_halfwidth_95);
  REQUIRE(ul.mean < uhi + 2.0 * ul.ci_halfwidth_95);
}

TEST_CASE("total self-interference kills coverage", "[montecarlo]") {
  NetworkConfig cfg = kCfg;
  cfg.beta = 1.0;  // no cancellation at all
  const auto dl = estimate_coverage(Direction::dl, cfg, ConstantPower{}, spec_with(2000, 1));
  REQUIRE(dl.mean == 0.0);
}

TEST_CASE("hd baseline matches the closed form", "[montecarlo]") {
  const auto est = estimate_hd_coverage(Direction::dl, kCfg, spec_with(37000, 42));
  REQUIRE(est.mean == Catch::Approx(0.391104918192).margin(2.0 * est.ci_halfwidth_95));
}

TEST_CASE("report assembles rates from coverage", "[montecarlo]") {
  const auto spec = spec_with(8000, 5);
  const auto rep = estimate_report(kCfg, ConstantPower{}, spec);
  REQUIRE(rep.source == ReportSource::monte_carlo);
  REQUIRE(rep.rate_dl == Catch::Approx(kCfg.rate_ue * rep.p_dl));
  REQUIRE(rep.rate_ul == Catch::Approx(kCfg.rate_bs * rep.p_ul));
  REQUIRE(rep.ase ==
          Catch::Approx(active_density(kCfg).lambda_b * (rep.rate_ul + rep.rate_dl) /
                        kCfg.bandwidth_w));
  REQUIRE(rep.ci.has_value());
  REQUIRE(rep.ee > 0.0);
  // constant power: EE is the rate over the fixed consumed power
  REQUIRE(rep.ee == Catch::Approx((rep.rate_ul + rep.rate_dl) / 2.35).epsilon(1e-9));
}

TEST_CASE("determinism across thread counts", "[montecarlo]") {
  for (int threads : {1, 2, 4}) {
    SimulationSpec spec = spec_with(6000, 99);
    spec.n_threads = threads;
    const auto rep = estimate_report(kCfg, ConstantPower{}, spec);
    static double first_p_dl = rep.p_dl, first_ee = rep.ee;
    REQUIRE(rep.p_dl == first_p_dl);  // bit identical
    REQUIRE(rep.ee == first_ee);
  }
}

TEST_CASE("identical seeds, identical estimates for reduced schemes", "[montecarlo]") {
  const auto spec = spec_with(4000, 1234);
  const auto cpc = estimate_report(kCfg, ConstantPower{}, spec);
  const auto apc1 = estimate_report(kCfg, OnOffPower{2.0, 1.0}, spec);
  const auto fpc0 = estimate_report(kCfg, FractionalPower{2.0, 0.0, 2.0}, spec);
  REQUIRE(apc1.p_dl == cpc.p_dl);  // bit identical
  REQUIRE(apc1.p_ul == cpc.p_ul);
  REQUIRE(apc1.ee == cpc.ee);
  REQUIRE(fpc0.p_dl == cpc.p_dl);
  REQUIRE(fpc0.p_ul == cpc.p_ul);
  REQUIRE(fpc0.ee == cpc.ee);
}

TEST_CASE("guard zone: doubling the window moves estimates within noise", "[montecarlo]") {
  SimulationSpec small = spec_with(20000, 31);
  SimulationSpec big = small;
  big.window_radius = 20000.0;
  const auto a = estimate_coverage(Direction::dl, kCfg, ConstantPower{}, small);
  const auto b = estimate_coverage(Direction::dl, kCfg, ConstantPower{}, big);
  REQUIRE(std::abs(a.mean - b.mean) < a.ci_halfwidth_95);
}

TEST_CASE("torus edge handling agrees with the guard zone", "[montecarlo]") {
  SimulationSpec torus = spec_with(20000, 8);
  torus.edge_handling = EdgeHandling::torus;
  const auto a = estimate_coverage(Direction::dl, kCfg, ConstantPower{}, torus);
  const auto b = estimate_coverage(Direction::dl, kCfg, ConstantPower{}, spec_with(20000, 8));
  REQUIRE(std::abs(a.mean - b.mean) < 2.0 * (a.ci_halfwidth_95 + b.ci_halfwidth_95));
}

TEST_CASE("bernoulli CI verified by bootstrap", "[montecarlo]") {
  // build the indicator sample through the public sampling ops
  const long n = 4000;
  const auto th = thresholds(kCfg);
  SimulationSpec spec = spec_with(n, 17);
  Rng root(spec.seed);
  std::vector<double> indicators;
  indicators.reserve(n);
  for (long i = 0; i < n; ++i) {
    Rng trial = root.fork(static_cast<std::uint64_t>(i));
    const Deployment dep = sample_deployment(kCfg, ConstantPower{}, spec, trial);
    const FadingField fading = draw_fadings(dep, trial, 3);
    const double interference = aggregate_interference(dep, {0.0, 0.0}, 0, kCfg, fading);
    Rng hrng = trial.fork(1000);
    const double h = hrng.exponential();
    const double r = dep.typical_link_distance;
    const double sir =
        dep.pairs[0].power * h * std::pow(r, -kCfg.alpha) / (kCfg.beta * kCfg.p_ue + interference);
    indicators.push_back(sir > th.theta_u ? 1.0 : 0.0);
  }
  const double p = testutil::mean(indicators);
  const double formula_sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(n));

  Rng brng(555);
  std::vector<double> boots;
  for (int b = 0; b < 400; ++b) {
    double s = 0.0;
    for (long i = 0; i < n; ++i)
      s += indicators[static_cast<std::size_t>(brng.next_u64() % n)];
    boots.push_back(s / static_cast<double>(n));
  }
  const double boot_sigma = testutil::sample_std(boots);
  REQUIRE(boot_sigma == Catch::Approx(formula_sigma).epsilon(0.15));
}

TEST_CASE("empirical idle fraction near the thinning approximation", "[montecarlo]") {
  SimulationSpec spec = spec_with(120, 2718);
  const auto est = empirical_idle_fraction(kCfg, spec);
  const double p0 = active_density(kCfg).p0;
  // the approximation is expected to sit within 20% relative
  REQUIRE(std::abs(est.mean - p0) < 0.2 * p0);
}
