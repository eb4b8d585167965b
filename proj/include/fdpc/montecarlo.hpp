#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "fdpc/model.hpp"
#include "fdpc/power_control.hpp"
#include "fdpc/rng.hpp"

namespace fdpc {

enum class EdgeHandling { guard_zone, torus };
enum class Direction { ul, dl };

struct SimulationSpec {
  double window_radius = 0.0;  // 0 = auto: 10/sqrt(lambda_bs)
  long n_trials = 37000;
  std::uint64_t seed = 1;
  EdgeHandling edge_handling = EdgeHandling::guard_zone;
  double target_ci_halfwidth = 0.005;
  int n_threads = 0;  // 0 = hardware concurrency
  // Freeze the typical pair's link distance (crossover experiments).
  std::optional<double> fixed_link_distance;

  double resolved_window(const NetworkConfig& cfg) const {
    return window_radius > 0.0 ? window_radius : 10.0 / std::sqrt(cfg.lambda_bs);
  }

  void validate(const NetworkConfig& cfg) const {
    if (n_trials < 1) throw std::invalid_argument("n_trials must be >= 1");
    const double min_window = 10.0 / std::sqrt(cfg.lambda_bs);
    if (resolved_window(cfg) < min_window * (1.0 - 1e-9))
      throw std::invalid_argument("window_radius must be >= 10/sqrt(lambda_bs)");
  }
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct DeployedPair {
  Vec2 bs;
  Vec2 ue;
  double power = 0.0;   // BS transmit power this slot (0 while sleeping)
  bool bs_active = false;
  bool ue_active = false;
};

// One sampled realization. pairs[0] is the typical pair, its UE at the
// origin (Palm convention); the remainder are the active interferers.
struct Deployment {
  std::vector<DeployedPair> pairs;
  double window_radius = 0.0;
  EdgeHandling edge = EdgeHandling::guard_zone;
  double typical_link_distance = 0.0;
};

// Per-pair fading toward one receiver (unit-mean exponential, i.i.d. per
// slot).
struct FadingField {
  std::vector<double> h_bs;
  std::vector<double> h_ue;
};

struct EstimateWithCI {
  double mean = 0.0;
  double ci_halfwidth_95 = 0.0;
  long n_trials = 0;
};

namespace detail {

// fixed substream tags so scheme-specific draws never shift other draws
enum : std::uint64_t {
  kTagTypical = 1,
  kTagCount = 2,
  kTagPairBase = 16,
  kSubPos = 0,
  kSubLink = 1,
  kSubPower = 2,
  kSubOrigin = 3,   // fading toward the typical UE
  kSubBsSite = 4,   // fading toward the typical BS
};

inline Vec2 sample_point(Rng& rng, double window, EdgeHandling edge) {
  if (edge == EdgeHandling::torus) {
    return {rng.uniform(-window, window), rng.uniform(-window, window)};
  }
  // uniform in the disk
  const double r = window * std::sqrt(rng.uniform_co());
  const double a = rng.uniform(0.0, 2.0 * std::numbers::pi);
  return {r * std::cos(a), r * std::sin(a)};
}

inline double sq_distance(const Vec2& a, const Vec2& b, double window, EdgeHandling edge) {
  double dx = a.x - b.x;
  double dy = a.y - b.y;
  if (edge == EdgeHandling::torus) {
    const double period = 2.0 * window;
    dx -= period * std::round(dx / period);
    dy -= period * std::round(dy / period);
  }
  return dx * dx + dy * dy;
}

}  // namespace detail

// One realization of the marked process: active BSs thinned to lambda_b,
// each with its paired UE at a link-law mark, powers drawn by the scheme,
// plus the typical pair at the origin.
inline Deployment sample_deployment(const NetworkConfig& cfg, const PowerControlScheme& scheme,
                                    const SimulationSpec& spec, const Rng& rng) {
  validate_scheme(scheme, cfg);
  const double window = spec.resolved_window(cfg);
  const double lambda_b = active_density(cfg).lambda_b;
  const double area = spec.edge_handling == EdgeHandling::torus
                          ? 4.0 * window * window
                          : std::numbers::pi * window * window;

  Deployment dep;
  dep.window_radius = window;
  dep.edge = spec.edge_handling;

  // typical pair: UE at the origin, BS at the sampled link distance
  {
    Rng tr = rng.fork(detail::kTagTypical);
    Rng link_rng = tr.fork(detail::kSubLink);
    const double r = spec.fixed_link_distance ? *spec.fixed_link_distance
                                              : sample_link_distance(link_rng, cfg.lambda_bs);
    Rng pos_rng = tr.fork(detail::kSubPos);
    const double a = pos_rng.uniform(0.0, 2.0 * std::numbers::pi);
    Rng pow_rng = tr.fork(detail::kSubPower);
    const double p = sample_power(scheme, cfg, r, pow_rng);
    DeployedPair typical;
    typical.bs = {r * std::cos(a), r * std::sin(a)};
    typical.ue = {0.0, 0.0};
    typical.power = p;
    typical.bs_active = p > 0.0;
    typical.ue_active = cfg.apc_ue_always_on || typical.bs_active;
    dep.typical_link_distance = r;
    dep.pairs.push_back(typical);
  }

  Rng count_rng = rng.fork(detail::kTagCount);
  const std::uint64_t n = count_rng.poisson(lambda_b * area);
  dep.pairs.reserve(n + 1);
  for (std::uint64_t i = 0; i < n; ++i) {
    Rng pr = rng.fork(detail::kTagPairBase + i);
    Rng pos_rng = pr.fork(detail::kSubPos);
    Rng link_rng = pr.fork(detail::kSubLink);
    Rng pow_rng = pr.fork(detail::kSubPower);
    DeployedPair pair;
    pair.bs = detail::sample_point(pos_rng, window, spec.edge_handling);
    const double r = sample_link_distance(link_rng, cfg.lambda_bs);
    const double a = pos_rng.uniform(0.0, 2.0 * std::numbers::pi);
    pair.ue = {pair.bs.x + r * std::cos(a), pair.bs.y + r * std::sin(a)};
    pair.power = sample_power(scheme, cfg, r, pow_rng);
    pair.bs_active = pair.power > 0.0;
    pair.ue_active = cfg.apc_ue_always_on || pair.bs_active;
    dep.pairs.push_back(pair);
  }
  return dep;
}

// Fadings toward one receiver, addressed by the per-pair substream `sub`.
inline FadingField draw_fadings(const Deployment& dep, const Rng& rng, std::uint64_t sub) {
  FadingField f;
  f.h_bs.resize(dep.pairs.size());
  f.h_ue.resize(dep.pairs.size());
  for (std::size_t i = 0; i < dep.pairs.size(); ++i) {
    const std::uint64_t tag = i == 0 ? detail::kTagTypical : detail::kTagPairBase + (i - 1);
    Rng fr = rng.fork(tag).fork(sub);
    f.h_bs[i] = fr.exponential();
    f.h_ue[i] = fr.exponential();
  }
  return f;
}

// Aggregate interference at `receiver` from every active pair except
// `exclude`: BS term P_i h d^-alpha plus the paired UE's term
// p_ue h' d'^-alpha.
inline double aggregate_interference(const Deployment& dep, const Vec2& receiver,
                                     std::size_t exclude, const NetworkConfig& cfg,
                                     const FadingField& fading) {
  double total = 0.0;
  const double half_alpha = 0.5 * cfg.alpha;
  for (std::size_t i = 0; i < dep.pairs.size(); ++i) {
    if (i == exclude) continue;
    const auto& pair = dep.pairs[i];
    if (pair.bs_active) {
      const double d2 = detail::sq_distance(pair.bs, receiver, dep.window_radius, dep.edge);
      total += pair.power * fading.h_bs[i] * std::pow(d2, -half_alpha);
    }
    if (pair.ue_active) {
      const double d2 = detail::sq_distance(pair.ue, receiver, dep.window_radius, dep.edge);
      total += cfg.p_ue * fading.h_ue[i] * std::pow(d2, -half_alpha);
    }
  }
  return total;
}

namespace detail {

struct TrialOutcome {
  bool dl_attempted = false;  // typical BS transmitting
  bool dl_success = false;
  bool ul_attempted = false;
  bool ul_success = false;
  double ee_sample = 0.0;  // earned rate over consumed power, this slot
};

// Runs both directions of one slot for the typical pair.
inline TrialOutcome run_pair_trial(const NetworkConfig& cfg, const PowerControlScheme& scheme,
                                   const SimulationSpec& spec, Rng trial_rng) {
  const Deployment dep = sample_deployment(cfg, scheme, spec, trial_rng);
  const auto th = thresholds(cfg);
  const auto& typical = dep.pairs[0];
  const double r = dep.typical_link_distance;
  const double path = std::pow(r, -cfg.alpha);

  Rng tr = trial_rng.fork(kTagTypical);
  Rng desired = tr.fork(kSubOrigin + 10);
  const double h_dl = desired.exponential();
  const double h_ul = desired.exponential();

  TrialOutcome out;
  out.dl_attempted = typical.bs_active;
  out.ul_attempted = typical.ue_active;

  double i_dl = 0.0;
  if (out.dl_attempted) {
    const FadingField fading = draw_fadings(dep, trial_rng, kSubOrigin);
    i_dl = aggregate_interference(dep, typical.ue, 0, cfg, fading);
    const double sir = typical.power * h_dl * path / (cfg.beta * cfg.p_ue + i_dl);
    out.dl_success = sir > th.theta_u;
  }
  if (out.ul_attempted) {
    const FadingField fading = draw_fadings(dep, trial_rng, kSubBsSite);
    const double i_ul = aggregate_interference(dep, typical.bs, 0, cfg, fading);
    const double si = cfg.beta * typical.power;  // zero while the BS sleeps
    const double sir = cfg.p_ue * h_ul * path / (si + i_ul);
    out.ul_success = sir > th.theta_b;
  }
  const double earned = cfg.rate_ue * (out.dl_success ? 1.0 : 0.0) +
                        cfg.rate_bs * (out.ul_success ? 1.0 : 0.0);
  out.ee_sample = earned / (typical.power + cfg.p_ue + cfg.p_static);
  return out;
}

struct BlockSums {
  double dl_succ = 0.0, ul_succ = 0.0;
  double dl_att = 0.0, ul_att = 0.0;
  double ee = 0.0, ee_sq = 0.0;
  long n = 0;

  void add(const TrialOutcome& t) {
    dl_succ += t.dl_success ? 1.0 : 0.0;
    ul_succ += t.ul_success ? 1.0 : 0.0;
    dl_att += t.dl_attempted ? 1.0 : 0.0;
    ul_att += t.ul_attempted ? 1.0 : 0.0;
    ee += t.ee_sample;
    ee_sq += t.ee_sample * t.ee_sample;
    ++n;
  }
};

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::max(1u, std::min(hw, 16u)));
}

// Deterministic parallel trial runner: fixed 256-trial blocks, per-trial
// substreams, block sums merged in block order regardless of thread count.
template <class TrialFn, class Sums>
void run_blocks(long n_trials, int n_threads, const TrialFn& trial, std::vector<Sums>& blocks) {
  constexpr long kBlock = 256;
  const long n_blocks = (n_trials + kBlock - 1) / kBlock;
  blocks.assign(static_cast<std::size_t>(n_blocks), Sums{});
  const int threads = std::min<long>(resolve_threads(n_threads), n_blocks);
  auto worker = [&](int t) {
    for (long b = t; b < n_blocks; b += threads) {
      Sums local{};
      const long lo = b * kBlock;
      const long hi = std::min(lo + kBlock, n_trials);
      for (long i = lo; i < hi; ++i) trial(i, local);
      blocks[static_cast<std::size_t>(b)] = local;
    }
  };
  if (threads <= 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }
}

inline EstimateWithCI bernoulli_estimate(double successes, double n) {
  EstimateWithCI e;
  e.n_trials = static_cast<long>(n);
  if (n <= 0.0) return e;
  e.mean = successes / n;
  e.ci_halfwidth_95 = 1.96 * std::sqrt(std::max(e.mean * (1.0 - e.mean), 0.0) / n);
  return e;
}

inline BlockSums run_all(const NetworkConfig& cfg, const PowerControlScheme& scheme,
                         const SimulationSpec& spec) {
  cfg.validate();
  spec.validate(cfg);
  Rng root(spec.seed);
  std::vector<BlockSums> blocks;
  run_blocks(
      spec.n_trials, spec.n_threads,
      [&](long i, BlockSums& sums) {
        sums.add(run_pair_trial(cfg, scheme, spec, root.fork(static_cast<std::uint64_t>(i))));
      },
      blocks);
  BlockSums total{};
  for (const auto& b : blocks) {
    total.dl_succ += b.dl_succ;
    total.ul_succ += b.ul_succ;
    total.dl_att += b.dl_att;
    total.ul_att += b.ul_att;
    total.ee += b.ee;
    total.ee_sq += b.ee_sq;
    total.n += b.n;
  }
  return total;
}

}  // namespace detail

// Coverage of the typical pair's UL or DL. DL coverage is conditioned on the
// serving BS transmitting (on-off schemes); UL on the UE transmitting.
inline EstimateWithCI estimate_coverage(Direction dir, const NetworkConfig& cfg,
                                        const PowerControlScheme& scheme,
                                        const SimulationSpec& spec) {
  const auto total = detail::run_all(cfg, scheme, spec);
  if (dir == Direction::dl) return detail::bernoulli_estimate(total.dl_succ, total.dl_att);
  return detail::bernoulli_estimate(total.ul_succ, total.ul_att);
}

// Half-duplex baseline: same-type interferers at a common power (which
// cancels out of the SIR), no self-interference, no paired-UE terms.
inline EstimateWithCI estimate_hd_coverage(Direction dir, const NetworkConfig& cfg,
                                           const SimulationSpec& spec) {
  cfg.validate();
  spec.validate(cfg);
  const auto th = thresholds(cfg);
  const double theta = dir == Direction::ul ? th.theta_b : th.theta_u;
  const double lambda_b = active_density(cfg).lambda_b;
  const double window = spec.resolved_window(cfg);
  const double area = spec.edge_handling == EdgeHandling::torus
                          ? 4.0 * window * window
                          : std::numbers::pi * window * window;
  Rng root(spec.seed);
  struct Sums {
    double succ = 0.0;
    long n = 0;
  };
  std::vector<Sums> blocks;
  detail::run_blocks(
      spec.n_trials, spec.n_threads,
      [&](long i, Sums& sums) {
        Rng trial_rng = root.fork(static_cast<std::uint64_t>(i));
        Rng tr = trial_rng.fork(detail::kTagTypical);
        Rng link_rng = tr.fork(detail::kSubLink);
        const double r = spec.fixed_link_distance
                             ? *spec.fixed_link_distance
                             : sample_link_distance(link_rng, cfg.lambda_bs);
        Rng desired = tr.fork(detail::kSubOrigin + 10);
        const double h0 = desired.exponential();
        Rng count_rng = trial_rng.fork(detail::kTagCount);
        const std::uint64_t n = count_rng.poisson(lambda_b * area);
        double interference = 0.0;
        for (std::uint64_t k = 0; k < n; ++k) {
          Rng pr = trial_rng.fork(detail::kTagPairBase + k);
          Rng pos_rng = pr.fork(detail::kSubPos);
          const Vec2 p = detail::sample_point(pos_rng, window, spec.edge_handling);
          Rng fr = pr.fork(detail::kSubOrigin);
          const double d2 = detail::sq_distance(p, Vec2{0.0, 0.0}, window, spec.edge_handling);
          interference += cfg.p_max * fr.exponential() * std::pow(d2, -0.5 * cfg.alpha);
        }
        const double sir = cfg.p_max * h0 * std::pow(r, -cfg.alpha) / interference;
        sums.succ += sir > theta ? 1.0 : 0.0;
        ++sums.n;
      },
      blocks);
  double succ = 0.0;
  long n = 0;
  for (const auto& b : blocks) {
    succ += b.succ;
    n += b.n;
  }
  return detail::bernoulli_estimate(succ, static_cast<double>(n));
}

// Empirical Laplace transform E{exp(-sI)} of the interference at the typical
// UE, one estimate per requested s.
inline std::vector<EstimateWithCI> empirical_laplace(std::span<const double> s,
                                                     const NetworkConfig& cfg,
                                                     const PowerControlScheme& scheme,
                                                     const SimulationSpec& spec) {
  cfg.validate();
  spec.validate(cfg);
  for (double v : s)
    if (v < 0.0) throw std::invalid_argument("laplace argument must be >= 0");
  Rng root(spec.seed);
  struct Sums {
    std::vector<double> sum, sum_sq;
    long n = 0;
  };
  std::vector<Sums> blocks;
  detail::run_blocks(
      spec.n_trials, spec.n_threads,
      [&](long i, Sums& sums) {
        if (sums.sum.empty()) {
          sums.sum.assign(s.size(), 0.0);
          sums.sum_sq.assign(s.size(), 0.0);
        }
        Rng trial_rng = root.fork(static_cast<std::uint64_t>(i));
        const Deployment dep = sample_deployment(cfg, scheme, spec, trial_rng);
        const FadingField fading = draw_fadings(dep, trial_rng, detail::kSubOrigin);
        const double interference =
            aggregate_interference(dep, Vec2{0.0, 0.0}, 0, cfg, fading);
        for (std::size_t k = 0; k < s.size(); ++k) {
          const double v = std::exp(-s[k] * interference);
          sums.sum[k] += v;
          sums.sum_sq[k] += v * v;
        }
        ++sums.n;
      },
      blocks);
  std::vector<EstimateWithCI> out(s.size());
  std::vector<double> sum(s.size(), 0.0), sum_sq(s.size(), 0.0);
  long n = 0;
  for (const auto& b : blocks) {
    if (b.sum.empty()) continue;
    for (std::size_t k = 0; k < s.size(); ++k) {
      sum[k] += b.sum[k];
      sum_sq[k] += b.sum_sq[k];
    }
    n += b.n;
  }
  for (std::size_t k = 0; k < s.size(); ++k) {
    out[k].n_trials = n;
    out[k].mean = sum[k] / static_cast<double>(n);
    const double var =
        std::max(0.0, sum_sq[k] / static_cast<double>(n) - out[k].mean * out[k].mean);
    out[k].ci_halfwidth_95 = 1.96 * std::sqrt(var / static_cast<double>(n));
  }
  return out;
}

inline EstimateWithCI empirical_laplace(double s, const NetworkConfig& cfg,
                                        const PowerControlScheme& scheme,
                                        const SimulationSpec& spec) {
  const double arr[1] = {s};
  return empirical_laplace(std::span<const double>(arr, 1), cfg, scheme, spec)[0];
}

// Full Monte-Carlo performance report with 95% confidence half-widths.
inline PerformanceReport estimate_report(const NetworkConfig& cfg,
                                         const PowerControlScheme& scheme,
                                         const SimulationSpec& spec) {
  const auto total = detail::run_all(cfg, scheme, spec);
  const double n = static_cast<double>(total.n);
  const auto dl = detail::bernoulli_estimate(total.dl_succ, total.dl_att);
  const auto ul = detail::bernoulli_estimate(total.ul_succ, total.ul_att);
  // unconditional success fractions carry the on-off duty cycle naturally
  const auto dl_elig = cfg.apc_rate_includes_xi
                           ? detail::bernoulli_estimate(total.dl_succ, n)
                           : dl;
  const auto ul_elig = detail::bernoulli_estimate(total.ul_succ, n);

  PerformanceReport rep;
  rep.source = ReportSource::monte_carlo;
  rep.p_dl = dl.mean;
  rep.p_ul = ul.mean;
  rep.rate_dl = cfg.rate_ue * dl_elig.mean;
  rep.rate_ul = cfg.rate_bs * ul_elig.mean;
  const double lambda_b = active_density(cfg).lambda_b;
  rep.ase = lambda_b * (rep.rate_dl + rep.rate_ul) / cfg.bandwidth_w;
  rep.ee = total.ee / n;
  const double ee_var = std::max(0.0, total.ee_sq / n - rep.ee * rep.ee);

  ReportCi ci;
  ci.p_dl = dl.ci_halfwidth_95;
  ci.p_ul = ul.ci_halfwidth_95;
  ci.rate_dl = cfg.rate_ue * dl_elig.ci_halfwidth_95;
  ci.rate_ul = cfg.rate_bs * ul_elig.ci_halfwidth_95;
  ci.ase = lambda_b * (ci.rate_dl + ci.rate_ul) / cfg.bandwidth_w;
  ci.ee = 1.96 * std::sqrt(ee_var / n);
  rep.ci = ci;
  return rep;
}

// Fraction of BSs serving no UE, measured from a Voronoi association over a
// jointly sampled UE process. Quantifies the independent-thinning
// approximation behind lambda_b. Interior BSs only (20% guard margin).
inline EstimateWithCI empirical_idle_fraction(const NetworkConfig& cfg,
                                              const SimulationSpec& spec) {
  cfg.validate();
  spec.validate(cfg);
  const double window = spec.resolved_window(cfg);
  const double interior = 0.8 * window;
  Rng root(spec.seed);
  struct Sums {
    double frac = 0.0;
    double frac_sq = 0.0;
    long n = 0;
  };
  std::vector<Sums> blocks;
  detail::run_blocks(
      spec.n_trials, spec.n_threads,
      [&](long t, Sums& sums) {
        Rng trial_rng = root.fork(static_cast<std::uint64_t>(t));
        Rng bs_rng = trial_rng.fork(1);
        Rng ue_rng = trial_rng.fork(2);
        const double area = std::numbers::pi * window * window;
        const std::uint64_t n_bs = bs_rng.poisson(cfg.lambda_bs * area);
        if (n_bs == 0) return;
        std::vector<Vec2> bs(n_bs);
        for (auto& p : bs) p = detail::sample_point(bs_rng, window, EdgeHandling::guard_zone);
        const std::uint64_t n_ue = ue_rng.poisson(cfg.lambda_ue * area);
        std::vector<bool> busy(n_bs, false);
        for (std::uint64_t u = 0; u < n_ue; ++u) {
          const Vec2 ue = detail::sample_point(ue_rng, window, EdgeHandling::guard_zone);
          std::size_t best = 0;
          double best_d = std::numeric_limits<double>::infinity();
          for (std::size_t b = 0; b < n_bs; ++b) {
            const double d =
                detail::sq_distance(bs[b], ue, window, EdgeHandling::guard_zone);
            if (d < best_d) {
              best_d = d;
              best = b;
            }
          }
          busy[best] = true;
        }
        long idle = 0, considered = 0;
        for (std::size_t b = 0; b < n_bs; ++b) {
          if (bs[b].x * bs[b].x + bs[b].y * bs[b].y > interior * interior) continue;
          ++considered;
          if (!busy[b]) ++idle;
        }
        if (considered == 0) return;
        const double f = static_cast<double>(idle) / static_cast<double>(considered);
        sums.frac += f;
        sums.frac_sq += f * f;
        ++sums.n;
      },
      blocks);
  double frac = 0.0, frac_sq = 0.0;
  long n = 0;
  for (const auto& b : blocks) {
    frac += b.frac;
    frac_sq += b.frac_sq;
    n += b.n;
  }
  EstimateWithCI e;
  e.n_trials = n;
  if (n == 0) return e;
  e.mean = frac / static_cast<double>(n);
  const double var = std::max(0.0, frac_sq / static_cast<double>(n) - e.mean * e.mean);
  e.ci_halfwidth_95 = 1.96 * std::sqrt(var / static_cast<double>(n));
  return e;
}

}  // namespace fdpc
