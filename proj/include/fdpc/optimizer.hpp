#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fdpc/analytic.hpp"
#include "fdpc/model.hpp"
#include "fdpc/montecarlo.hpp"
#include "fdpc/power_control.hpp"

namespace fdpc {

enum class SchemeFamily { cpc, upc, fpc, apc };

inline const char* to_string(SchemeFamily f) {
  switch (f) {
    case SchemeFamily::cpc: return "cpc";
    case SchemeFamily::upc: return "upc";
    case SchemeFamily::fpc: return "fpc";
    case SchemeFamily::apc: return "apc";
  }
  return "?";
}

inline SchemeFamily family_of(const PowerControlScheme& s) {
  if (std::holds_alternative<ConstantPower>(s)) return SchemeFamily::cpc;
  if (std::holds_alternative<UniformPower>(s)) return SchemeFamily::upc;
  if (std::holds_alternative<FractionalPower>(s)) return SchemeFamily::fpc;
  return SchemeFamily::apc;
}

enum class Objective { max_min_rate, max_ase, max_ee };
enum class EvalEngine { bound_lower, bound_upper, exact, monte_carlo };

inline BoundKind bound_kind_of(EvalEngine e) {
  switch (e) {
    case EvalEngine::bound_lower: return BoundKind::lower;
    case EvalEngine::bound_upper: return BoundKind::upper;
    case EvalEngine::exact: return BoundKind::exact;
    case EvalEngine::monte_carlo: break;
  }
  throw std::invalid_argument("monte_carlo engine has no bound kind");
}

struct AxisBox {
  std::string name;
  double lo = 0.0;
  double hi = 0.0;
};

struct OptimizationProblem {
  SchemeFamily family = SchemeFamily::cpc;
  Objective objective = Objective::max_min_rate;
  EvalEngine engine = EvalEngine::bound_lower;
  std::vector<AxisBox> box;  // 1 or 2 axes
  int grid_points = 32;      // coarse grid per dimension
  double param_tol = 1e-3;   // of box width
  SimulationSpec mc;         // used when engine == monte_carlo

  // Default search boxes per family. The constant-power family searches the
  // power level itself (realized by shrinking the peak), floored away from
  // the open lower end where the objective vanishes.
  static OptimizationProblem for_family(SchemeFamily fam, const NetworkConfig& cfg) {
    OptimizationProblem p;
    p.family = fam;
    switch (fam) {
      case SchemeFamily::cpc:
        p.box = {{"p", 1e-3 * cfg.p_max, cfg.p_max}};
        break;
      case SchemeFamily::upc:
        p.box = {{"p_min", 1e-3 * cfg.p_max, cfg.p_max},
                 {"p_max", 1e-3 * cfg.p_max, cfg.p_max}};
        break;
      case SchemeFamily::fpc:
        p.box = {{"epsilon", 0.0, 1.0}, {"p_bar", 1e-3 * cfg.p_max, cfg.p_max}};
        break;
      case SchemeFamily::apc:
        p.box = {{"p_bar", 1e-3 * cfg.p_max, cfg.p_max}, {"xi", 0.0, 1.0}};
        break;
    }
    return p;
  }
};

struct TraceEntry {
  std::array<double, 2> params{};
  double objective = 0.0;
};

struct OptimizationResult {
  std::array<double, 2> params{};
  int dim = 1;
  double objective = 0.0;
  double rate_ul = 0.0;
  double rate_dl = 0.0;
  PowerControlScheme scheme;
  NetworkConfig config;  // carries the realized constant-power level
  std::vector<TraceEntry> trace;
};

namespace detail {

// Materialize a parameter point as (scheme, config). Invalid points (e.g. a
// uniform box with p_min >= p_max) return nullopt.
inline std::optional<std::pair<PowerControlScheme, NetworkConfig>> realize(
    SchemeFamily fam, const std::array<double, 2>& v, const NetworkConfig& cfg) {
  NetworkConfig c = cfg;
  switch (fam) {
    case SchemeFamily::cpc:
      if (!(v[0] > 0.0) || v[0] > cfg.p_max) return std::nullopt;
      c.p_max = v[0];
      return std::make_pair(PowerControlScheme{ConstantPower{}}, c);
    case SchemeFamily::upc:
      if (!(v[0] > 0.0) || !(v[0] < v[1]) || v[1] > cfg.p_max) return std::nullopt;
      return std::make_pair(PowerControlScheme{UniformPower{v[0], v[1]}}, c);
    case SchemeFamily::fpc:
      if (v[0] < 0.0 || v[0] > 1.0 || !(v[1] > 0.0) || v[1] > cfg.p_max) return std::nullopt;
      return std::make_pair(PowerControlScheme{FractionalPower{v[1], v[0], cfg.p_max}}, c);
    case SchemeFamily::apc:
      if (!(v[0] > 0.0) || v[0] > cfg.p_max || v[1] < 0.0 || v[1] > 1.0) return std::nullopt;
      return std::make_pair(PowerControlScheme{OnOffPower{v[0], v[1]}}, c);
  }
  return std::nullopt;
}

// Index of the transmit-power-like axis used for deterministic tie-breaks
// (prefer less power).
inline std::array<int, 2> power_tiebreak_axes(SchemeFamily fam) {
  switch (fam) {
    case SchemeFamily::cpc: return {0, -1};
    case SchemeFamily::upc: return {1, 0};   // p_max, then p_min
    case SchemeFamily::fpc: return {1, 0};   // p_bar, then epsilon
    case SchemeFamily::apc: return {0, 1};   // p_bar, then xi
  }
  return {0, -1};
}

struct Evaluation {
  double objective;
  double rate_ul;
  double rate_dl;
};

inline Evaluation evaluate_point(const OptimizationProblem& prob,
                                 const PowerControlScheme& scheme, const NetworkConfig& cfg) {
  RatePair rates;
  double objective = 0.0;
  if (prob.engine == EvalEngine::monte_carlo) {
    const PerformanceReport rep = estimate_report(cfg, scheme, prob.mc);
    rates = {rep.rate_ul, rep.rate_dl};
    switch (prob.objective) {
      case Objective::max_min_rate: objective = std::min(rates.ul, rates.dl); break;
      case Objective::max_ase: objective = rep.ase; break;
      case Objective::max_ee: objective = rep.ee; break;
    }
    return {objective, rates.ul, rates.dl};
  }
  const BoundKind kind = bound_kind_of(prob.engine);
  rates = fd_sum_rate(cfg, scheme, kind);
  switch (prob.objective) {
    case Objective::max_min_rate: objective = std::min(rates.ul, rates.dl); break;
    case Objective::max_ase: objective = ase(cfg, scheme, kind); break;
    case Objective::max_ee: objective = ee(cfg, scheme, kind); break;
  }
  return {objective, rates.ul, rates.dl};
}

}  // namespace detail

// Deterministic coarse-grid search followed by coordinate-wise
// golden-section refinement. The result never leaves the box; exact
// objective ties break toward the smaller transmit power.
inline OptimizationResult optimize(const OptimizationProblem& prob, const NetworkConfig& cfg) {
  cfg.validate();
  if (prob.box.empty() || prob.box.size() > 2)
    throw std::invalid_argument("optimization box must have 1 or 2 axes");
  const int dim = static_cast<int>(prob.box.size());
  for (const auto& axis : prob.box)
    if (!(axis.lo <= axis.hi)) throw std::invalid_argument("empty box axis: " + axis.name);

  OptimizationResult result;
  result.dim = dim;
  const auto tiebreak = detail::power_tiebreak_axes(prob.family);

  double best_obj = -std::numeric_limits<double>::infinity();
  std::array<double, 2> best{prob.box[0].lo, dim == 2 ? prob.box[1].lo : 0.0};
  detail::Evaluation best_eval{best_obj, 0.0, 0.0};
  bool found = false;

  auto better = [&](double obj, const std::array<double, 2>& v) {
    if (obj > best_obj) return true;
    if (obj < best_obj) return false;
    for (int k = 0; k < 2; ++k) {
      const int axis = tiebreak[k];
      if (axis < 0 || axis >= dim) continue;
      if (v[axis] < best[axis]) return true;
      if (v[axis] > best[axis]) return false;
    }
    return false;
  };

  auto eval_at = [&](std::array<double, 2> v) -> double {
    for (int a = 0; a < dim; ++a) v[a] = std::clamp(v[a], prob.box[a].lo, prob.box[a].hi);
    const auto realized = detail::realize(prob.family, v, cfg);
    if (!realized) return -std::numeric_limits<double>::infinity();
    const auto e = detail::evaluate_point(prob, realized->first, realized->second);
    result.trace.push_back({v, e.objective});
    if (better(e.objective, v)) {
      best_obj = e.objective;
      best = v;
      best_eval = e;
      found = true;
    }
    return e.objective;
  };

  // coarse grid (degenerate axes collapse to a point)
  const int npts = std::max(prob.grid_points, 2);
  std::vector<std::vector<double>> grid(dim);
  for (int a = 0; a < dim; ++a) {
    const auto& axis = prob.box[a];
    if (axis.hi == axis.lo) {
      grid[a] = {axis.lo};
      continue;
    }
    grid[a].resize(npts);
    for (int i = 0; i < npts; ++i)
      grid[a][i] = axis.lo + (axis.hi - axis.lo) * static_cast<double>(i) / (npts - 1);
  }
  if (dim == 1) {
    for (double x : grid[0]) eval_at({x, 0.0});
  } else {
    for (double x : grid[0])
      for (double y : grid[1]) eval_at({x, y});
  }
  if (!found) throw std::invalid_argument("optimization box contains no valid point");

  // golden-section sweeps along each axis through the incumbent
  constexpr double kInvPhi = 0.6180339887498949;
  for (int sweep = 0; sweep < 8; ++sweep) {
    const std::array<double, 2> before = best;
    for (int a = 0; a < dim; ++a) {
      double lo = prob.box[a].lo, hi = prob.box[a].hi;
      if (hi <= lo) continue;
      const double tol = prob.param_tol * (hi - lo);
      double x1 = hi - kInvPhi * (hi - lo);
      double x2 = lo + kInvPhi * (hi - lo);
      std::array<double, 2> p1 = best, p2 = best;
      p1[a] = x1;
      p2[a] = x2;
      double f1 = eval_at(p1), f2 = eval_at(p2);
      while (hi - lo > tol) {
        if (f1 < f2) {
          lo = x1;
          x1 = x2;
          f1 = f2;
          x2 = lo + kInvPhi * (hi - lo);
          p2 = best;
          p2[a] = x2;
          f2 = eval_at(p2);
        } else {
          hi = x2;
          x2 = x1;
          f2 = f1;
          x1 = hi - kInvPhi * (hi - lo);
          p1 = best;
          p1[a] = x1;
          f1 = eval_at(p1);
        }
      }
    }
    double moved = 0.0;
    for (int a = 0; a < dim; ++a) {
      const double width = std::max(prob.box[a].hi - prob.box[a].lo, 1e-300);
      moved = std::max(moved, std::abs(best[a] - before[a]) / width);
    }
    if (moved < prob.param_tol) break;
  }

  result.params = best;
  result.objective = best_obj;
  result.rate_ul = best_eval.rate_ul;
  result.rate_dl = best_eval.rate_dl;
  const auto realized = detail::realize(prob.family, best, cfg);
  result.scheme = realized->first;
  result.config = realized->second;
  return result;
}

struct CrossoverResult {
  double distance_m = 0.0;
  bool bracketed = false;  // false: FD still ahead at the search limit
};

// Largest link distance at which the full-duplex sum rate still beats the
// half-duplex baseline, 1 m bisection on [1, 5000].
inline CrossoverResult crossover_distance(const PowerControlScheme& scheme, double beta,
                                          const NetworkConfig& cfg, BoundKind kind) {
  NetworkConfig c = cfg;
  c.beta = beta;
  c.validate();
  validate_scheme(scheme, c);
  auto gap = [&](double r) {
    return rate_given_distance(r, c, scheme, kind, DuplexMode::fd) -
           rate_given_distance(r, c, scheme, kind, DuplexMode::hd);
  };
  double lo = 1.0, hi = 5000.0;
  if (gap(lo) <= 0.0) return {0.0, true};
  if (gap(hi) > 0.0) return {hi, false};
  while (hi - lo > 1.0) {
    const double mid = 0.5 * (lo + hi);
    (gap(mid) > 0.0 ? lo : hi) = mid;
  }
  return {0.5 * (lo + hi), true};
}

struct SiRequirement {
  double beta = 0.0;   // largest admissible residual ratio (linear)
  bool feasible = false;
  bool unbounded = false;  // any beta works
};

// Minimum self-interference cancellation (largest residual beta) that keeps
// the FD-over-HD crossover at or beyond the target distance. Bisection on
// log10(beta).
inline SiRequirement si_requirement(const PowerControlScheme& scheme, double target_distance,
                                    const NetworkConfig& cfg, BoundKind kind) {
  if (target_distance < 0.0) throw std::invalid_argument("target distance must be >= 0");
  auto reach = [&](double log10_beta) {
    return crossover_distance(scheme, std::pow(10.0, log10_beta), cfg, kind).distance_m;
  };
  const double hi = 0.0;     // beta = 1, no cancellation
  const double lo = -16.0;   // effectively perfect cancellation
  if (reach(hi) >= target_distance) return {1.0, true, true};
  if (reach(lo) < target_distance) return {std::pow(10.0, lo), false, false};
  double a = lo, b = hi;  // reach(a) >= target > reach(b)
  while (b - a > 1e-3) {
    const double mid = 0.5 * (a + b);
    (reach(mid) >= target_distance ? a : b) = mid;
  }
  return {std::pow(10.0, a), true, false};
}

struct TradeoffPoint {
  PowerControlScheme scheme;
  NetworkConfig config;
  double swept_param = 0.0;
  double ase_total = 0.0;  // bps/Hz/m^2
  double ase_dl = 0.0;
  double ase_ul = 0.0;
};

// Operating point where the DL:UL area-spectrum-efficiency ratio hits
// `target_ratio` along the scheme's natural one-parameter sweep (the other
// parameters stay at their defaults): constant level for CPC, peak for UPC,
// power scale for FPC, transmit probability for APC. The ratio is monotone
// along each sweep; bisection to 1e-4 of the sweep range.
inline std::optional<TradeoffPoint> calibrate_dl_ul_ratio(SchemeFamily fam, double target_ratio,
                                                          const NetworkConfig& cfg,
                                                          BoundKind kind) {
  cfg.validate();
  auto realize_swept = [&](double x) -> std::pair<PowerControlScheme, NetworkConfig> {
    NetworkConfig c = cfg;
    switch (fam) {
      case SchemeFamily::cpc:
        c.p_max = x;
        return {PowerControlScheme{ConstantPower{}}, c};
      case SchemeFamily::upc:
        return {PowerControlScheme{UniformPower{cfg.p_min, x}}, c};
      case SchemeFamily::fpc:
        return {PowerControlScheme{FractionalPower{x, 0.1, cfg.p_max}}, c};
      case SchemeFamily::apc:
        return {PowerControlScheme{OnOffPower{cfg.p_max, x}}, c};
    }
    throw std::logic_error("unreachable");
  };
  double lo, hi;
  switch (fam) {
    case SchemeFamily::cpc: lo = 1e-3 * cfg.p_max; hi = cfg.p_max; break;
    case SchemeFamily::upc: lo = cfg.p_min * (1.0 + 1e-6); hi = cfg.p_max; break;
    case SchemeFamily::fpc: lo = 1e-4 * cfg.p_max; hi = cfg.p_max; break;
    case SchemeFamily::apc: lo = 1e-3; hi = 1.0; break;
  }
  auto parts = [&](double x) {
    const auto [scheme, c] = realize_swept(x);
    const RatePair r = fd_sum_rate(c, scheme, kind);
    const double lb = active_density(c).lambda_b;
    return std::make_pair(lb * r.dl / c.bandwidth_w, lb * r.ul / c.bandwidth_w);
  };
  auto ratio_gap = [&](double x) {
    const auto [dl, ul] = parts(x);
    return dl / std::max(ul, 1e-300) - target_ratio;
  };
  const double glo = ratio_gap(lo), ghi = ratio_gap(hi);
  if (glo > 0.0 || ghi < 0.0) return std::nullopt;  // ratio not attainable on the sweep
  double a = lo, b = hi;
  for (int i = 0; i < 60 && (b - a) > 1e-4 * (hi - lo); ++i) {
    const double mid = 0.5 * (a + b);
    (ratio_gap(mid) > 0.0 ? b : a) = mid;
  }
  const double x = 0.5 * (a + b);
  TradeoffPoint pt;
  auto [scheme, c] = realize_swept(x);
  pt.scheme = scheme;
  pt.config = c;
  pt.swept_param = x;
  std::tie(pt.ase_dl, pt.ase_ul) = parts(x);
  pt.ase_total = pt.ase_dl + pt.ase_ul;
  return pt;
}

}  // namespace fdpc
