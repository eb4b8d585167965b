#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <variant>

#include "fdpc/model.hpp"
#include "fdpc/power_control.hpp"
#include "fdpc/quadrature.hpp"

namespace fdpc {

enum class BoundKind { lower, upper, exact };

inline const char* to_string(BoundKind k) {
  switch (k) {
    case BoundKind::lower: return "lower";
    case BoundKind::upper: return "upper";
    case BoundKind::exact: return "exact";
  }
  return "?";
}

// Tests force the generic quadrature path to cross-check the closed-form
// Rayleigh shortcut.
enum class EvalPath { automatic, quadrature };

namespace detail {

inline double pi() { return std::numbers::pi; }

// lambda_b * pi^2 * delta / sin(pi delta): the bound exponent scale.
inline double interference_constant(const NetworkConfig& cfg) {
  const double d = 2.0 / cfg.alpha;
  return active_density(cfg).lambda_b * pi() * pi() * d / std::sin(pi() * d);
}

// u (= pi lambda R^2) where a factor exp(-si_coeff R^alpha) turns over. A
// strong self-interference factor confines the coverage integrand to a
// boundary layer near u = 0 that uniform panels would never sample.
inline double si_layer_u(const NetworkConfig& cfg, double si_coeff) {
  if (!(si_coeff > 0.0)) return 0.0;
  return pi() * cfg.lambda_bs * std::pow(si_coeff, -2.0 / cfg.alpha);
}

// same, for a factor exp(-c R^k) with a general exponent
inline double power_layer_u(const NetworkConfig& cfg, double c, double k) {
  if (!(c > 0.0) || !(k > 0.0)) return 0.0;
  return pi() * cfg.lambda_bs * std::pow(c, -2.0 / k);
}

// turnover of the interference factor exp(-kg (theta R^alpha / p_t)^delta),
// whose exponent is kg theta^delta R^2 / p_t^delta; explodes as alpha -> 2
inline double bound_layer_u(const NetworkConfig& cfg, double kg, double theta, double p_t) {
  if (!(kg > 0.0) || !(theta > 0.0)) return 0.0;
  const double d = delta_of(cfg).value;
  return pi() * cfg.lambda_bs * std::pow(p_t, d) / (kg * std::pow(theta, d));
}

// E_R{f(R)} against the nearest-BS link-distance law, via u = pi lambda R^2.
// The exponential weight makes [0, 60] numerically exhaustive. `layers`
// are u-scales of boundary layers in f; panels are split around each so
// the adaptive pass sees them.
template <class F>
double rayleigh_expectation(const NetworkConfig& cfg, F&& f, const QuadratureSpec& spec,
                            const std::vector<double>& layers = {}) {
  const double pil = pi() * cfg.lambda_bs;
  auto g = [&](double u) { return std::exp(-u) * f(std::sqrt(u / pil)); };
  std::vector<double> splits;
  for (double layer : layers) {
    if (!(layer > 0.0) || layer >= 60.0) continue;
    for (double m : {0.3, 1.0, 3.0, 10.0}) {
      const double s = layer * m;
      if (s > 1e-14 && s < 60.0) splits.push_back(s);
    }
  }
  if (splits.empty()) return integrate(g, 0.0, 60.0, spec);
  std::sort(splits.begin(), splits.end());
  splits.erase(std::unique(splits.begin(), splits.end()), splits.end());
  double total = 0.0;
  double lo = 0.0;
  for (double s : splits) {
    total += integrate(g, lo, s, spec);
    lo = s;
  }
  total += integrate(g, lo, 60.0, spec);
  return total;
}

// E_R{exp(-c R^2)} in closed form.
inline double rayleigh_gaussian_expectation(const NetworkConfig& cfg, double c) {
  const double pil = pi() * cfg.lambda_bs;
  return pil / (pil + c);
}

}  // namespace detail

// The delta-moment g entering both closed-form bounds: the compound pair
// moment for the upper bound, the independent-field moment for the lower
// bound. A sleeping on-off pair whose UE also sleeps contributes only
// through its transmit probability.
inline double bound_g(const NetworkConfig& cfg, const PowerControlScheme& scheme,
                      BoundKind kind) {
  if (kind == BoundKind::exact) throw std::invalid_argument("bound_g: kind must be a bound");
  const double d = delta_of(cfg).value;
  if (const auto* apc = std::get_if<OnOffPower>(&scheme); apc && !cfg.apc_ue_always_on) {
    if (kind == BoundKind::lower)
      return apc->xi * (std::pow(cfg.p_ue, d) + std::pow(apc->p_bar, d));
    return apc->xi * compound_moment_integrand(apc->p_bar, cfg.p_ue, d);
  }
  const MixedPowerDistribution dist = marginal_distribution(scheme, cfg);
  if (kind == BoundKind::lower) return std::pow(cfg.p_ue, d) + moment_delta(dist, d);
  return compound_moment(dist, cfg.p_ue, d);
}

// Closed-form bounds on the Laplace transform of the pair interference:
// exp(-K g s^delta).
inline double laplace_bound(double s, const NetworkConfig& cfg,
                            const PowerControlScheme& scheme, BoundKind kind) {
  if (s < 0.0) throw std::invalid_argument("laplace argument must be >= 0");
  if (s == 0.0) return 1.0;
  const double d = delta_of(cfg).value;
  const double K = detail::interference_constant(cfg);
  return std::exp(-K * bound_g(cfg, scheme, kind) * std::pow(s, d));
}

namespace detail {

// Complement of the BS factor: E_P{ sPv^-a / (1 + sPv^-a) }, evaluated with
// a scheme-specific fast path.
struct BsComplement {
  const NetworkConfig& cfg;
  const PowerControlScheme& scheme;
  const MixedPowerDistribution& dist;
  double s;

  double one_power(double p, double v_neg_alpha) const {
    if (p <= 0.0) return 0.0;
    const double y = s * p * v_neg_alpha;
    if (!std::isfinite(y)) return 1.0;
    return y / (1.0 + y);
  }

  double operator()(double v) const {
    const double va = std::pow(v, -cfg.alpha);
    if (const auto* u = std::get_if<UniformPower>(&scheme)) {
      const double a = s * va;
      if (!std::isfinite(a)) return 1.0;
      if (a * u->p_max < 1e-9) return a * 0.5 * (u->p_min + u->p_max);
      const double mean_inv =
          (std::log1p(a * u->p_max) - std::log1p(a * u->p_min)) / (a * (u->p_max - u->p_min));
      return 1.0 - mean_inv;
    }
    if (const auto* c = std::get_if<ConstantPower>(&scheme)) {
      (void)c;
      return one_power(cfg.p_max, va);
    }
    if (const auto* o = std::get_if<OnOffPower>(&scheme)) {
      return o->xi * one_power(o->p_bar, va);
    }
    return dist.expect([&](double p) { return one_power(p, va); });
  }
};

}  // namespace detail

// Exact Laplace transform of the aggregate pair interference at the typical
// receiver: probability generating functional of the marked process, a
// triple integral (interferer distance v, its mark distance r, mark angle
// phi) with the power expectation inside. Interferer powers use the
// marginal law. `spec` is the outer tolerance; inner levels run 10x and
// 100x tighter.
inline double laplace_exact(double s, const NetworkConfig& cfg,
                            const PowerControlScheme& scheme,
                            const QuadratureSpec& spec = QuadratureSpec{1e-4, 0.0, 4000}) {
  if (s < 0.0) throw std::invalid_argument("laplace argument must be >= 0");
  if (s == 0.0) return 1.0;
  validate_scheme(scheme, cfg);
  const double alpha = cfg.alpha;
  const double lam = cfg.lambda_bs;
  const double lam_b = active_density(cfg).lambda_b;
  const double pil = detail::pi() * lam;
  const MixedPowerDistribution dist = marginal_distribution(scheme, cfg);
  const detail::BsComplement mbar{cfg, scheme, dist, s};

  QuadratureSpec spec_r = spec.tightened(0.1);
  spec_r.abs_tol = std::max(spec_r.abs_tol, 1e-9);
  QuadratureSpec spec_phi = spec.tightened(0.01);
  spec_phi.abs_tol = std::max(spec_phi.abs_tol, 1e-9);

  // Complement of the mark factor: E_{r,phi}{ x/(1+x) }, x = s p_ue dm^-a,
  // dm^2 = v^2 + r^2 + 2 v r cos(phi). Uniform mark angle: average over
  // (0, pi) by symmetry.
  auto gbar = [&](double v) {
    return integrate(
        [&](double q) {
          const double r = std::sqrt(q / pil);
          const double phi_avg =
              integrate(
                  [&](double phi) {
                    const double dm2 = v * v + r * r + 2.0 * v * r * std::cos(phi);
                    const double x = s * cfg.p_ue * std::pow(dm2, -0.5 * alpha);
                    if (!std::isfinite(x)) return 1.0;
                    return x / (1.0 + x);
                  },
                  0.0, detail::pi(), spec_phi) /
              detail::pi();
          return std::exp(-q) * phi_avg;
        },
        0.0, 60.0, spec_r);
  };

  const auto* apc = std::get_if<OnOffPower>(&scheme);
  const bool silent_pairs = apc != nullptr && !cfg.apc_ue_always_on;

  // 1 - E{BS factor * UE factor} per pair, written with complements to stay
  // accurate where both factors approach 1.
  auto pair_complement = [&](double v) {
    const double g = gbar(v);
    if (silent_pairs) {
      const double y = s * apc->p_bar * std::pow(v, -alpha);
      const double m_on = std::isfinite(y) ? y / (1.0 + y) : 1.0;
      return apc->xi * (m_on + g - m_on * g);
    }
    const double m = mbar(v);
    return m + g - m * g;
  };

  const double scale = std::pow(s * (cfg.p_max + cfg.p_ue), 1.0 / alpha);
  const double outer = integrate_semi_infinite(
      [&](double v) {
        if (!(v > 0.0) || !std::isfinite(v)) return 0.0;
        return pair_complement(v) * v;
      },
      scale, spec);
  return std::exp(-2.0 * detail::pi() * lam_b * outer);
}

namespace detail {

// Laplace evaluator fixed per (scheme, kind); bounds precompute the moment.
inline std::function<double(double)> make_laplace(const NetworkConfig& cfg,
                                                  const PowerControlScheme& scheme,
                                                  BoundKind kind,
                                                  const QuadratureSpec& exact_spec) {
  if (kind == BoundKind::exact) {
    return [&cfg, &scheme, exact_spec](double s) {
      return laplace_exact(s, cfg, scheme, exact_spec);
    };
  }
  const double d = delta_of(cfg).value;
  const double kg = interference_constant(cfg) * bound_g(cfg, scheme, kind);
  return [kg, d](double s) { return s > 0.0 ? std::exp(-kg * std::pow(s, d)) : 1.0; };
}

struct CoverageSpecs {
  QuadratureSpec outer;   // R (and P) expectation
  QuadratureSpec exact;   // triple-integral budget when kind == exact
};

inline CoverageSpecs coverage_specs(BoundKind kind) {
  if (kind == BoundKind::exact) return {QuadratureSpec{1e-3, 1e-9, 2000}, QuadratureSpec{1e-4, 0.0, 4000}};
  return {QuadratureSpec{1e-8, 1e-14, 4000}, QuadratureSpec{}};
}

// E_R{ exp(-si_coeff * P_r * R^alpha) * L(theta R^alpha / p_t) } with fixed
// powers; closed form when the whole exponent is proportional to R^2.
inline double coverage_fixed_powers(const NetworkConfig& cfg, double p_t, double p_r,
                                    double theta, const std::function<double(double)>& L,
                                    BoundKind kind, double kg, EvalPath path,
                                    const QuadratureSpec& spec) {
  const double d = delta_of(cfg).value;
  const double si = theta * cfg.beta * p_r / p_t;
  if (kind != BoundKind::exact && (si == 0.0) && path == EvalPath::automatic) {
    const double c = kg * std::pow(theta, d) / std::pow(p_t, d);
    return rayleigh_gaussian_expectation(cfg, c);
  }
  return rayleigh_expectation(
      cfg,
      [&](double r) {
        const double ra = std::pow(r, cfg.alpha);
        return std::exp(-si * ra) * L(theta * ra / p_t);
      },
      spec, {si_layer_u(cfg, si), bound_layer_u(cfg, kg, theta, p_t)});
}

}  // namespace detail

// Coverage of a link with fixed transmit power p_t and receiver-side
// transmit power p_r (whose residual self-interference is beta*p_r), the
// scheme shaping only the interference field.
inline double coverage_generic(double p_t, double p_r, double theta, const NetworkConfig& cfg,
                               const PowerControlScheme& scheme, BoundKind kind,
                               EvalPath path = EvalPath::automatic) {
  if (!(p_t > 0.0) || !(p_r >= 0.0)) throw std::invalid_argument("powers must be positive");
  if (!(theta >= 0.0)) throw std::invalid_argument("theta must be >= 0");
  if (theta == 0.0) return 1.0;
  const auto specs = detail::coverage_specs(kind);
  const auto L = detail::make_laplace(cfg, scheme, kind, specs.exact);
  // the exact kind still uses kg to place integration panels
  const double kg = detail::interference_constant(cfg) *
                    bound_g(cfg, scheme, kind == BoundKind::exact ? BoundKind::lower : kind);
  return detail::coverage_fixed_powers(cfg, p_t, p_r, theta, L, kind, kg, path, specs.outer);
}

// UL coverage: desired power p_ue, self-interference from the serving BS's
// own transmit power (coupled to R under fractional control, mixed over the
// on/off state under on-off control).
inline double coverage_ul(const NetworkConfig& cfg, const PowerControlScheme& scheme,
                          BoundKind kind, EvalPath path = EvalPath::automatic) {
  validate_scheme(scheme, cfg);
  const auto specs = detail::coverage_specs(kind);
  const auto L = detail::make_laplace(cfg, scheme, kind, specs.exact);
  const double theta = thresholds(cfg).theta_b;
  const double d = delta_of(cfg).value;
  const double kg = detail::interference_constant(cfg) *
                    bound_g(cfg, scheme, kind == BoundKind::exact ? BoundKind::lower : kind);

  // interference factor is independent of the serving power here
  auto L_at = [&](double r) { return L(theta * std::pow(r, cfg.alpha) / cfg.p_ue); };
  const double si_scale = theta * cfg.beta / cfg.p_ue;  // * P * R^alpha
  const double l_layer = detail::bound_layer_u(cfg, kg, theta, cfg.p_ue);

  if (const auto* u = std::get_if<UniformPower>(&scheme)) {
    if (cfg.beta == 0.0 && kind != BoundKind::exact && path == EvalPath::automatic)
      return detail::rayleigh_gaussian_expectation(
          cfg, kg * std::pow(theta, d) / std::pow(cfg.p_ue, d));
    const double lo = u->p_min, hi = u->p_max;
    return detail::rayleigh_expectation(
        cfg,
        [&](double r) {
          const double c = si_scale * std::pow(r, cfg.alpha);
          // E_P{exp(-cP)} over the uniform law, stable as c -> 0
          const double cd = c * (hi - lo);
          const double mean_exp =
              cd < 1e-12 ? std::exp(-c * 0.5 * (lo + hi))
                         : std::exp(-c * lo) * (-std::expm1(-cd)) / cd;
          return mean_exp * L_at(r);
        },
        specs.outer,
        {detail::si_layer_u(cfg, si_scale * hi), detail::si_layer_u(cfg, si_scale * lo),
         l_layer});
  }
  if (const auto* f = std::get_if<FractionalPower>(&scheme)) {
    return detail::rayleigh_expectation(
        cfg,
        [&](double r) {
          const double p = std::min(f->p_bar * std::pow(r, cfg.alpha * f->epsilon), f->p_max);
          return std::exp(-si_scale * p * std::pow(r, cfg.alpha)) * L_at(r);
        },
        specs.outer,
        {detail::power_layer_u(cfg, si_scale * f->p_bar, cfg.alpha * (1.0 + f->epsilon)),
         detail::si_layer_u(cfg, si_scale * f->p_max), l_layer});
  }
  if (const auto* o = std::get_if<OnOffPower>(&scheme)) {
    const double on = detail::coverage_fixed_powers(cfg, cfg.p_ue, o->p_bar, theta, L, kind, kg,
                                                    path, specs.outer);
    // when the whole pair sleeps there is no UL attempt to condition on
    if (!cfg.apc_ue_always_on) return on;
    const double off = detail::coverage_fixed_powers(cfg, cfg.p_ue, 0.0, theta, L, kind, kg,
                                                     path, specs.outer);
    return o->xi * on + (1.0 - o->xi) * off;
  }
  return detail::coverage_fixed_powers(cfg, cfg.p_ue, cfg.p_max, theta, L, kind, kg, path,
                                       specs.outer);
}

// DL coverage: desired power is the serving BS's, self-interference from the
// UE's own transmission. Under on-off control this is conditioned on the
// serving BS transmitting.
inline double coverage_dl(const NetworkConfig& cfg, const PowerControlScheme& scheme,
                          BoundKind kind, EvalPath path = EvalPath::automatic) {
  validate_scheme(scheme, cfg);
  const auto specs = detail::coverage_specs(kind);
  const auto L = detail::make_laplace(cfg, scheme, kind, specs.exact);
  const double theta = thresholds(cfg).theta_u;
  const double d = delta_of(cfg).value;
  const double kg = detail::interference_constant(cfg) *
                    bound_g(cfg, scheme, kind == BoundKind::exact ? BoundKind::lower : kind);

  if (const auto* u = std::get_if<UniformPower>(&scheme)) {
    const double lo = u->p_min, hi = u->p_max;
    const double inv = 1.0 / (hi - lo);
    if (cfg.beta == 0.0 && kind != BoundKind::exact && path == EvalPath::automatic) {
      return integrate(
          [&](double p) {
            return inv * detail::rayleigh_gaussian_expectation(
                             cfg, kg * std::pow(theta, d) / std::pow(p, d));
          },
          lo, hi, specs.outer);
    }
    QuadratureSpec inner = specs.outer.tightened(0.1);
    return detail::rayleigh_expectation(
        cfg,
        [&](double r) {
          const double ra = std::pow(r, cfg.alpha);
          return integrate(
              [&](double p) {
                return inv * std::exp(-theta * cfg.beta * cfg.p_ue * ra / p) * L(theta * ra / p);
              },
              lo, hi, inner);
        },
        specs.outer,
        {detail::si_layer_u(cfg, theta * cfg.beta * cfg.p_ue / lo),
         detail::si_layer_u(cfg, theta * cfg.beta * cfg.p_ue / hi),
         detail::bound_layer_u(cfg, kg, theta, lo), detail::bound_layer_u(cfg, kg, theta, hi)});
  }
  if (const auto* f = std::get_if<FractionalPower>(&scheme)) {
    // below the clip the self-interference exponent is
    // (theta beta p_ue / p_bar) R^(alpha(1-eps)) and the interference
    // exponent (kg theta^d / p_bar^d) R^(2(1-eps))
    const double k_unclipped = cfg.alpha * (1.0 - f->epsilon);
    const double layer_unclipped =
        k_unclipped > 1e-9
            ? detail::power_layer_u(cfg, theta * cfg.beta * cfg.p_ue / f->p_bar, k_unclipped)
            : 0.0;
    const double l_layer_unclipped =
        f->epsilon < 1.0 - 1e-9
            ? detail::power_layer_u(cfg, kg * std::pow(theta, d) / std::pow(f->p_bar, d),
                                    2.0 * (1.0 - f->epsilon))
            : 0.0;
    return detail::rayleigh_expectation(
        cfg,
        [&](double r) {
          const double p = std::min(f->p_bar * std::pow(r, cfg.alpha * f->epsilon), f->p_max);
          const double ra = std::pow(r, cfg.alpha);
          return std::exp(-theta * cfg.beta * cfg.p_ue * ra / p) * L(theta * ra / p);
        },
        specs.outer,
        {layer_unclipped, detail::si_layer_u(cfg, theta * cfg.beta * cfg.p_ue / f->p_max),
         l_layer_unclipped, detail::bound_layer_u(cfg, kg, theta, f->p_max)});
  }
  const double p_serv = std::holds_alternative<OnOffPower>(scheme)
                            ? std::get<OnOffPower>(scheme).p_bar
                            : cfg.p_max;
  return detail::coverage_fixed_powers(cfg, p_serv, cfg.p_ue, theta, L, kind, kg, path,
                                       specs.outer);
}

struct RatePair {
  double ul = 0.0;
  double dl = 0.0;
  double total() const { return ul + dl; }
};

// Achievable rates of the full-duplex pair: target rate times coverage. The
// DL leg of an on-off scheme earns nothing while the BS sleeps.
inline RatePair fd_sum_rate(const NetworkConfig& cfg, const PowerControlScheme& scheme,
                            BoundKind kind) {
  const double p_ul = coverage_ul(cfg, scheme, kind);
  const double p_dl = coverage_dl(cfg, scheme, kind);
  double dl_weight = 1.0;
  double ul_weight = 1.0;
  if (const auto* o = std::get_if<OnOffPower>(&scheme)) {
    if (cfg.apc_rate_includes_xi) dl_weight = o->xi;
    if (!cfg.apc_ue_always_on) ul_weight = o->xi;  // the whole pair sleeps
  }
  return {cfg.rate_bs * ul_weight * p_ul, cfg.rate_ue * dl_weight * p_dl};
}

// Half-duplex baseline rates: 0.5 pre-log, same-type interferers at equal
// power (which cancels), active-BS density.
inline RatePair hd_rates(const NetworkConfig& cfg, EvalPath path = EvalPath::automatic) {
  const double d = delta_of(cfg).value;
  const double K = detail::interference_constant(cfg);
  const auto th = thresholds(cfg);
  auto leg = [&](double theta) {
    const double c = K * std::pow(theta, d);
    const double cov = path == EvalPath::automatic
                           ? detail::rayleigh_gaussian_expectation(cfg, c)
                           : detail::rayleigh_expectation(
                                 cfg, [&](double r) { return std::exp(-c * r * r); },
                                 QuadratureSpec{1e-8, 1e-14},
                                 {detail::bound_layer_u(cfg, K, theta, 1.0)});
    return 0.5 * cfg.bandwidth_w * std::log2(1.0 + theta) * cov;
  };
  return {leg(th.theta_b), leg(th.theta_u)};
}

// Area spectrum efficiency, bps/Hz/m^2.
inline double ase(const NetworkConfig& cfg, const PowerControlScheme& scheme, BoundKind kind) {
  const RatePair r = fd_sum_rate(cfg, scheme, kind);
  return active_density(cfg).lambda_b * r.total() / cfg.bandwidth_w;
}

// Energy efficiency, bps/J. The consumed power (serving transmit + UE +
// static) sits inside the expectation because it varies with the scheme
// state.
inline double ee(const NetworkConfig& cfg, const PowerControlScheme& scheme, BoundKind kind) {
  validate_scheme(scheme, cfg);
  const auto specs = detail::coverage_specs(kind);
  const auto L = detail::make_laplace(cfg, scheme, kind, specs.exact);
  const auto th = thresholds(cfg);
  const double kg = detail::interference_constant(cfg) *
                    bound_g(cfg, scheme, kind == BoundKind::exact ? BoundKind::lower : kind);

  auto dl_at = [&](double r, double p) {
    const double ra = std::pow(r, cfg.alpha);
    return std::exp(-th.theta_u * cfg.beta * cfg.p_ue * ra / p) * L(th.theta_u * ra / p);
  };
  auto ul_at = [&](double r, double p) {
    const double ra = std::pow(r, cfg.alpha);
    return std::exp(-th.theta_b * cfg.beta * p * ra / cfg.p_ue) * L(th.theta_b * ra / cfg.p_ue);
  };
  auto pair_rate_over_power = [&](double p) {
    // E_R of the pair's earned rate at serving power p, over consumed power
    const double dl = detail::rayleigh_expectation(
        cfg, [&](double r) { return dl_at(r, p); }, specs.outer,
        {detail::si_layer_u(cfg, th.theta_u * cfg.beta * cfg.p_ue / p),
         detail::bound_layer_u(cfg, kg, th.theta_u, p)});
    const double ul = detail::rayleigh_expectation(
        cfg, [&](double r) { return ul_at(r, p); }, specs.outer,
        {detail::si_layer_u(cfg, th.theta_b * cfg.beta * p / cfg.p_ue),
         detail::bound_layer_u(cfg, kg, th.theta_b, cfg.p_ue)});
    return (cfg.rate_ue * dl + cfg.rate_bs * ul) / (p + cfg.p_ue + cfg.p_static);
  };

  if (const auto* u = std::get_if<UniformPower>(&scheme)) {
    const double inv = 1.0 / (u->p_max - u->p_min);
    QuadratureSpec pspec = specs.outer;
    pspec.rel_tol = std::max(pspec.rel_tol, 1e-6);
    return integrate([&](double p) { return inv * pair_rate_over_power(p); }, u->p_min,
                     u->p_max, pspec);
  }
  if (const auto* f = std::get_if<FractionalPower>(&scheme)) {
    if (f->epsilon < 1e-12) return pair_rate_over_power(std::min(f->p_bar, f->p_max));
    const double k_dl = cfg.alpha * (1.0 - f->epsilon);
    return detail::rayleigh_expectation(
        cfg,
        [&](double r) {
          const double p = std::min(f->p_bar * std::pow(r, cfg.alpha * f->epsilon), f->p_max);
          return (cfg.rate_ue * dl_at(r, p) + cfg.rate_bs * ul_at(r, p)) /
                 (p + cfg.p_ue + cfg.p_static);
        },
        specs.outer,
        {k_dl > 1e-9 ? detail::power_layer_u(cfg, th.theta_u * cfg.beta * cfg.p_ue / f->p_bar,
                                             k_dl)
                     : 0.0,
         detail::power_layer_u(cfg, th.theta_b * cfg.beta * f->p_bar / cfg.p_ue,
                               cfg.alpha * (1.0 + f->epsilon)),
         detail::si_layer_u(cfg, th.theta_b * cfg.beta * f->p_max / cfg.p_ue),
         detail::si_layer_u(cfg, th.theta_u * cfg.beta * cfg.p_ue / f->p_max),
         detail::bound_layer_u(cfg, kg, th.theta_b, cfg.p_ue),
         detail::bound_layer_u(cfg, kg, th.theta_u, f->p_max)});
  }
  if (const auto* o = std::get_if<OnOffPower>(&scheme)) {
    const double on = pair_rate_over_power(o->p_bar);
    double off = 0.0;
    if (cfg.apc_ue_always_on) {
      const double ul_no_si = detail::rayleigh_expectation(
          cfg,
          [&](double r) { return L(th.theta_b * std::pow(r, cfg.alpha) / cfg.p_ue); },
          specs.outer, {detail::bound_layer_u(cfg, kg, th.theta_b, cfg.p_ue)});
      off = cfg.rate_bs * ul_no_si / (cfg.p_ue + cfg.p_static);
    }
    return o->xi * on + (1.0 - o->xi) * off;
  }
  return pair_rate_over_power(cfg.p_max);
}

enum class DuplexMode { fd, hd };

// Sum rate conditioned on the serving-link distance; the interference field
// keeps its stationary law. The half-duplex value at the same distance uses
// the 0.5 pre-log.
inline double rate_given_distance(double r, const NetworkConfig& cfg,
                                  const PowerControlScheme& scheme, BoundKind kind,
                                  DuplexMode mode) {
  if (!(r >= 0.0)) throw std::invalid_argument("distance must be >= 0");
  const auto th = thresholds(cfg);
  const double d = delta_of(cfg).value;
  const double K = detail::interference_constant(cfg);
  if (mode == DuplexMode::hd) {
    auto leg = [&](double theta) {
      return 0.5 * cfg.bandwidth_w * std::log2(1.0 + theta) *
             std::exp(-K * std::pow(theta, d) * r * r);
    };
    return leg(th.theta_b) + leg(th.theta_u);
  }
  validate_scheme(scheme, cfg);
  const auto specs = detail::coverage_specs(kind);
  const auto L = detail::make_laplace(cfg, scheme, kind, specs.exact);
  const double ra = std::pow(r, cfg.alpha);
  auto dl_term = [&](double p) {
    return std::exp(-th.theta_u * cfg.beta * cfg.p_ue * ra / p) * L(th.theta_u * ra / p);
  };
  auto ul_term = [&](double p) {
    return std::exp(-th.theta_b * cfg.beta * p * ra / cfg.p_ue) * L(th.theta_b * ra / cfg.p_ue);
  };
  if (const auto* u = std::get_if<UniformPower>(&scheme)) {
    const double inv = 1.0 / (u->p_max - u->p_min);
    QuadratureSpec pspec = specs.outer;
    pspec.rel_tol = std::max(pspec.rel_tol, 1e-8);
    const double dl = integrate([&](double p) { return inv * dl_term(p); }, u->p_min, u->p_max, pspec);
    const double ul = integrate([&](double p) { return inv * ul_term(p); }, u->p_min, u->p_max, pspec);
    return cfg.rate_ue * dl + cfg.rate_bs * ul;
  }
  if (const auto* f = std::get_if<FractionalPower>(&scheme)) {
    const double p = std::min(f->p_bar * std::pow(r, cfg.alpha * f->epsilon), f->p_max);
    return cfg.rate_ue * dl_term(p) + cfg.rate_bs * ul_term(p);
  }
  if (const auto* o = std::get_if<OnOffPower>(&scheme)) {
    const double dl_weight = cfg.apc_rate_includes_xi ? o->xi : 1.0;
    double ul = o->xi * ul_term(o->p_bar);
    if (cfg.apc_ue_always_on)
      ul += (1.0 - o->xi) * L(th.theta_b * ra / cfg.p_ue);
    return cfg.rate_ue * dl_weight * dl_term(o->p_bar) + cfg.rate_bs * ul;
  }
  return cfg.rate_ue * dl_term(cfg.p_max) + cfg.rate_bs * ul_term(cfg.p_max);
}

}  // namespace fdpc
