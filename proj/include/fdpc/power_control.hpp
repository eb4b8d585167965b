#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "fdpc/model.hpp"
#include "fdpc/quadrature.hpp"
#include "fdpc/rng.hpp"

namespace fdpc {

// The four downlink power-control schemes. Every scheme respects the shared
// peak constraint: sampled power <= cfg.p_max.

// All BSs transmit at the peak power.
struct ConstantPower {};

// Power drawn independently and uniformly from [p_min, p_max].
struct UniformPower {
  double p_min;
  double p_max;
};

// Power compensates the desired-link path loss: p_bar * R^(alpha*epsilon),
// clipped at p_max.
struct FractionalPower {
  double p_bar;     // scale constant, W * m^(-alpha*epsilon)
  double epsilon;   // compensation exponent in [0,1]
  double p_max;     // clip level
};

// ALOHA-like on-off control: transmit at p_bar with probability xi, else
// sleep.
struct OnOffPower {
  double p_bar;
  double xi;
};

using PowerControlScheme = std::variant<ConstantPower, UniformPower, FractionalPower, OnOffPower>;

inline const char* scheme_name(const PowerControlScheme& s) {
  struct V {
    const char* operator()(const ConstantPower&) const { return "cpc"; }
    const char* operator()(const UniformPower&) const { return "upc"; }
    const char* operator()(const FractionalPower&) const { return "fpc"; }
    const char* operator()(const OnOffPower&) const { return "apc"; }
  };
  return std::visit(V{}, s);
}

inline void validate_scheme(const PowerControlScheme& scheme, const NetworkConfig& cfg) {
  struct V {
    const NetworkConfig& cfg;
    void operator()(const ConstantPower&) const {}
    void operator()(const UniformPower& s) const {
      if (!(s.p_min > 0.0) || !(s.p_min < s.p_max))
        throw std::invalid_argument("upc requires 0 < p_min < p_max");
      if (s.p_max > cfg.p_max * (1.0 + 1e-12))
        throw std::invalid_argument("upc p_max exceeds the peak constraint");
    }
    void operator()(const FractionalPower& s) const {
      if (!(s.p_bar > 0.0)) throw std::invalid_argument("fpc requires p_bar > 0");
      if (s.epsilon < 0.0 || s.epsilon > 1.0)
        throw std::invalid_argument("fpc requires epsilon in [0,1]");
      if (s.p_max > cfg.p_max * (1.0 + 1e-12))
        throw std::invalid_argument("fpc p_max exceeds the peak constraint");
    }
    void operator()(const OnOffPower& s) const {
      if (s.xi < 0.0 || s.xi > 1.0) throw std::invalid_argument("apc requires xi in [0,1]");
      if (!(s.p_bar > 0.0) || s.p_bar > cfg.p_max * (1.0 + 1e-12))
        throw std::invalid_argument("apc requires 0 < p_bar <= p_max");
    }
  };
  std::visit(V{cfg}, scheme);
}

// Default parameterizations used by the CLI and experiments.
inline PowerControlScheme make_scheme(const std::string& name, const NetworkConfig& cfg) {
  if (name == "cpc") return ConstantPower{};
  if (name == "upc") return UniformPower{cfg.p_min, cfg.p_max};
  if (name == "fpc") return FractionalPower{cfg.p_min, 0.1, cfg.p_max};
  if (name == "apc") return OnOffPower{cfg.p_max, 0.5};
  throw std::invalid_argument("unknown scheme: " + name);
}

// One BS's transmit power for a slot. FPC is deterministic in the BS's own
// link distance; the others ignore it.
inline double sample_power(const PowerControlScheme& scheme, const NetworkConfig& cfg,
                           double link_distance, Rng& rng) {
  if (link_distance < 0.0) throw std::invalid_argument("link distance must be >= 0");
  struct V {
    const NetworkConfig& cfg;
    double r;
    Rng& rng;
    double operator()(const ConstantPower&) const { return cfg.p_max; }
    double operator()(const UniformPower& s) const { return rng.uniform(s.p_min, s.p_max); }
    double operator()(const FractionalPower& s) const {
      return std::min(s.p_bar * std::pow(r, cfg.alpha * s.epsilon), s.p_max);
    }
    double operator()(const OnOffPower& s) const {
      return rng.uniform_co() < s.xi ? s.p_bar : 0.0;
    }
  };
  return std::visit(V{cfg, link_distance, rng}, scheme);
}

struct PowerAtom {
  double location;  // W
  double mass;      // probability
};

// Marginal transmit-power law of a BS: a continuous density on (0, p_max]
// plus point atoms (peak-clip mass, on-off states). Moment queries run
// through expect(), which integrates the continuous part in a
// scheme-appropriate parametrization.
class MixedPowerDistribution {
 public:
  using Expectation = std::function<double(const std::function<double(double)>&)>;

  MixedPowerDistribution(std::vector<PowerAtom> atoms,
                         std::function<double(double)> density,
                         std::function<double(double)> cdf,
                         Expectation continuous_expect,
                         double support_max)
      : atoms_(std::move(atoms)),
        density_(std::move(density)),
        cdf_(std::move(cdf)),
        continuous_expect_(std::move(continuous_expect)),
        support_max_(support_max) {}

  // E{g(P)} over the full mixed law.
  double expect(const std::function<double(double)>& g) const {
    double total = continuous_expect_ ? continuous_expect_(g) : 0.0;
    for (const auto& a : atoms_) total += a.mass * g(a.location);
    return total;
  }

  double density(double x) const { return density_ ? density_(x) : 0.0; }
  double cdf(double x) const { return cdf_(x); }
  const std::vector<PowerAtom>& atoms() const { return atoms_; }
  double support_max() const { return support_max_; }

  double total_mass() const {
    return expect([](double) { return 1.0; });
  }

 private:
  std::vector<PowerAtom> atoms_;
  std::function<double(double)> density_;
  std::function<double(double)> cdf_;
  Expectation continuous_expect_;
  double support_max_;
};

inline MixedPowerDistribution marginal_distribution(const PowerControlScheme& scheme,
                                                    const NetworkConfig& cfg) {
  validate_scheme(scheme, cfg);
  const double pi = std::numbers::pi;

  if (const auto* s = std::get_if<ConstantPower>(&scheme)) {
    (void)s;
    const double p = cfg.p_max;
    return MixedPowerDistribution(
        {{p, 1.0}}, nullptr,
        [p](double x) { return x >= p ? 1.0 : 0.0; }, nullptr, p);
  }

  if (const auto* s = std::get_if<UniformPower>(&scheme)) {
    const double lo = s->p_min, hi = s->p_max;
    const double inv = 1.0 / (hi - lo);
    auto density = [lo, hi, inv](double x) { return (x >= lo && x <= hi) ? inv : 0.0; };
    auto cdf = [lo, hi, inv](double x) {
      if (x < lo) return 0.0;
      if (x >= hi) return 1.0;
      return (x - lo) * inv;
    };
    auto expect = [lo, hi, inv](const std::function<double(double)>& g) {
      return integrate([&](double x) { return g(x) * inv; }, lo, hi, QuadratureSpec{1e-10, 0.0});
    };
    return MixedPowerDistribution({}, density, cdf, expect, hi);
  }

  if (const auto* s = std::get_if<FractionalPower>(&scheme)) {
    const double pbar = s->p_bar, eps = s->epsilon, cap = s->p_max;
    const double lambda = cfg.lambda_bs;
    if (eps < 1e-12) {
      // degenerate: constant power min(p_bar, p_max)
      const double p = std::min(pbar, cap);
      return MixedPowerDistribution(
          {{p, 1.0}}, nullptr,
          [p](double x) { return x >= p ? 1.0 : 0.0; }, nullptr, p);
    }
    const double k = 2.0 / (cfg.alpha * eps);
    // Y = pi*lambda*(cap/pbar)^k can overflow for small eps; track it in logs.
    const double log_y = std::log(pi * lambda) + k * std::log(cap / pbar);
    const double y_cap = log_y > 300.0 ? std::numeric_limits<double>::infinity() : std::exp(log_y);
    const double atom_mass = std::isinf(y_cap) ? 0.0 : std::exp(-y_cap);
    auto density = [pbar, k, lambda, cap, pi](double x) {
      if (x <= 0.0 || x >= cap) return 0.0;
      const double t = std::pow(x / pbar, k);
      return pi * lambda * k * t / x * std::exp(-pi * lambda * t);
    };
    auto cdf = [pbar, k, lambda, cap, pi](double x) {
      if (x <= 0.0) return 0.0;
      if (x >= cap) return 1.0;
      return -std::expm1(-pi * lambda * std::pow(x / pbar, k));
    };
    // substitute y = pi*lambda*(x/pbar)^k so the integrand is g(x(y))e^{-y};
    // well-behaved for every epsilon.
    const double y_hi = std::min(y_cap, 60.0);
    const double aeps2 = cfg.alpha * eps / 2.0;
    auto expect = [pbar, lambda, y_hi, aeps2, pi](const std::function<double(double)>& g) {
      if (y_hi <= 0.0) return 0.0;
      return integrate(
          [&](double y) {
            const double x = pbar * std::pow(y / (pi * lambda), aeps2);
            return g(x) * std::exp(-y);
          },
          0.0, y_hi, QuadratureSpec{1e-10, 1e-16});
    };
    std::vector<PowerAtom> atoms;
    if (atom_mass > 0.0) atoms.push_back({cap, atom_mass});
    return MixedPowerDistribution(std::move(atoms), density, cdf, expect, cap);
  }

  const auto& s = std::get<OnOffPower>(scheme);
  std::vector<PowerAtom> atoms;
  if (s.xi > 0.0) atoms.push_back({s.p_bar, s.xi});
  if (s.xi < 1.0) atoms.push_back({0.0, 1.0 - s.xi});
  const double pbar = s.p_bar, xi = s.xi;
  auto cdf = [pbar, xi](double x) {
    if (x < 0.0) return 0.0;
    if (x < pbar) return 1.0 - xi;
    return 1.0;
  };
  return MixedPowerDistribution(std::move(atoms), nullptr, cdf, nullptr, s.p_bar);
}

// E{P^delta}; atoms at zero contribute nothing.
inline double moment_delta(const MixedPowerDistribution& dist, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must be in (0,1)");
  return dist.expect([delta](double x) { return x > 0.0 ? std::pow(x, delta) : 0.0; });
}

// E over P of h(P) = (p_ue^(1+delta) - P^(1+delta)) / (p_ue - P), the
// delta-moment of the combined pair fading mark. h extends continuously
// through P = p_ue; atoms at zero contribute p_ue^delta.
inline double compound_moment_integrand(double p, double p_ue, double delta) {
  const double diff = p_ue - p;
  if (std::abs(diff) <= 1e-6 * p_ue) {
    // first-order expansion around the removable singularity
    const double base = (1.0 + delta) * std::pow(p_ue, delta);
    const double slope = 0.5 * (1.0 + delta) * delta * std::pow(p_ue, delta - 1.0);
    return base - slope * diff;
  }
  return (std::pow(p_ue, 1.0 + delta) - std::pow(p, 1.0 + delta)) / diff;
}

inline double compound_moment(const MixedPowerDistribution& dist, double p_ue, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must be in (0,1)");
  if (!(p_ue > 0.0)) throw std::invalid_argument("p_ue must be > 0");
  return dist.expect(
      [p_ue, delta](double x) { return compound_moment_integrand(x, p_ue, delta); });
}

}  // namespace fdpc
