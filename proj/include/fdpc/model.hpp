#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

#include "fdpc/rng.hpp"

namespace fdpc {

// All physical-layer and deployment parameters, SI linear units only
// (W, m, Hz, bps). dB/dBm conversion happens at the config boundary.
struct NetworkConfig {
  double lambda_bs = 1e-6;    // BS density, 1/m^2
  double lambda_ue = 1e-5;    // UE density, 1/m^2
  double alpha = 4.0;         // path-loss exponent, > 2
  double beta = 1e-10;        // residual self-interference-to-power ratio
  double p_ue = 0.2;          // UE transmit power, W
  double p_static = 0.15;     // static circuit power, W
  double p_max = 2.0;         // BS peak power, W
  double p_min = 0.2;         // BS minimum power (uniform scheme), W
  double bandwidth_w = 1e7;   // spectrum width, Hz
  double rate_bs = 1e7;       // target rate R_b gating the UL direction, bps
  double rate_ue = 1e7;       // target rate R_u gating the DL direction, bps

  // When a BS under on-off power control sleeps, does its paired UE still
  // transmit (and interfere)?
  bool apc_ue_always_on = true;
  // Does the reported DL rate under on-off power control carry the transmit
  // probability (a sleeping BS delivers no data that slot)?
  bool apc_rate_includes_xi = true;

  static NetworkConfig defaults() { return NetworkConfig{}; }

  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0)) throw std::invalid_argument(std::string(name) + " must be > 0");
    };
    if (!(alpha > 2.0)) throw std::invalid_argument("alpha must be > 2");
    positive(lambda_bs, "lambda_bs");
    if (lambda_ue < 0.0) throw std::invalid_argument("lambda_ue must be >= 0");
    if (beta < 0.0) throw std::invalid_argument("beta must be >= 0");
    positive(p_ue, "p_ue");
    positive(p_static, "p_static");
    positive(p_max, "p_max");
    positive(p_min, "p_min");
    if (p_min > p_max) throw std::invalid_argument("p_min must be <= p_max");
    positive(bandwidth_w, "bandwidth_w");
    positive(rate_bs, "rate_bs");
    positive(rate_ue, "rate_ue");
  }
};

// delta = 2/alpha, the interference-moment exponent; in (0,1) for alpha > 2.
struct Delta {
  double value;
};

inline Delta delta_of(const NetworkConfig& cfg) { return {2.0 / cfg.alpha}; }

// Probability that a BS serves no UE and sleeps.
inline double idle_probability(double lambda_bs, double lambda_ue) {
  if (!(lambda_bs > 0.0)) throw std::invalid_argument("lambda_bs must be > 0");
  if (lambda_ue < 0.0) throw std::invalid_argument("lambda_ue must be >= 0");
  return std::pow(1.0 + lambda_ue / (3.5 * lambda_bs), -3.5);
}

struct ActiveDensity {
  double lambda_b;  // density of active BSs, 1/m^2
  double p0;        // idle probability
};

inline ActiveDensity active_density(const NetworkConfig& cfg) {
  const double p0 = idle_probability(cfg.lambda_bs, cfg.lambda_ue);
  return {(1.0 - p0) * cfg.lambda_bs, p0};
}

// SIR threshold equivalent to a target rate over bandwidth W.
inline double sir_threshold(double rate_bps, double bandwidth_hz) {
  if (!(bandwidth_hz > 0.0)) throw std::invalid_argument("bandwidth must be > 0");
  return std::exp2(rate_bps / bandwidth_hz) - 1.0;
}

struct Thresholds {
  double theta_b;  // gates the UL direction
  double theta_u;  // gates the DL direction
};

inline Thresholds thresholds(const NetworkConfig& cfg) {
  return {sir_threshold(cfg.rate_bs, cfg.bandwidth_w),
          sir_threshold(cfg.rate_ue, cfg.bandwidth_w)};
}

// Nearest-BS link distance is Rayleigh; pdf 2 pi lambda r exp(-lambda pi r^2).
inline double link_distance_pdf(double r, double lambda_bs) {
  if (r < 0.0) throw std::invalid_argument("link distance must be >= 0");
  const double pi = std::numbers::pi;
  return 2.0 * pi * lambda_bs * r * std::exp(-lambda_bs * pi * r * r);
}

inline double link_distance_cdf(double r, double lambda_bs) {
  if (r < 0.0) throw std::invalid_argument("link distance must be >= 0");
  return -std::expm1(-lambda_bs * std::numbers::pi * r * r);
}

inline double mean_link_distance(double lambda_bs) {
  return 1.0 / (2.0 * std::sqrt(lambda_bs));
}

// Inverse-transform sample of the link-distance law.
inline double sample_link_distance(Rng& rng, double lambda_bs) {
  if (!(lambda_bs > 0.0)) throw std::invalid_argument("lambda_bs must be > 0");
  const double u = rng.uniform_oc();
  return std::sqrt(-std::log(u) / (std::numbers::pi * lambda_bs));
}

enum class ReportSource { monte_carlo, exact, bound_upper, bound_lower };

inline const char* to_string(ReportSource s) {
  switch (s) {
    case ReportSource::monte_carlo: return "monte_carlo";
    case ReportSource::exact: return "exact";
    case ReportSource::bound_upper: return "bound_upper";
    case ReportSource::bound_lower: return "bound_lower";
  }
  return "?";
}

struct ReportCi {
  double p_ul = 0.0;
  double p_dl = 0.0;
  double rate_ul = 0.0;
  double rate_dl = 0.0;
  double ase = 0.0;
  double ee = 0.0;
};

struct PerformanceReport {
  double p_ul = 0.0;     // UL coverage probability
  double p_dl = 0.0;     // DL coverage probability
  double rate_ul = 0.0;  // bps
  double rate_dl = 0.0;  // bps
  double ase = 0.0;      // bps/Hz/m^2
  double ee = 0.0;       // bps/J
  std::optional<ReportCi> ci;  // 95% half-widths, Monte-Carlo source only
  ReportSource source = ReportSource::bound_lower;
};

}  // namespace fdpc
