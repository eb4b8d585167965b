#pragma once

#include <cmath>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fdpc {

struct QuadratureSpec {
  double rel_tol = 1e-8;
  double abs_tol = 0.0;
  int max_intervals = 4000;

  QuadratureSpec tightened(double factor) const {
    QuadratureSpec s = *this;
    s.rel_tol *= factor;
    s.abs_tol *= factor;
    return s;
  }
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(double achieved, double requested)
      : std::runtime_error("quadrature did not converge: achieved error " +
                           std::to_string(achieved) + ", requested " +
                           std::to_string(requested)),
        achieved_error(achieved),
        requested_tolerance(requested) {}

  double achieved_error;
  double requested_tolerance;
};

namespace detail {

// Gauss-Kronrod 7-15 abscissae/weights on [-1,1] (positive half).
// Odd-indexed Kronrod nodes are the embedded Gauss-7 nodes.
inline constexpr double kGk15Nodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
inline constexpr double kGk15Weights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double kGauss7Weights[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct PanelEstimate {
  double value;
  double error;
};

template <class F>
PanelEstimate gk15(F& f, double a, double b) {
  const double h = 0.5 * (b - a);
  const double c = 0.5 * (a + b);
  double kronrod = 0.0;
  double gauss = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double dx = h * kGk15Nodes[i];
    const double fsum = (i == 7) ? f(c) : f(c - dx) + f(c + dx);
    kronrod += kGk15Weights[i] * fsum;
    if (i % 2 == 1) gauss += kGauss7Weights[i / 2] * fsum;
  }
  kronrod *= h;
  gauss *= h;
  return {kronrod, std::abs(kronrod - gauss)};
}

struct Segment {
  double error;
  double value;
  double a, b;
  bool operator<(const Segment& o) const { return error < o.error; }
};

}  // namespace detail

// Adaptive Gauss-Kronrod integration over [a,b]. Worst-error-first
// refinement; deterministic for a given integrand and spec. Throws
// QuadratureError when the interval budget is exhausted before the
// tolerance is met.
template <class F>
double integrate(F&& f, double a, double b, const QuadratureSpec& spec = {}) {
  if (a == b) return 0.0;
  // initial split at the golden point: a feature symmetric about the
  // midpoint (where bisection boundaries land, unsampled by the open
  // Kronrod rule) still gets sampled
  const double split = a + (b - a) * 0.3819660112501051;
  std::priority_queue<detail::Segment> heap;
  double total = 0.0;
  double total_err = 0.0;
  for (auto [lo, hi] : {std::pair{a, split}, std::pair{split, b}}) {
    auto est = detail::gk15(f, lo, hi);
    heap.push({est.error, est.value, lo, hi});
    total += est.value;
    total_err += est.error;
  }
  int used = 2;
  auto tol = [&](double t) { return std::max(spec.abs_tol, spec.rel_tol * std::abs(t)); };
  while (total_err > tol(total) && used < spec.max_intervals) {
    detail::Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid == worst.a || mid == worst.b) {  // interval at double resolution
      heap.push({0.0, worst.value, worst.a, worst.b});
      total_err -= worst.error;
      continue;
    }
    auto left = detail::gk15(f, worst.a, mid);
    auto right = detail::gk15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push({left.error, left.value, worst.a, mid});
    heap.push({right.error, right.value, mid, worst.b});
    ++used;
  }
  if (total_err > 10.0 * tol(total)) throw QuadratureError(total_err, tol(total));
  return total;
}

// Integration with a geometric initial ladder toward the left endpoint.
// For integrands confined to a boundary layer at `a` (for example
// exp(-c (x-a)^k) with large c) a uniform initial panel places every node
// outside the layer and the adaptive pass accepts an all-zero estimate;
// the ladder guarantees nodes at every scale down to 1e-9 of the range.
template <class F>
double integrate_left_graded(F&& f, double a, double b, const QuadratureSpec& spec = {}) {
  if (a == b) return 0.0;
  static constexpr double kLadder[] = {1e-9, 3e-8, 1e-6, 3e-5, 1e-3, 3e-2, 1.0};
  double total = 0.0;
  double lo = a;
  for (double frac : kLadder) {
    const double hi = a + (b - a) * frac;
    if (hi <= lo) continue;
    total += integrate(f, lo, hi, spec);
    lo = hi;
  }
  return total;
}

// Integral over [0, inf) via x = scale * t/(1-t). `scale` should be the
// natural length of the integrand's support so the adaptive pass starts
// well-conditioned.
template <class F>
double integrate_semi_infinite(F&& f, double scale = 1.0, const QuadratureSpec& spec = {}) {
  auto mapped = [&f, scale](double t) {
    const double u = 1.0 - t;
    const double x = scale * t / u;
    const double fx = f(x);
    if (fx == 0.0) return 0.0;  // keep 0 * inf out of the Jacobian product
    return fx * scale / (u * u);
  };
  return integrate(mapped, 0.0, 1.0, spec);
}

}  // namespace fdpc
