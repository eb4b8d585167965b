#pragma once

#include <cmath>
#include <cstdint>

namespace fdpc {

// Counter-based generator built on the SplitMix64 finalizer (Steele, Lea &
// Flood 2014). The state advances by the golden-ratio increment and every
// output is a full avalanche of the counter, so streams derived with fork()
// are statistically independent and a draw in one stream never shifts the
// sequence of another. All sampling code takes an explicit Rng so runs are
// reproducible from the 64-bit seed alone.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : key_(mix(seed ^ 0x5851f42d4c957f2dULL)), state_(key_) {}

  std::uint64_t next_u64() {
    state_ += kGolden;
    return mix(state_);
  }

  // uniform on [0,1), 53-bit resolution
  double uniform_co() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform on (0,1], safe as a log argument
  double uniform_oc() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform_co(); }

  // unit-mean exponential
  double exponential() { return -std::log(uniform_oc()); }

  // Product method; splits recursively so exp(-mean) never underflows.
  std::uint64_t poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean > 400.0) return poisson(mean * 0.5) + poisson(mean - mean * 0.5);
    const double limit = std::exp(-mean);
    std::uint64_t k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform_co();
    } while (p > limit);
    return k - 1;
  }

  // Independent substream addressed by tag. Keyed on the stream identity,
  // not the consumption position: forking neither disturbs the parent nor
  // depends on how much of it was consumed.
  Rng fork(std::uint64_t tag) const {
    Rng child(0);
    child.key_ = mix(key_ ^ (mix(tag + kGolden) + kGolden + (key_ << 6) + (key_ >> 2)));
    child.state_ = child.key_;
    return child;
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t state_;
};

}  // namespace fdpc
