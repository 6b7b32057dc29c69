#pragma once

#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hcrn/errors.hpp"

namespace hcrn {

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Deterministic RNG. Every consumer derives its own named stream from the run
// seed, so adding a consumer never perturbs the draws of another. Uniform
// sampling is hand-rolled on top of mt19937_64 instead of going through
// std::uniform_*_distribution, whose output is implementation-defined.
class Rng {
 public:
  Rng() : Rng(0, "default") {}

  Rng(std::uint64_t seed, std::string_view stream) {
    const std::uint64_t m = fnv1a64(stream);
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(m),
                      static_cast<std::uint32_t>(m >> 32)};
    gen_.seed(seq);
  }

  std::uint64_t u64() { return gen_(); }

  // Uniform double in [lo, hi).
  double real(double lo, double hi) {
    const double u = static_cast<double>(u64() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
  }

  // Uniform index in [0, n). Rejection sampling on a power-of-two mask keeps
  // the draw exact.
  std::size_t below(std::size_t n) {
    if (n == 0) throw InputError("Rng::below: n must be positive");
    std::uint64_t mask = n - 1;
    mask |= mask >> 1;
    mask |= mask >> 2;
    mask |= mask >> 4;
    mask |= mask >> 8;
    mask |= mask >> 16;
    mask |= mask >> 32;
    for (;;) {
      const std::uint64_t x = u64() & mask;
      if (x < n) return static_cast<std::size_t>(x);
    }
  }

  bool coin() { return (u64() & 1ull) != 0; }

  template <typename T>
  void shuffle(std::vector<T>& xs) {
    for (std::size_t i = xs.size(); i > 1; --i)
      std::swap(xs[i - 1], xs[below(i)]);
  }

  std::string state() const {
    std::ostringstream os;
    os << gen_;
    return os.str();
  }

  void set_state(const std::string& s) {
    std::istringstream is(s);
    is >> gen_;
    if (!is) throw FormatError("Rng::set_state: malformed state string");
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace hcrn
