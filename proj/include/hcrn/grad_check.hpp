#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "hcrn/errors.hpp"
#include "hcrn/rng.hpp"
#include "hcrn/tape.hpp"

namespace hcrn {

// Compares analytic gradients against central finite differences.
// `build` must construct the loss on the given tape from the parameters'
// current values, deterministically. Returns the max over checked coordinates
// of |analytic - fd| / max(1e-8, |analytic| + |fd|).
//
// max_coords_per_param == 0 checks every coordinate; otherwise that many
// coordinates are sampled per parameter with `rng`.
template <typename S>
double grad_check(const std::function<Var(Tape<S>&)>& build,
                  std::span<Parameter<S>* const> params, double eps = 1e-5,
                  std::size_t max_coords_per_param = 0, Rng* rng = nullptr) {
  for (Parameter<S>* p : params) p->zero_grad();

  const auto eval = [&]() {
    Tape<S> t;
    const Var loss = build(t);
    const double y = t.scalar(loss);
    if (!std::isfinite(y))
      throw NumericError("grad_check: non-finite loss value");
    return y;
  };

  // analytic pass
  std::vector<Tensor<S>> analytic;
  {
    Tape<S> t;
    const Var loss = build(t);
    if (!std::isfinite(t.scalar(loss)))
      throw NumericError("grad_check: non-finite loss value");
    t.backward(loss);
    for (Parameter<S>* p : params) analytic.push_back(p->grad);
  }

  double max_rel = 0;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Parameter<S>& p = *params[pi];
    const std::size_t n = p.value.numel();
    std::vector<std::size_t> coords;
    if (max_coords_per_param == 0 || n <= max_coords_per_param) {
      coords.resize(n);
      for (std::size_t i = 0; i < n; ++i) coords[i] = i;
    } else {
      if (!rng)
        throw ConfigError("grad_check: sampling requested without an rng");
      for (std::size_t i = 0; i < max_coords_per_param; ++i)
        coords.push_back(rng->below(n));
    }
    for (std::size_t c : coords) {
      const S saved = p.value[c];
      p.value[c] = saved + static_cast<S>(eps);
      const double f_plus = eval();
      p.value[c] = saved - static_cast<S>(eps);
      const double f_minus = eval();
      p.value[c] = saved;
      const double fd = (f_plus - f_minus) / (2.0 * eps);
      const double a = static_cast<double>(analytic[pi][c]);
      const double rel =
          std::abs(a - fd) / std::max(1e-8, std::abs(a) + std::abs(fd));
      max_rel = std::max(max_rel, rel);
    }
  }
  return max_rel;
}

}  // namespace hcrn
