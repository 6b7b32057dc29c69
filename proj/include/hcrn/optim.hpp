#pragma once

#include <cmath>
#include <iostream>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hcrn/tape.hpp"

namespace hcrn {

// Rescales gradients of trainable parameters so the global L2 norm does not
// exceed `threshold` (the boundary itself passes unscaled). Returns the scale
// applied. A non-finite norm aborts the step.
template <typename S>
double clip_global_norm(std::span<Parameter<S>* const> params,
                        double threshold = 5.0) {
  double sq = 0;
  for (Parameter<S>* p : params) {
    if (p->frozen) continue;
    for (S g : p->grad.v) sq += static_cast<double>(g) * static_cast<double>(g);
  }
  const double norm = std::sqrt(sq);
  if (!std::isfinite(norm))
    throw NumericError("clip_global_norm: gradient norm is not finite");
  if (norm <= threshold) return 1.0;
  const double scale = threshold / norm;
  for (Parameter<S>* p : params) {
    if (p->frozen) continue;
    for (S& g : p->grad.v) g = static_cast<S>(static_cast<double>(g) * scale);
  }
  return scale;
}

// Adadelta updates with per-parameter mean-square accumulators. Frozen
// parameters are skipped entirely, accumulators included.
template <typename S>
class Adadelta {
 public:
  struct Slot {
    Tensor<S> eg2;   // decayed mean of squared gradients
    Tensor<S> edx2;  // decayed mean of squared updates
  };

  double rho = 0.9;
  double eps = 1e-6;

  Adadelta() = default;
  explicit Adadelta(double rho_, double eps_ = 1e-6) : rho(rho_), eps(eps_) {}

  void step(std::span<Parameter<S>* const> params) {
    for (Parameter<S>* p : params) {
      if (p->frozen) continue;
      Slot& s = slot(*p);
      if (!s.eg2.same_shape(p->value))
        throw StateError("adadelta: accumulator shape drifted for " + p->name);
      for (std::size_t i = 0; i < p->value.numel(); ++i) {
        const double g = static_cast<double>(p->grad[i]);
        double eg2 = rho * static_cast<double>(s.eg2[i]) + (1.0 - rho) * g * g;
        const double dx =
            -std::sqrt(static_cast<double>(s.edx2[i]) + eps) /
            std::sqrt(eg2 + eps) * g;
        const double edx2 =
            rho * static_cast<double>(s.edx2[i]) + (1.0 - rho) * dx * dx;
        s.eg2[i] = static_cast<S>(eg2);
        s.edx2[i] = static_cast<S>(edx2);
        p->value[i] = static_cast<S>(static_cast<double>(p->value[i]) + dx);
      }
    }
  }

  Slot& slot(const Parameter<S>& p) {
    auto it = slots_.find(p.name);
    if (it == slots_.end()) {
      Slot s{Tensor<S>::zeros(p.value.shape), Tensor<S>::zeros(p.value.shape)};
      it = slots_.emplace(p.name, std::move(s)).first;
    }
    return it->second;
  }

  const std::map<std::string, Slot>& slots() const { return slots_; }
  std::map<std::string, Slot>& slots() { return slots_; }

 private:
  std::map<std::string, Slot> slots_;
};

// Toggles the frozen flag on every parameter whose name starts with one of
// the prefixes; returns how many matched. No match warns.
template <typename S>
std::size_t set_frozen(std::span<Parameter<S>* const> params,
                       std::span<const std::string> prefixes, bool flag) {
  std::size_t affected = 0;
  for (Parameter<S>* p : params) {
    for (const std::string& prefix : prefixes) {
      if (p->name.rfind(prefix, 0) == 0) {
        p->frozen = flag;
        ++affected;
        break;
      }
    }
  }
  if (affected == 0 && !prefixes.empty())
    std::cerr << "warning: set_frozen matched no parameters\n";
  return affected;
}

}  // namespace hcrn
