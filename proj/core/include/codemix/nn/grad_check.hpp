#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "codemix/nn/param_store.hpp"

namespace codemix::nn {

struct GradCheckOptions {
  double step = 1e-5;
  double tol_rel = 1e-4;
};

struct GradCheckEntry {
  std::string name;
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  double analytic = 0.0;  // at worst_index
  double numeric = 0.0;   // at worst_index
  bool passed = true;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double tol_rel = 0.0;

  bool passed() const;
  double max_rel_error() const;
  std::string summary() const;
};

// |a - n| / max(1, |a|, |n|)
double grad_rel_error(double analytic, double numeric) noexcept;

// Compares analytic gradients against central differences for every scalar
// in `store`. `loss` evaluates the scalar objective from the current
// parameter values; `accumulate_grads` runs forward + backward and adds the
// analytic gradient into the store's grad slots (they are zeroed first).
// Inputs that need checking should be registered as parameters.
GradCheckReport grad_check(ParamStore& store, const std::function<double()>& loss,
                           const std::function<void()>& accumulate_grads,
                           const GradCheckOptions& options = {});

}  // namespace codemix::nn
