#include "codemix/nn/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace codemix::nn {

bool GradCheckReport::passed() const {
  return std::all_of(entries.begin(), entries.end(),
                     [](const GradCheckEntry& e) { return e.passed; });
}

double GradCheckReport::max_rel_error() const {
  double worst = 0.0;
  for (const auto& e : entries) worst = std::max(worst, e.max_rel_error);
  return worst;
}

std::string GradCheckReport::summary() const {
  std::ostringstream out;
  for (const auto& e : entries) {
    out << (e.passed ? "ok   " : "FAIL ") << e.name << " max_rel_err=" << e.max_rel_error
        << " at " << e.worst_index << " (analytic " << e.analytic << ", numeric "
        << e.numeric << ")\n";
  }
  return out.str();
}

double grad_rel_error(double analytic, double numeric) noexcept {
  const double denom = std::max({1.0, std::abs(analytic), std::abs(numeric)});
  return std::abs(analytic - numeric) / denom;
}

GradCheckReport grad_check(ParamStore& store, const std::function<double()>& loss,
                           const std::function<void()>& accumulate_grads,
                           const GradCheckOptions& options) {
  store.zero_grad();
  accumulate_grads();

  GradCheckReport report;
  report.tol_rel = options.tol_rel;
  for (auto& param : store.params()) {
    GradCheckEntry entry;
    entry.name = param.name;
    for (std::size_t i = 0; i < param.value.size(); ++i) {
      const double saved = param.value[i];
      param.value[i] = saved + options.step;
      const double up = loss();
      param.value[i] = saved - options.step;
      const double down = loss();
      param.value[i] = saved;
      const double numeric = (up - down) / (2.0 * options.step);
      const double analytic = param.grad[i];
      const double err = grad_rel_error(analytic, numeric);
      if (i == 0 || err > entry.max_rel_error) {
        entry.max_rel_error = err;
        entry.worst_index = i;
        entry.analytic = analytic;
        entry.numeric = numeric;
      }
    }
    entry.passed = entry.max_rel_error <= options.tol_rel;
    report.entries.push_back(std::move(entry));
  }
  return report;
}

}  // namespace codemix::nn
