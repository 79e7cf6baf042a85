#include "codemix/training/schedule.hpp"

#include <string>

#include "codemix/error.hpp"

namespace codemix::training {

double lr_at(std::uint64_t step, std::uint64_t total_steps, double base_lr,
             std::uint64_t warmup_steps) {
  if (total_steps == 0) fail(ErrorKind::kConfig, "lr_at: total_steps must be positive");
  if (step > total_steps) {
    fail(ErrorKind::kConfig, "lr_at: step " + std::to_string(step) + " beyond " +
                                 std::to_string(total_steps));
  }
  if (warmup_steps >= total_steps) {
    fail(ErrorKind::kConfig, "lr_at: warmup_steps must be below total_steps");
  }
  if (step < warmup_steps) {
    return base_lr * static_cast<double>(step) / static_cast<double>(warmup_steps);
  }
  return base_lr * static_cast<double>(total_steps - step) /
         static_cast<double>(total_steps - warmup_steps);
}

}  // namespace codemix::training
