#pragma once

#include <cstdint>

namespace codemix::training {

// Linear decay from base_lr at step 0 to 0 at total_steps. With warmup, the
// rate first rises linearly from 0 to base_lr over warmup_steps and then
// decays linearly to 0. Requires total_steps > 0 and step <= total_steps.
double lr_at(std::uint64_t step, std::uint64_t total_steps, double base_lr,
             std::uint64_t warmup_steps = 0);

}  // namespace codemix::training
