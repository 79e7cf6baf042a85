#include "codemix/random.hpp"

#include <cmath>
#include <numbers>

#include "codemix/error.hpp"

namespace codemix {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kIo: return "io error";
    case ErrorKind::kSchema: return "schema error";
    case ErrorKind::kConfig: return "config error";
    case ErrorKind::kDimension: return "dimension error";
    case ErrorKind::kData: return "data error";
    case ErrorKind::kCorruption: return "corruption error";
    case ErrorKind::kNumeric: return "numeric error";
  }
  return "error";
}

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kIo:
    case ErrorKind::kSchema:
    case ErrorKind::kConfig:
    case ErrorKind::kDimension:
      return 2;
    case ErrorKind::kData:
    case ErrorKind::kCorruption:
      return 3;
    case ErrorKind::kNumeric:
      return 4;
  }
  return 1;
}

std::uint64_t SplitMix64::below(std::uint64_t bound) noexcept {
  if (bound <= 1) return 0;
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = next();
    if (r >= threshold) return r % bound;
  }
}

double SplitMix64::normal() noexcept {
  // 1 - uniform() lies in (0, 1], so the log is finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t derive_seed(std::uint64_t base,
                          std::initializer_list<std::uint64_t> tags) noexcept {
  SplitMix64 mixer(base);
  std::uint64_t h = mixer.next();
  for (const auto tag : tags) {
    SplitMix64 step(h ^ (tag * 0xD1B54A32D192ED03ULL));
    h = step.next();
  }
  return h;
}

}  // namespace codemix
