#pragma once

#include <cstdint>
#include <random>

namespace hyperconn {

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed of the stream for item `index` under `seed`. Order independent.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/// Seeded pseudo-random stream. All randomness in the library flows through it.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}
  std::mt19937_64& engine() noexcept { return engine_; }
  std::uint64_t next() { return engine_(); }
  /// Uniform +-1.
  double rademacher();
  /// Uniform in [0, 1).
  double uniform();
  double gaussian();

 private:
  std::mt19937_64 engine_;
  std::uint64_t bits_ = 0;
  int bits_left_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace hyperconn
