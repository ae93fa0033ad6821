#pragma once

#include <array>
#include <cstdint>

namespace levyfit {

/// Philox4x32-10 counter-based generator.
///
/// A stream is identified by a 64-bit key; draws walk a 128-bit counter.
/// Child streams come from split(), which mixes (key, index) with SplitMix64,
/// so a batch of replicates can be seeded up front independent of scheduling.
class RngStream {
 public:
  explicit RngStream(std::uint64_t key = 0) noexcept : key_(key) {}

  std::uint64_t key() const noexcept { return key_; }

  /// Raw Philox block for a given counter and key (exposed for known-answer tests).
  static std::array<std::uint32_t, 4> philox_block(std::array<std::uint32_t, 4> ctr,
                                                   std::array<std::uint32_t, 2> key) noexcept;

  std::uint32_t next_u32() noexcept;
  std::uint64_t next_u64() noexcept;
  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) noexcept;
  double normal() noexcept;
  double exponential() noexcept;
  /// Gamma(shape, scale = 1).
  double gamma(double shape) noexcept;

  RngStream split(std::uint64_t index) const noexcept;

 private:
  void refill() noexcept;

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int buffered_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace levyfit
