#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace adequacy {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// Philox4x32 with 10 rounds (Salmon et al., SC'11).
PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key) noexcept;

/// Counter-based stream. The key is the 64-bit seed; the counter holds a
/// block index, the 64-bit sample index and the stream id. Any (seed, stream,
/// sample) triple therefore yields the same draws regardless of which worker
/// evaluates it or in which order.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint32_t stream_id, std::uint64_t sample_index) noexcept;

  std::uint32_t next_u32() noexcept;
  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform on (0, 1], safe for log().
  double uniform_pos() noexcept;
  /// Unbiased integer on [0, n); n must be positive.
  std::uint64_t uniform_index(std::uint64_t n) noexcept;
  /// True with probability p; p must lie in [0, 1].
  bool bernoulli(double p) noexcept;

  std::uint64_t seed() const noexcept;
  std::uint32_t stream_id() const noexcept { return counter_[3]; }
  std::uint64_t sample_index() const noexcept;

 private:
  void refill() noexcept;

  PhiloxKey key_;
  PhiloxCounter counter_;
  PhiloxCounter block_{};
  int used_ = 4;
};

}  // namespace adequacy
