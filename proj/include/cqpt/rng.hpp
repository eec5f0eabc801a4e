#pragma once

#include <cstdint>

namespace cqpt {

/// Counter-based random stream: every draw is a pure function of
/// (seed, counter), so results replay bit-for-bit from the seed alone.
/// One stream is owned by one thread of work; derive independent streams
/// with substream().
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t counter = 0)
      : seed_(seed), counter_(counter) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t counter() const noexcept { return counter_; }

  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

  /// Standard normal via Box-Muller; consumes two uniforms.
  double normal();

  /// Independent child stream keyed by tag. Does not advance this stream.
  RngStream substream(std::uint64_t tag) const;

 private:
  std::uint64_t seed_;
  std::uint64_t counter_;
};

}  // namespace cqpt
