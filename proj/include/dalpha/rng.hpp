#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace dalpha {

/// Philox4x32-10 counter-based generator (Salmon et al., Random123).
///
/// The 64-bit seed is the Philox key. The 128-bit counter is split into a 64-bit block
/// index (low half) and a 64-bit stream id (high half), so every (seed, stream) pair is
/// an independent sequence of 2^64 blocks of four 32-bit words.
///
/// Stream splitting: `child(i)` keeps the key and derives the stream id
/// `splitmix64(stream ^ splitmix64(i + 1))`. Instance generators take child(c + 1) for
/// component c and child(0) for component selection; harness trials use the trial seed
/// as key with stream 0.
///
/// Satisfies std::uniform_random_bit_generator with 64-bit output.
class Philox {
 public:
  using result_type = std::uint64_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit Philox(std::uint64_t seed = 0, std::uint64_t stream = 0) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() noexcept;
  /// Uniform integer in [0, n), unbiased. n must be positive.
  std::uint64_t uniform_index(std::uint64_t n) noexcept;

  Philox child(std::uint64_t id) const noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  /// The raw 10-round bijection, exposed for known-answer tests.
  static Block encrypt(Block counter, Key key) noexcept;

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  Block buffer_{};
  int used_ = 4;  // 32-bit words consumed from buffer_
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace dalpha
