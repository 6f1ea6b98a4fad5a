#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace robucb {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as
/// easy as 1, 2, 3"). Maps a 128-bit counter and a 64-bit key to 128 bits.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

/// Counter-based random stream.
///
/// A stream is identified by (seed, repetition, substream). The seed is the
/// Philox key; repetition and substream occupy the upper half of the counter
/// and the lower half counts blocks. Distinct identifiers therefore address
/// disjoint parts of the counter space, and deriving a stream is a pure
/// function of its identifier.
///
/// Satisfies UniformRandomBitGenerator. A handle is single-owner; copy it to
/// fork an identical replay.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream(std::uint64_t seed, std::uint32_t repetition, std::uint32_t substream) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Uniform on the open interval (0, 1); 53 random bits.
  double uniform_open() noexcept;

  std::uint64_t blocks_consumed() const noexcept { return block_; }

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint32_t repetition_;
  std::uint32_t substream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int buffered_ = 0;  // 64-bit words left in buffer_
};

}  // namespace robucb
