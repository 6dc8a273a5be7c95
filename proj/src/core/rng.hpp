#pragma once

#include <array>
#include <cstdint>

namespace extnet {

// Philox4x64-10 counter-based generator (Salmon et al. 2011, "Parallel random
// numbers: as easy as 1, 2, 3"). Streams are addressed by a 128-bit key; the
// 256-bit counter advances per block. Distinct (seed, stream) pairs yield
// statistically independent sequences, which is what makes replicate-level
// parallelism reproducible: worker threads never share a stream.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();

  // Uniform on the open interval (0, 1).
  double uniform();

  // Standard normal via inverse-CDF (Wichura's AS 241); one uniform per draw.
  double normal();

  // Unit-rate exponential.
  double exponential();

  // Encodes a purpose tag and an index into a stream id so sub-streams for
  // different uses of the same seed never collide.
  static std::uint64_t stream_id(std::uint32_t purpose, std::uint64_t index);

 private:
  void refill();

  std::array<std::uint64_t, 4> counter_{};
  std::array<std::uint64_t, 4> block_{};
  std::array<std::uint64_t, 2> key_;
  int pos_ = 4;  // forces refill on first draw
};

namespace stream {
inline constexpr std::uint32_t stations = 1;
inline constexpr std::uint32_t simulate = 2;
inline constexpr std::uint32_t bootstrap = 3;
inline constexpr std::uint32_t fixture = 4;
}  // namespace stream

}  // namespace extnet
