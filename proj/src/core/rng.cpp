#include "core/rng.hpp"

#include <cmath>

#include "core/stats.hpp"

namespace extnet {

namespace {

constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

inline std::uint64_t mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t* hi) {
  const unsigned __int128 product = static_cast<unsigned __int128>(a) * b;
  *hi = static_cast<std::uint64_t>(product >> 64);
  return static_cast<std::uint64_t>(product);
}

inline void philox_round(std::array<std::uint64_t, 4>& ctr,
                         const std::array<std::uint64_t, 2>& key) {
  std::uint64_t hi0, hi1;
  const std::uint64_t lo0 = mulhilo(kMul0, ctr[0], &hi0);
  const std::uint64_t lo1 = mulhilo(kMul1, ctr[2], &hi1);
  ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_{seed, stream} {}

void CounterRng::refill() {
  // The 256-bit counter is incremented (with carry) before each block is
  // encrypted, so the first block comes from counter value 1. Reference
  // implementations of this generator do the same; the frozen stream tests
  // depend on it.
  for (auto& word : counter_) {
    if (++word != 0) break;
  }
  block_ = counter_;
  std::array<std::uint64_t, 2> key = key_;
  for (int round = 0; round < 9; ++round) {
    philox_round(block_, key);
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  philox_round(block_, key);
  pos_ = 0;
}

std::uint64_t CounterRng::next_u64() {
  if (pos_ == 4) refill();
  return block_[pos_++];
}

double CounterRng::uniform() {
  // 53 random bits, offset by half an ulp so 0 and 1 are both excluded.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal() { return norm_quantile(uniform()); }

double CounterRng::exponential() { return -std::log(uniform()); }

std::uint64_t CounterRng::stream_id(std::uint32_t purpose, std::uint64_t index) {
  return (static_cast<std::uint64_t>(purpose) << 48) | (index & 0xFFFFFFFFFFFFULL);
}

}  // namespace extnet
