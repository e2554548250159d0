#pragma once

#include <array>
#include <cstdint>

namespace dicke {

// Counter-based generator (Philox4x32-10, Salmon et al. SC'11).
//
// Each (master_seed, stream) pair is an independent random stream: the seed
// words form the key, the stream id occupies the high counter words, and the
// low counter words count draws. Streams never overlap and a stream's output
// does not depend on when or where it is consumed, which is what makes
// trajectory ensembles reproducible regardless of worker scheduling.
class CounterRng {
 public:
  CounterRng(std::uint64_t master_seed, std::uint64_t stream);

  std::uint64_t stream() const { return stream_; }

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  // Uniform on the open interval (0, 1); never returns 0 or 1.
  double uniform_open();

  // Standard normal via Box-Muller; draws two uniforms per pair and caches
  // the second value.
  double normal();

  // Raw 128-bit block for the current counter (mainly for tests).
  static std::array<std::uint32_t, 4> block(
      const std::array<std::uint32_t, 4>& counter,
      const std::array<std::uint32_t, 2>& key);

 private:
  void refill();

  std::uint64_t stream_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> buffer_;
  int buffer_pos_;
  double cached_normal_;
  bool has_cached_normal_;
};

}  // namespace dicke
