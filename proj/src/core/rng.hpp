#pragma once

#include <array>
#include <cstdint>

namespace hjbtk {

// Counter-based generator (Philox4x32-10). Every (master seed, stream) pair
// is an independent substream; draws are a pure function of
// (seed, stream, draw index), so replica r always sees the same numbers no
// matter how replicas are scheduled across threads. That property is what
// makes common-random-number comparisons and parallel reductions exactly
// reproducible.
class CounterRng {
 public:
  CounterRng(std::uint64_t master_seed, std::uint64_t stream);

  // Uniform on the open interval (0,1).
  double uniform();

  // Standard normal via Box-Muller; consumes uniforms pairwise and caches
  // the second variate, so the draw sequence is call-order deterministic.
  double normal();

  std::uint64_t stream() const { return stream_; }

  // One keyed Philox4x32-10 block; exposed for tests.
  static std::array<std::uint32_t, 4> philox_block(std::array<std::uint32_t, 4> ctr,
                                                   std::array<std::uint32_t, 2> key);

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_ = 0;
  std::uint64_t block_index_ = 0;
  std::array<double, 2> uni_buf_{};
  int uni_left_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

// Distinct substream ids for non-replica uses (probe meshes etc.) so they
// never collide with replica streams.
constexpr std::uint64_t stream_salt(std::uint64_t purpose, std::uint64_t index) {
  return (purpose << 48) | (index & 0xffffffffffffULL);
}

}  // namespace hjbtk
