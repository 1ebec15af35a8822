#include "rng.hpp"

#include <cmath>

namespace hjbtk {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline double u64_to_open_unit(std::uint64_t v) {
  // 53 random bits plus a half-ulp offset: strictly inside (0,1).
  return (static_cast<double>(v >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> CounterRng::philox_block(std::array<std::uint32_t, 4> ctr,
                                                      std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

CounterRng::CounterRng(std::uint64_t master_seed, std::uint64_t stream)
    : key_{static_cast<std::uint32_t>(master_seed),
           static_cast<std::uint32_t>(master_seed >> 32)},
      stream_(stream) {}

void CounterRng::refill() {
  const std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(block_index_),
      static_cast<std::uint32_t>(block_index_ >> 32),
      static_cast<std::uint32_t>(stream_),
      static_cast<std::uint32_t>(stream_ >> 32),
  };
  const auto out = philox_block(ctr, key_);
  ++block_index_;
  const std::uint64_t a = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
  const std::uint64_t b = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
  uni_buf_ = {u64_to_open_unit(a), u64_to_open_unit(b)};
  uni_left_ = 2;
}

double CounterRng::uniform() {
  if (uni_left_ == 0) refill();
  return uni_buf_[2 - uni_left_--];
}

double CounterRng::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  cached_normal_ = r * std::sin(theta);
  has_cached_normal_ = true;
  return r * std::cos(theta);
}

}  // namespace hjbtk
